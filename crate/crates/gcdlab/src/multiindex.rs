//! Sparse multi-index arithmetic and the bijection n = p^beta between
//! positive integers and prime-exponent vectors.
//!
//! A multi-index is a finitely supported vector of nonnegative integer
//! exponents, stored sparsely as position -> exponent with strictly positive
//! exponents only. The empty map is the multi-index of n = 1.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::weights::WeightSequence;

/// Sparse exponent vector; positions are 1-based prime indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: BTreeMap<u32, u32>,
}

impl MultiIndex {
    /// The empty multi-index (the factorization of 1).
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds from (position, exponent) pairs. Zero exponents are dropped,
    /// position 0 is rejected, repeated positions accumulate.
    pub fn from_entries<I: IntoIterator<Item = (u32, u32)>>(entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (pos, exp) in entries {
            if pos == 0 {
                return Err(Error::Precondition(
                    "multi-index positions are 1-based; got position 0".into(),
                ));
            }
            if exp > 0 {
                *map.entry(pos).or_insert(0) += exp;
            }
        }
        Ok(MultiIndex { entries: map })
    }

    /// The basis multi-index e_j.
    pub fn unit(j: u32) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(j, 1);
        MultiIndex { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exponent at `position` (0 when absent).
    pub fn exponent(&self, position: u32) -> u32 {
        self.entries.get(&position).copied().unwrap_or(0)
    }

    /// supp(beta): the positions carrying a positive exponent, ascending.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// R(beta): the largest position in the support, 0 for the empty map.
    pub fn rank(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// Sum of all exponents.
    pub fn degree(&self) -> u64 {
        self.entries.values().map(|&e| e as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().map(|(&p, &e)| (p, e))
    }

    /// Coordinatewise partial order: beta <= mu.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.iter().all(|(p, e)| e <= other.exponent(p))
    }

    /// Coordinatewise |beta - mu|, always a multi-index.
    pub fn abs_diff(&self, other: &MultiIndex) -> MultiIndex {
        let mut entries = BTreeMap::new();
        for (p, e) in self.iter() {
            let d = e.abs_diff(other.exponent(p));
            if d > 0 {
                entries.insert(p, d);
            }
        }
        for (p, e) in other.iter() {
            if self.exponent(p) == 0 && e > 0 {
                entries.insert(p, e);
            }
        }
        MultiIndex { entries }
    }

    /// beta + k e_j.
    pub fn add_units(&self, j: u32, k: u32) -> MultiIndex {
        let mut out = self.clone();
        if k > 0 {
            *out.entries.entry(j).or_insert(0) += k;
        }
        out
    }

    /// beta - e_j when e_j <= beta.
    pub fn sub_unit(&self, j: u32) -> Option<MultiIndex> {
        let e = self.exponent(j);
        if e == 0 {
            return None;
        }
        let mut out = self.clone();
        if e == 1 {
            out.entries.remove(&j);
        } else {
            out.entries.insert(j, e - 1);
        }
        Some(out)
    }

    /// beta with coordinate j zeroed out.
    pub fn without_coordinate(&self, j: u32) -> MultiIndex {
        let mut out = self.clone();
        out.entries.remove(&j);
        out
    }

    /// t^beta = prod over supp of t_j^{beta^(j)}; 1 for the empty map.
    pub fn weight_power(&self, t: &WeightSequence) -> Result<f64> {
        let mut acc = 1.0;
        for (p, e) in self.iter() {
            acc *= t.get(p as usize)?.powi(e as i32);
        }
        Ok(acc)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, e)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}:{e}")?;
        }
        write!(f, "}}")
    }
}

/// Factorizes n over the default prime table.
pub fn factorize(n: u64) -> Result<MultiIndex> {
    factorize_with(PrimeTable::default_table(), n)
}

/// Trial division against `table`; inputs with a prime factor beyond the
/// table are rejected with a diagnostic.
pub fn factorize_with(table: &PrimeTable, n: u64) -> Result<MultiIndex> {
    if n == 0 {
        return Err(Error::ZeroFactorization);
    }
    let mut rest = n;
    let mut entries = BTreeMap::new();
    for (i, &p) in table.as_slice().iter().enumerate() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            entries.insert(i as u32 + 1, e);
        }
    }
    if rest > 1 {
        // rest is prime (every divisor up to sqrt was stripped, or the table
        // ended first); it must still sit inside the table.
        match table.position_of(rest) {
            Some(pos) => {
                *entries.entry(pos as u32).or_insert(0) += 1;
            }
            None => {
                return Err(Error::FactorBeyondTable {
                    remainder: rest,
                    largest: table.largest(),
                });
            }
        }
    }
    Ok(MultiIndex { entries })
}

/// p^beta over the default prime table.
pub fn compose(beta: &MultiIndex) -> Result<u64> {
    compose_with(PrimeTable::default_table(), beta)
}

/// p^beta; overflow is reported explicitly, never silently wrapped.
pub fn compose_with(table: &PrimeTable, beta: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    for (pos, e) in beta.iter() {
        let p = table.get(pos as usize)?;
        for _ in 0..e {
            acc = acc.checked_mul(p).ok_or(Error::Overflow {
                context: "composing a multi-index into an integer",
            })?;
        }
    }
    Ok(acc)
}
