//! Exact evaluation of GCD sums over integer tuples, the abstract sums
//! S(t, B) over multi-index sets, and the extremal families.
//!
//! The two evaluation routes are deliberately independent: `gcd_sum` works on
//! integers with a binary gcd and never touches the prime table, while
//! `s_form` goes through factorizations and weight powers. Their agreement is
//! one of the crate's core cross-checks.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::multiindex::{self, MultiIndex};
use crate::primes::PrimeTable;
use crate::weights::WeightSequence;

/// Rows per parallel block in the pair loops. Fixed so that the blockwise
/// compensated sums reduce in the same order regardless of thread count.
pub const ROW_BLOCK: usize = 16;

/// Binary gcd on u64.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// A strictly increasing tuple of distinct positive integers n_1 < ... < n_N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSequence {
    values: Vec<u64>,
}

impl IntegerSequence {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        if values[0] == 0 {
            return Err(Error::NotStrictlyIncreasing { index: 1 });
        }
        for i in 1..values.len() {
            if values[i] <= values[i - 1] {
                return Err(Error::NotStrictlyIncreasing { index: i + 1 });
            }
        }
        Ok(IntegerSequence { values })
    }

    /// Loads a sequence from a plain-text file, one positive integer per line.
    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                content: line.to_string(),
            })?;
            values.push(v);
        }
        IntegerSequence::new(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An ordered set of N pairwise distinct multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    members: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn new(members: Vec<MultiIndex>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut seen = BTreeSet::new();
        for (i, m) in members.iter().enumerate() {
            if !seen.insert(m.clone()) {
                return Err(Error::DuplicateMember { index: i + 1 });
            }
        }
        Ok(IndexSet { members })
    }

    /// Factorizes every member of an integer sequence.
    pub fn from_integers(seq: &IntegerSequence) -> Result<Self> {
        let members = seq
            .values()
            .iter()
            .map(|&n| multiindex::factorize(n))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(members)
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Union of the members' supports, ascending.
    pub fn support_union(&self) -> BTreeSet<u32> {
        let mut union = BTreeSet::new();
        for m in &self.members {
            union.extend(m.support());
        }
        union
    }
}

/// Materializes the weights needed for a support set into a position-indexed
/// slice, so the pair loops never touch the lazy cache.
pub(crate) fn weight_slice(t: &WeightSequence, support: &BTreeSet<u32>) -> Result<Vec<f64>> {
    let max = support.iter().next_back().copied().unwrap_or(0) as usize;
    let mut w = vec![f64::NAN; max + 1];
    for &j in support {
        w[j as usize] = t.get(j as usize)?;
    }
    Ok(w)
}

/// t^{|a - b|} against a materialized weight slice; merged sparse walk.
pub(crate) fn weight_abs_diff(w: &[f64], a: &MultiIndex, b: &MultiIndex) -> f64 {
    let mut acc = 1.0;
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        match (ia.peek().copied(), ib.peek().copied()) {
            (Some((pa, ea)), Some((pb, eb))) => {
                if pa < pb {
                    acc *= w[pa as usize].powi(ea as i32);
                    ia.next();
                } else if pb < pa {
                    acc *= w[pb as usize].powi(eb as i32);
                    ib.next();
                } else {
                    let d = ea.abs_diff(eb);
                    if d > 0 {
                        acc *= w[pa as usize].powi(d as i32);
                    }
                    ia.next();
                    ib.next();
                }
            }
            (Some((pa, ea)), None) => {
                acc *= w[pa as usize].powi(ea as i32);
                ia.next();
            }
            (None, Some((pb, eb))) => {
                acc *= w[pb as usize].powi(eb as i32);
                ib.next();
            }
            (None, None) => return acc,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange {
            alpha,
            required: "(0, 1]",
        });
    }
    Ok(())
}

/// The GCD sum of Eq. (1): sum over all N^2 ordered pairs of
/// gcd(n_k, n_l)^{2 alpha} / (n_k n_l)^alpha, divided by N when `normalized`.
pub fn gcd_sum(seq: &IntegerSequence, alpha: f64, normalized: bool) -> Result<f64> {
    check_alpha(alpha)?;
    let ns = seq.values();
    let n = ns.len();
    // n^{-alpha} per element; the pair term is gcd^{2 alpha} * inv[k] * inv[l].
    let inv: Vec<f64> = ns.iter().map(|&v| (v as f64).powf(-alpha)).collect();
    let blocks: Vec<KahanSum> = (0..n.div_ceil(ROW_BLOCK))
        .into_par_iter()
        .map(|blk| {
            let mut acc = KahanSum::new();
            let lo = blk * ROW_BLOCK;
            let hi = (lo + ROW_BLOCK).min(n);
            for k in lo..hi {
                for l in 0..n {
                    let g = gcd(ns[k], ns[l]);
                    let gpow = if g == 1 {
                        1.0
                    } else {
                        (g as f64).powf(2.0 * alpha)
                    };
                    acc.add(gpow * inv[k] * inv[l]);
                }
            }
            acc
        })
        .collect();
    let mut total = KahanSum::new();
    for b in blocks {
        total.merge(b);
    }
    let value = total.value();
    Ok(if normalized { value / n as f64 } else { value })
}

/// The abstract sum S(t, B) = (1/N) sum over pairs of t^{|beta_k - beta_l|}
/// (total sum when `normalized` is false).
pub fn s_form(t: &WeightSequence, b: &IndexSet, normalized: bool) -> Result<f64> {
    let w = weight_slice(t, &b.support_union())?;
    let members = b.members();
    let n = members.len();
    let blocks: Vec<KahanSum> = (0..n.div_ceil(ROW_BLOCK))
        .into_par_iter()
        .map(|blk| {
            let mut acc = KahanSum::new();
            let lo = blk * ROW_BLOCK;
            let hi = (lo + ROW_BLOCK).min(n);
            for k in lo..hi {
                for l in 0..n {
                    acc.add(weight_abs_diff(&w, &members[k], &members[l]));
                }
            }
            acc
        })
        .collect();
    let mut total = KahanSum::new();
    for blk in blocks {
        total.merge(blk);
    }
    let value = total.value();
    Ok(if normalized { value / n as f64 } else { value })
}

/// All 2^r square-free products of subsets of the first r primes, sorted.
pub fn extremal_squarefree(r: u32) -> Result<IntegerSequence> {
    if r == 0 {
        return Err(Error::Precondition("squarefree family needs r >= 1".into()));
    }
    if r >= 63 {
        return Err(Error::Overflow {
            context: "enumerating 2^r square-free products",
        });
    }
    let table = PrimeTable::default_table();
    let primes: Vec<u64> = (1..=r as usize)
        .map(|j| table.get(j))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(1usize << r);
    for mask in 0u64..(1u64 << r) {
        let mut prod: u64 = 1;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod = prod.checked_mul(p).ok_or(Error::Overflow {
                    context: "square-free subset product",
                })?;
            }
        }
        values.push(prod);
    }
    values.sort_unstable();
    IntegerSequence::new(values)
}

/// Closed form N * prod_{j<=r} (1 + p_j^{-alpha}) for the un-normalized total
/// sum over the square-free family.
pub fn squarefree_closed_form(r: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if r == 0 {
        return Err(Error::Precondition("squarefree family needs r >= 1".into()));
    }
    let table = PrimeTable::default_table();
    let mut prod = 1.0f64;
    for j in 1..=r as usize {
        prod *= 1.0 + (table.get(j)? as f64).powf(-alpha);
    }
    Ok((1u64 << r) as f64 * prod)
}

/// The first N primes.
pub fn extremal_primes(n: usize) -> Result<IntegerSequence> {
    let table = PrimeTable::default_table();
    let values = (1..=n).map(|j| table.get(j)).collect::<Result<Vec<_>>>()?;
    IntegerSequence::new(values)
}

/// {1, ..., N} (the matrix studied by Hilberdink).
pub fn first_integers(n: u64) -> Result<IntegerSequence> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    IntegerSequence::new((1..=n).collect())
}
