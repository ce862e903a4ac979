//! Weight sequences t in (0,1)^infinity, the doubling map eta, and the
//! threshold index kappa(t).
//!
//! A sequence is either an explicit finite list (supplied already decreasing)
//! or the power law t_j = p_j^{-alpha}. Applying `eta` wraps the source; the
//! resulting sequence need not be decreasing any more, which is why
//! [`WeightSequence::decreasing_prefix`] returns the sorting permutation
//! alongside the values.

use std::fmt;
use std::path::Path;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// eta(x) = 2x for 0 < x < 1/2, x for 1/2 <= x < 1.
#[inline]
pub fn eta_map(x: f64) -> f64 {
    if x < 0.5 {
        2.0 * x
    } else {
        x
    }
}

#[derive(Clone, Debug)]
enum Source {
    Explicit(Vec<f64>),
    PowerLaw { alpha: f64 },
}

/// A positive weight sequence in (0,1)^infinity, lazily materialized.
#[derive(Debug)]
pub struct WeightSequence {
    source: Source,
    /// How many times eta has been applied on top of the source.
    eta_depth: u32,
    /// Memoized power-law entries (final values, eta already applied), so
    /// concurrent readers observe identical floats.
    cache: Mutex<Vec<f64>>,
}

impl Clone for WeightSequence {
    fn clone(&self) -> Self {
        WeightSequence {
            source: self.source.clone(),
            eta_depth: self.eta_depth,
            cache: Mutex::new(Vec::new()),
        }
    }
}

impl WeightSequence {
    /// The power law t_j = p_j^{-alpha} for 0 < alpha <= 1.
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange {
                alpha,
                required: "(0, 1]",
            });
        }
        Ok(WeightSequence {
            source: Source::PowerLaw { alpha },
            eta_depth: 0,
            cache: Mutex::new(Vec::new()),
        })
    }

    /// An explicit list; must already be decreasing with entries in (0,1).
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v < 1.0) || !v.is_finite() {
                return Err(Error::WeightOutOfRange {
                    index: i + 1,
                    value: v,
                });
            }
            if i > 0 && values[i - 1] < v {
                return Err(Error::WeightsNotDecreasing {
                    index: i + 1,
                    prev_index: i,
                    prev: values[i - 1],
                    value: v,
                });
            }
        }
        Ok(WeightSequence {
            source: Source::Explicit(values),
            eta_depth: 0,
            cache: Mutex::new(Vec::new()),
        })
    }

    /// Loads an explicit list from a plain-text file, one decimal per line.
    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                content: line.to_string(),
            })?;
            values.push(v);
        }
        WeightSequence::explicit(values)
    }

    /// The sequence eta(t), evaluated coordinatewise and lazily.
    pub fn eta(&self) -> WeightSequence {
        WeightSequence {
            source: self.source.clone(),
            eta_depth: self.eta_depth + 1,
            cache: Mutex::new(Vec::new()),
        }
    }

    /// alpha when the source is a power law.
    pub fn alpha(&self) -> Option<f64> {
        match self.source {
            Source::PowerLaw { alpha } => Some(alpha),
            Source::Explicit(_) => None,
        }
    }

    pub fn eta_depth(&self) -> u32 {
        self.eta_depth
    }

    /// Length of the explicit list, `None` for power laws.
    pub fn explicit_len(&self) -> Option<usize> {
        match &self.source {
            Source::Explicit(v) => Some(v.len()),
            Source::PowerLaw { .. } => None,
        }
    }

    fn apply_eta(&self, mut x: f64) -> f64 {
        for _ in 0..self.eta_depth {
            x = eta_map(x);
        }
        x
    }

    /// t_j (1-based). Undefined positions are an error: beyond the list for
    /// explicit sources, beyond the prime table for power laws.
    pub fn get(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(Error::WeightUndefined { index: 0, len: 0 });
        }
        match &self.source {
            Source::Explicit(values) => match values.get(j - 1) {
                Some(&v) => Ok(self.apply_eta(v)),
                None => Err(Error::WeightUndefined {
                    index: j,
                    len: values.len(),
                }),
            },
            Source::PowerLaw { alpha } => {
                {
                    let cache = self.cache.lock().expect("weight cache poisoned");
                    if j <= cache.len() {
                        return Ok(cache[j - 1]);
                    }
                }
                let table = PrimeTable::default_table();
                table.get(j)?; // surface the out-of-table error eagerly
                let mut cache = self.cache.lock().expect("weight cache poisoned");
                while cache.len() < j {
                    let q = table.get(cache.len() + 1)? as f64;
                    cache.push(self.apply_eta(q.powf(-alpha)));
                }
                Ok(cache[j - 1])
            }
        }
    }

    /// Like [`get`](Self::get), but an explicit list is read as a c_0
    /// sequence: positions past its end are 0. Power laws still error beyond
    /// the prime table.
    pub fn get_or_zero(&self, j: usize) -> Result<f64> {
        match (&self.source, self.get(j)) {
            (Source::Explicit(_), Err(Error::WeightUndefined { .. })) => Ok(0.0),
            (_, r) => r,
        }
    }

    /// kappa(t): 0 if t_1 < 1/2, otherwise max{j : t_j >= 1/2}.
    ///
    /// The base sequence is decreasing by construction, so {j : t_j >= 1/2}
    /// stays a prefix even after eta layers (eta^d(x) >= 1/2 iff x >=
    /// 2^{-d-1}).
    pub fn kappa(&self) -> usize {
        let mut k = 0;
        loop {
            match self.get_or_zero(k + 1) {
                Ok(v) if v >= 0.5 => k += 1,
                _ => return k,
            }
        }
    }

    /// First `len` entries sorted in descending order, together with the
    /// permutation of original 1-based positions that produced them.
    /// Explicit lists are zero-extended past their end.
    pub fn decreasing_prefix(&self, len: usize) -> Result<(Vec<f64>, Vec<usize>)> {
        let mut indexed: Vec<(usize, f64)> = (1..=len)
            .map(|j| self.get_or_zero(j).map(|v| (j, v)))
            .collect::<Result<_>>()?;
        indexed.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let values = indexed.iter().map(|&(_, v)| v).collect();
        let permutation = indexed.iter().map(|&(j, _)| j).collect();
        Ok((values, permutation))
    }

    /// Short provenance label for reports.
    pub fn describe(&self) -> String {
        let base = match &self.source {
            Source::Explicit(v) => format!("explicit[{}]", v.len()),
            Source::PowerLaw { alpha } => format!("p_j^-{alpha}"),
        };
        match self.eta_depth {
            0 => base,
            1 => format!("eta({base})"),
            d => format!("eta^{d}({base})"),
        }
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}
