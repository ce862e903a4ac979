//! Dilated sawtooth machinery: the Franel-Landau covariance, Koksma
//! resonance sums, exact L^2 norms of the maximal partial-sum operator, and
//! the Carleson-Hunt ratio experiment.
//!
//! The dilated function is fixed to the sawtooth phi(x) = {x} - 1/2, whose
//! piecewise-linear structure makes every integral here exactly computable.
//! General BV or Lip-1/2 dilations have no finite exact representation and
//! stay outside the exact path.

use std::path::Path;

use rayon::prelude::*;

use crate::envelope::{envelope_sq_integral, Line};
use crate::error::{Error, Result};
use crate::gcdcore::{gcd, IntegerSequence};
use crate::kahan::KahanSum;

/// Exact maximal-function path is restricted to this many terms; the cell
/// count grows with sum n_k.
pub const MAXIMAL_EXACT_LIMIT: usize = 64;

/// The sawtooth phi(x) = {x} - 1/2.
#[inline]
pub fn sawtooth(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// A dilation system: strictly increasing frequencies n_k with coefficients
/// c_k.
#[derive(Clone, Debug)]
pub struct DilatedSystem {
    seq: IntegerSequence,
    coeffs: Vec<f64>,
}

impl DilatedSystem {
    pub fn new(seq: IntegerSequence, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != seq.len() {
            return Err(Error::LengthMismatch {
                left: seq.len(),
                right: coeffs.len(),
                context: "frequencies vs coefficients",
            });
        }
        Ok(DilatedSystem { seq, coeffs })
    }

    /// Loads a system from a two-column text file: `n_k c_k` per line.
    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut ns = Vec::new();
        let mut cs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = || Error::Parse {
                line: i + 1,
                content: line.to_string(),
            };
            let n: u64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let c: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if parts.next().is_some() {
                return Err(bad());
            }
            ns.push(n);
            cs.push(c);
        }
        DilatedSystem::new(IntegerSequence::new(ns)?, cs)
    }

    pub fn seq(&self) -> &IntegerSequence {
        &self.seq
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff_sq_sum(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &c in &self.coeffs {
            acc.add(c * c);
        }
        acc.value()
    }
}

/// Franel-Landau: integral over [0,1] of phi(m x) phi(n x) dx
/// = gcd(m, n)^2 / (12 m n).
pub fn franel_landau(m: u64, n: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("franel_landau needs m, n >= 1".into()));
    }
    let g = gcd(m, n) as f64;
    Ok(g * g / (12.0 * m as f64 * n as f64))
}

/// Exact || sum c_k phi(n_k x) ||^2 = (1/12) sum_{k,l} c_k c_l gcd^2/(n_k n_l).
pub fn sawtooth_l2_sq(sys: &DilatedSystem) -> f64 {
    let ns = sys.seq.values();
    let mut acc = KahanSum::new();
    for (&nk, &ck) in ns.iter().zip(&sys.coeffs) {
        for (&nl, &cl) in ns.iter().zip(&sys.coeffs) {
            let g = gcd(nk, nl) as f64;
            acc.add(ck * cl * g * g / (nk as f64 * nl as f64));
        }
    }
    acc.value() / 12.0
}

/// Tail sum_{j >= start} j^{-p} by direct summation plus an Euler-Maclaurin
/// remainder; returns (value, certified error bound).
pub fn hurwitz_tail(p: f64, start: u64) -> (f64, f64) {
    debug_assert!(p > 1.0);
    let cutoff = start.max(2_048);
    let mut acc = KahanSum::new();
    for j in start..cutoff {
        acc.add((j as f64).powf(-p));
    }
    // Euler-Maclaurin from m = cutoff:
    //   sum_{j>=m} j^{-p} = m^{1-p}/(p-1) + m^{-p}/2 + p m^{-p-1}/12
    //                        - p(p+1)(p+2) m^{-p-3}/720 + ...
    // with the error bounded by the first omitted term.
    let m = cutoff as f64;
    acc.add(m.powf(1.0 - p) / (p - 1.0));
    acc.add(m.powf(-p) / 2.0);
    acc.add(p * m.powf(-p - 1.0) / 12.0);
    acc.add(-p * (p + 1.0) * (p + 2.0) * m.powf(-p - 3.0) / 720.0);
    let bound = p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * m.powf(-p - 5.0) / 30_240.0;
    (acc.value(), bound)
}

/// Koksma resonance sum sum_{j1, j2 >= J+1} (j1 j2)^{-s} [j1 v = j2 w].
///
/// With g = gcd(v, w) the solutions are j1 = j w/g, j2 = j v/g, so the sum
/// collapses to (g^2/(v w))^s * sum_{j >= ceil((J+1) g / v)} j^{-2s}.
pub fn resonance_sum(v: u64, w: u64, j_min: u64, s: f64) -> Result<f64> {
    if v == 0 || v > w {
        return Err(Error::Precondition(
            "resonance_sum needs 1 <= v <= w".into(),
        ));
    }
    if s.is_nan() || s <= 0.5 {
        return Err(Error::Precondition(
            "resonance_sum needs s > 1/2 for convergence".into(),
        ));
    }
    let g = gcd(v, w);
    let j_star = ((j_min + 1) * g).div_ceil(v);
    let ratio = (g as f64) * (g as f64) / (v as f64 * w as f64);
    let (tail, _bound) = hurwitz_tail(2.0 * s, j_star.max(1));
    Ok(ratio.powf(s) * tail)
}

/// Exact integral over [0,1] of (max_{1<=M<=N} |sum_{k<=M} c_k phi(n_k x)|)^2.
///
/// Every prefix sum is piecewise linear with breakpoints at a/n_k; within a
/// cell the maximal function is the upper envelope of the 2N signed prefix
/// lines, and its square integrates in closed form.
pub fn maximal_l2_sq(sys: &DilatedSystem) -> Result<f64> {
    let n_terms = sys.len();
    if n_terms > MAXIMAL_EXACT_LIMIT {
        return Err(Error::SystemTooLarge {
            n: n_terms,
            max: MAXIMAL_EXACT_LIMIT,
        });
    }
    if n_terms == 0 {
        return Err(Error::EmptySequence);
    }
    let ns = sys.seq.values();
    // sorted, deduped breakpoints a/n_k covering [0, 1]
    let mut cuts: Vec<f64> = Vec::with_capacity(ns.iter().map(|&n| n as usize + 1).sum());
    for &nk in ns {
        for a in 0..=nk {
            cuts.push(a as f64 / nk as f64);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let cells: Vec<(f64, f64)> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    let partials: Vec<f64> = cells
        .par_iter()
        .map(|&(lo, hi)| {
            let mid = 0.5 * (lo + hi);
            let mut lines = Vec::with_capacity(2 * n_terms);
            let mut slope = 0.0;
            let mut intercept = 0.0;
            for (&n_raw, &c) in ns.iter().zip(&sys.coeffs) {
                let nk = n_raw as f64;
                slope += c * nk;
                intercept += c * (-(nk * mid).floor() - 0.5);
                lines.push(Line { slope, intercept });
                lines.push(Line {
                    slope: -slope,
                    intercept: -intercept,
                });
            }
            envelope_sq_integral(&lines, lo, hi)
        })
        .collect();
    let mut acc = KahanSum::new();
    for p in partials {
        acc.add(p);
    }
    Ok(acc.value())
}

/// One row of the Carleson-Hunt ratio experiment.
#[derive(Clone, Copy, Debug)]
pub struct ChRatioRow {
    pub n: usize,
    pub maximal_l2_sq: f64,
    pub coeff_sq_sum: f64,
    /// maximal_l2_sq / (sum c^2 * (log log N)^4)
    pub ratio_to_cloglog4: f64,
    /// sawtooth_l2_sq / sum c^2; a lower witness for lambda_max / 12 of the
    /// alpha = 1 GCD matrix via Franel-Landau.
    pub lower_witness: f64,
}

/// Evaluates the maximal inequality's two sides for one system.
pub fn ch_ratio(sys: &DilatedSystem) -> Result<ChRatioRow> {
    let n = sys.len();
    if n < 3 {
        return Err(Error::NTooSmall {
            n: n as u64,
            min: 3,
        });
    }
    let maximal = maximal_l2_sq(sys)?;
    let csq = sys.coeff_sq_sum();
    let lll = (n as f64).ln().ln();
    Ok(ChRatioRow {
        n,
        maximal_l2_sq: maximal,
        coeff_sq_sum: csq,
        ratio_to_cloglog4: maximal / (csq * lll.powi(4)),
        lower_witness: sawtooth_l2_sq(sys) / csq,
    })
}
