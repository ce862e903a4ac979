//! Closed-form evaluators for the named bounds: the piecewise exponent
//! g(alpha, N), the two-product right-hand side of the general theorem, the
//! proof's v-selectors, and the classical comparison bounds (Gal,
//! Dyer-Harman, the Harman-conjecture floor, and the two extremal
//! lower-bound shapes).
//!
//! All logarithms are natural and [.] is floor. N is accepted as a real of
//! at least 3 so that reference points like N = e^e are representable
//! exactly. Constants the source material leaves unspecified (C, C_eps, c,
//! c-hat, tau_0, j_0) are explicit user parameters with documented defaults.

use crate::error::{Error, Result};
use crate::weights::WeightSequence;

/// Parameter bag for the bound evaluators.
///
/// Defaults: C = C_eps = c = 1, c_hat = 4 (its own stated floor), tau0 = 0.9,
/// j0 = 3, xi = 2, epsilon = 1.
#[derive(Clone, Copy, Debug)]
pub struct BoundParams {
    pub alpha: f64,
    pub n: u64,
    /// xi > 1/log 2; enters r_N = [xi log N] + kappa(t).
    pub xi: f64,
    pub epsilon: f64,
    /// The constant C multiplying sum t_l^2 in the exponential term.
    pub c_big: f64,
    /// C_eps of the main bound.
    pub c_eps: f64,
    /// Small-c constant of the comparison bounds.
    pub c_small: f64,
    /// c-hat; at least 4.
    pub c_hat: f64,
    /// Fallback weight for the v-selector at small N.
    pub tau0: f64,
    /// Small-index cutoff of the proof's products; never quantified in the
    /// source, exposed as a parameter.
    pub j0: usize,
}

impl BoundParams {
    pub fn new(alpha: f64, n: u64) -> Result<Self> {
        let p = BoundParams {
            alpha,
            n,
            xi: 2.0,
            epsilon: 1.0,
            c_big: 1.0,
            c_eps: 1.0,
            c_small: 1.0,
            c_hat: 4.0,
            tau0: 0.9,
            j0: 3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::NTooSmall { n: self.n, min: 3 });
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::AlphaOutOfRange {
                alpha: self.alpha,
                required: "(0, 1]",
            });
        }
        if self.xi * std::f64::consts::LN_2 <= 1.0 {
            return Err(Error::Precondition(format!(
                "xi = {} must exceed 1/log 2 = {:.6}",
                self.xi,
                1.0 / std::f64::consts::LN_2
            )));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
        for (name, v) in [
            ("C", self.c_big),
            ("C_eps", self.c_eps),
            ("c", self.c_small),
            ("c_hat", self.c_hat),
        ] {
            if v <= 0.0 {
                return Err(Error::Precondition(format!(
                    "constant {name} must be positive"
                )));
            }
        }
        if self.c_hat < 4.0 {
            return Err(Error::Precondition("c_hat is at least 4".into()));
        }
        if !(self.tau0 > 0.0 && self.tau0 < 1.0) {
            return Err(Error::Precondition("tau0 must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

fn check_n(n: f64) -> Result<()> {
    if !n.is_finite() || n < 3.0 {
        return Err(Error::NTooSmall {
            n: n.max(0.0) as u64,
            min: 3,
        });
    }
    Ok(())
}

/// The exponent g(alpha, N) of the main bound:
///
/// * 1/2 < alpha < 1:
///   (8/(1-alpha) + 16 * 2^{-alpha} / sqrt(2 alpha - 1)) times
///   (log N)^{1-alpha} (log log N)^{-alpha}, plus
///   (1/(1-alpha)) (log N)^{(1-alpha)/2};
/// * 0 < alpha <= 1/2 (the boundary belongs here):
///   50 alpha (log N log log N)^{1/2} + (1 - 2 alpha) log N.
pub fn g_bound(alpha: f64, n: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            required: "(0, 1)",
        });
    }
    let ln = n.ln();
    let lln = ln.ln();
    if alpha > 0.5 {
        let lead = 8.0 / (1.0 - alpha) + 16.0 * 2f64.powf(-alpha) / (2.0 * alpha - 1.0).sqrt();
        Ok(lead * ln.powf(1.0 - alpha) * lln.powf(-alpha)
            + ln.powf((1.0 - alpha) / 2.0) / (1.0 - alpha))
    } else {
        Ok(50.0 * alpha * (ln * lln).sqrt() + (1.0 - 2.0 * alpha) * ln)
    }
}

/// r_N = [xi log N] + kappa(t).
pub fn r_index(t: &WeightSequence, xi: f64, n: u64) -> Result<usize> {
    if n < 3 {
        return Err(Error::NTooSmall { n, min: 3 });
    }
    if xi * std::f64::consts::LN_2 <= 1.0 {
        return Err(Error::Precondition(format!(
            "xi = {xi} must exceed 1/log 2"
        )));
    }
    Ok((xi * (n as f64).ln()).floor() as usize + t.kappa())
}

/// The two-product-plus-exponential right-hand side of the general theorem:
///
///   prod_{j<=r_N} (1 - v_j)^{-1} (1 - v_j^{-1} tau_j^2)^{-1}
///   * prod_{k=r_N+1}^{N-1} (1 - v_{r_N}^{-1} tau_k^2)^{-1}
///   + exp(C * sum_{l<=N-1} t_l^2),
///
/// with tau = eta(t) rearranged into decreasing order. (The source displays
/// v_{r(N)} in the second product; it is read as v_{r_N}, a presumed typo.)
pub fn th4_rhs(t: &WeightSequence, v: &[f64], xi: f64, c_big: f64, n: u64) -> Result<f64> {
    let r_n = r_index(t, xi, n)?;
    if v.len() != r_n {
        return Err(Error::LengthMismatch {
            left: v.len(),
            right: r_n,
            context: "v-selector vs r_N",
        });
    }
    if c_big <= 0.0 {
        return Err(Error::Precondition("constant C must be positive".into()));
    }
    let prefix_len = r_n.max(n as usize - 1);
    let (tau, _) = t.eta().decreasing_prefix(prefix_len)?;
    for j in 0..r_n {
        if !(v[j] > 0.0 && v[j] < 1.0) {
            return Err(Error::Precondition(format!(
                "v_{} = {} outside (0, 1)",
                j + 1,
                v[j]
            )));
        }
        if j > 0 && v[j] > v[j - 1] {
            return Err(Error::Precondition(format!(
                "v is not decreasing at index {}",
                j + 1
            )));
        }
        if v[j] <= tau[j] * tau[j] {
            return Err(Error::Precondition(format!(
                "v_{} = {} must exceed tau_{}^2 = {}",
                j + 1,
                v[j],
                j + 1,
                tau[j] * tau[j]
            )));
        }
    }
    let mut product = 1.0f64;
    for j in 0..r_n {
        product *= 1.0 / (1.0 - v[j]);
        product *= 1.0 / (1.0 - tau[j] * tau[j] / v[j]);
    }
    if r_n >= 1 {
        let v_last = v[r_n - 1];
        for &tk in tau.iter().take(n as usize - 1).skip(r_n) {
            let tk2 = tk * tk;
            if tk2 >= v_last {
                return Err(Error::Precondition(format!(
                    "a tail tau_k^2 = {tk2} reaches v_r = {v_last}; second product diverges"
                )));
            }
            product *= 1.0 / (1.0 - tk2 / v_last);
        }
    }
    let mut tail = 0.0;
    for l in 1..n as usize {
        let tl = t.get_or_zero(l)?;
        tail += tl * tl;
    }
    Ok(product + (c_big * tail).exp())
}

/// The proof's v-selector:
/// * alpha > 1/2: v_j = max(tau_j, (2 alpha - 1)^{-1/2} tau_{r_N});
/// * alpha = 1/2: v_j = max(tau_j, sqrt(log log N / log N));
///
/// with tau = eta(t) rearranged decreasing. When the selected vector fails
/// the preconditions of [`th4_rhs`] (N too small), every entry falls back to
/// `params.tau0`; an infeasible tau0 is rejected.
pub fn default_v(alpha: f64, n: u64, t: &WeightSequence, params: &BoundParams) -> Result<Vec<f64>> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            required: "[1/2, 1)",
        });
    }
    let r_n = r_index(t, params.xi, n)?;
    let (tau, _) = t.eta().decreasing_prefix(r_n.max(1))?;
    let floor = if alpha > 0.5 {
        (2.0 * alpha - 1.0).powf(-0.5) * tau[r_n - 1]
    } else {
        let ln = (n as f64).ln();
        (ln.ln() / ln).sqrt()
    };
    let candidate: Vec<f64> = (0..r_n).map(|j| tau[j].max(floor)).collect();
    let feasible = candidate
        .iter()
        .zip(&tau)
        .all(|(&v, &tj)| v < 1.0 && v > tj * tj);
    if feasible {
        return Ok(candidate);
    }
    let tau0 = params.tau0;
    let ok = (0..r_n).all(|j| tau0 < 1.0 && tau0 > tau[j] * tau[j]);
    if !ok {
        return Err(Error::Precondition(format!(
            "fallback tau0 = {tau0} violates tau_j^2 < v_j < 1"
        )));
    }
    Ok(vec![tau0; r_n])
}

/// Gal's bound c (log log N)^2.
pub fn gal_bound(n: f64, c: f64) -> Result<f64> {
    check_n(n)?;
    Ok(c * n.ln().ln().powi(2))
}

/// Dyer-Harman: C exp(c log N / log log N).
pub fn dyer_harman_bound(n: f64, c_big: f64, c_small: f64) -> Result<f64> {
    check_n(n)?;
    Ok(c_big * (c_small * n.ln() / n.ln().ln()).exp())
}

/// The intermediate-range bound c(alpha) exp((log N)^{(4-4 alpha)/(3-2 alpha)}).
pub fn dh_intermediate(alpha: f64, n: f64, c_of_alpha: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            required: "(1/2, 1)",
        });
    }
    let expo = (4.0 - 4.0 * alpha) / (3.0 - 2.0 * alpha);
    Ok(c_of_alpha * n.ln().powf(expo).exp())
}

/// The floor disproving the conjectured replacement:
/// exp(2 sqrt(log N / log log N)), no free constant.
pub fn harman_floor(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok((2.0 * (n.ln() / n.ln().ln()).sqrt()).exp())
}

/// Lower-bound shape of the square-free example:
/// exp((c/(1-alpha)) (log N)^{1-alpha} (log log N)^{-alpha}).
pub fn squarefree_lower_bound(alpha: f64, n: f64, c: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            required: "(0, 1)",
        });
    }
    let ln = n.ln();
    Ok((c / (1.0 - alpha) * ln.powf(1.0 - alpha) * ln.ln().powf(-alpha)).exp())
}

/// Lower-bound shape of the first-primes example for alpha < 1/2:
/// c (log N)^{-2 alpha} N^{1 - 2 alpha}.
pub fn primes_lower_bound(alpha: f64, n: f64, c: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            required: "(0, 1/2)",
        });
    }
    Ok(c * n.ln().powf(-2.0 * alpha) * n.powf(1.0 - 2.0 * alpha))
}
