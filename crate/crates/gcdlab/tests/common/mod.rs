//! Independent oracles and instance generators shared by the integration
//! suites. Everything here deliberately avoids the library's computation
//! paths: factorization by bare trial division, eigenvalues by
//! characteristic polynomial or power method, integrals by Gauss cells or
//! dense grids.

#![allow(dead_code)]

use rand::Rng;

use gcdlab::dilated::{sawtooth, DilatedSystem};
use gcdlab::multiindex::MultiIndex;
use gcdlab::spectral::GcdMatrix;
use gcdlab::weights::WeightSequence;
use gcdlab::{IndexSet, IntegerSequence};

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

// ---------------------------------------------------------------------------
// factorization oracle

/// Trial division with its own prime enumeration; returns (position,
/// exponent) pairs without touching the library's prime table.
pub fn trial_factorize(mut n: u64) -> Vec<(u32, u32)> {
    assert!(n >= 1);
    let mut primes: Vec<u64> = Vec::new();
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while n > 1 {
        let is_prime = primes
            .iter()
            .take_while(|&&p| p * p <= d)
            .all(|&p| d % p != 0);
        if is_prime {
            primes.push(d);
            if n % d == 0 {
                let mut e = 0u32;
                while n % d == 0 {
                    n /= d;
                    e += 1;
                }
                out.push((primes.len() as u32, e));
            }
        }
        d += 1;
        if d * d > n && n > 1 {
            // n is prime; find its position by continuing the enumeration
            while d <= n {
                let is_prime = primes
                    .iter()
                    .take_while(|&&p| p * p <= d)
                    .all(|&p| d % p != 0);
                if is_prime {
                    primes.push(d);
                    if d == n {
                        out.push((primes.len() as u32, 1));
                        n = 1;
                        break;
                    }
                }
                d += 1;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// eigenvalue oracles

/// Characteristic-polynomial extreme eigenvalues for order <= 4, via
/// Newton's identities for the coefficients and damped Newton iteration
/// from above the spectrum (monotone for a monic polynomial with all real
/// roots).
pub fn charpoly_extremes(m: &GcdMatrix) -> (f64, f64) {
    let (lo, hi) = charpoly_extremes_impl(m);
    (lo.0, hi.0)
}

/// Like [`charpoly_extremes`], but returns `None` when the polynomial route
/// cannot certify ~1e-11 accuracy: |p'(root)| is the product of gaps to the
/// other eigenvalues, so a small derivative flags a clustered spectrum where
/// coefficient rounding (~1e-14) blows up into the root location.
pub fn charpoly_extremes_guarded(m: &GcdMatrix) -> Option<(f64, f64)> {
    let (lo, hi) = charpoly_extremes_impl(m);
    if lo.1 < 1e-3 || hi.1 < 1e-3 {
        return None;
    }
    Some((lo.0, hi.0))
}

fn charpoly_extremes_impl(m: &GcdMatrix) -> ((f64, f64), (f64, f64)) {
    let n = m.order();
    assert!(n <= 4);
    let hi = charpoly_largest(m.as_slice(), n);
    let neg = charpoly_largest(&m.as_slice().iter().map(|x| -x).collect::<Vec<_>>(), n);
    ((-neg.0, neg.1), hi)
}

/// Largest root of det(xI - A) together with |p'(root)|.
fn charpoly_largest(a: &[f64], n: usize) -> (f64, f64) {
    // power traces p_k = tr(A^k), k = 1..n
    let mut pows = vec![0.0; n + 1];
    let mut cur: Vec<f64> = a.to_vec();
    for k in 1..=n {
        pows[k] = (0..n).map(|i| cur[i * n + i]).sum();
        if k < n {
            let mut next = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += cur[i * n + l] * a[l * n + j];
                    }
                    next[i * n + j] = s;
                }
            }
            cur = next;
        }
    }
    // elementary symmetric functions from Newton's identities
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for k in 1..=n {
        let mut s = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * e[k - i] * pows[i];
        }
        e[k] = s / k as f64;
    }
    // char(x) = sum_{k=0..n} (-1)^k e_k x^{n-k}
    let coeffs: Vec<f64> = (0..=n)
        .map(|k| if k % 2 == 0 { e[k] } else { -e[k] })
        .collect();
    let eval = |x: f64| {
        let mut v = 0.0;
        for c in &coeffs {
            v = v * x + c;
        }
        v
    };
    let deriv = |x: f64| {
        let mut v = 0.0;
        for (k, c) in coeffs.iter().enumerate().take(n) {
            v = v * x + (n - k) as f64 * c;
        }
        v
    };
    // Gershgorin start, then Newton from above
    let mut start = f64::NEG_INFINITY;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| a[i * n + j].abs()).sum();
        start = start.max(row);
    }
    let mut x = start + 1.0;
    for _ in 0..500 {
        let f = eval(x);
        let d = deriv(x);
        if d == 0.0 {
            break;
        }
        let next = x - f / d;
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    (x, deriv(x).abs())
}

/// Random decreasing weights bounded well away from 0 and 1, so generalized
/// GCD matrices built from them have chunky off-diagonals and (generically)
/// separated extreme eigenvalues.
pub fn random_chunky_weights<R: Rng>(rng: &mut R, len: usize) -> WeightSequence {
    let t1: f64 = rng.gen_range(0.3..0.9);
    let rho: f64 = rng.gen_range(0.55..0.85);
    let mut vals = Vec::with_capacity(len);
    let mut t = t1;
    for _ in 0..len {
        vals.push(t.max(1e-12));
        t *= rho;
    }
    WeightSequence::explicit(vals).unwrap()
}

/// Power-method extremes: `iters` iterations for the largest eigenvalue,
/// then `iters` more on (sigma I - M) with sigma just above the estimated
/// top, which converges to the smallest.
pub fn power_method_extremes(m: &GcdMatrix, iters: usize) -> (f64, f64) {
    let ((lo, _, _), (hi, _, _)) = power_method_extremes_impl(m, iters);
    (lo, hi)
}

/// Self-certifying variant: `None` unless both phases reached a Rayleigh
/// plateau (under 1e-12 movement over the second half of the run) with a
/// residual ||Mv - lambda v|| below 1e-9. The start vectors are strictly
/// positive, so by Perron-Frobenius the first phase can only converge to
/// the top; a clustered spectrum keeps the quotient creeping and gets the
/// instance rejected rather than compared against an unconverged oracle.
pub fn power_method_extremes_guarded(m: &GcdMatrix, iters: usize) -> Option<(f64, f64)> {
    let ((lo, lo_step, lo_res), (hi, hi_step, hi_res)) = power_method_extremes_impl(m, iters);
    let scale = hi.abs().max(1.0);
    let ok = |step: f64, res: f64| step <= 1e-12 * scale && res <= 1e-9 * scale;
    if ok(lo_step, lo_res) && ok(hi_step, hi_res) {
        Some((lo, hi))
    } else {
        None
    }
}

/// Returns ((lambda_min, halfway movement, residual), (lambda_max, ...)).
fn power_method_extremes_impl(m: &GcdMatrix, iters: usize) -> ((f64, f64, f64), (f64, f64, f64)) {
    let n = m.order();
    let a = m.as_slice();
    let matvec = |v: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += a[i * n + j] * v[j];
            }
            out[i] = s;
        }
    };
    let rayleigh_and_residual = |v: &[f64]| {
        let mut mv = vec![0.0; n];
        matvec(v, &mut mv);
        let num: f64 = v.iter().zip(&mv).map(|(x, y)| x * y).sum();
        let den: f64 = v.iter().map(|x| x * x).sum();
        let lambda = num / den;
        let res: f64 = v
            .iter()
            .zip(&mv)
            .map(|(x, y)| (y - lambda * x) * (y - lambda * x))
            .sum::<f64>()
            .sqrt()
            / den.sqrt();
        (lambda, res)
    };

    let mut v: Vec<f64> = (0..n)
        .map(|k| 1.0 + 0.37 * ((k as f64 + 1.0) * 2.399_963).sin())
        .collect();
    let mut work = vec![0.0; n];
    let mut halfway = f64::NAN;
    for it in 1..=iters {
        matvec(&v, &mut work);
        let s = work.iter().map(|x| x * x).sum::<f64>().sqrt();
        for k in 0..n {
            v[k] = work[k] / s;
        }
        if it == iters / 2 {
            halfway = rayleigh_and_residual(&v).0;
        }
    }
    let (lambda_max, res_max) = rayleigh_and_residual(&v);
    let top = (lambda_max, (lambda_max - halfway).abs(), res_max);

    let sigma = lambda_max * (1.0 + 1e-6) + 1e-6;
    let mut v: Vec<f64> = (0..n)
        .map(|k| 1.0 + 0.37 * ((k as f64 + 2.0) * 1.839_286).sin())
        .collect();
    let mut halfway = f64::NAN;
    for it in 1..=iters {
        // (sigma I - M) v
        matvec(&v, &mut work);
        let mut s = 0.0;
        for k in 0..n {
            work[k] = sigma * v[k] - work[k];
            s += work[k] * work[k];
        }
        let s = s.sqrt();
        for k in 0..n {
            v[k] = work[k] / s;
        }
        if it == iters / 2 {
            halfway = rayleigh_and_residual(&v).0;
        }
    }
    let (lambda_min, res_min) = rayleigh_and_residual(&v);
    let bottom = (lambda_min, (lambda_min - halfway).abs(), res_min);
    (bottom, top)
}

// ---------------------------------------------------------------------------
// dilated-function oracles

/// Exact integral of phi(m x) phi(n x) over [0,1]: the integrand is
/// piecewise quadratic with breakpoints at a/m and b/n, so per-cell
/// two-point Gauss (interior nodes, exact through cubics) sums it exactly.
pub fn sawtooth_product_integral(m: u64, n: u64) -> f64 {
    let mut cuts: Vec<f64> = Vec::with_capacity((m + n + 2) as usize);
    for a in 0..=m {
        cuts.push(a as f64 / m as f64);
    }
    for b in 0..=n {
        cuts.push(b as f64 / n as f64);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let node = 0.5 / 3f64.sqrt();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let h = hi - lo;
        let mid = 0.5 * (lo + hi);
        let x1 = mid - node * h;
        let x2 = mid + node * h;
        let f = |x: f64| sawtooth(m as f64 * x) * sawtooth(n as f64 * x);
        total += 0.5 * h * (f(x1) + f(x2));
    }
    total
}

/// Midpoint-grid estimate of the squared maximal function of a system.
pub fn grid_maximal_l2_sq(sys: &DilatedSystem, points: usize) -> f64 {
    let ns = sys.seq().values();
    let cs = sys.coeffs();
    let mut acc = 0.0;
    for i in 0..points {
        let x = (i as f64 + 0.5) / points as f64;
        let mut prefix = 0.0;
        let mut best = 0.0f64;
        for (k, &nk) in ns.iter().enumerate() {
            prefix += cs[k] * sawtooth(nk as f64 * x);
            best = best.max(prefix.abs());
        }
        acc += best * best;
    }
    acc / points as f64
}

/// Brute-force resonance sum over j1, j2 <= j_cap plus a certified bound on
/// what the truncation misses.
pub fn brute_resonance(v: u64, w: u64, j_min: u64, s: f64, j_cap: u64) -> (f64, f64) {
    let g = {
        let (mut a, mut b) = (v, w);
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    };
    let mut sum = 0.0;
    // solutions satisfy j1 v = j2 w; enumerate j1 and check divisibility
    for j1 in (j_min + 1)..=j_cap {
        if (j1 * v) % w == 0 {
            let j2 = j1 * v / w;
            if j2 >= j_min + 1 && j2 <= j_cap {
                sum += ((j1 * j2) as f64).powf(-s);
            }
        }
    }
    // solutions beyond the cap have index j > j_cap * g / w in the
    // parametrization (j1, j2) = j (w/g, v/g); bound their sum by an
    // integral comparison
    let j_beyond = (j_cap * g) / w; // first potentially-missed index is j_beyond + 1 or later
    let start = j_beyond.max(1) as f64;
    let p = 2.0 * s;
    let ratio = (g as f64 * g as f64 / (v as f64 * w as f64)).powf(s);
    let tail_bound = ratio * (start.powf(1.0 - p) / (p - 1.0));
    (sum, tail_bound)
}

// ---------------------------------------------------------------------------
// random instance generators

/// Random strictly increasing sequence with values in [1, max_value].
pub fn random_sequence<R: Rng>(rng: &mut R, max_len: usize, max_value: u64) -> IntegerSequence {
    let len = rng.gen_range(1..=max_len);
    let mut vals = std::collections::BTreeSet::new();
    while vals.len() < len {
        vals.insert(rng.gen_range(1..=max_value));
    }
    IntegerSequence::new(vals.into_iter().collect()).unwrap()
}

/// Random set of distinct multi-indices over the first `positions` primes
/// with exponents up to `max_exp` (zero rows collapse to the empty index).
pub fn random_index_set<R: Rng>(
    rng: &mut R,
    max_len: usize,
    positions: u32,
    max_exp: u32,
) -> IndexSet {
    let len = rng.gen_range(1..=max_len);
    let mut members = std::collections::BTreeSet::new();
    while members.len() < len {
        let mut entries = Vec::new();
        for j in 1..=positions {
            let e = rng.gen_range(0..=max_exp);
            if e > 0 && rng.gen_bool(0.6) {
                entries.push((j, e));
            }
        }
        members.insert(MultiIndex::from_entries(entries).unwrap());
    }
    IndexSet::new(members.into_iter().collect()).unwrap()
}

/// Random decreasing geometric-ish weight list of length `len` with
/// t_1 <= cap and a decay that keeps the sandwich products sane.
pub fn random_decreasing_weights<R: Rng>(rng: &mut R, len: usize, cap: f64) -> WeightSequence {
    let t1 = rng.gen_range(0.05..cap);
    let rho = rng.gen_range(0.3..0.8);
    let mut vals = Vec::with_capacity(len);
    let mut t = t1;
    for _ in 0..len {
        vals.push(t.max(1e-12));
        t *= rho;
    }
    WeightSequence::explicit(vals).unwrap()
}

/// Random decreasing weights over `len` positions with kappa(t) < n_members,
/// by rejection.
pub fn random_weights_kappa_below<R: Rng>(
    rng: &mut R,
    len: usize,
    n_members: usize,
) -> WeightSequence {
    loop {
        let allow_big = rng.gen_bool(0.5);
        let cap = if allow_big { 0.95 } else { 0.49 };
        let t = random_decreasing_weights(rng, len, cap);
        if t.kappa() < n_members {
            return t;
        }
    }
}
