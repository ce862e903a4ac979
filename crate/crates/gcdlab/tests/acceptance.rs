//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the tolerance it ran at. Tolerances are pinned here, not imported
//! from the library, so a library change cannot silently weaken the gate.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gcdlab::bounds::{primes_lower_bound, squarefree_lower_bound};
use gcdlab::canonical::{canonical_reduce, is_kappa_canonical};
use gcdlab::dilated::{franel_landau, maximal_l2_sq, resonance_sum, sawtooth_l2_sq, DilatedSystem};
use gcdlab::gcdcore::{
    extremal_primes, extremal_squarefree, gcd_sum, s_form, squarefree_closed_form, IndexSet,
};
use gcdlab::poisson::{verify_identity, IdentityMethod};
use gcdlab::spectral::{sandwich_bounds, GcdMatrix};
use gcdlab::weights::WeightSequence;
use gcdlab::IntegerSequence;

use common::*;

fn pass(num: u32, name: &str, detail: String) {
    println!("ACCEPTANCE {num:02} {name}: PASS ({detail})");
}

/// Criterion 1: brute-force GCD sum equals the square-free closed form to
/// 1e-10 relative, r in 1..=10, alpha in {0.6, 0.75, 0.9, 1.0}, under 60 s.
#[test]
fn criterion_01_squarefree_closed_form() {
    const TOL: f64 = 1e-10;
    let clock = Instant::now();
    let mut worst = 0.0f64;
    for r in 1..=10u32 {
        let family = extremal_squarefree(r).unwrap();
        assert_eq!(family.len(), 1usize << r);
        for alpha in [0.6, 0.75, 0.9, 1.0] {
            let brute = gcd_sum(&family, alpha, false).unwrap();
            let closed = squarefree_closed_form(r, alpha).unwrap();
            let err = rel_err(brute, closed);
            assert!(
                err <= TOL,
                "r={r} alpha={alpha}: brute={brute} closed={closed} rel={err:e}"
            );
            worst = worst.max(err);
        }
    }
    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    pass(
        1,
        "squarefree-closed-form",
        format!("max rel err {worst:.2e}, tol {TOL:.0e}, {elapsed:.2?}"),
    );
}

/// Criterion 2: gcd_sum and s_form agree to 1e-12 relative on 500 random
/// sequences with N <= 64 and values <= 10^6, over the alpha grid.
#[test]
fn criterion_02_oracle_equivalence() {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    let alphas = [0.25, 0.5, 0.75, 1.0];
    let weights: Vec<WeightSequence> = alphas
        .iter()
        .map(|&a| WeightSequence::power_law(a).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let seq = random_sequence(&mut rng, 64, 1_000_000);
        let b = IndexSet::from_integers(&seq).unwrap();
        for (alpha, t) in alphas.iter().zip(&weights) {
            let direct = gcd_sum(&seq, *alpha, true).unwrap();
            let abstract_form = s_form(t, &b, true).unwrap();
            let err = rel_err(direct, abstract_form);
            assert!(
                err <= TOL,
                "alpha={alpha} N={}: {direct} vs {abstract_form} rel={err:e}",
                seq.len()
            );
            worst = worst.max(err);
        }
    }
    pass(
        2,
        "gcd-sum-vs-s-form",
        format!("500 sequences x 4 alphas, max rel err {worst:.2e}, tol {TOL:.0e}"),
    );
}

/// Criterion 3: the canonical reduction's contract on 1000 random index
/// sets (N <= 10, exponents <= 3, first 6 primes) with kappa(t) < N.
#[test]
fn criterion_03_canonical_reduction() {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let mut worst_slack = f64::INFINITY;
    for case in 0..1000 {
        let b = random_index_set(&mut rng, 10, 6, 3);
        let t = random_weights_kappa_below(&mut rng, 6, b.len());
        let kappa = t.kappa();
        let before = s_form(&t, &b, true).unwrap();
        let (reduced, tau) = canonical_reduce(&b, &t).unwrap();

        assert_eq!(reduced.len(), b.len(), "case {case}: cardinality changed");
        assert!(
            is_kappa_canonical(&reduced, kappa),
            "case {case}: output is not kappa-canonical"
        );
        assert!(
            reduced.support_union().len() <= b.len() - 1 || b.len() == 1,
            "case {case}: support bound violated"
        );
        if b.len() == 1 {
            assert!(reduced.support_union().is_empty(), "case {case}");
        }
        let after = s_form(&tau, &reduced, true).unwrap();
        assert!(
            after >= before - TOL,
            "case {case}: sum dropped from {before} to {after}"
        );
        worst_slack = worst_slack.min(after - before);
    }
    pass(
        3,
        "canonical-reduction",
        format!("1000 cases, min (after - before) {worst_slack:.3e} >= -{TOL:.0e}"),
    );
}

/// Criterion 4: the Poisson-integral identity. Grid path within 1e-8
/// relative on 50 instances (K <= 3, t_k <= 0.8, exponents <= 3); Monte
/// Carlo within 4 standard errors at 10^6 samples on 10 instances (K = 4).
#[test]
fn criterion_04_poisson_identity() {
    const GRID_TOL: f64 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 50 {
        let b = random_index_set(&mut rng, 6, 3, 3);
        let t = random_decreasing_weights(&mut rng, 3, 0.8);
        let c: Vec<f64> = (0..b.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let check = verify_identity(
            &b,
            &c,
            &t,
            &IdentityMethod::Grid {
                points_per_dim: 16,
                budget: 1e-9,
            },
        )
        .unwrap();
        if check.exact_form.abs() < 1e-3 {
            continue; // keep the relative comparison meaningful
        }
        let err = rel_err(check.estimate, check.exact_form);
        assert!(
            err <= GRID_TOL,
            "grid instance {done}: est {} vs form {} rel {err:e}",
            check.estimate,
            check.exact_form
        );
        worst = worst.max(err);
        done += 1;
    }

    let mut mc_done = 0;
    let mut worst_sigma = 0.0f64;
    while mc_done < 10 {
        let b = random_index_set(&mut rng, 6, 4, 3);
        if b.members().iter().map(|m| m.rank()).max().unwrap_or(0) != 4 {
            continue; // demand genuinely 4-dimensional instances
        }
        let t = random_decreasing_weights(&mut rng, 4, 0.8);
        let c: Vec<f64> = (0..b.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let seed = rng.gen::<u64>();
        let check = verify_identity(
            &b,
            &c,
            &t,
            &IdentityMethod::Mc {
                samples: 1_000_000,
                seed,
            },
        )
        .unwrap();
        let dev = (check.estimate - check.exact_form).abs();
        assert!(
            dev <= check.error_bound,
            "mc instance {mc_done}: |{} - {}| = {dev:e} > 4se = {:e}",
            check.estimate,
            check.exact_form,
            check.error_bound
        );
        worst_sigma = worst_sigma.max(4.0 * dev / check.error_bound);
        mc_done += 1;
    }
    pass(
        4,
        "poisson-identity",
        format!(
            "grid: 50 instances max rel err {worst:.2e} (tol {GRID_TOL:.0e}); \
             mc: 10 instances at 1e6 samples, worst deviation {worst_sigma:.2} sigma (gate 4)"
        ),
    );
}

/// Criterion 5: the sandwich bounds hold for 200 random matrices
/// (N <= 64, t_k <= 0.9), lambda_min is positive, and the all-ones Rayleigh
/// quotient sits between 1 and lambda_max.
#[test]
fn criterion_05_sandwich() {
    const TOL: f64 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0005);
    for case in 0..200 {
        let b = random_index_set(&mut rng, 64, 8, 3);
        let n = b.len();
        let t = random_decreasing_weights(&mut rng, n.max(8), 0.9);
        let m = GcdMatrix::from_index_set(&b, &t).unwrap();
        let eig = m.eig_extremes(1e-10).unwrap();
        let (lo, hi) = sandwich_bounds(&t, n).unwrap();
        assert!(
            eig.lambda_min >= lo - TOL && eig.lambda_max <= hi + TOL,
            "case {case}: spectrum [{}, {}] escapes sandwich [{lo}, {hi}]",
            eig.lambda_min,
            eig.lambda_max
        );
        assert!(eig.lambda_min > 0.0, "case {case}: lambda_min not positive");
        let r = m.rayleigh_all_ones();
        assert!(
            eig.lambda_max >= r - 1e-10 && r >= 1.0 - 1e-12,
            "case {case}: rayleigh {r} vs lambda_max {}",
            eig.lambda_max
        );
    }
    pass(
        5,
        "sandwich-bounds",
        format!("200 matrices, slack tol {TOL:.0e}, lambda_min > 0 throughout"),
    );
}

/// Criterion 6: eig_extremes agrees with the characteristic-polynomial
/// oracle (N <= 4) and a 10^4-iteration power-method oracle (N <= 64) to
/// 1e-9.
#[test]
fn criterion_06_eigensolver_oracles() {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0006);
    let mut tiny = 0;
    let mut drawn = 0;
    let mut worst = 0.0f64;
    while tiny < 150 {
        drawn += 1;
        assert!(drawn < 1500, "charpoly guard rejected too many draws");
        let b = random_index_set(&mut rng, 4, 4, 3);
        let t = random_chunky_weights(&mut rng, 4);
        let m = GcdMatrix::from_index_set(&b, &t).unwrap();
        let Some((lo, hi)) = charpoly_extremes_guarded(&m) else {
            continue;
        };
        let eig = m.eig_extremes(1e-12).unwrap();
        let err = (eig.lambda_min - lo).abs().max((eig.lambda_max - hi).abs());
        assert!(
            err <= TOL,
            "charpoly case {tiny}: ({}, {}) vs ({lo}, {hi})",
            eig.lambda_min,
            eig.lambda_max
        );
        worst = worst.max(err);
        tiny += 1;
    }

    let mut large = 0;
    let mut large_drawn = 0;
    while large < 25 {
        large_drawn += 1;
        assert!(
            large_drawn < 500,
            "power-method guard rejected too many draws"
        );
        let b = random_index_set(&mut rng, 64, 8, 3);
        if b.len() < 5 {
            continue;
        }
        let t = random_chunky_weights(&mut rng, 8);
        let m = GcdMatrix::from_index_set(&b, &t).unwrap();
        // skip instances where 1e4 iterations demonstrably have not
        // converged (clustered spectrum): the oracle must certify itself
        let Some((lo, hi)) = power_method_extremes_guarded(&m, 10_000) else {
            continue;
        };
        let eig = m.eig_extremes(1e-12).unwrap();
        let err = (eig.lambda_min - lo).abs().max((eig.lambda_max - hi).abs());
        assert!(
            err <= TOL,
            "power case {large} (N={}): ({}, {}) vs ({lo}, {hi}), err {err:e}",
            m.order(),
            eig.lambda_min,
            eig.lambda_max
        );
        worst = worst.max(err);
        large += 1;
    }
    pass(
        6,
        "eigensolver-oracles",
        format!("150 charpoly + 25 power-method comparisons, max err {worst:.2e}, tol {TOL:.0e}"),
    );
}

/// Criterion 7: the Franel-Landau closed form equals exact piecewise
/// integration to 1e-12 for all 1 <= m <= n <= 100.
#[test]
fn criterion_07_franel_landau() {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    for n in 1..=100u64 {
        for m in 1..=n {
            let closed = franel_landau(m, n).unwrap();
            let exact = sawtooth_product_integral(m, n);
            let err = (closed - exact).abs();
            assert!(err <= TOL, "m={m} n={n}: closed {closed} vs exact {exact}");
            worst = worst.max(err);
        }
    }
    pass(
        7,
        "franel-landau",
        format!("5050 pairs, max abs err {worst:.2e}, tol {TOL:.0e}"),
    );
}

/// Criterion 8: the resonance-sum closed form equals brute force over
/// j1, j2 <= 10^5 plus its certified tail bound, for all 1 <= v <= w <= 50
/// and J <= 20 at s = 1, and for s in {0.8, 0.9} on 20 random triples.
#[test]
fn criterion_08_resonance_sums() {
    const J_CAP: u64 = 100_000;
    const SLACK: f64 = 1e-12;
    let mut worst = 0.0f64;
    for w in 1..=50u64 {
        for v in 1..=w {
            // one enumeration per (v, w); per-J sums drop leading solutions
            let mut solutions: Vec<(u64, u64)> = Vec::new();
            for j1 in 1..=J_CAP {
                if (j1 * v) % w == 0 {
                    let j2 = j1 * v / w;
                    if (1..=J_CAP).contains(&j2) {
                        solutions.push((j1, j2));
                    }
                }
            }
            for j_min in 0..=20u64 {
                let brute: f64 = solutions
                    .iter()
                    .filter(|&&(a, b)| a > j_min && b > j_min)
                    .map(|&(a, b)| 1.0 / (a as f64 * b as f64))
                    .sum();
                let (_, tail_bound) = brute_resonance(v, w, j_min, 1.0, J_CAP);
                let closed = resonance_sum(v, w, j_min, 1.0).unwrap();
                let err = (closed - brute).abs();
                assert!(
                    err <= tail_bound + SLACK,
                    "v={v} w={w} J={j_min}: closed {closed} brute {brute} \
                     err {err:e} bound {tail_bound:e}"
                );
                worst = worst.max(err - tail_bound);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0008);
    for _ in 0..20 {
        let w = rng.gen_range(1..=50u64);
        let v = rng.gen_range(1..=w);
        let j_min = rng.gen_range(0..=20u64);
        let s = if rng.gen_bool(0.5) { 0.8 } else { 0.9 };
        let (brute, tail_bound) = brute_resonance(v, w, j_min, s, J_CAP);
        let closed = resonance_sum(v, w, j_min, s).unwrap();
        assert!(
            (closed - brute).abs() <= tail_bound + SLACK,
            "v={v} w={w} J={j_min} s={s}: closed {closed} brute {brute} bound {tail_bound:e}"
        );
    }
    pass(
        8,
        "resonance-sums",
        format!(
            "26775 exact combos at s=1 (+20 random at s in {{0.8,0.9}}), \
             worst excess over tail bound {worst:.2e}"
        ),
    );
}

/// Criterion 9: the envelope-based maximal integral matches a 10^6-point
/// midpoint grid within 1e-4 for 50 random systems (N <= 16), and the full
/// prefix never exceeds the maximal value.
#[test]
fn criterion_09_maximal_function() {
    const TOL: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0009);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let seq = random_sequence(&mut rng, 16, 48);
        let coeffs: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sys = DilatedSystem::new(seq, coeffs).unwrap();
        let exact = maximal_l2_sq(&sys).unwrap();
        let grid = grid_maximal_l2_sq(&sys, 1_000_000);
        let err = (exact - grid).abs();
        assert!(
            err <= TOL,
            "case {case}: exact {exact} vs grid {grid}, err {err:e}"
        );
        assert!(
            sawtooth_l2_sq(&sys) <= exact + 1e-12,
            "case {case}: full-prefix norm exceeds the maximal integral"
        );
        worst = worst.max(err);
    }
    pass(
        9,
        "maximal-function-exactness",
        format!("50 systems vs 1e6-point grid, max abs err {worst:.2e}, tol {TOL:.0e}"),
    );
}

/// Criterion 10: desk-scale bound sanity. The square-free family dominates
/// the 0.1-shaped lower-bound floor for alpha in {0.6, 0.75, 0.9}
/// and N = 2^4..2^10; the primes family dominates 0.1 (log N)^{-2a} N^{1-2a}
/// for alpha in {0.25, 0.4} and N in {100, 1000, 10000}.
#[test]
fn criterion_10_bound_sanity() {
    let mut min_ratio = f64::INFINITY;
    for alpha in [0.6, 0.75, 0.9] {
        for r in 4..=10u32 {
            let n = 1u64 << r;
            let observed = gcd_sum(&extremal_squarefree(r).unwrap(), alpha, true).unwrap();
            let shape = squarefree_lower_bound(alpha, n as f64, 0.1).unwrap();
            assert!(
                shape <= observed,
                "squarefree alpha={alpha} r={r}: shape {shape} > observed {observed}"
            );
            min_ratio = min_ratio.min(observed / shape);
        }
    }
    for alpha in [0.25, 0.4] {
        for n in [100usize, 1_000, 10_000] {
            let observed = gcd_sum(&extremal_primes(n).unwrap(), alpha, true).unwrap();
            let shape = primes_lower_bound(alpha, n as f64, 0.1).unwrap();
            assert!(
                shape <= observed,
                "primes alpha={alpha} N={n}: shape {shape} > observed {observed}"
            );
            min_ratio = min_ratio.min(observed / shape);
        }
    }
    pass(
        10,
        "bound-shape-sanity",
        format!(
            "both families dominate their 0.1-shaped floors; min observed/floor {min_ratio:.3}"
        ),
    );
}

/// The scaling-invariance clause of the gcd-sum contract, exercised at the
/// acceptance level on one concrete family.
#[test]
fn scaling_invariance_witness() {
    let seq = IntegerSequence::new(vec![2, 6, 15, 70, 143]).unwrap();
    let scaled = IntegerSequence::new(vec![14, 42, 105, 490, 1001]).unwrap();
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        let a = gcd_sum(&seq, alpha, true).unwrap();
        let b = gcd_sum(&scaled, alpha, true).unwrap();
        assert!(rel_err(a, b) <= 1e-12);
    }
}
