//! The `selftest` command: a fast invariant battery over every module, plus
//! report re-validation (`--from-report`). Sub-seeds derive from the config
//! seed by fixed offsets, so a selftest report reproduces byte-for-byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use gcdlab::canonical::{canonical_reduce, is_kappa_canonical};
use gcdlab::dilated::{self, sawtooth, DilatedSystem};
use gcdlab::gcdcore::{extremal_squarefree, gcd_sum, s_form, squarefree_closed_form};
use gcdlab::multiindex::{compose, factorize, MultiIndex};
use gcdlab::poisson::{verify_identity, IdentityMethod};
use gcdlab::spectral::{sandwich_bounds, GcdMatrix};
use gcdlab::weights::WeightSequence;
use gcdlab::{Error, IndexSet, IntegerSequence, Result};

use crate::args::SelftestArgs;
use crate::commands::expect_object;
use crate::report::Row;

struct Battery {
    rows: Vec<Row>,
    failures: usize,
}

impl Battery {
    fn record(&mut self, check: &str, ok: bool, tolerance: f64, detail: String) {
        if !ok {
            self.failures += 1;
        }
        self.rows.push(expect_object(json!({
            "check": check,
            "status": if ok { "pass" } else { "fail" },
            "tolerance": tolerance,
            "detail": detail,
        })));
    }
}

pub fn run(args: &SelftestArgs, seed: u64) -> Result<Vec<Row>> {
    if let Some(path) = &args.from_report {
        return from_report(path);
    }
    let mut b = Battery {
        rows: Vec::new(),
        failures: 0,
    };

    factorization_round_trip(&mut b);
    sum_route_agreement(&mut b, seed);
    closed_form_family(&mut b);
    canonical_contract(&mut b, seed ^ 0x1);
    spectral_contract(&mut b, seed ^ 0x2);
    poisson_contract(&mut b, seed ^ 0x3);
    franel_smoke(&mut b);
    resonance_contract(&mut b);
    maximal_smoke(&mut b, seed ^ 0x4);

    if b.failures > 0 {
        b.rows.push(expect_object(json!({
            "check": "summary",
            "status": "fail",
            "tolerance": Value::Null,
            "detail": format!("{} checks failed", b.failures),
        })));
        // main() turns Err into exit code 1 after printing the rows
        let rendered = serde_json::to_string_pretty(&b.rows).unwrap_or_default();
        return Err(Error::Precondition(format!(
            "selftest: {} checks failed\n{rendered}",
            b.failures
        )));
    }
    b.rows.push(expect_object(json!({
        "check": "summary",
        "status": "pass",
        "tolerance": Value::Null,
        "detail": format!("{} checks passed", b.rows.len()),
    })));
    Ok(b.rows)
}

fn factorization_round_trip(b: &mut Battery) {
    let mut bad = 0;
    for n in 1..=5_000u64 {
        match factorize(n).and_then(|beta| compose(&beta)) {
            Ok(m) if m == n => {}
            _ => bad += 1,
        }
    }
    b.record(
        "factorize-compose-round-trip",
        bad == 0,
        0.0,
        format!("n = 1..=5000, {bad} mismatches"),
    );
}

fn sum_route_agreement(b: &mut Battery, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let len = rng.gen_range(1..=32);
        let mut vals = std::collections::BTreeSet::new();
        while vals.len() < len {
            vals.insert(rng.gen_range(1..=100_000u64));
        }
        let seq = IntegerSequence::new(vals.into_iter().collect()).unwrap();
        let set = IndexSet::from_integers(&seq).unwrap();
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            let t = WeightSequence::power_law(alpha).unwrap();
            let x = gcd_sum(&seq, alpha, true).unwrap();
            let y = s_form(&t, &set, true).unwrap();
            worst = worst.max((x - y).abs() / x.abs());
        }
    }
    b.record(
        "gcd-sum-vs-s-form",
        worst <= 1e-12,
        1e-12,
        format!("25 random sequences x 4 alphas, max rel gap {worst:.2e}"),
    );
}

fn closed_form_family(b: &mut Battery) {
    let mut worst = 0.0f64;
    for r in 1..=8u32 {
        for alpha in [0.75, 1.0] {
            let brute = gcd_sum(&extremal_squarefree(r).unwrap(), alpha, false).unwrap();
            let closed = squarefree_closed_form(r, alpha).unwrap();
            worst = worst.max((brute - closed).abs() / closed);
        }
    }
    b.record(
        "squarefree-closed-form",
        worst <= 1e-10,
        1e-10,
        format!("r <= 8, max rel gap {worst:.2e}"),
    );
}

fn random_set<R: Rng>(rng: &mut R, max_len: usize, positions: u32) -> IndexSet {
    let len = rng.gen_range(1..=max_len);
    let mut members = std::collections::BTreeSet::new();
    while members.len() < len {
        let mut entries = Vec::new();
        for j in 1..=positions {
            let e = rng.gen_range(0..=3u32);
            if e > 0 && rng.gen_bool(0.5) {
                entries.push((j, e));
            }
        }
        members.insert(MultiIndex::from_entries(entries).unwrap());
    }
    IndexSet::new(members.into_iter().collect()).unwrap()
}

fn random_weights<R: Rng>(rng: &mut R, len: usize, cap: f64) -> WeightSequence {
    let t1: f64 = rng.gen_range(0.05..cap);
    let rho: f64 = rng.gen_range(0.3..0.8);
    let mut vals = Vec::with_capacity(len);
    let mut t = t1;
    for _ in 0..len {
        vals.push(t.max(1e-12));
        t *= rho;
    }
    WeightSequence::explicit(vals).unwrap()
}

fn canonical_contract(b: &mut Battery, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..100 {
        let set = random_set(&mut rng, 8, 6);
        let t = loop {
            let t = random_weights(&mut rng, 6, 0.95);
            if t.kappa() < set.len() {
                break t;
            }
        };
        let kappa = t.kappa();
        let before = s_form(&t, &set, true).unwrap();
        let (reduced, tau) = canonical_reduce(&set, &t).unwrap();
        let after = s_form(&tau, &reduced, true).unwrap();
        let ok = reduced.len() == set.len()
            && is_kappa_canonical(&reduced, kappa)
            && (reduced.support_union().len() < set.len() || set.len() == 1)
            && after >= before - 1e-12;
        if !ok {
            bad += 1;
        }
    }
    b.record(
        "canonical-reduction-contract",
        bad == 0,
        1e-12,
        format!("100 random sets, {bad} violations"),
    );
}

fn spectral_contract(b: &mut Battery, seed: u64) {
    // closed-form 2x2 check first
    let pair = IndexSet::new(vec![MultiIndex::empty(), MultiIndex::unit(1)]).unwrap();
    let t = WeightSequence::explicit(vec![0.5]).unwrap();
    let m = GcdMatrix::from_index_set(&pair, &t).unwrap();
    let e = m.eig_extremes(1e-12).unwrap();
    let closed_ok = (e.lambda_min - 0.5).abs() < 1e-11 && (e.lambda_max - 1.5).abs() < 1e-11;
    b.record(
        "jacobi-2x2-closed-form",
        closed_ok,
        1e-11,
        format!(
            "eigenvalues ({}, {}) vs (0.5, 1.5)",
            e.lambda_min, e.lambda_max
        ),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..20 {
        let set = random_set(&mut rng, 24, 6);
        let n = set.len();
        let t = random_weights(&mut rng, n.max(6), 0.9);
        let m = GcdMatrix::from_index_set(&set, &t).unwrap();
        let e = m.eig_extremes(1e-10).unwrap();
        let (lo, hi) = sandwich_bounds(&t, n).unwrap();
        let r = m.rayleigh_all_ones();
        let ok = e.lambda_min >= lo - 1e-8
            && e.lambda_max <= hi + 1e-8
            && e.lambda_min > 0.0
            && e.lambda_max >= r - 1e-10
            && r >= 1.0 - 1e-12;
        if !ok {
            bad += 1;
        }
    }
    b.record(
        "sandwich-and-rayleigh",
        bad == 0,
        1e-8,
        format!("20 random matrices, {bad} violations"),
    );
}

fn poisson_contract(b: &mut Battery, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // kernel mass at K = 1
    let mass = verify_identity(
        &IndexSet::new(vec![MultiIndex::empty()]).unwrap(),
        &[1.0],
        &WeightSequence::explicit(vec![0.5]).unwrap(),
        &IdentityMethod::Grid {
            points_per_dim: 16,
            budget: 1e-10,
        },
    )
    .unwrap();
    b.record(
        "poisson-kernel-mass",
        (mass.estimate - 1.0).abs() <= 1e-10,
        1e-10,
        format!("grid mass {}", mass.estimate),
    );

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let set = random_set(&mut rng, 4, 3);
        let t = random_weights(&mut rng, 6, 0.8);
        let c: Vec<f64> = (0..set.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let check = verify_identity(
            &set,
            &c,
            &t,
            &IdentityMethod::Grid {
                points_per_dim: 16,
                budget: 1e-9,
            },
        )
        .unwrap();
        worst = worst.max((check.estimate - check.exact_form).abs());
    }
    b.record(
        "poisson-identity-grid",
        worst <= 1e-8,
        1e-8,
        format!("10 random instances, max abs deviation {worst:.2e}"),
    );
}

fn franel_smoke(b: &mut Battery) {
    // modest midpoint grid against the closed form
    let mut worst = 0.0f64;
    let pts = 40_001usize;
    for (m, n) in [(1u64, 1u64), (2, 3), (2, 4), (5, 7), (6, 9)] {
        let closed = dilated::franel_landau(m, n).unwrap();
        let mut acc = 0.0;
        for i in 0..pts {
            let x = (i as f64 + 0.5) / pts as f64;
            acc += sawtooth(m as f64 * x) * sawtooth(n as f64 * x);
        }
        worst = worst.max((acc / pts as f64 - closed).abs());
    }
    b.record(
        "franel-landau-grid",
        worst <= 1e-3,
        1e-3,
        format!("5 pairs vs 4e4-point grid, max abs gap {worst:.2e}"),
    );
}

fn resonance_contract(b: &mut Battery) {
    const CAP: u64 = 10_000;
    let mut bad = 0;
    for w in 1..=8u64 {
        for v in 1..=w {
            for j_min in [0u64, 3] {
                let closed = dilated::resonance_sum(v, w, j_min, 1.0).unwrap();
                let mut brute = 0.0;
                for j1 in (j_min + 1)..=CAP {
                    if (j1 * v) % w == 0 {
                        let j2 = j1 * v / w;
                        if j2 > j_min && j2 <= CAP {
                            brute += 1.0 / (j1 as f64 * j2 as f64);
                        }
                    }
                }
                let g = gcdlab::gcdcore::gcd(v, w);
                let start = ((CAP * g) / w).max(1) as f64;
                let bound = (g as f64 * g as f64 / (v as f64 * w as f64)) / start;
                if (closed - brute).abs() > bound + 1e-12 {
                    bad += 1;
                }
            }
        }
    }
    b.record(
        "resonance-vs-enumeration",
        bad == 0,
        1e-12,
        format!("v <= w <= 8, J in {{0, 3}}, {bad} violations"),
    );
}

fn maximal_smoke(b: &mut Battery, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let len = rng.gen_range(1..=8usize);
        let mut vals = std::collections::BTreeSet::new();
        while vals.len() < len {
            vals.insert(rng.gen_range(1..=32u64));
        }
        let seq = IntegerSequence::new(vals.into_iter().collect()).unwrap();
        let coeffs: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sys = DilatedSystem::new(seq, coeffs).unwrap();
        let exact = dilated::maximal_l2_sq(&sys).unwrap();
        let pts = 100_000usize;
        let mut acc = 0.0;
        for i in 0..pts {
            let x = (i as f64 + 0.5) / pts as f64;
            let mut prefix = 0.0;
            let mut best = 0.0f64;
            for (k, &nk) in sys.seq().values().iter().enumerate() {
                prefix += sys.coeffs()[k] * sawtooth(nk as f64 * x);
                best = best.max(prefix.abs());
            }
            acc += best * best;
        }
        let grid = acc / pts as f64;
        worst = worst.max((exact - grid).abs());
        if dilated::sawtooth_l2_sq(&sys) > exact + 1e-12 {
            worst = f64::INFINITY;
        }
    }
    b.record(
        "maximal-envelope-vs-grid",
        worst <= 1e-3,
        1e-3,
        format!("5 random systems vs 1e5-point grid, max abs gap {worst:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// report re-validation

fn from_report(path: &std::path::Path) -> Result<Vec<Row>> {
    let text = std::fs::read_to_string(path)?;
    let parsed: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: 0,
        content: format!("{path:?}: {e}"),
    })?;
    let schema = parsed
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Precondition("report lacks schema_version".into()))?;
    if schema != crate::report::SCHEMA_VERSION as u64 {
        return Err(Error::Precondition(format!(
            "unsupported schema_version {schema}"
        )));
    }
    let config = parsed
        .get("config")
        .cloned()
        .ok_or_else(|| Error::Precondition("report lacks a config echo".into()))?;
    let seed = config
        .get("seed")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Precondition("config echo lacks a seed".into()))?;
    let command: crate::args::Command = serde_json::from_value(config.clone()).map_err(|e| {
        Error::Precondition(format!(
            "config echo does not parse back into a command: {e}"
        ))
    })?;
    if let crate::args::Command::Selftest(inner) = &command {
        if inner.from_report.is_some() {
            return Err(Error::Precondition(
                "refusing to re-validate a --from-report report".into(),
            ));
        }
    }
    let recomputed = crate::commands::execute(&command, seed)?;
    let original = parsed
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Precondition("report lacks rows".into()))?;
    let recomputed_vals: Vec<Value> = recomputed.into_iter().map(Value::Object).collect();
    let identical = recomputed_vals == *original;
    if !identical {
        return Err(Error::Precondition(
            "re-execution produced different rows; the report does not reproduce".into(),
        ));
    }
    Ok(vec![expect_object(json!({
        "check": "report-reproduction",
        "status": "pass",
        "command": command.name(),
        "rows_compared": original.len(),
        "detail": "re-executed the config echo; rows are identical",
    }))])
}
