//! Acceptance runner: one line per criterion, nonzero exit if any fails.

mod common;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use topos_measure::groupoid::{equivariant_maps, EquivariantMap, FiniteAction};
use topos_measure::invariant::{
    change_of_variables, check_axioms, counting_valuation, extend_along, fiber_product_oracle, glue_measures,
    pullback_measure, ChiSection, InvariantMeasure,
};
use topos_measure::modular::{
    commutant_basis, kms_check, kms_function, measure_from_state, non_trace_witness, state_from_measure, theta,
    trace_check, DensitySection, OperatorMatrix, VectorMap,
};
use topos_measure::random::{
    random_cover, random_dyadic_weights, random_map, random_weights, seeded_rng, z2_swap_action, GroupoidModel,
    trivial_set,
};
use topos_measure::report::Status;
use topos_measure::valuation::{OrbitFunction, Valuation};

const IM_MODELS: usize = 100;
const IM_MAX_ELEMENTS: usize = 12;
const IM_REAL_TOL: f64 = 1e-12;
const IM_BUDGET_S: f64 = 5.0;

const COV_TRIPLES: usize = 500;
const COV_TOL: f64 = 1e-12;
const COV_BUDGET_S: f64 = 5.0;

const EXT_MODELS: usize = 50;
const EXT_TOL: f64 = 1e-9;
const EXT_BUDGET_S: f64 = 5.0;

const DESCENT_SECTIONS: usize = 100;

const PRINCIPAL_PAIRS: usize = 100;
const PRINCIPAL_TOL: f64 = 1e-12;

const FLOW_SAMPLES: usize = 200;
const FLOW_TOL: f64 = 1e-12;

const KMS_PAIRS: usize = 50;
const KMS_TOL: f64 = 1e-9;
const KMS_FIXTURE_TOL: f64 = 1e-12;
const KMS_BUDGET_S: f64 = 10.0;

const TRACE_SAMPLES: usize = 50;
const TRACE_TOL: f64 = 1e-9;
const TRACE_WITNESS_MIN: f64 = 1e-3;

const INTEGRABILITY_MODELS: usize = 100;
const STATE_TOL: f64 = 1e-12;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("IM axioms on random models", im_axioms),
        ("change of variables", change_of_vars),
        ("extension well-definedness", extension),
        ("descent and representability", descent),
        ("principal bundle", principal),
        ("modular flow oracle and group law", flow),
        ("KMS boundary identities", kms),
        ("trace dichotomy", trace),
        ("integrability and state round trip", integrability),
        ("CLI golden determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn im_axioms() -> Outcome {
    let start = Instant::now();
    let mut im3 = 0;
    let mut failures = Vec::new();
    for k in 0..IM_MODELS {
        let mut rng = seeded_rng(1_000 + k as u64);
        let m = GroupoidModel::random(&mut rng, 8);
        let g = &m.groupoid;
        // even models use dyadic weights and must be exact
        let exact = k % 2 == 0;
        let w = if exact {
            random_dyadic_weights(&mut rng, g.num_components())
        } else {
            random_weights(&mut rng, g.num_components(), 0.01, 10.0)
        };
        let mu = InvariantMeasure::new(g, w).unwrap();
        let objects: Vec<(String, FiniteAction)> = (0..3)
            .map(|i| (format!("X{i}"), m.random_action(&mut rng, IM_MAX_ELEMENTS)))
            .collect();
        let mut maps = Vec::new();
        for (a, x) in &objects {
            maps.push((format!("{a}->1"), EquivariantMap::to_terminal(x)));
            for (b, y) in &objects {
                for (i, f) in equivariant_maps(x, y, 64).unwrap().into_iter().enumerate() {
                    if f.fiber_profile().n_to_1.is_some_and(|n| n > 0) {
                        maps.push((format!("{a}->{b}#{i}"), f));
                    }
                }
            }
        }
        im3 += maps.iter().filter(|(_, f)| f.fiber_profile().n_to_1.is_some_and(|n| n > 0)).count();
        let tol = if exact { 0.0 } else { IM_REAL_TOL };
        for check in check_axioms(&mu, g, &objects, &maps, tol) {
            if check.status == Status::Fail {
                failures.push(format!("model {k}: {} {:?}", check.name, check.witness));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < IM_BUDGET_S && im3 > 0,
        format!(
            "{IM_MODELS} models, {im3} n-to-1 maps, {} failures, {secs:.2} s (budget {IM_BUDGET_S} s){}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

/// Test functions following the proof: indicators, sums of indicators,
/// nonnegative, signed real, then complex.
fn test_function(kind: usize, y: &FiniteAction, rng: &mut ChaCha8Rng) -> OrbitFunction<Complex64> {
    let n = y.num_orbits();
    let values: Vec<Complex64> = match kind {
        0 => {
            let o = rng.random_range(0..n);
            (0..n).map(|i| c(if i == o { 1.0 } else { 0.0 }, 0.0)).collect()
        }
        1 => (0..n).map(|_| c(rng.random_range(0..=3) as f64, 0.0)).collect(),
        2 => (0..n).map(|_| c(rng.random_range(0.0..4.0), 0.0)).collect(),
        3 => (0..n).map(|_| c(rng.random_range(-4.0..4.0), 0.0)).collect(),
        _ => (0..n).map(|_| c(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0))).collect(),
    };
    OrbitFunction::from_values(y, values).unwrap()
}

fn change_of_vars() -> Outcome {
    let start = Instant::now();
    let mut done = 0;
    let mut seed = 2_000u64;
    let mut worst = 0.0f64;
    let mut kinds = [0usize; 5];
    while done < COV_TRIPLES {
        seed += 1;
        let mut rng = seeded_rng(seed);
        let m = GroupoidModel::random(&mut rng, 8);
        let mu = InvariantMeasure::new(&m.groupoid, random_weights(&mut rng, m.groupoid.num_components(), 0.1, 5.0)).unwrap();
        let y = m.random_nonempty_action(&mut rng, 12);
        let x = m.random_nonempty_action(&mut rng, 12);
        let Some(f) = random_map(&mut rng, &y, &x, 64) else { continue };
        let kind = done % 5;
        let h = test_function(kind, &y, &mut rng);
        let cv = change_of_variables(&f, &h, &mu).unwrap();
        worst = worst.max(cv.relative_deviation());
        kinds[kind] += 1;
        done += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= COV_TOL && secs < COV_BUDGET_S,
        format!("{done} triples (per kind {kinds:?}), max relative deviation {worst:e} (tol {COV_TOL:e}), {secs:.2} s"),
    )
}

fn extension() -> Outcome {
    let start = Instant::now();
    let mut done = 0;
    let mut seed = 3_000u64;
    let mut worst = 0.0f64;
    let mut fp_elements = 0;
    while done < EXT_MODELS {
        seed += 1;
        let mut rng = seeded_rng(seed);
        let m = GroupoidModel::random(&mut rng, 6);
        let mu = InvariantMeasure::new(&m.groupoid, random_weights(&mut rng, m.groupoid.num_components(), 0.1, 5.0)).unwrap();
        let x = m.random_nonempty_action(&mut rng, 6);
        let f = random_cover(&mut rng, &m, &x, 4);
        let g = random_cover(&mut rng, &m, &x, 4);
        if f.source() == g.source() && f.images() == g.images() {
            continue;
        }
        let (nf, ng) = (mu.restrict(f.source()).unwrap(), mu.restrict(g.source()).unwrap());
        let oracle = fiber_product_oracle(&f, &nf, &g, &ng).unwrap();
        let direct = mu.evaluate(&x).unwrap();
        let d = oracle
            .max_deviation()
            .max(rel(extend_along(&nf, &f).unwrap(), direct))
            .max(rel(extend_along(&ng, &g).unwrap(), direct));
        worst = worst.max(d);
        fp_elements += oracle.fiber_product_size;
        done += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= EXT_TOL && secs < EXT_BUDGET_S,
        format!(
            "{done} models with two distinct covers, fiber products of {fp_elements} elements in total, max deviation {worst:e} (tol {EXT_TOL:e}), {secs:.2} s"
        ),
    )
}

fn descent() -> Outcome {
    let mut failures = 0;
    let mut nontrivial = 0;
    for k in 0..DESCENT_SECTIONS {
        let mut rng = seeded_rng(4_000 + k as u64);
        let m = GroupoidModel::random(&mut rng, 6);
        let y = m.random_nonempty_action(&mut rng, 6);
        let f = random_cover(&mut rng, &m, &y, 4);
        let nu = ChiSection::from_values(&y, random_dyadic_weights(&mut rng, y.num_orbits())).unwrap();
        let lambda = pullback_measure(&f, &nu).unwrap();
        if f.source().len() > y.len() {
            nontrivial += 1;
        }
        let glued = glue_measures(&f, &lambda, 0.0);
        let ok = match &glued {
            Ok(g) => *g == nu && pullback_measure(&f, g).unwrap() == lambda,
            Err(_) => false,
        };
        let x = f.source();
        let slice_ok = ChiSection::from_slice_measure(x, &lambda.to_slice_measure()).unwrap() == lambda
            && ChiSection::from_slice_measure(&y, &nu.to_slice_measure()).unwrap() == nu;
        if !(ok && slice_ok) {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{DESCENT_SECTIONS} sections ({nontrivial} along non-identity covers), exact round trips, {failures} failures"),
    )
}

fn principal() -> Outcome {
    let mut worst = 0.0f64;
    let mut free = true;
    for k in 0..PRINCIPAL_PAIRS {
        let mut rng = seeded_rng(5_000 + k as u64);
        let m = GroupoidModel::random(&mut rng, 8);
        let x = m.random_nonempty_action(&mut rng, 12);
        let n = x.num_orbits();
        let l = ChiSection::from_values(&x, random_weights(&mut rng, n, 0.01, 100.0)).unwrap();
        let lp = ChiSection::from_values(&x, random_weights(&mut rng, n, 0.01, 100.0)).unwrap();
        let ratio = l.principal_ratio(&lp).unwrap();
        let moved = l.principal_action(&ratio).unwrap();
        for o in 0..n {
            worst = worst.max(rel(moved.value(o), lp.value(o)));
        }
        // the ratio of f·l to l recovers f
        let f = OrbitFunction::from_values(&x, random_weights(&mut rng, n, 0.01, 100.0)).unwrap();
        let back = l.principal_ratio(&l.principal_action(&f).unwrap()).unwrap();
        for o in 0..n {
            worst = worst.max(rel(back.value(o), f.value(o)));
        }
        free &= l.principal_ratio(&l).unwrap().values().iter().all(|&r| r == 1.0);
    }
    outcome(
        worst <= PRINCIPAL_TOL && free,
        format!("{PRINCIPAL_PAIRS} pairs, transitivity and recovery max deviation {worst:e} (tol {PRINCIPAL_TOL:e}), stabilizers trivial: {free}"),
    )
}

struct Sample {
    x: FiniteAction,
    lambda: DensitySection,
    mu: Valuation,
}

fn sample(rng: &mut ChaCha8Rng, component_constant: bool) -> Sample {
    let m = GroupoidModel::random(rng, 6);
    let x = m.random_nonempty_action(rng, 10);
    let w: Vec<f64> = if component_constant {
        let per = random_dyadic_weights(rng, m.groupoid.num_components());
        (0..x.num_orbits())
            .map(|o| per[x.orbit_component(o)] * x.orbits()[o].len() as f64)
            .collect()
    } else {
        random_weights(rng, x.num_orbits(), 0.2, 5.0)
    };
    let lambda = DensitySection::from_section(&ChiSection::from_values(&x, w).unwrap());
    let mu = lambda.to_valuation();
    Sample { x, lambda, mu }
}

fn random_dense(x: &FiniteAction, rng: &mut ChaCha8Rng) -> OperatorMatrix {
    let n = x.len();
    let mut m = Array2::zeros((n, n));
    for p in 0..n {
        for &q in x.fiber(x.object_of(p)) {
            m[[p, q]] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    OperatorMatrix::new(x, m).unwrap()
}

fn random_element(x: &FiniteAction, basis: &[OperatorMatrix], rng: &mut ChaCha8Rng) -> OperatorMatrix {
    basis.iter().fold(OperatorMatrix::zeros(x), |acc, b| {
        acc.add(&b.scale(c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).unwrap()
    })
}

fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn conjugation_oracle(a: &OperatorMatrix, t: f64, lambda: &DensitySection) -> Array2<Complex64> {
    let n = a.carrier().len();
    let mut left = Array2::zeros((n, n));
    let mut right = Array2::zeros((n, n));
    for x in 0..n {
        left[[x, x]] = c(lambda.value(x), 0.0).powc(c(0.0, -t));
        right[[x, x]] = c(lambda.value(x), 0.0).powc(c(0.0, t));
    }
    left.dot(a.matrix()).dot(&right)
}

fn flow() -> Outcome {
    let mut oracle = 0.0f64;
    let mut group = 0.0f64;
    for k in 0..FLOW_SAMPLES {
        let mut rng = seeded_rng(6_000 + k as u64);
        let s = sample(&mut rng, false);
        let a = random_dense(&s.x, &mut rng);
        let (t, r) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let scale = a.max_norm().max(f64::MIN_POSITIVE);
        let th = theta(&a, t, &s.lambda).unwrap();
        oracle = oracle.max(max_diff(th.matrix(), &conjugation_oracle(&a, t, &s.lambda)) / scale);
        let composed = theta(&th, r, &s.lambda).unwrap();
        group = group.max(max_diff(composed.matrix(), theta(&a, t + r, &s.lambda).unwrap().matrix()) / scale);
    }
    outcome(
        oracle <= FLOW_TOL && group <= FLOW_TOL,
        format!("{FLOW_SAMPLES} samples, oracle deviation {oracle:e}, group law deviation {group:e} (tol {FLOW_TOL:e})"),
    )
}

fn kms() -> Outcome {
    let start = Instant::now();
    let ts: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.5).collect();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for k in 0..KMS_PAIRS {
        let mut rng = seeded_rng(7_000 + k as u64);
        let s = sample(&mut rng, false);
        let basis = commutant_basis(&s.x);
        let (u, v) = (random_element(&s.x, &basis, &mut rng), random_element(&s.x, &basis, &mut rng));
        let report = kms_check(&u, &v, &ts, &s.lambda, &s.mu, KMS_TOL).unwrap();
        for check in &report.checks {
            if check.status != Status::Pass {
                failures += 1;
            }
            if check.name.starts_with("kms:boundary") {
                worst = worst.max(check.deviation.unwrap_or(f64::INFINITY));
            }
        }
    }
    // trivial group on {1, 2}, λ̂ = (1, 2), u = E₁₂, v = E₂₁
    let x = trivial_set(&["1", "2"]);
    let mu = Valuation::from_orbit_weights(&x, vec![1.0, 2.0]).unwrap();
    let lambda = DensitySection::from_valuation(&mu).unwrap();
    let u = OperatorMatrix::unit(&x, 0, 1).unwrap();
    let v = OperatorMatrix::unit(&x, 1, 0).unwrap();
    let f0 = kms_function(&u, &v, c(0.0, 0.0), &lambda, &mu).unwrap();
    let fi = kms_function(&u, &v, c(0.0, -1.0), &lambda, &mu).unwrap();
    let fixture = (f0 - c(1.0, 0.0)).norm().max((fi - c(2.0, 0.0)).norm());
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && worst <= KMS_TOL && fixture <= KMS_FIXTURE_TOL && secs < KMS_BUDGET_S,
        format!(
            "{KMS_PAIRS} pairs on {} times, max boundary deviation {worst:e} (tol {KMS_TOL:e}), {failures} failing checks; fixture F(0) = {f0}, F(-i) = {fi}, error {fixture:e} (tol {KMS_FIXTURE_TOL:e}); {secs:.2} s",
            ts.len()
        ),
    )
}

fn trace() -> Outcome {
    let ts = [-3.5, -1.0, 0.25, 2.0, 5.0];
    let mut constant_ok = true;
    let mut witnesses_ok = true;
    for k in 0..TRACE_SAMPLES {
        let mut rng = seeded_rng(8_000 + k as u64);
        let s = sample(&mut rng, true);
        let basis = commutant_basis(&s.x);
        let pairs: Vec<_> = (0..4)
            .map(|_| (random_element(&s.x, &basis, &mut rng), random_element(&s.x, &basis, &mut rng)))
            .collect();
        // theta_identity demands exact equality
        match trace_check(&s.lambda, &pairs, &ts, TRACE_TOL) {
            Ok(checks) => constant_ok &= checks.iter().all(|c| c.status == Status::Pass),
            Err(_) => constant_ok = false,
        }
        let skew = sample(&mut rng, false);
        if !skew.lambda.is_component_constant() {
            witnesses_ok &= trace_check(&skew.lambda, &[], &ts, TRACE_TOL).is_err()
                && non_trace_witness(&skew.lambda).is_some_and(|w| w.weight_uv != w.weight_vu);
        }
    }
    // shipped fixture: ℤ/2 swapping a, b and fixing c, λ̂ = (1, 1, 2)
    let z = z2_swap_action();
    let skew = DensitySection::from_values(&z, vec![1.0, 1.0, 2.0]).unwrap();
    let w = non_trace_witness(&skew).unwrap();
    let dev = w.relative_deviation();
    outcome(
        constant_ok && witnesses_ok && dev > TRACE_WITNESS_MIN,
        format!(
            "{TRACE_SAMPLES} component-constant densities are traces with exact theta = id: {constant_ok}; random skew densities have witnesses: {witnesses_ok}; fixture pair ({}, {}) w(uv) = {}, w(vu) = {}, deviation {dev} (min {TRACE_WITNESS_MIN:e})",
            w.pair.0, w.pair.1, w.weight_uv, w.weight_vu
        ),
    )
}

fn integrability() -> Outcome {
    let mut objects = 0;
    let mut bad = 0;
    let mut worst = 0.0f64;
    for k in 0..INTEGRABILITY_MODELS {
        let mut rng = seeded_rng(9_000 + k as u64);
        let m = GroupoidModel::random(&mut rng, 8);
        for _ in 0..3 {
            let x = m.random_action(&mut rng, 12);
            if x.is_empty() {
                continue;
            }
            objects += 1;
            let Some(v) = counting_valuation(&x) else {
                bad += 1;
                continue;
            };
            if !(v.total() > 0.0 && v.is_finite() && v.is_well_supported()) {
                bad += 1;
            }
            let weighted = Valuation::from_orbit_weights(&x, random_weights(&mut rng, x.num_orbits(), 0.1, 10.0)).unwrap();
            for mu in [v, weighted] {
                let nu = mu.normalized().unwrap();
                let eta = state_from_measure(&VectorMap::basis(&x), &nu).unwrap();
                let back = measure_from_state(&eta).unwrap();
                for o in 0..x.num_orbits() {
                    worst = worst.max(rel(back.weight(o), nu.weight(o)));
                }
            }
        }
    }
    outcome(
        bad == 0 && worst <= STATE_TOL,
        format!("{objects} nonzero objects, {bad} without a nonzero finite valuation, state round trip deviation {worst:e} (tol {STATE_TOL:e})"),
    )
}

fn cli_determinism() -> Outcome {
    let mut problems = Vec::new();
    for (name, args) in common::GOLDEN_CASES {
        let argv = common::golden_args(args);
        let first = common::strip_wall_time(&common::run(&argv).stdout);
        let second = common::strip_wall_time(&common::run(&argv).stdout);
        if first != second {
            problems.push(format!("{name}: two runs differ"));
        }
        if let Err(e) = common::check_golden(name, args) {
            problems.push(e);
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{} fixtures, two runs each plus the stored golden report{}",
            common::GOLDEN_CASES.len(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}
