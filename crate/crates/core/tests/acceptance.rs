//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tvopt::objective::oracle::{lemma_suite, LEMMA_DEFAULT_CAP, LEMMA_TOLERANCE};
use tvopt::objective::{evaluate_partials, DerivativeStack, QuadraticTracking};
use tvopt::path::{HarmonicPath, Path};
use tvopt::planner::{
    closed_loop_error_matrix, compute_y_imp, control_input_nonuniform, control_input_uniform,
    design_gains,
};
use tvopt::plant::{attach_auxiliary_chains, Plant, Wmr, DEFAULT_SINGULARITY_EPSILON};
use tvopt::scenario::{builtin, run_scenario, RunReport};
use tvopt::sim::{error_dynamics_residual, SimConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn run(name: &str) -> RunReport {
    run_scenario(&builtin(name).expect("builtin scenario")).expect("scenario builds")
}

fn criterion(report: &RunReport, prefix: &str) -> Vec<(bool, f64, f64)> {
    report
        .criteria
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .map(|c| (c.passed, c.value, c.threshold))
        .collect()
}

/// 1. Engine vs oracle, orders 1 to 3, 100 randomized pairs, under 10 s.
fn lemma() -> Outcome {
    let (report, elapsed) = timed(|| lemma_suite(&[1, 2, 3], 100, 2024, LEMMA_DEFAULT_CAP));
    match report {
        Ok(r) => {
            let worst = r
                .orders
                .iter()
                .map(|o| o.max_relative_error)
                .fold(0.0, f64::max);
            let fast = elapsed < Duration::from_secs(10);
            outcome(
                r.passed() && fast,
                format!(
                    "max relative error {worst:.2e} (limit {LEMMA_TOLERANCE:e}), {elapsed:.2?}"
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

/// 2. Quadratic tracking with k = 2 reduces to a PD law.
fn pd_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let target = Arc::new(HarmonicPath::random(&mut rng, 2, 3, 2.0, 3.0));
        let f = QuadraticTracking::new(target.clone());
        let p1 = -rng.random_range(0.5..5.0);
        let p2 = p1 - rng.random_range(0.1..5.0);
        let gains = design_gains(&[Complex64::new(p1, 0.0), Complex64::new(p2, 0.0)], 2).unwrap();
        let t = rng.random_range(0.0..20.0);
        let y: Vec<f64> = (0..2).map(|_| rng.random_range(-10.0..10.0)).collect();
        let yd: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..5.0)).collect();
        let partials = evaluate_partials(&f, &y, t).unwrap();
        let stack = DerivativeStack::new(vec![y.clone(), yd.clone()]).unwrap();
        let y_imp = compute_y_imp(&partials, &stack, &gains).unwrap();
        let (r, rd, rdd) = (
            target.position(t),
            target.derivative(t, 1),
            target.derivative(t, 2),
        );
        let (kp, kd) = (gains.kp(), gains.kd().unwrap());
        for i in 0..2 {
            let pd = rdd[i] - kp * (y[i] - r[i]) - kd * (yd[i] - rd[i]);
            worst = worst.max((y_imp[i] - pd).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |y_imp − PD| = {worst:.2e} over 1000 inputs"),
    )
}

/// 3. Integrator plus quadratic tracking with P = I is an exact gradient flow.
fn gradient_flow() -> Outcome {
    let report = run("gradient_flow");
    let samples = &report.trace.samples;
    let g0 = samples[0].stack_norms[0];
    let worst = samples
        .iter()
        .map(|s| {
            let expected = (-s.t).exp() * g0;
            (s.stack_norms[0] - expected).abs() / expected
        })
        .fold(0.0, f64::max);
    let covered = report.trace.last_time() == Some(10.0);
    outcome(
        report.completed && covered && worst <= 1e-6,
        format!("max relative deviation from e^(-t) decay {worst:.2e} on [0, 10]"),
    )
}

/// 4. Exponential bound on the switching run, in under 5 s.
fn theorem_bound() -> Outcome {
    let (report, elapsed) = timed(|| run("switching"));
    let Some(b) = &report.bound else {
        return outcome(false, "no bound report");
    };
    let fast = elapsed < Duration::from_secs(5);
    outcome(
        report.completed && b.passed() && fast,
        format!(
            "C = {:.4}, c = {:.4}, α = {}, max violation {:.2e}, gap excess {:.2e}, min gap {:.2e}, {elapsed:.2?}",
            b.c_constant, b.bound_c, b.alpha, b.max_violation, b.max_gap_excess, b.min_gap
        ),
    )
}

/// 5. Finite-differenced gradient stack obeys the designed error dynamics.
fn error_dynamics(switching: &RunReport, multi: &RunReport) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for report in [switching, multi] {
        for (passed, value, threshold) in criterion(report, "error dynamics") {
            ok &= passed && threshold <= 1e-3;
            worst = worst.max(value);
        }
        ok &= report.error_dynamics_residual.is_some();
    }
    // Informational: the same check at the library default tolerances.
    let mut spec = builtin("switching").unwrap();
    spec.sim = SimConfig {
        t_end: spec.sim.t_end,
        ..SimConfig::default()
    };
    let scenario = spec.build().unwrap();
    let default_run = run_scenario(&spec).unwrap();
    let at_default = error_dynamics_residual(&default_run.trace, &scenario.gains);
    outcome(
        ok && worst <= 1e-3,
        format!(
            "max relative residual {worst:.2e} (switching, multi_robot at rtol 1e-12); \
             {at_default:.2e} at rtol 1e-8"
        ),
    )
}

/// 6. Switching scenario tracks object 1 then object 2.
fn switching_tracking(report: &RunReport) -> Outcome {
    let c = criterion(report, "tracking");
    let ok = report.completed && c.len() == 2 && c.iter().all(|(p, _, t)| *p && *t <= 0.1);
    outcome(
        ok,
        format!(
            "distance to object 1 on [4, 5] ≤ {:.2e}, to object 2 on [16, 20] ≤ {:.2e}",
            c[0].1, c[1].1
        ),
    )
}

/// 7. Multi-robot scenario stays inside the barrier and tracks after 10 s.
fn multi_robot(report: &RunReport) -> Outcome {
    let tracking = criterion(report, "tracking");
    let barrier = criterion(report, "squared inter-agent");
    let ok = report.completed
        && tracking.len() == 2
        && tracking.iter().all(|(p, _, t)| *p && *t <= 0.1)
        && barrier.len() == 1
        && barrier[0].0
        && report.trace.last_time() == Some(20.0);
    outcome(
        ok,
        format!(
            "max squared distance {:.4} (< 2), tracking after 10 s ≤ {:.2e}",
            barrier[0].1,
            tracking.iter().map(|c| c.1).fold(0.0, f64::max)
        ),
    )
}

/// Largest distance between a designed pole and the matching eigenvalue of
/// `H`, or infinity if an eigenvalue solve fails.
///
/// `H = companion ⊗ I_m` is permuted to `I_m ⊗ companion`, whose diagonal
/// blocks are solved separately. The permutation is an exact similarity.
/// Repeated eigenvalues of the unpermuted `H` can stall the Schur iteration.
fn eigen_round_trip(poles: &[Complex64], m: usize) -> f64 {
    let gains = design_gains(poles, m).unwrap();
    let h: DMatrix<f64> = closed_loop_error_matrix(&gains);
    let k = poles.len();
    let permuted = DMatrix::from_fn(k * m, k * m, |r, c| {
        h[((r % k) * m + r / k, (c % k) * m + c / k)]
    });
    let off_block =
        (0..k * m).any(|r| (0..k * m).any(|c| r / k != c / k && permuted[(r, c)] != 0.0));
    if off_block {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for block in 0..m {
        let sub = permuted.view((block * k, block * k), (k, k)).into_owned();
        let Some(schur) = Schur::try_new(sub, f64::EPSILON, 10_000) else {
            return f64::INFINITY;
        };
        let mut eig: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
        for p in poles {
            let (idx, dist) = eig
                .iter()
                .enumerate()
                .map(|(i, z)| (i, (z - p).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            worst = worst.max(dist);
            eig.swap_remove(idx);
        }
    }
    worst
}

/// 8. Pole round-trip and non-uniform law with empty chains.
fn poles_and_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_pole: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let mut poles = Vec::new();
        let mut re = -rng.random_range(0.5..1.5);
        while poles.len() < k {
            if k - poles.len() >= 2 && rng.random_bool(0.4) {
                let im = rng.random_range(0.3..2.0);
                poles.push(Complex64::new(re, im));
                poles.push(Complex64::new(re, -im));
            } else {
                poles.push(Complex64::new(re, 0.0));
            }
            re -= rng.random_range(0.3..1.5);
        }
        worst_pole = worst_pole.max(eigen_round_trip(&poles, m));
    }

    let wmr: Arc<dyn Plant> = Arc::new(Wmr::new(DEFAULT_SINGULARITY_EPSILON).unwrap());
    let ext = attach_auxiliary_chains(wmr.clone(), 2).unwrap();
    let gains = design_gains(&[Complex64::new(-2.0, 0.0), Complex64::new(-3.0, 0.0)], 2).unwrap();
    let mut identical = 0;
    for _ in 0..100 {
        let f = QuadraticTracking::new(Arc::new(HarmonicPath::random(&mut rng, 2, 2, 2.0, 2.0)));
        let x = [
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-3.2..3.2),
        ];
        let speed = rng.random_range(0.05..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let t = rng.random_range(0.0..20.0);
        let a = control_input_uniform(wmr.as_ref(), &f, &x, &[speed], t, &gains).unwrap();
        let b = control_input_nonuniform(&ext, &f, &x, &[speed], &[], t, &gains).unwrap();
        let same = |p: &[f64], q: &[f64]| {
            p.len() == q.len() && p.iter().zip(q).all(|(u, v)| u.to_bits() == v.to_bits())
        };
        if same(&a.u, &b.u)
            && same(&a.w, &b.w)
            && same(&a.zeta_rate, &b.zeta_rate)
            && b.xi_rate.is_empty()
        {
            identical += 1;
        }
    }
    outcome(
        worst_pole <= 1e-9 && identical == 100,
        format!("max pole round-trip error {worst_pole:.2e} over 200 designs; {identical}/100 states bit-identical"),
    )
}

/// 9. Zero forward speed aborts with a singularity error and no NaN.
fn singularity() -> Outcome {
    let mut spec = builtin("switching").unwrap();
    spec.wmr.as_mut().unwrap().u1_init = 0.0;
    let at_start = run_scenario(&spec).unwrap();
    let start_ok = at_start
        .failure
        .as_ref()
        .is_some_and(|f| f.kind == "SingularityError" && f.t == Some(0.0));

    // Target directly behind a robot moving forward: the speed must pass
    // through zero on the way.
    let mut spec = builtin("switching").unwrap();
    spec.objective.model = serde_json::from_value(serde_json::json!({
        "kind": "quadratic_tracking",
        "target": {"type": "constant", "position": [-5.0, 10.0]}
    }))
    .unwrap();
    spec.criteria.tracking.clear();
    let crossing = run_scenario(&spec).unwrap();
    let crossing_ok = crossing
        .failure
        .as_ref()
        .is_some_and(|f| f.kind == "SingularityError" && f.t.is_some_and(|t| t > 0.0));
    let finite = [&at_start, &crossing]
        .iter()
        .all(|r| r.trace.samples.iter().all(|s| s.is_finite()));
    outcome(
        start_ok && crossing_ok && finite,
        format!(
            "u1(0) = 0 fails at t = {:?}; reversal fails at t = {:?}; traces finite: {finite}",
            at_start.failure.as_ref().and_then(|f| f.t),
            crossing.failure.as_ref().and_then(|f| f.t)
        ),
    )
}

fn main() {
    let switching = run("switching");
    let multi = run("multi_robot");
    let results = [
        ("lemma suite", lemma()),
        ("PD reduction", pd_reduction()),
        ("analytic gradient flow", gradient_flow()),
        ("exponential bound", theorem_bound()),
        (
            "error-dynamics realization",
            error_dynamics(&switching, &multi),
        ),
        ("switching scenario", switching_tracking(&switching)),
        ("multi-robot scenario", multi_robot(&multi)),
        ("pole round-trip and empty chains", poles_and_reduction()),
        ("singularity contract", singularity()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
