use serde::Serialize;

use super::spec::{ObjectiveModel, Scenario, ScenarioSpec, TrackingCriterion};
use crate::error::{Error, Result};
use crate::sim::{check_bound, error_dynamics_residual, BoundReport, SimOutcome, SimTrace};

/// Machine-readable record of a failed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    /// Time the error was raised, when known.
    pub t: Option<f64>,
}

impl ErrorRecord {
    pub fn new(error: &Error, t: Option<f64>) -> Self {
        ErrorRecord {
            kind: error.kind().into(),
            message: error.to_string(),
            t: t.filter(|t| t.is_finite()),
        }
    }
}

/// Outcome of one success criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    /// Measured worst value.
    pub value: f64,
    pub threshold: f64,
}

/// Everything a run produces apart from the trace samples.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub completed: bool,
    pub failure: Option<ErrorRecord>,
    pub bound: Option<BoundReport>,
    pub error_dynamics_residual: Option<f64>,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
    #[serde(skip)]
    pub trace: SimTrace,
}

fn tracking(scenario: &Scenario, trace: &SimTrace, c: &TrackingCriterion) -> CriterionResult {
    let d = scenario.agent_dim;
    let target = &scenario.targets[c.target];
    let window: Vec<f64> = trace
        .samples
        .iter()
        .filter(|s| s.t >= c.from - 1e-12 && s.t <= c.to + 1e-12)
        .map(|s| {
            let y = &s.y[c.agent * d..(c.agent + 1) * d];
            let r = target.position(s.t);
            y.iter()
                .zip(&r)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let covered = trace.last_time().is_some_and(|t| t >= c.to - 1e-12) && !window.is_empty();
    let worst = window.iter().copied().fold(f64::NAN, f64::max);
    CriterionResult {
        name: format!(
            "tracking agent {} to target {} on [{}, {}]",
            c.agent, c.target, c.from, c.to
        ),
        passed: covered && worst <= c.threshold,
        value: worst,
        threshold: c.threshold,
    }
}

fn barrier_domain(scenario: &Scenario, trace: &SimTrace, pole: f64) -> CriterionResult {
    let d = scenario.agent_dim;
    let worst = trace
        .samples
        .iter()
        .map(|s| (0..d).map(|i| (s.y[i] - s.y[d + i]).powi(2)).sum::<f64>())
        .fold(f64::NAN, f64::max);
    CriterionResult {
        name: "squared inter-agent distance below barrier pole".into(),
        passed: worst < pole,
        value: worst,
        threshold: pole,
    }
}

/// Evaluates the configured criteria on a (possibly partial) outcome.
pub fn evaluate(scenario: &Scenario, outcome: SimOutcome) -> RunReport {
    let spec = &scenario.spec;
    let trace = outcome.trace;
    let mut criteria: Vec<CriterionResult> = spec
        .criteria
        .tracking
        .iter()
        .map(|c| tracking(scenario, &trace, c))
        .collect();
    if spec.criteria.barrier_domain {
        if let ObjectiveModel::BarrierSum { d, .. } = spec.objective.model {
            let mut result = barrier_domain(scenario, &trace, d);
            result.passed &= outcome.failure.is_none();
            criteria.push(result);
        }
    }
    let bound = spec.criteria.bound_check.then(|| {
        check_bound(
            &trace,
            &scenario.gains,
            scenario.closed_loop.objective().strong_convexity(),
        )
    });
    if let Some(b) = &bound {
        // With no samples the extrema are meaningless; report them as NaN.
        let measured = |v: f64| {
            if trace.samples.is_empty() {
                f64::NAN
            } else {
                v
            }
        };
        criteria.push(CriterionResult {
            name: "trajectory bound".into(),
            passed: b.trajectory_bound_ok && !trace.samples.is_empty(),
            value: measured(b.max_violation),
            threshold: b.resolution,
        });
        criteria.push(CriterionResult {
            name: "objective gap bound".into(),
            passed: b.objective_gap_ok && !trace.samples.is_empty(),
            value: measured(b.max_gap_excess.max(-b.min_gap)),
            threshold: b.resolution,
        });
    }
    let residual = spec.criteria.error_dynamics_residual.map(|threshold| {
        let r = error_dynamics_residual(&trace, &scenario.gains);
        criteria.push(CriterionResult {
            name: "error dynamics residual".into(),
            passed: r <= threshold && trace.samples.len() >= 5,
            value: r,
            threshold,
        });
        r
    });
    let failure = outcome
        .failure
        .map(|f| ErrorRecord::new(&f.error, Some(f.t)));
    let completed = failure.is_none();
    RunReport {
        scenario: spec.name.clone(),
        completed,
        passed: completed && criteria.iter().all(|c| c.passed),
        failure,
        bound,
        error_dynamics_residual: residual,
        criteria,
        trace,
    }
}

/// Builds and runs a scenario. Only configuration problems are returned as
/// errors; runtime failures end up in the report.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunReport> {
    let scenario = spec.build()?;
    let outcome = scenario
        .closed_loop
        .integrate(&scenario.initial, &spec.sim)?;
    Ok(evaluate(&scenario, outcome))
}
