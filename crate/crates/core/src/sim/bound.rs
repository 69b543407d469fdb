use serde::Serialize;

use super::trace::SimTrace;
use crate::planner::{closed_loop_error_matrix, GainProfile};

/// Numerical resolution of the bound checks. Violations below this are
/// attributed to integration and Newton error, not to the bound.
pub const BOUND_RESOLUTION: f64 = 1e-8;

/// Norm below which the error-dynamics residual is measured absolutely.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

/// Tracking errors below this are left out of the decay-rate fit.
const FIT_FLOOR: f64 = 1e-9;

/// Outcome of checking `‖y − y*‖ ≤ C e^{−α(t−t0)}` and
/// `0 ≤ f0(y) − f0(y*) ≤ m_f C² e^{−2α(t−t0)}` on every sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "C")]
    pub c_constant: f64,
    pub alpha: f64,
    pub bound_c: f64,
    pub strong_convexity: f64,
    /// `max (‖y − y*‖ − C e^{−α(t−t0)})`; negative when the bound holds with room.
    pub max_violation: f64,
    pub max_violation_time: f64,
    /// Largest excess of the gap over `m_f C² e^{−2α(t−t0)}`.
    pub max_gap_excess: f64,
    /// Smallest `f0(y) − f0(y*)`; negative only through roundoff.
    pub min_gap: f64,
    pub resolution: f64,
    pub trajectory_bound_ok: bool,
    pub objective_gap_ok: bool,
    /// `−slope` of a least-squares line through `log ‖y − y*‖`, over samples
    /// where the error exceeds `1e-9`. `None` with fewer than two such samples.
    pub fitted_rate: Option<f64>,
    pub samples: usize,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.trajectory_bound_ok && self.objective_gap_ok
    }
}

/// Checks the exponential bounds on a trace.
///
/// `C` is recomputed from the first sample's gradient stack, and the
/// certified `(c, α)` come from `gains`.
pub fn check_bound(trace: &SimTrace, gains: &GainProfile, strong_convexity: f64) -> BoundReport {
    let t0 = trace.samples.first().map_or(0.0, |s| s.t);
    let c_constant = trace.samples.first().map_or(0.0, |s| {
        let sq: f64 = s.stack_norms.iter().map(|n| n * n).sum();
        gains.bound_c / strong_convexity * sq.sqrt()
    });
    let alpha = gains.alpha;
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_violation_time = t0;
    let mut max_gap_excess = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    let mut fit = Vec::new();
    for s in &trace.samples {
        let decay = (-alpha * (s.t - t0)).exp();
        let err = s.tracking_error();
        let violation = err - c_constant * decay;
        if violation > max_violation {
            max_violation = violation;
            max_violation_time = s.t;
        }
        let gap = s.objective_value - s.optimal_value;
        min_gap = min_gap.min(gap);
        max_gap_excess = max_gap_excess.max(gap - strong_convexity * (c_constant * decay).powi(2));
        if err > FIT_FLOOR {
            fit.push((s.t, err.ln()));
        }
    }
    BoundReport {
        c_constant,
        alpha,
        bound_c: gains.bound_c,
        strong_convexity,
        max_violation,
        max_violation_time,
        max_gap_excess,
        min_gap,
        resolution: BOUND_RESOLUTION,
        trajectory_bound_ok: max_violation <= BOUND_RESOLUTION,
        objective_gap_ok: min_gap >= -BOUND_RESOLUTION && max_gap_excess <= BOUND_RESOLUTION,
        fitted_rate: fitted_slope(&fit).map(|s| -s),
        samples: trace.samples.len(),
    }
}

fn fitted_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Largest mismatch between `d/dt col(∇_y f0, …, ∇_y^(k−1) f0)`, taken by
/// a five-point central difference on the sample grid, and `H · col(…)`.
///
/// Relative to `‖H · col(…)‖` where that is at least `1e-9`, absolute below.
/// The grid must be uniform; the last partial interval of a grid that does
/// not divide the horizon is skipped. Returns 0 with fewer than five samples.
pub fn error_dynamics_residual(trace: &SimTrace, gains: &GainProfile) -> f64 {
    let samples = &trace.samples;
    if samples.len() < 5 {
        return 0.0;
    }
    let h_mat = closed_loop_error_matrix(gains);
    let dt = samples[1].t - samples[0].t;
    let stacked: Vec<nalgebra::DVector<f64>> = samples
        .iter()
        .map(|s| {
            nalgebra::DVector::from_iterator(
                h_mat.nrows(),
                s.gradient_stack.iter().flatten().copied(),
            )
        })
        .collect();
    let uniform = |i: usize| ((samples[i].t - samples[i - 1].t) - dt).abs() <= 1e-9 * dt.max(1.0);
    let mut worst: f64 = 0.0;
    for i in 2..samples.len() - 2 {
        if !(i - 1..=i + 2).all(uniform) {
            continue;
        }
        let fd = (&stacked[i - 2] - &stacked[i - 1] * 8.0 + &stacked[i + 1] * 8.0
            - &stacked[i + 2])
            / (12.0 * dt);
        let model = &h_mat * &stacked[i];
        let diff = (fd - &model).norm();
        let scale = model.norm();
        let r = if scale >= RESIDUAL_FLOOR {
            diff / scale
        } else {
            diff
        };
        worst = worst.max(r);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::design_gains;
    use crate::sim::trace::Sample;
    use num_complex::Complex64;

    fn sample(t: f64, err: f64, stack: Vec<Vec<f64>>) -> Sample {
        Sample {
            t,
            x: vec![],
            zeta: vec![],
            xi: vec![],
            y: vec![err],
            y_star: vec![0.0],
            stack_norms: stack.iter().map(|g| g[0].abs()).collect(),
            gradient_stack: stack,
            u: vec![0.0],
            objective_value: 0.5 * err * err,
            optimal_value: 0.0,
            envelope: 0.0,
        }
    }

    fn trace(samples: Vec<Sample>) -> SimTrace {
        SimTrace {
            output_dim: 1,
            order: 1,
            input_dim: 1,
            bound_constant: 0.0,
            alpha: 0.0,
            samples,
        }
    }

    #[test]
    fn exact_exponential_satisfies_bound_and_dynamics() {
        let g = design_gains(&[Complex64::new(-1.0, 0.0)], 1).unwrap();
        let tr = trace(
            (0..=500)
                .map(|i| {
                    let t = i as f64 * 0.01;
                    let e = (-t).exp();
                    sample(t, e, vec![vec![e]])
                })
                .collect(),
        );
        let r = check_bound(&tr, &g, 1.0);
        assert!(r.passed());
        assert!(r.max_violation <= 0.0);
        assert!((r.c_constant - 1.0).abs() < 1e-15);
        let rate = r.fitted_rate.unwrap();
        assert!((rate - 1.0).abs() < 1e-9 && rate >= 0.99 * r.alpha);
        assert!(error_dynamics_residual(&tr, &g) < 1e-8);
    }

    #[test]
    fn trace_at_the_optimum_has_zero_constant() {
        let g = design_gains(&[Complex64::new(-1.0, 0.0)], 1).unwrap();
        let tr = trace(
            (0..10)
                .map(|i| sample(i as f64 * 0.01, 0.0, vec![vec![0.0]]))
                .collect(),
        );
        let r = check_bound(&tr, &g, 1.0);
        assert_eq!(r.c_constant, 0.0);
        assert!(r.passed() && r.max_violation <= 1e-8);
        assert_eq!(r.fitted_rate, None);
        assert!(error_dynamics_residual(&tr, &g) <= 1e-6);
    }

    #[test]
    fn slow_decay_is_a_violation() {
        let g = design_gains(&[Complex64::new(-1.0, 0.0)], 1).unwrap();
        let tr = trace(
            (0..=300)
                .map(|i| {
                    let t = i as f64 * 0.01;
                    let e = (-0.5 * t).exp();
                    sample(t, e, vec![vec![if i == 0 { 1.0 } else { e }]])
                })
                .collect(),
        );
        let r = check_bound(&tr, &g, 1.0);
        assert!(!r.trajectory_bound_ok);
        assert!(r.max_violation > 0.1);
        assert!(error_dynamics_residual(&tr, &g) > 0.4);
    }
}
