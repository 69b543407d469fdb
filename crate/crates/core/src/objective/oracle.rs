//! Finite-difference reference for total gradient derivatives.
//!
//! Independent of [`super::engine`]: it only evaluates the gradient along the
//! composed map `s ↦ ∇_y f0(y(s), s)` and differentiates that numerically.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    evaluate_partials, total_gradient_derivative, BarrierSum, DerivativeStack,
    ExpWeightedQuadratic, Objective, QuadraticTracking, SwitchingBlend, DEFAULT_PARTIAL_ORDER,
};
use crate::error::{Error, Result};
use crate::path::{HarmonicPath, Path};

/// Step used for a `j`-th derivative.
pub fn step_for_order(j: usize) -> f64 {
    match j {
        0 | 1 => 1e-5,
        2 => 1e-3,
        _ => 2e-2,
    }
}

/// Offsets (in units of the step) of the central stencil for order `j`.
fn stencil_points(j: usize) -> Vec<f64> {
    let half: i32 = match j {
        0 => 0,
        1 | 2 => 1,
        _ => 4,
    };
    (-half..=half).map(f64::from).collect()
}

/// Fornberg's recursion: weights of the `order`-th derivative at `x0` for
/// samples at `points`.
pub fn fornberg_weights(x0: f64, points: &[f64], order: usize) -> Vec<f64> {
    let n = points.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = points[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = points[i] - x0;
        for j in 0..i {
            let c3 = points[i] - points[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// `d^j/dt^j ∇_y f0(y(t), t)` by central differences along `trajectory`.
///
/// Orders 1 and 2 use three-point stencils with steps `1e-5` and `1e-3`;
/// higher orders use a nine-point stencil (eighth-order accurate for `j = 3`).
pub fn finite_difference_oracle(
    objective: &dyn Objective,
    trajectory: &dyn Path,
    t: f64,
    j: usize,
) -> Result<Vec<f64>> {
    let gradient_at = |s: f64| objective.gradient(&trajectory.position(s), s);
    if j == 0 {
        return gradient_at(t);
    }
    let h = step_for_order(j);
    let offsets = stencil_points(j);
    let weights = fornberg_weights(0.0, &offsets, j);
    let mut out = vec![0.0; objective.output_dim()];
    for (offset, w) in offsets.iter().zip(&weights) {
        if *w == 0.0 {
            continue;
        }
        let g = gradient_at(t + offset * h)?;
        for (o, gi) in out.iter_mut().zip(g) {
            *o += w * gi;
        }
    }
    let scale = h.powi(j as i32);
    Ok(out.into_iter().map(|v| v / scale).collect())
}

/// Agreement bound between engine and oracle.
pub const LEMMA_TOLERANCE: f64 = 1e-5;

/// `‖engine − oracle‖ / max(‖engine‖, 1)`.
pub fn relative_error(engine: &[f64], oracle: &[f64]) -> f64 {
    let diff = engine
        .iter()
        .zip(oracle)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = engine.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0);
    diff / scale
}

/// Worst agreement seen for one derivative order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderResult {
    pub order: usize,
    pub max_relative_error: f64,
    /// Seed of the trial that produced the worst error.
    pub worst_seed: u64,
    pub worst_objective: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub trials: usize,
    pub partial_cap: usize,
    pub orders: Vec<OrderResult>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.orders
            .iter()
            .all(|o| o.max_relative_error <= LEMMA_TOLERANCE)
    }
}

/// One randomized objective together with a trajectory inside its domain.
pub struct LemmaCase {
    pub name: &'static str,
    pub objective: Box<dyn Objective>,
    pub trajectory: HarmonicPath,
    pub t: f64,
}

fn random_path(rng: &mut ChaCha8Rng, dim: usize) -> HarmonicPath {
    HarmonicPath::random(rng, dim, 3, 1.0, 1.5)
}

/// Builds trial `index` of the suite. Trials cycle through the built-in
/// objectives: quadratic tracking, exponentially weighted quadratic,
/// switching blend, and the two-agent barrier.
pub fn lemma_case(seed: u64, index: usize, partial_cap: usize) -> Result<LemmaCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.random_range(0.0..10.0);
    let case = match index % 4 {
        0 => {
            let target = random_path(&mut rng, 2);
            LemmaCase {
                name: "quadratic_tracking",
                objective: Box::new(
                    QuadraticTracking::new(Arc::new(target)).with_max_order(partial_cap)?,
                ),
                trajectory: random_path(&mut rng, 2),
                t,
            }
        }
        1 => {
            let rate = rng.random_range(-0.5..0.5);
            let center = random_path(&mut rng, 2);
            LemmaCase {
                name: "exp_weighted_quadratic",
                objective: Box::new(
                    ExpWeightedQuadratic::new(rate, Arc::new(center))
                        .with_max_order(partial_cap)?,
                ),
                trajectory: random_path(&mut rng, 2),
                t,
            }
        }
        2 => {
            let first = random_path(&mut rng, 2);
            let second = random_path(&mut rng, 2);
            let center = t + rng.random_range(-3.0..3.0);
            let width = rng.random_range(1.0..3.0);
            LemmaCase {
                name: "switching_blend",
                objective: Box::new(
                    SwitchingBlend::new(Arc::new(first), Arc::new(second), center, width)?
                        .with_max_order(partial_cap)?,
                ),
                trajectory: random_path(&mut rng, 2),
                t,
            }
        }
        _ => {
            let first = random_path(&mut rng, 2);
            let second = random_path(&mut rng, 2);
            let gain = rng.random_range(0.01..0.5);
            // Second agent = first agent plus a small excursion, so the
            // squared separation stays well below the pole at 2.
            let lead = random_path(&mut rng, 2);
            let gap = HarmonicPath::random(&mut rng, 2, 2, 0.2, 1.5);
            let mut offset = lead.offset.clone();
            offset.extend(
                lead.offset
                    .iter()
                    .zip(&gap.offset)
                    .map(|(a, b)| a + 0.3 * b),
            );
            let mut drift = lead.drift.clone();
            drift.extend(lead.drift.iter().zip(&gap.drift).map(|(a, b)| a + 0.1 * b));
            let mut terms = lead.terms.clone();
            terms.extend(
                lead.terms
                    .iter()
                    .zip(&gap.terms)
                    .map(|(a, b)| a.iter().chain(b).copied().collect()),
            );
            LemmaCase {
                name: "barrier_sum",
                objective: Box::new(
                    BarrierSum::new(Arc::new(first), Arc::new(second), 2.0, gain)?
                        .with_max_order(partial_cap)?,
                ),
                trajectory: HarmonicPath {
                    offset,
                    drift,
                    terms,
                },
                t,
            }
        }
    };
    Ok(case)
}

/// Engine and oracle values of `∇_y^(j) f0` for one case.
pub fn compare(case: &LemmaCase, j: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let y = case.trajectory.position(case.t);
    let partials = evaluate_partials(case.objective.as_ref(), &y, case.t)?;
    let stack = DerivativeStack::from_path(&case.trajectory, case.t, j + 1)?;
    let engine = total_gradient_derivative(&partials, &stack, j)?;
    let oracle = finite_difference_oracle(case.objective.as_ref(), &case.trajectory, case.t, j)?;
    Ok((engine, oracle))
}

/// Runs `trials` randomized objective/trajectory pairs per order and
/// reports the worst relative error of the engine against the oracle.
///
/// Trial `i` is seeded with `seed + i`, so a failing trial can be rebuilt on
/// its own with [`lemma_case`]. Orders needing partials above `partial_cap`
/// fail with [`Error::Order`].
pub fn lemma_suite(
    orders: &[usize],
    trials: usize,
    seed: u64,
    partial_cap: usize,
) -> Result<LemmaReport> {
    if let Some(&j) = orders.iter().find(|&&j| j + 1 > partial_cap) {
        return Err(Error::Order(format!(
            "order {j} needs partials of order {}, cap is {partial_cap}",
            j + 1
        )));
    }
    if orders.contains(&0) {
        return Err(Error::Config("lemma orders start at 1".into()));
    }
    let mut results = Vec::with_capacity(orders.len());
    for &j in orders {
        let mut worst = OrderResult {
            order: j,
            max_relative_error: 0.0,
            worst_seed: seed,
            worst_objective: String::new(),
        };
        for i in 0..trials {
            let trial_seed = seed.wrapping_add(i as u64);
            let case = lemma_case(trial_seed, i, partial_cap)?;
            let (engine, oracle) = compare(&case, j)?;
            let err = relative_error(&engine, &oracle);
            // NaN counts as the worst possible outcome.
            if !(err <= worst.max_relative_error) {
                worst.max_relative_error = if err.is_nan() { f64::INFINITY } else { err };
                worst.worst_seed = trial_seed;
                worst.worst_objective = case.name.into();
            }
        }
        results.push(worst);
    }
    Ok(LemmaReport {
        seed,
        trials,
        partial_cap,
        orders: results,
    })
}

/// Default cap, re-exported for callers of [`lemma_suite`].
pub const LEMMA_DEFAULT_CAP: usize = DEFAULT_PARTIAL_ORDER;
