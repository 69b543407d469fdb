use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Stationarity tolerance on `‖∇_y f0‖`.
pub const GRADIENT_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `y*(t) = argmin_y f0(y, t)` by damped Newton from `warm_start`.
///
/// Each Newton direction is halved until the trial point lies in the
/// objective's domain and decreases either the value (Armijo) or the
/// gradient norm. The start itself must lie in the domain.
pub fn solve_optimizer(objective: &dyn Objective, t: f64, warm_start: &[f64]) -> Result<Vec<f64>> {
    let mut y = warm_start.to_vec();
    let mut p = objective.partials_up_to(&y, t, 2)?;
    for _ in 0..MAX_ITERATIONS {
        let g = p.gradient().to_vec();
        let gnorm = norm(&g);
        if gnorm <= GRADIENT_TOLERANCE {
            return Ok(y);
        }
        let hessian = p.hessian()?.to_matrix();
        let direction = hessian
            .cholesky()
            .map(|c| -c.solve(&DVector::from_column_slice(&g)))
            .ok_or_else(|| {
                Error::Convergence(format!("Hessian not positive definite at t = {t}"))
            })?;
        let slope: f64 = direction.iter().zip(&g).map(|(d, g)| d * g).sum();
        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = y
                .iter()
                .zip(direction.iter())
                .map(|(a, d)| a + step * d)
                .collect();
            if let Ok(q) = objective.partials_up_to(&trial, t, 2) {
                let armijo = q.value() <= p.value() + 1e-4 * step * slope;
                if armijo || norm(q.gradient()) < gnorm {
                    break Some((trial, q));
                }
            }
            step *= 0.5;
            if step < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some((trial, q)) => {
                y = trial;
                p = q;
            }
            None => {
                return Err(Error::Convergence(format!(
                    "line search stalled at t = {t} with ‖∇f0‖ = {gnorm:e}"
                )))
            }
        }
    }
    let gnorm = norm(p.gradient());
    if gnorm <= GRADIENT_TOLERANCE {
        return Ok(y);
    }
    Err(Error::Convergence(format!(
        "{MAX_ITERATIONS} Newton iterations at t = {t} left ‖∇f0‖ = {gnorm:e}"
    )))
}
