use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::engine::binomial;
use crate::path::Path;

/// Number of basis functions `1, t, t², t³`.
pub const BASIS_SIZE: usize = 4;

/// Per-component cubic `φ_i(t) = Σ_j A_ij t^j` with closed-form derivatives.
///
/// Evaluation is not clamped to `interval`; the interval records where the
/// path was designed to be used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialPath {
    pub coefficients: Vec<[f64; BASIS_SIZE]>,
    pub interval: [f64; 2],
}

impl PolynomialPath {
    pub fn new(coefficients: Vec<[f64; BASIS_SIZE]>) -> Self {
        PolynomialPath {
            coefficients,
            interval: [f64::MIN, f64::MAX],
        }
    }

    pub fn with_interval(mut self, start: f64, end: f64) -> Self {
        self.interval = [start, end];
        self
    }
}

/// `d^order/dt^order t^j`, i.e. `j!/(j−order)! t^{j−order}`.
fn basis_derivative(j: usize, order: usize, t: f64) -> f64 {
    if order > j {
        return 0.0;
    }
    let falling: f64 = ((j - order + 1)..=j).map(|v| v as f64).product();
    falling * t.powi((j - order) as i32)
}

impl Path for PolynomialPath {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn derivative(&self, t: f64, order: usize) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|c| {
                (0..BASIS_SIZE)
                    .map(|j| c[j] * basis_derivative(j, order, t))
                    .sum()
            })
            .collect()
    }
}

/// Interpolation constraint: position and optionally velocity and
/// acceleration at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t: f64,
    pub position: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceleration: Option<Vec<f64>>,
}

impl Waypoint {
    pub fn at(t: f64, position: Vec<f64>) -> Self {
        Waypoint {
            t,
            position,
            velocity: None,
            acceleration: None,
        }
    }

    pub fn with_velocity(mut self, v: Vec<f64>) -> Self {
        self.velocity = Some(v);
        self
    }

    pub fn with_acceleration(mut self, a: Vec<f64>) -> Self {
        self.acceleration = Some(a);
        self
    }

    fn constraints(&self) -> impl Iterator<Item = (usize, &Vec<f64>)> {
        [
            Some(&self.position),
            self.velocity.as_ref(),
            self.acceleration.as_ref(),
        ]
        .into_iter()
        .enumerate()
        .filter_map(|(order, v)| v.map(|v| (order, v)))
    }
}

/// Fits a cubic per component through the waypoints.
///
/// The system is solved in the shifted variable `s = t − t_first`, so the
/// minimum-norm choice does not depend on where the time axis starts, and
/// then re-expanded in powers of `t`. Exactly four constraints are
/// interpolated; fewer give the minimum-norm solution and more a least
/// squares fit. Rank-deficient systems are rejected.
pub fn fit_polynomial_path(waypoints: &[Waypoint]) -> Result<PolynomialPath> {
    let first = waypoints
        .first()
        .ok_or_else(|| Error::Fit("no waypoints".into()))?;
    let dim = first.position.len();
    if dim == 0 {
        return Err(Error::Fit(
            "waypoints must have at least one component".into(),
        ));
    }
    for w in waypoints {
        if !w.t.is_finite() {
            return Err(Error::Fit(format!("non-finite waypoint time {}", w.t)));
        }
        for (_, v) in w.constraints() {
            if v.len() != dim {
                return Err(Error::Fit(format!(
                    "waypoint at t = {} has {} components, expected {dim}",
                    w.t,
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Fit(format!("non-finite constraint at t = {}", w.t)));
            }
        }
    }
    let t_ref = first.t;
    let rows: Vec<(f64, usize, &Vec<f64>)> = waypoints
        .iter()
        .flat_map(|w| {
            w.constraints()
                .map(move |(order, v)| (w.t - t_ref, order, v))
        })
        .collect();
    let a = DMatrix::from_fn(rows.len(), BASIS_SIZE, |r, j| {
        basis_derivative(j, rows[r].1, rows[r].0)
    });
    let b = DMatrix::from_fn(rows.len(), dim, |r, i| rows[r].2[i]);

    let shifted = if rows.len() == BASIS_SIZE {
        a.clone()
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Fit("interpolation system is singular".into()))?
    } else {
        let svd = a.clone().svd(true, true);
        let tol = 1e-12 * svd.singular_values.max().max(1.0);
        let rank = svd.rank(tol);
        if rank < rows.len().min(BASIS_SIZE) {
            return Err(Error::Fit(format!(
                "constraint system has rank {rank}, needs {}",
                rows.len().min(BASIS_SIZE)
            )));
        }
        svd.solve(&b, tol).map_err(|e| Error::Fit(e.to_string()))?
    };
    if shifted.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("fit produced non-finite coefficients".into()));
    }

    // Σ_j c_j (t − t_ref)^j = Σ_p t^p Σ_{j≥p} c_j C(j, p) (−t_ref)^{j−p}
    let coefficients = (0..dim)
        .map(|i| {
            let c = shifted.column(i);
            let mut out = [0.0; BASIS_SIZE];
            for (p, o) in out.iter_mut().enumerate() {
                *o = (p..BASIS_SIZE)
                    .map(|j| c[j] * binomial(j, p) * (-t_ref).powi((j - p) as i32))
                    .sum();
            }
            out
        })
        .collect();
    let t_min = waypoints.iter().map(|w| w.t).fold(f64::INFINITY, f64::min);
    let t_max = waypoints
        .iter()
        .map(|w| w.t)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PolynomialPath {
        coefficients,
        interval: [t_min, t_max],
    })
}
