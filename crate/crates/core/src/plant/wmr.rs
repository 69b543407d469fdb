use nalgebra::{DMatrix, DVector};

use super::{Decoupling, Plant};
use crate::error::{Error, Result};

/// Nonholonomic wheeled mobile robot (unicycle)
///
/// ```text
/// ẋ_1 = cos(x_3) u_1,   ẋ_2 = sin(x_3) u_1,   ẋ_3 = u_2,   y = (x_1, x_2)
/// ```
///
/// extended with the compensator `ζ = (u_1)`, `ζ̇_1 = w_1`, so that the
/// physical input is `u = (ζ_1, w_2)`. Differentiating the position twice
/// gives `ÿ = R(x, ζ) w` with
///
/// ```text
/// R = [[cos x_3, −ζ_1 sin x_3],
///      [sin x_3,  ζ_1 cos x_3]],   det R = ζ_1
/// ```
///
/// and zero drift: `ẏ = ζ_1 (cos x_3, sin x_3)` is linear in the forward
/// speed, so every second-order term carries an input. The composite has
/// relative degree `{2, 2}` and dimension 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Wmr {
    singularity_epsilon: f64,
}

impl Wmr {
    pub fn new(singularity_epsilon: f64) -> Result<Self> {
        if !(singularity_epsilon > 0.0) {
            return Err(Error::Config(format!(
                "singularity epsilon must be positive, got {singularity_epsilon}"
            )));
        }
        Ok(Wmr {
            singularity_epsilon,
        })
    }

    pub fn singularity_epsilon(&self) -> f64 {
        self.singularity_epsilon
    }
}

impl Plant for Wmr {
    fn name(&self) -> &str {
        "wmr"
    }

    fn state_dim(&self) -> usize {
        3
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn compensator_dim(&self) -> usize {
        1
    }

    fn relative_degrees(&self) -> Vec<usize> {
        vec![2, 2]
    }

    fn dynamics(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let (s, c) = x[2].sin_cos();
        vec![c * u[0], s * u[0], u[1]]
    }

    fn output(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0], x[1]]
    }

    fn output_derivatives(&self, x: &[f64], zeta: &[f64]) -> Vec<Vec<f64>> {
        let (s, c) = x[2].sin_cos();
        vec![vec![x[0], c * zeta[0]], vec![x[1], s * zeta[0]]]
    }

    fn decoupling(&self, x: &[f64], zeta: &[f64]) -> Result<Decoupling> {
        let speed = zeta[0];
        if !(speed.abs() >= self.singularity_epsilon) {
            return Err(Error::Singularity {
                t: f64::NAN,
                detail: format!(
                    "forward speed u1 = {speed:e} below {:e}",
                    self.singularity_epsilon
                ),
            });
        }
        let (s, c) = x[2].sin_cos();
        Ok(Decoupling {
            drift: DVector::zeros(2),
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s * speed, s, c * speed]),
        })
    }

    fn feedback(&self, _x: &[f64], zeta: &[f64], w: &[f64]) -> Vec<f64> {
        vec![zeta[0], w[1]]
    }

    fn compensator_rate(&self, _x: &[f64], _zeta: &[f64], w: &[f64]) -> Vec<f64> {
        vec![w[0]]
    }

    fn singularity_margins(&self, _x: &[f64], zeta: &[f64]) -> Vec<f64> {
        vec![zeta[0]]
    }
}
