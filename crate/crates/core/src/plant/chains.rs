use nalgebra::{DMatrix, DVector};

use super::{Decoupling, Plant};
use crate::error::{Error, Result};

/// Decoupled integrator chains in Brunovsky form: channel `i` is a chain of
/// `r_i` integrators driven by `u_i`, with `y_i` the head of the chain.
///
/// The state is the concatenation of the chains, each ordered
/// `(y_i, ẏ_i, …, y_i^(r_i − 1))`. Useful as the simplest plant with
/// non-uniform relative degree.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorChains {
    degrees: Vec<usize>,
    offsets: Vec<usize>,
}

impl IntegratorChains {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::Config(format!(
                "chain degrees must be non-empty and positive, got {degrees:?}"
            )));
        }
        let offsets = degrees
            .iter()
            .scan(0, |acc, &r| {
                let start = *acc;
                *acc += r;
                Some(start)
            })
            .collect();
        Ok(IntegratorChains { degrees, offsets })
    }
}

impl Plant for IntegratorChains {
    fn name(&self) -> &str {
        "integrator_chains"
    }

    fn state_dim(&self) -> usize {
        self.degrees.iter().sum()
    }

    fn input_dim(&self) -> usize {
        self.degrees.len()
    }

    fn compensator_dim(&self) -> usize {
        0
    }

    fn relative_degrees(&self) -> Vec<usize> {
        self.degrees.clone()
    }

    fn dynamics(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; x.len()];
        for (i, (&r, &o)) in self.degrees.iter().zip(&self.offsets).enumerate() {
            for j in 0..r - 1 {
                dx[o + j] = x[o + j + 1];
            }
            dx[o + r - 1] = u[i];
        }
        dx
    }

    fn output(&self, x: &[f64]) -> Vec<f64> {
        self.offsets.iter().map(|&o| x[o]).collect()
    }

    fn output_derivatives(&self, x: &[f64], _zeta: &[f64]) -> Vec<Vec<f64>> {
        self.degrees
            .iter()
            .zip(&self.offsets)
            .map(|(&r, &o)| x[o..o + r].to_vec())
            .collect()
    }

    fn decoupling(&self, _x: &[f64], _zeta: &[f64]) -> Result<Decoupling> {
        let m = self.degrees.len();
        Ok(Decoupling {
            drift: DVector::zeros(m),
            matrix: DMatrix::identity(m, m),
        })
    }

    fn feedback(&self, _x: &[f64], _zeta: &[f64], w: &[f64]) -> Vec<f64> {
        w.to_vec()
    }

    fn compensator_rate(&self, _x: &[f64], _zeta: &[f64], _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}
