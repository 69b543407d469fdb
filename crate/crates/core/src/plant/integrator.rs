use nalgebra::{DMatrix, DVector};

use super::{Decoupling, Plant};
use crate::error::{Error, Result};

/// `ẋ = u, y = x` in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrator {
    dim: usize,
}

impl Integrator {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config(
                "integrator dimension must be at least 1".into(),
            ));
        }
        Ok(Integrator { dim })
    }
}

impl Plant for Integrator {
    fn name(&self) -> &str {
        "integrator"
    }

    fn state_dim(&self) -> usize {
        self.dim
    }

    fn input_dim(&self) -> usize {
        self.dim
    }

    fn compensator_dim(&self) -> usize {
        0
    }

    fn relative_degrees(&self) -> Vec<usize> {
        vec![1; self.dim]
    }

    fn dynamics(&self, _x: &[f64], u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }

    fn output(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }

    fn output_derivatives(&self, x: &[f64], _zeta: &[f64]) -> Vec<Vec<f64>> {
        x.iter().map(|&xi| vec![xi]).collect()
    }

    fn decoupling(&self, _x: &[f64], _zeta: &[f64]) -> Result<Decoupling> {
        Ok(Decoupling {
            drift: DVector::zeros(self.dim),
            matrix: DMatrix::identity(self.dim, self.dim),
        })
    }

    fn feedback(&self, _x: &[f64], _zeta: &[f64], w: &[f64]) -> Vec<f64> {
        w.to_vec()
    }

    fn compensator_rate(&self, _x: &[f64], _zeta: &[f64], _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::uniform_stack;

    #[test]
    fn output_stack_and_decoupling() {
        let p = Integrator::new(2).unwrap();
        let stack = uniform_stack(&p, &[3.0, 4.0], &[]).unwrap();
        assert_eq!(stack.as_slices(), &[vec![3.0, 4.0]]);
        let d = p.decoupling(&[3.0, 4.0], &[]).unwrap();
        assert_eq!(d.drift, DVector::zeros(2));
        assert_eq!(d.matrix, DMatrix::identity(2, 2));
        assert_eq!(p.dynamics(&[3.0, 4.0], &[0.5, -1.0]), vec![0.5, -1.0]);
        assert!(Integrator::new(0).is_err());
    }
}
