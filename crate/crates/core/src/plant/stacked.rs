use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{Decoupling, Plant};
use crate::error::{Error, Result};

/// Independent plants side by side. States, inputs, outputs and
/// compensators concatenate; the decoupling matrix is block diagonal.
#[derive(Debug, Clone)]
pub struct StackedPlant {
    name: String,
    parts: Vec<Arc<dyn Plant>>,
}

#[derive(Clone, Copy)]
struct Span {
    state: usize,
    zeta: usize,
    input: usize,
}

impl StackedPlant {
    pub fn new(parts: Vec<Arc<dyn Plant>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Config(
                "stacked plant needs at least one part".into(),
            ));
        }
        let name = parts
            .iter()
            .map(|p| p.name().to_string())
            .collect::<Vec<_>>()
            .join("+");
        Ok(StackedPlant { name, parts })
    }

    pub fn parts(&self) -> &[Arc<dyn Plant>] {
        &self.parts
    }

    fn spans(&self) -> impl Iterator<Item = (&Arc<dyn Plant>, Span)> {
        self.parts.iter().scan(
            Span {
                state: 0,
                zeta: 0,
                input: 0,
            },
            |acc, p| {
                let here = *acc;
                acc.state += p.state_dim();
                acc.zeta += p.compensator_dim();
                acc.input += p.input_dim();
                Some((p, here))
            },
        )
    }
}

impl Plant for StackedPlant {
    fn name(&self) -> &str {
        &self.name
    }

    fn state_dim(&self) -> usize {
        self.parts.iter().map(|p| p.state_dim()).sum()
    }

    fn input_dim(&self) -> usize {
        self.parts.iter().map(|p| p.input_dim()).sum()
    }

    fn compensator_dim(&self) -> usize {
        self.parts.iter().map(|p| p.compensator_dim()).sum()
    }

    fn relative_degrees(&self) -> Vec<usize> {
        self.parts
            .iter()
            .flat_map(|p| p.relative_degrees())
            .collect()
    }

    fn dynamics(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.spans()
            .flat_map(|(p, s)| {
                p.dynamics(
                    &x[s.state..s.state + p.state_dim()],
                    &u[s.input..s.input + p.input_dim()],
                )
            })
            .collect()
    }

    fn output(&self, x: &[f64]) -> Vec<f64> {
        self.spans()
            .flat_map(|(p, s)| p.output(&x[s.state..s.state + p.state_dim()]))
            .collect()
    }

    fn output_derivatives(&self, x: &[f64], zeta: &[f64]) -> Vec<Vec<f64>> {
        self.spans()
            .flat_map(|(p, s)| {
                p.output_derivatives(
                    &x[s.state..s.state + p.state_dim()],
                    &zeta[s.zeta..s.zeta + p.compensator_dim()],
                )
            })
            .collect()
    }

    fn decoupling(&self, x: &[f64], zeta: &[f64]) -> Result<Decoupling> {
        let m = self.input_dim();
        let mut drift = DVector::zeros(m);
        let mut matrix = DMatrix::zeros(m, m);
        for (p, s) in self.spans() {
            let d = p.decoupling(
                &x[s.state..s.state + p.state_dim()],
                &zeta[s.zeta..s.zeta + p.compensator_dim()],
            )?;
            let k = p.input_dim();
            drift.rows_mut(s.input, k).copy_from(&d.drift);
            matrix
                .view_mut((s.input, s.input), (k, k))
                .copy_from(&d.matrix);
        }
        Ok(Decoupling { drift, matrix })
    }

    fn feedback(&self, x: &[f64], zeta: &[f64], w: &[f64]) -> Vec<f64> {
        self.spans()
            .flat_map(|(p, s)| {
                p.feedback(
                    &x[s.state..s.state + p.state_dim()],
                    &zeta[s.zeta..s.zeta + p.compensator_dim()],
                    &w[s.input..s.input + p.input_dim()],
                )
            })
            .collect()
    }

    fn compensator_rate(&self, x: &[f64], zeta: &[f64], w: &[f64]) -> Vec<f64> {
        self.spans()
            .flat_map(|(p, s)| {
                p.compensator_rate(
                    &x[s.state..s.state + p.state_dim()],
                    &zeta[s.zeta..s.zeta + p.compensator_dim()],
                    &w[s.input..s.input + p.input_dim()],
                )
            })
            .collect()
    }

    fn singularity_margins(&self, x: &[f64], zeta: &[f64]) -> Vec<f64> {
        self.spans()
            .flat_map(|(p, s)| {
                p.singularity_margins(
                    &x[s.state..s.state + p.state_dim()],
                    &zeta[s.zeta..s.zeta + p.compensator_dim()],
                )
            })
            .collect()
    }
}
