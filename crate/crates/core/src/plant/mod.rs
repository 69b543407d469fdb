//! Square control-affine plants together with the data that feedback
//! linearizes them.
//!
//! Every plant exposes, for its composite state `(x, ζ)` (physical state plus
//! dynamic compensator), the relation
//!
//! ```text
//! y_i^(r_i) = p_i(x, ζ) + (R(x, ζ) w)_i
//! u = α(x, ζ) + β(x, ζ) w,     ζ̇ = γ(x, ζ) + δ(x, ζ) w
//! ```
//!
//! where `w` is the linearizing input. Plants hard-code these maps; the
//! [`validate`] module checks them numerically against the dynamics.

mod chains;
mod extension;
mod integrator;
mod stacked;
pub mod validate;
mod wmr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::objective::DerivativeStack;

pub use chains::IntegratorChains;
pub use extension::{attach_auxiliary_chains, ExtendedPlant};
pub use integrator::Integrator;
pub use stacked::StackedPlant;
pub use validate::{validate_linearization, ValidationReport};
pub use wmr::Wmr;

/// Default threshold on `|u_1|` below which the WMR decoupling matrix is
/// treated as singular.
pub const DEFAULT_SINGULARITY_EPSILON: f64 = 1e-6;

/// Drift `p` and decoupling matrix `R` at one composite state.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoupling {
    pub drift: DVector<f64>,
    pub matrix: DMatrix<f64>,
}

impl Decoupling {
    /// Solves `R w = target − p` for the linearizing input `w`.
    pub fn linearizing_input(&self, target: &[f64]) -> Result<Vec<f64>> {
        let rhs = DVector::from_column_slice(target) - &self.drift;
        self.matrix
            .clone()
            .lu()
            .solve(&rhs)
            .map(|w| w.as_slice().to_vec())
            .ok_or_else(|| Error::Singularity {
                t: f64::NAN,
                detail: "decoupling matrix is not invertible".into(),
            })
    }

    /// 2-norm condition number of `R`.
    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.clone().singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// A square control-affine plant with feedback-linearization data.
///
/// `x` is the physical state, `ζ` the compensator state and `w` the
/// linearizing input. Output dimension equals input dimension.
pub trait Plant: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;

    fn state_dim(&self) -> usize;

    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize {
        self.input_dim()
    }

    fn compensator_dim(&self) -> usize;

    /// Relative degree of each output channel for the composite system.
    fn relative_degrees(&self) -> Vec<usize>;

    /// `ẋ = f(x) + G(x) u`.
    fn dynamics(&self, x: &[f64], u: &[f64]) -> Vec<f64>;

    /// `y = h(x)`.
    fn output(&self, x: &[f64]) -> Vec<f64>;

    /// For each channel `i`, `[y_i, ẏ_i, …, y_i^(r_i − 1)]` as functions of
    /// the composite state.
    fn output_derivatives(&self, x: &[f64], zeta: &[f64]) -> Vec<Vec<f64>>;

    /// `(p, R)`; fails with [`Error::Singularity`] off the regular domain.
    fn decoupling(&self, x: &[f64], zeta: &[f64]) -> Result<Decoupling>;

    /// `u = α(x, ζ) + β(x, ζ) w`.
    fn feedback(&self, x: &[f64], zeta: &[f64], w: &[f64]) -> Vec<f64>;

    /// `ζ̇ = γ(x, ζ) + δ(x, ζ) w`.
    fn compensator_rate(&self, x: &[f64], zeta: &[f64], w: &[f64]) -> Vec<f64>;

    /// Continuous functions whose zero sets contain the singular states.
    /// The simulator aborts when one changes sign across a step.
    fn singularity_margins(&self, _x: &[f64], _zeta: &[f64]) -> Vec<f64> {
        Vec::new()
    }

    /// Composite state dimension `n + dim ζ`.
    fn composite_dim(&self) -> usize {
        self.state_dim() + self.compensator_dim()
    }
}

/// Rearranges per-channel output derivatives into a [`DerivativeStack`] of
/// order `k`. Every channel must have relative degree `k`.
pub fn uniform_stack(plant: &dyn Plant, x: &[f64], zeta: &[f64]) -> Result<DerivativeStack> {
    let degrees = plant.relative_degrees();
    let k = degrees[0];
    if degrees.iter().any(|&r| r != k) {
        return Err(Error::Config(format!(
            "plant '{}' has non-uniform relative degrees {degrees:?}",
            plant.name()
        )));
    }
    stack_from_channels(&plant.output_derivatives(x, zeta), k)
}

pub(crate) fn stack_from_channels(channels: &[Vec<f64>], k: usize) -> Result<DerivativeStack> {
    DerivativeStack::new(
        (0..k)
            .map(|j| channels.iter().map(|c| c[j]).collect())
            .collect(),
    )
}

/// Checks that `Σ r_i` equals the composite state dimension.
pub fn check_full_state_linearizable(plant: &dyn Plant) -> Result<()> {
    let total: usize = plant.relative_degrees().iter().sum();
    if total != plant.composite_dim() {
        return Err(Error::Config(format!(
            "plant '{}': relative degrees sum to {total}, composite state has dimension {}",
            plant.name(),
            plant.composite_dim()
        )));
    }
    Ok(())
}
