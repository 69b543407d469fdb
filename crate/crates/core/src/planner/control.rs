use serde::Serialize;

use super::{implicit_derivative, GainProfile};
use crate::error::{Error, Result};
use crate::objective::{DerivativeStack, Objective};
use crate::plant::{uniform_stack, ExtendedPlant, Plant};

/// Quantities computed on the way to the control input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlDiagnostics {
    pub y_imp: Vec<f64>,
    /// `[∇_y f0, …, ∇_y^(k−1) f0]`.
    pub gradient_stack: Vec<Vec<f64>>,
    pub gradient_stack_norms: Vec<f64>,
    pub decoupling_condition_number: f64,
    /// `f0(y, t)`.
    pub objective_value: f64,
}

/// Physical input, state rates of the controller, and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutput {
    pub u: Vec<f64>,
    /// Linearizing input `w`.
    pub w: Vec<f64>,
    pub zeta_rate: Vec<f64>,
    /// Rates of the auxiliary chains; empty for uniform plants.
    pub xi_rate: Vec<f64>,
    pub diagnostics: ControlDiagnostics,
}

/// Shared tail of both laws: `w = R⁻¹(v − p)`, `u = α + βw`, `ζ̇ = γ + δw`.
fn realize(
    plant: &dyn Plant,
    objective: &dyn Objective,
    x: &[f64],
    zeta: &[f64],
    t: f64,
    stack: &DerivativeStack,
    gains: &GainProfile,
    virtual_input: impl FnOnce(&[f64]) -> Vec<f64>,
) -> Result<(ControlOutput, Vec<f64>)> {
    let partials = objective.partials_up_to(stack.y(), t, gains.order + 1)?;
    let implicit = implicit_derivative(&partials, stack, gains)?;
    let v = virtual_input(&implicit.y_imp);
    let decoupling = plant.decoupling(x, zeta)?;
    let w = decoupling.linearizing_input(&v)?;
    let u = plant.feedback(x, zeta, &w);
    let zeta_rate = plant.compensator_rate(x, zeta, &w);
    let norms = implicit
        .gradient_stack
        .iter()
        .map(|g| g.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let diagnostics = ControlDiagnostics {
        gradient_stack_norms: norms,
        gradient_stack: implicit.gradient_stack,
        decoupling_condition_number: decoupling.condition_number(),
        objective_value: partials.value(),
        y_imp: implicit.y_imp.clone(),
    };
    Ok((
        ControlOutput {
            u,
            w,
            zeta_rate,
            xi_rate: Vec::new(),
            diagnostics,
        },
        implicit.y_imp,
    ))
}

/// Control law for plants whose channels all have relative degree `k`:
/// `u = α + β R⁻¹ (y_imp^(k) − p)`.
pub fn control_input_uniform(
    plant: &dyn Plant,
    objective: &dyn Objective,
    x: &[f64],
    zeta: &[f64],
    t: f64,
    gains: &GainProfile,
) -> Result<ControlOutput> {
    let stack = uniform_stack(plant, x, zeta)?;
    if stack.order() != gains.order {
        return Err(Error::Config(format!(
            "plant '{}' has relative degree {}, gains have order {}",
            plant.name(),
            stack.order(),
            gains.order
        )));
    }
    realize(plant, objective, x, zeta, t, &stack, gains, |s| s.to_vec()).map(|(out, _)| out)
}

/// Control law for plants padded with auxiliary chains: `s = y_imp^(k)`
/// drives the chains and `v = α̃(ξ) + β̃(ξ) s` replaces `y_imp` in the
/// uniform law.
pub fn control_input_nonuniform(
    plant: &ExtendedPlant,
    objective: &dyn Objective,
    x: &[f64],
    zeta: &[f64],
    xi: &[f64],
    t: f64,
    gains: &GainProfile,
) -> Result<ControlOutput> {
    if plant.order() != gains.order {
        return Err(Error::Config(format!(
            "extended plant has order {}, gains have order {}",
            plant.order(),
            gains.order
        )));
    }
    let stack = plant.output_stack(x, zeta, xi)?;
    let (mut out, s) = realize(plant.inner(), objective, x, zeta, t, &stack, gains, |s| {
        plant.virtual_input(xi, s)
    })?;
    out.xi_rate = plant.aux_rate(xi, &s);
    Ok(out)
}
