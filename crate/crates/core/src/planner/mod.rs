//! Hurwitz gain design, the implicit `k`-th output derivative, and the
//! feedback laws that realize it on a plant.

mod control;
mod gains;
mod implicit;

pub use control::{
    control_input_nonuniform, control_input_uniform, ControlDiagnostics, ControlOutput,
};
pub use gains::{
    closed_loop_error_matrix, companion_block, default_poles, design_gains, GainProfile,
    RATE_EPSILON,
};
pub use implicit::{compute_y_imp, implicit_derivative, ImplicitDerivative};
