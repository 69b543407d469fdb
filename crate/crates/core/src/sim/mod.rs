//! Closed-loop integration, logging, the moving optimizer `y*(t)`, and the
//! convergence checks run on finished traces.

mod bound;
mod closed_loop;
pub mod dopri;
mod optimizer;
mod trace;

pub use bound::{
    check_bound, error_dynamics_residual, BoundReport, BOUND_RESOLUTION, RESIDUAL_FLOOR,
};
pub use closed_loop::{ClosedLoop, InitialState, SimFailure, SimOutcome};
pub use optimizer::{solve_optimizer, GRADIENT_TOLERANCE, MAX_ITERATIONS};
pub use trace::{Sample, SimConfig, SimTrace};
