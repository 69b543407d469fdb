//! Drive feedback-linearizable plants to the minimizer of a time-varying
//! convex objective.
//!
//! The pieces, in the order data flows through them:
//!
//! - [`objective`]: objectives `f0(y, t)` with closed-form partial tensors,
//!   and the engine for total time derivatives of `∇_y f0` along `y(t)`.
//! - [`plant`]: control-affine plants with their linearizing data.
//! - [`planner`]: Hurwitz gains, the implicit output derivative `y_imp^(k)`,
//!   and the control laws.
//! - [`sim`]: closed-loop integration and convergence checks.
//! - [`scenario`]: serializable run descriptions and packaged examples.
//!
//! ```
//! use std::sync::Arc;
//! use tvopt::objective::QuadraticTracking;
//! use tvopt::path::Constant;
//! use tvopt::plant::Integrator;
//! use tvopt::planner::{default_poles, design_gains};
//! use tvopt::sim::{ClosedLoop, InitialState, SimConfig};
//!
//! let gains = design_gains(&default_poles(1), 2)?;
//! let lp = ClosedLoop::new(
//!     Arc::new(Integrator::new(2)?),
//!     Arc::new(QuadraticTracking::new(Arc::new(Constant(vec![0.0, 0.0])))),
//!     gains,
//! )?;
//! let init = InitialState { x: vec![1.0, 0.0], zeta: vec![], xi: vec![] };
//! let out = lp.integrate(&init, &SimConfig { t_end: 1.0, ..SimConfig::default() })?;
//! let last = out.trace.samples.last().unwrap();
//! assert!((last.y[0] - (-1.0f64).exp()).abs() < 1e-8);
//! # Ok::<(), tvopt::Error>(())
//! ```

pub mod error;
pub mod objective;
pub mod path;
pub mod planner;
pub mod plant;
pub mod scenario;
pub mod sim;
pub mod tensor;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/objectives.md")]
    mod objectives {}
    #[doc = include_str!("../../../book/src/plants.md")]
    mod plants {}
    #[doc = include_str!("../../../book/src/gains.md")]
    mod gains {}
    #[doc = include_str!("../../../book/src/control.md")]
    mod control {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}
