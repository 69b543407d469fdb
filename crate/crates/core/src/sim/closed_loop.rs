use std::sync::Arc;

use log::{debug, info};

use super::dopri::{Dopri5, StepOptions};
use super::optimizer::solve_optimizer;
use super::trace::{Sample, SimConfig, SimTrace};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::planner::{control_input_nonuniform, control_input_uniform, ControlOutput, GainProfile};
use crate::plant::{attach_auxiliary_chains, ExtendedPlant, Plant};

/// Initial composite state `(x, ζ, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub x: Vec<f64>,
    pub zeta: Vec<f64>,
    pub xi: Vec<f64>,
}

/// A run that stopped early: the error and the time it was raised.
#[derive(Debug, Clone, PartialEq)]
pub struct SimFailure {
    pub error: Error,
    pub t: f64,
}

/// Samples up to termination, plus the failure if the run aborted.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub trace: SimTrace,
    pub failure: Option<SimFailure>,
}

impl SimOutcome {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Plant, objective and gains wired into one vector field.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    plant: ExtendedPlant,
    objective: Arc<dyn Objective>,
    gains: GainProfile,
}

impl ClosedLoop {
    /// Pads the plant to the gain order and checks that every dimension and
    /// derivative order lines up.
    pub fn new(
        plant: Arc<dyn Plant>,
        objective: Arc<dyn Objective>,
        gains: GainProfile,
    ) -> Result<Self> {
        let m = plant.output_dim();
        if objective.output_dim() != m || gains.output_dim != m {
            return Err(Error::Config(format!(
                "plant outputs R^{m}, objective expects R^{}, gains built for R^{}",
                objective.output_dim(),
                gains.output_dim
            )));
        }
        if gains.order + 1 > objective.max_partial_order() {
            return Err(Error::Order(format!(
                "order-{} control needs partials of order {}, objective provides {}",
                gains.order,
                gains.order + 1,
                objective.max_partial_order()
            )));
        }
        let plant = attach_auxiliary_chains(plant, gains.order)?;
        Ok(ClosedLoop {
            plant,
            objective,
            gains,
        })
    }

    pub fn plant(&self) -> &ExtendedPlant {
        &self.plant
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    pub fn gains(&self) -> &GainProfile {
        &self.gains
    }

    fn split<'z>(&self, z: &'z [f64]) -> (&'z [f64], &'z [f64], &'z [f64]) {
        let inner = self.plant.inner();
        let n = inner.state_dim();
        let c = inner.compensator_dim();
        (&z[..n], &z[n..n + c], &z[n + c..])
    }

    fn pack(&self, init: &InitialState) -> Result<Vec<f64>> {
        let inner = self.plant.inner();
        if init.x.len() != inner.state_dim()
            || init.zeta.len() != inner.compensator_dim()
            || init.xi.len() != self.plant.aux_dim()
        {
            return Err(Error::Config(format!(
                "initial state sizes (x {}, ζ {}, ξ {}) do not match plant (x {}, ζ {}, ξ {})",
                init.x.len(),
                init.zeta.len(),
                init.xi.len(),
                inner.state_dim(),
                inner.compensator_dim(),
                self.plant.aux_dim()
            )));
        }
        Ok([init.x.as_slice(), &init.zeta, &init.xi].concat())
    }

    /// The control law at composite state `z`.
    pub fn control(&self, t: f64, z: &[f64]) -> Result<ControlOutput> {
        let (x, zeta, xi) = self.split(z);
        let out = if self.plant.is_identity() {
            control_input_uniform(
                self.plant.inner(),
                self.objective.as_ref(),
                x,
                zeta,
                t,
                &self.gains,
            )
        } else {
            control_input_nonuniform(
                &self.plant,
                self.objective.as_ref(),
                x,
                zeta,
                xi,
                t,
                &self.gains,
            )
        };
        out.map_err(|e| e.at_time(t))
    }

    /// `ż = (f(x) + G(x)u, ζ̇, ξ̇)`.
    pub fn rhs(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        let out = self.control(t, z)?;
        let (x, _, _) = self.split(z);
        let mut dz = self.plant.inner().dynamics(x, &out.u);
        dz.extend(out.zeta_rate);
        dz.extend(out.xi_rate);
        Ok(dz)
    }

    fn margins(&self, z: &[f64]) -> Vec<f64> {
        let (x, zeta, _) = self.split(z);
        self.plant.inner().singularity_margins(x, zeta)
    }

    fn sample(
        &self,
        t: f64,
        z: &[f64],
        warm: &[f64],
        envelope: impl Fn(&ControlOutput) -> f64,
    ) -> Result<Sample> {
        let out = self.control(t, z)?;
        let (x, zeta, xi) = self.split(z);
        let y = self.plant.inner().output(x);
        let y_star = solve_optimizer(self.objective.as_ref(), t, warm)?;
        let optimal_value = self.objective.value(&y_star, t)?;
        let sample = Sample {
            t,
            x: x.to_vec(),
            zeta: zeta.to_vec(),
            xi: xi.to_vec(),
            y,
            y_star,
            envelope: envelope(&out),
            gradient_stack: out.diagnostics.gradient_stack,
            stack_norms: out.diagnostics.gradient_stack_norms,
            u: out.u,
            objective_value: out.diagnostics.objective_value,
            optimal_value,
        };
        if !sample.is_finite() {
            return Err(Error::NonFinite(format!("sample at t = {t}")));
        }
        Ok(sample)
    }

    /// `C = (c / m_f) ‖col(∇_y f0, …, ∇_y^(k−1) f0)‖` at the initial sample.
    pub fn bound_constant(&self, gradient_stack_norms: &[f64]) -> f64 {
        let sq: f64 = gradient_stack_norms.iter().map(|n| n * n).sum();
        self.gains.bound_c / self.objective.strong_convexity() * sq.sqrt()
    }

    /// Integrates from `init` over the configured horizon, logging on the
    /// sample grid. Failures end the run; the samples logged so far are kept.
    pub fn integrate(&self, init: &InitialState, config: &SimConfig) -> Result<SimOutcome> {
        config.validate()?;
        let z0 = self.pack(init)?;
        let inner = self.plant.inner();
        let mut trace = SimTrace {
            output_dim: inner.output_dim(),
            order: self.gains.order,
            input_dim: inner.input_dim(),
            bound_constant: f64::NAN,
            alpha: self.gains.alpha,
            samples: Vec::new(),
        };
        let t0 = config.t0;
        let fail = |trace: SimTrace, error: Error, t: f64| {
            info!("run aborted at t = {t}: {error}");
            Ok(SimOutcome {
                trace,
                failure: Some(SimFailure { error, t }),
            })
        };

        let first = match self.sample(t0, &z0, &inner.output(&z0[..inner.state_dim()]), |out| {
            self.bound_constant(&out.diagnostics.gradient_stack_norms)
        }) {
            Ok(s) => s,
            Err(e) => return fail(trace, e.at_time(t0), t0),
        };
        let c_const = first.envelope;
        trace.bound_constant = c_const;
        let alpha = self.gains.alpha;
        let envelope = |t: f64| c_const * (-alpha * (t - t0)).exp();
        let mut warm = first.y_star.clone();
        trace.samples.push(first);

        let mut f = |t: f64, z: &[f64]| self.rhs(t, z);
        let opts = StepOptions {
            rtol: config.rtol,
            atol: config.atol,
            max_step: config.max_step,
        };
        let mut stepper = match Dopri5::new(&mut f, t0, z0, opts) {
            Ok(s) => s,
            Err(e) => return fail(trace, e.at_time(t0), t0),
        };
        let mut steps = 0usize;
        for &target in &config.sample_times()[1..] {
            while stepper.t() < target {
                let (t_old, z_old) = (stepper.t(), stepper.state().to_vec());
                if let Err(e) = stepper.step(&mut f, target) {
                    let t = match e {
                        Error::Singularity { t, .. } if t.is_finite() => t,
                        _ => stepper.t(),
                    };
                    return fail(trace, e.at_time(t), t);
                }
                steps += 1;
                let before = self.margins(&z_old);
                let after = self.margins(stepper.state());
                for (i, (a, b)) in before.iter().zip(&after).enumerate() {
                    if a * b <= 0.0 && a != b {
                        let t_cross = t_old + (stepper.t() - t_old) * a / (a - b);
                        let error = Error::Singularity {
                            t: t_cross,
                            detail: format!("singularity margin {i} changed sign ({a:e} to {b:e})"),
                        };
                        return fail(trace, error, t_cross);
                    }
                }
            }
            match self.sample(target, stepper.state(), &warm, |_| envelope(target)) {
                Ok(s) => {
                    warm.clone_from(&s.y_star);
                    trace.samples.push(s);
                }
                Err(e) => return fail(trace, e.at_time(target), target),
            }
        }
        debug!("integration finished with {steps} accepted steps");
        Ok(SimOutcome {
            trace,
            failure: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::QuadraticTracking;
    use crate::path::{Constant, Path};
    use crate::planner::design_gains;
    use crate::plant::{Integrator, Wmr};
    use num_complex::Complex64;

    #[derive(Debug)]
    struct Ramp;

    impl Path for Ramp {
        fn dim(&self) -> usize {
            2
        }
        fn derivative(&self, t: f64, order: usize) -> Vec<f64> {
            match order {
                0 => vec![t, 0.0],
                1 => vec![1.0, 0.0],
                _ => vec![0.0, 0.0],
            }
        }
    }

    fn gains(p: &[f64], m: usize) -> GainProfile {
        design_gains(
            &p.iter()
                .map(|&r| Complex64::new(r, 0.0))
                .collect::<Vec<_>>(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn gradient_flow_decays_exactly() {
        let lp = ClosedLoop::new(
            Arc::new(Integrator::new(2).unwrap()),
            Arc::new(QuadraticTracking::new(Arc::new(Ramp))),
            gains(&[-1.0], 2),
        )
        .unwrap();
        let init = InitialState {
            x: vec![1.0, 0.0],
            zeta: vec![],
            xi: vec![],
        };
        let cfg = SimConfig {
            t_end: 5.0,
            sample_interval: 0.1,
            ..SimConfig::default()
        };
        let out = lp.integrate(&init, &cfg).unwrap();
        assert!(out.completed());
        assert_eq!(out.trace.samples.len(), 51);
        for s in &out.trace.samples {
            let exact = (-s.t).exp();
            assert!(
                (s.stack_norms[0] - exact).abs() <= 1e-6 * exact,
                "t = {}",
                s.t
            );
        }
        assert_eq!(out.trace.bound_constant, 1.0);
    }

    #[test]
    fn starting_on_the_optimum_stays_there() {
        let lp = ClosedLoop::new(
            Arc::new(Wmr::new(1e-6).unwrap()),
            Arc::new(QuadraticTracking::new(Arc::new(Ramp))),
            gains(&[-2.0, -3.0], 2),
        )
        .unwrap();
        let init = InitialState {
            x: vec![0.0, 0.0, 0.0],
            zeta: vec![1.0],
            xi: vec![],
        };
        let cfg = SimConfig {
            t_end: 2.0,
            ..SimConfig::default()
        };
        let out = lp.integrate(&init, &cfg).unwrap();
        assert!(out.completed());
        assert!(out
            .trace
            .samples
            .iter()
            .all(|s| s.stack_norms.iter().all(|n| *n <= 1e-8)));
    }

    #[test]
    fn zero_initial_speed_fails_at_start() {
        let lp = ClosedLoop::new(
            Arc::new(Wmr::new(1e-6).unwrap()),
            Arc::new(QuadraticTracking::new(Arc::new(Constant(vec![1.0, 1.0])))),
            gains(&[-2.0, -3.0], 2),
        )
        .unwrap();
        let init = InitialState {
            x: vec![0.0, 0.0, 0.0],
            zeta: vec![0.0],
            xi: vec![],
        };
        let out = lp.integrate(&init, &SimConfig::default()).unwrap();
        let failure = out.failure.unwrap();
        assert_eq!(failure.error.kind(), "SingularityError");
        assert_eq!(failure.t, 0.0);
        assert!(out.trace.samples.is_empty());
    }

    #[test]
    fn reversing_robot_hits_singularity_without_nan() {
        // Target straight behind a robot moving forward: the speed must
        // pass through zero.
        let lp = ClosedLoop::new(
            Arc::new(Wmr::new(1e-6).unwrap()),
            Arc::new(QuadraticTracking::new(Arc::new(Constant(vec![-3.0, 0.0])))),
            gains(&[-2.0, -3.0], 2),
        )
        .unwrap();
        let init = InitialState {
            x: vec![0.0, 0.0, 0.0],
            zeta: vec![1.0],
            xi: vec![],
        };
        let out = lp.integrate(&init, &SimConfig::default()).unwrap();
        let failure = out.failure.expect("must hit u1 = 0");
        assert_eq!(failure.error.kind(), "SingularityError");
        assert!(failure.t > 0.0 && failure.t < 2.0, "{}", failure.t);
        assert!(out.trace.samples.iter().all(Sample::is_finite));
    }

    #[test]
    fn dimension_and_order_checks() {
        let obj = Arc::new(QuadraticTracking::new(Arc::new(Constant(vec![0.0; 3]))));
        assert!(matches!(
            ClosedLoop::new(
                Arc::new(Integrator::new(2).unwrap()),
                obj,
                gains(&[-1.0], 2)
            ),
            Err(Error::Config(_))
        ));
        let low = Arc::new(
            QuadraticTracking::new(Arc::new(Constant(vec![0.0; 2])))
                .with_max_order(2)
                .unwrap(),
        );
        assert!(matches!(
            ClosedLoop::new(
                Arc::new(Wmr::new(1e-6).unwrap()),
                low,
                gains(&[-2.0, -3.0], 2)
            ),
            Err(Error::Order(_))
        ));
    }
}
