//! Packaged scenarios.
//!
//! The object trajectories are reconstructions: only their start points are
//! fixed, and the remaining waypoints were chosen so the paths are smooth
//! cubics that keep every reference velocity away from zero.

use std::f64::consts::FRAC_PI_2;

use super::path::Waypoint;
use super::spec::*;
use crate::objective::DEFAULT_PARTIAL_ORDER;
use crate::plant::DEFAULT_SINGULARITY_EPSILON;
use crate::sim::SimConfig;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["switching", "multi_robot", "gradient_flow"];

/// Initial forward speed of every robot.
pub const DEFAULT_U1_INIT: f64 = 0.5;

pub fn builtin(name: &str) -> Option<ScenarioSpec> {
    match name {
        "switching" => Some(scenario_switching()),
        "multi_robot" => Some(scenario_multi_robot()),
        "gradient_flow" => Some(scenario_gradient_flow()),
        _ => None,
    }
}

fn waypoints(points: Vec<Waypoint>) -> PathConfig {
    PathConfig::Waypoints { waypoints: points }
}

fn real_poles(p: &[f64]) -> GainConfig {
    GainConfig {
        poles: p.iter().map(|&r| PoleSpec::Real(r)).collect(),
    }
}

/// Unicycle runs use tighter tolerances than [`SimConfig::default`]. Once the
/// gradient stack has decayed to about `1e-9`, the integration defect of a
/// default-tolerance run (around `3e-11` absolute) dominates the
/// finite-difference check of the error dynamics.
fn wmr_sim() -> SimConfig {
    SimConfig {
        t_end: 20.0,
        rtol: 1e-12,
        atol: 1e-14,
        ..SimConfig::default()
    }
}

/// One robot that tracks a first moving object and then, as the blend
/// weight switches around `t = 10`, a second one.
pub fn scenario_switching() -> ScenarioSpec {
    let first = waypoints(vec![
        Waypoint::at(0.0, vec![-5.0, -5.0]).with_velocity(vec![0.9, 0.5]),
        Waypoint::at(5.0, vec![-0.5, -2.5]),
        Waypoint::at(20.0, vec![8.0, 3.0]),
    ]);
    let second = waypoints(vec![
        Waypoint::at(0.0, vec![5.0, -3.0]).with_velocity(vec![-0.9, 0.3]),
        Waypoint::at(5.0, vec![0.5, -1.8]),
        Waypoint::at(20.0, vec![9.0, 3.0]),
    ]);
    ScenarioSpec {
        name: "switching".into(),
        description:
            "Unicycle tracking a blend of two moving objects that switches from the first \
                      to the second; object paths are reconstructed cubics through the given starts"
                .into(),
        plant: PlantKind::Wmr,
        integrator: None,
        wmr: Some(WmrConfig {
            agents: 1,
            singularity_epsilon: DEFAULT_SINGULARITY_EPSILON,
            u1_init: DEFAULT_U1_INIT,
            headings: vec![-FRAC_PI_2],
        }),
        initial_outputs: vec![vec![-5.0, 4.0]],
        initial_aux: vec![],
        objective: ObjectiveConfig {
            max_partial_order: DEFAULT_PARTIAL_ORDER,
            model: ObjectiveModel::SwitchingBlend {
                a: 10.0,
                b: 1.5,
                targets: [first, second],
            },
        },
        gains: real_poles(&[-2.0, -3.0]),
        sim: wmr_sim(),
        criteria: CriteriaConfig {
            tracking: vec![
                TrackingCriterion {
                    agent: 0,
                    target: 0,
                    from: 4.0,
                    to: 5.0,
                    threshold: 0.1,
                },
                TrackingCriterion {
                    agent: 0,
                    target: 1,
                    from: 16.0,
                    to: 20.0,
                    threshold: 0.1,
                },
            ],
            barrier_domain: false,
            bound_check: true,
            error_dynamics_residual: Some(1e-3),
        },
    }
}

/// Two robots, each tracking its own object, with a barrier that keeps
/// their squared distance below 2.
///
/// The second object follows the first at a horizontal offset
/// `1 − 0.001 (t − 10)² (t − 20)`: 3 at the start, 1 at `t = 10`, and at
/// most about 1.15 afterwards.
pub fn scenario_multi_robot() -> ScenarioSpec {
    let first = waypoints(vec![
        Waypoint::at(0.0, vec![-5.0, -3.0]).with_velocity(vec![0.5, 0.3]),
        Waypoint::at(10.0, vec![0.0, 0.0]),
        Waypoint::at(20.0, vec![6.0, -1.0]),
    ]);
    let second = waypoints(vec![
        Waypoint::at(0.0, vec![-2.0, -3.0]).with_velocity(vec![0.0, 0.3]),
        Waypoint::at(10.0, vec![1.0, 0.0]),
        Waypoint::at(20.0, vec![7.0, -1.0]),
    ]);
    let tracking = (0..2)
        .map(|i| TrackingCriterion {
            agent: i,
            target: i,
            from: 10.0,
            to: 20.0,
            threshold: 0.1,
        })
        .collect();
    ScenarioSpec {
        name: "multi_robot".into(),
        description: "Two unicycles tracking two objects under a smooth barrier on their squared \
                      distance; object paths are reconstructed cubics through the given starts"
            .into(),
        plant: PlantKind::Wmr,
        integrator: None,
        wmr: Some(WmrConfig {
            agents: 2,
            singularity_epsilon: DEFAULT_SINGULARITY_EPSILON,
            u1_init: DEFAULT_U1_INIT,
            headings: vec![0.0, 0.0],
        }),
        initial_outputs: vec![vec![-4.5, -3.5], vec![-3.5, -3.5]],
        initial_aux: vec![],
        objective: ObjectiveConfig {
            max_partial_order: DEFAULT_PARTIAL_ORDER,
            model: ObjectiveModel::BarrierSum {
                d: 2.0,
                gain: 1e-8,
                targets: [first, second],
            },
        },
        gains: real_poles(&[-2.0, -3.0]),
        sim: wmr_sim(),
        criteria: CriteriaConfig {
            tracking,
            barrier_domain: true,
            bound_check: false,
            error_dynamics_residual: Some(1e-3),
        },
    }
}

/// Single integrator chasing `(t, 0)` from `(1, 0)` by gradient flow.
pub fn scenario_gradient_flow() -> ScenarioSpec {
    ScenarioSpec {
        name: "gradient_flow".into(),
        description: "Two-dimensional integrator following a ramp; the gradient decays as e^{-t}"
            .into(),
        plant: PlantKind::Integrator,
        integrator: Some(IntegratorConfig { dim: 2 }),
        wmr: None,
        initial_outputs: vec![vec![1.0, 0.0]],
        initial_aux: vec![],
        objective: ObjectiveConfig {
            max_partial_order: DEFAULT_PARTIAL_ORDER,
            model: ObjectiveModel::QuadraticTracking {
                target: PathConfig::Polynomial(
                    super::PolynomialPath::new(vec![[0.0, 1.0, 0.0, 0.0], [0.0; 4]])
                        .with_interval(0.0, 10.0),
                ),
            },
        },
        gains: real_poles(&[-1.0]),
        sim: SimConfig {
            t_end: 10.0,
            ..SimConfig::default()
        },
        criteria: CriteriaConfig {
            tracking: vec![TrackingCriterion {
                agent: 0,
                target: 0,
                from: 8.0,
                to: 10.0,
                threshold: 1e-3,
            }],
            barrier_domain: false,
            bound_check: true,
            error_dynamics_residual: Some(1e-4),
        },
    }
}
