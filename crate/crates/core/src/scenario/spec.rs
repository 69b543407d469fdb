use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::{fit_polynomial_path, PolynomialPath, Waypoint};
use crate::error::{Error, Result};
use crate::objective::{BarrierSum, Objective, QuadraticTracking, SwitchingBlend};
use crate::path::{Constant, Path};
use crate::planner::{design_gains, GainProfile};
use crate::plant::{Integrator, Plant, StackedPlant, Wmr};
use crate::sim::{ClosedLoop, InitialState, SimConfig};

/// A complete, serializable description of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub description: String,
    pub plant: PlantKind,
    /// Required when `plant` is `integrator`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
    /// Required when `plant` is `wmr`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wmr: Option<WmrConfig>,
    /// Initial output of each agent (one entry for an integrator).
    pub initial_outputs: Vec<Vec<f64>>,
    /// Initial auxiliary chain states; empty when no channel is padded.
    pub initial_aux: Vec<f64>,
    pub objective: ObjectiveConfig,
    pub gains: GainConfig,
    pub sim: SimConfig,
    pub criteria: CriteriaConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    Integrator,
    Wmr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dim: usize,
}

/// One or more unicycles stacked block-diagonally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WmrConfig {
    pub agents: usize,
    pub singularity_epsilon: f64,
    /// Initial forward speed `u_1(0)` of every agent.
    pub u1_init: f64,
    /// Initial heading of each agent.
    pub headings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub max_partial_order: usize,
    #[serde(flatten)]
    pub model: ObjectiveModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveModel {
    /// `½ ‖y − target(t)‖²`.
    QuadraticTracking { target: PathConfig },
    /// `S(t) ‖y − first‖² + (1 − S(t)) ‖y − second‖²`, `S = ½ − ½ tanh((t − a)/b)`.
    SwitchingBlend {
        a: f64,
        b: f64,
        targets: [PathConfig; 2],
    },
    /// `‖y_1 − first‖² + ‖y_2 − second‖² + H(‖y_1 − y_2‖²)` with the pole of
    /// `H` at squared distance `d`.
    BarrierSum {
        d: f64,
        gain: f64,
        targets: [PathConfig; 2],
    },
}

impl ObjectiveModel {
    pub fn targets(&self) -> Vec<&PathConfig> {
        match self {
            ObjectiveModel::QuadraticTracking { target } => vec![target],
            ObjectiveModel::SwitchingBlend { targets, .. }
            | ObjectiveModel::BarrierSum { targets, .. } => targets.iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PathConfig {
    Constant {
        position: Vec<f64>,
    },
    Polynomial(PolynomialPath),
    /// Cubic fitted through the waypoints at build time.
    Waypoints {
        waypoints: Vec<Waypoint>,
    },
}

impl PathConfig {
    pub fn build(&self) -> Result<Arc<dyn Path>> {
        Ok(match self {
            PathConfig::Constant { position } => Arc::new(Constant(position.clone())),
            PathConfig::Polynomial(p) => Arc::new(p.clone()),
            PathConfig::Waypoints { waypoints } => Arc::new(fit_polynomial_path(waypoints)?),
        })
    }
}

/// A pole given as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoleSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl PoleSpec {
    pub fn to_complex(self) -> Complex64 {
        match self {
            PoleSpec::Real(r) => Complex64::new(r, 0.0),
            PoleSpec::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainConfig {
    pub poles: Vec<PoleSpec>,
}

/// Distance from an agent's output to one objective target must stay
/// within `threshold` on `[from, to]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingCriterion {
    pub agent: usize,
    pub target: usize,
    pub from: f64,
    pub to: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaConfig {
    pub tracking: Vec<TrackingCriterion>,
    /// Squared inter-agent distance below the barrier pole at every sample.
    pub barrier_domain: bool,
    /// Exponential trajectory and objective-gap bounds.
    pub bound_check: bool,
    /// Largest admissible error-dynamics residual, if checked.
    pub error_dynamics_residual: Option<f64>,
}

/// A scenario ready to integrate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub closed_loop: ClosedLoop,
    pub initial: InitialState,
    pub targets: Vec<Arc<dyn Path>>,
    /// Output components of each agent.
    pub agent_dim: usize,
    pub gains: GainProfile,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario specs always serialize")
    }

    pub fn agents(&self) -> usize {
        match self.plant {
            PlantKind::Integrator => 1,
            PlantKind::Wmr => self.wmr.as_ref().map_or(0, |w| w.agents),
        }
    }

    fn build_plant(&self) -> Result<(Arc<dyn Plant>, InitialState, usize)> {
        match self.plant {
            PlantKind::Integrator => {
                let Some(cfg) = &self.integrator else {
                    return config_err("plant 'integrator' needs an 'integrator' section");
                };
                let plant = Integrator::new(cfg.dim)?;
                let [y0] = self.initial_outputs.as_slice() else {
                    return config_err("integrator takes exactly one initial output");
                };
                if y0.len() != cfg.dim {
                    return config_err(format!(
                        "initial output has {} entries, dim is {}",
                        y0.len(),
                        cfg.dim
                    ));
                }
                let init = InitialState {
                    x: y0.clone(),
                    zeta: vec![],
                    xi: self.initial_aux.clone(),
                };
                Ok((Arc::new(plant), init, cfg.dim))
            }
            PlantKind::Wmr => {
                let Some(cfg) = &self.wmr else {
                    return config_err("plant 'wmr' needs a 'wmr' section");
                };
                if cfg.agents == 0 {
                    return config_err("wmr.agents must be positive");
                }
                if self.initial_outputs.len() != cfg.agents || cfg.headings.len() != cfg.agents {
                    return config_err(format!(
                        "{} agents need as many initial outputs and headings, got {} and {}",
                        cfg.agents,
                        self.initial_outputs.len(),
                        cfg.headings.len()
                    ));
                }
                if !cfg.u1_init.is_finite() || cfg.headings.iter().any(|h| !h.is_finite()) {
                    return config_err("wmr initial speed and headings must be finite");
                }
                let wmr = Wmr::new(cfg.singularity_epsilon)?;
                let mut x = Vec::with_capacity(3 * cfg.agents);
                for (pos, heading) in self.initial_outputs.iter().zip(&cfg.headings) {
                    if pos.len() != 2 {
                        return config_err("each wmr initial output is a planar position");
                    }
                    x.extend([pos[0], pos[1], *heading]);
                }
                let plant: Arc<dyn Plant> = if cfg.agents == 1 {
                    Arc::new(wmr)
                } else {
                    let parts: Vec<Arc<dyn Plant>> = (0..cfg.agents)
                        .map(|_| Arc::new(wmr.clone()) as Arc<dyn Plant>)
                        .collect();
                    Arc::new(StackedPlant::new(parts)?)
                };
                let init = InitialState {
                    x,
                    zeta: vec![cfg.u1_init; cfg.agents],
                    xi: self.initial_aux.clone(),
                };
                Ok((plant, init, 2))
            }
        }
    }

    fn build_objective(&self, targets: &[Arc<dyn Path>]) -> Result<Arc<dyn Objective>> {
        let order = self.objective.max_partial_order;
        Ok(match &self.objective.model {
            ObjectiveModel::QuadraticTracking { .. } => {
                Arc::new(QuadraticTracking::new(targets[0].clone()).with_max_order(order)?)
            }
            ObjectiveModel::SwitchingBlend { a, b, .. } => Arc::new(
                SwitchingBlend::new(targets[0].clone(), targets[1].clone(), *a, *b)?
                    .with_max_order(order)?,
            ),
            ObjectiveModel::BarrierSum { d, gain, .. } => {
                if self.agents() != 2 {
                    return config_err("barrier_sum couples exactly two agents");
                }
                Arc::new(
                    BarrierSum::new(targets[0].clone(), targets[1].clone(), *d, *gain)?
                        .with_max_order(order)?,
                )
            }
        })
    }

    /// Resolves every section into runnable objects. All failures are
    /// configuration errors.
    pub fn build(&self) -> Result<Scenario> {
        self.sim.validate()?;
        let (plant, initial, agent_dim) = self.build_plant()?;
        let targets = self
            .objective
            .model
            .targets()
            .into_iter()
            .map(PathConfig::build)
            .collect::<Result<Vec<_>>>()?;
        let objective = self.build_objective(&targets)?;
        let poles: Vec<Complex64> = self.gains.poles.iter().map(|p| p.to_complex()).collect();
        let gains = design_gains(&poles, plant.output_dim())?;
        let closed_loop = ClosedLoop::new(plant, objective, gains.clone())?;
        if initial.xi.len() != closed_loop.plant().aux_dim() {
            return config_err(format!(
                "initial_aux has {} entries, the padded plant needs {}",
                initial.xi.len(),
                closed_loop.plant().aux_dim()
            ));
        }
        let agents = self.agents();
        for c in &self.criteria.tracking {
            if c.agent >= agents || c.target >= targets.len() {
                return config_err(format!(
                    "tracking criterion refers to agent {} / target {}, scenario has {agents} / {}",
                    c.agent,
                    c.target,
                    targets.len()
                ));
            }
            if targets[c.target].dim() != agent_dim {
                return config_err(format!(
                    "target {} has dimension {}, agents have {agent_dim}",
                    c.target,
                    targets[c.target].dim()
                ));
            }
        }
        if self.criteria.barrier_domain
            && !matches!(self.objective.model, ObjectiveModel::BarrierSum { .. })
        {
            return config_err("barrier_domain criterion needs a barrier_sum objective");
        }
        if let Some(r) = self.criteria.error_dynamics_residual {
            if !(r > 0.0) {
                return config_err("error_dynamics_residual threshold must be positive");
            }
        }
        Ok(Scenario {
            spec: self.clone(),
            closed_loop,
            initial,
            targets,
            agent_dim,
            gains,
        })
    }
}
