//! Serializable scenario descriptions, polynomial reference paths, and the
//! packaged runs.

mod builtin;
mod path;
mod run;
mod spec;

pub use builtin::{
    builtin, scenario_gradient_flow, scenario_multi_robot, scenario_switching, BUILTIN_NAMES,
    DEFAULT_U1_INIT,
};
pub use path::{fit_polynomial_path, PolynomialPath, Waypoint, BASIS_SIZE};
pub use run::{evaluate, run_scenario, CriterionResult, ErrorRecord, RunReport};
pub use spec::{
    CriteriaConfig, GainConfig, IntegratorConfig, ObjectiveConfig, ObjectiveModel, PathConfig,
    PlantKind, PoleSpec, Scenario, ScenarioSpec, TrackingCriterion, WmrConfig,
};
