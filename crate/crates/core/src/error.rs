use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variants mirror the failure classes a caller needs to branch on: an
/// objective evaluated outside its domain, a missing derivative order, a
/// singular decoupling matrix, and so on. [`Error::kind`] gives a stable
/// machine-readable name for each.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("objective evaluated outside its domain: {0}")]
    Domain(String),

    #[error("derivative order unavailable: {0}")]
    Order(String),

    #[error("decoupling matrix singular at t = {t}: {detail}")]
    Singularity { t: f64, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linearization check failed: {0}")]
    Validation(String),

    #[error("invalid gain design: {0}")]
    Gain(String),

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("Newton iteration did not converge: {0}")]
    Convergence(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },

    #[error("polynomial fit failed: {0}")]
    Fit(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

impl Error {
    /// Stable identifier used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Order(_) => "OrderError",
            Error::Singularity { .. } => "SingularityError",
            Error::Config(_) => "ConfigError",
            Error::Validation(_) => "ValidationError",
            Error::Gain(_) => "GainError",
            Error::Solve(_) => "SolveError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Stiffness { .. } => "StiffnessError",
            Error::Fit(_) => "FitError",
            Error::NonFinite(_) => "NonFiniteError",
        }
    }

    /// Singularity errors raised by plants carry no time; the simulator
    /// stamps it on when it propagates them.
    pub fn at_time(self, time: f64) -> Self {
        match self {
            Error::Singularity { detail, .. } => Error::Singularity { t: time, detail },
            other => other,
        }
    }

    /// Whether the error describes a bad input rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Gain(_) | Error::Order(_) | Error::Fit(_)
        )
    }
}
