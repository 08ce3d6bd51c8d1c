use thiserror::Error;

/// Errors raised by the model, engine and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state component left the domain where the right-hand side is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model, schedule, delay or integrator parameter violates its invariant.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// The constant-treatment system has no positive equilibrium.
    #[error("no positive equilibrium{}", if *.marginal { " (marginal: existence condition holds with equality)" } else { "" })]
    NoEquilibrium { marginal: bool },

    /// An operation was called outside its documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A trajectory was evaluated outside `[t0 - tau0, T]`.
    #[error("time {t} outside trajectory domain [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    /// A time-varying lag violated its declared bounds at a mesh point.
    #[error("lag t - h(t) = {lag} at t = {t} outside declared bounds [{tau_min}, {tau_max}]")]
    DelayBounds {
        t: f64,
        lag: f64,
        tau_min: f64,
        tau_max: f64,
    },

    /// The engine tried to read a segment that was not finalized yet.
    #[error("internal: delayed lookup at {t} beyond finalized data ending at {finalized}")]
    Unfinalized { t: f64, finalized: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
