//! Error type shared by every module of the crate.

use thiserror::Error;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: unparsable data files, bad syntax.
    Input,
    /// A well-formed request that violates a precondition.
    Domain,
    /// An iterative routine did not reach its tolerance.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no density defined for a worst-case (deterministic) error model")]
    NoDensity,

    #[error(
        "stochastic error model given where a worst-case angle is required; use the outage path"
    )]
    UseOutagePath,

    #[error(
        "worst-case error model given where a distribution is required; use the deterministic path"
    )]
    UseDeterministicPath,

    #[error("no closed form for {0}; use the numeric outage evaluation")]
    NoClosedForm(&'static str),

    #[error("no FER data for configuration (M = {ppm_order}, R = {code_rate}, T_s = {slot_time_ns} ns, n_b = {noise_flux} phe/ns)")]
    MissingRequiredFlux {
        ppm_order: u32,
        code_rate: String,
        slot_time_ns: f64,
        noise_flux: f64,
    },

    #[error("registry line {line}: {reason}")]
    RegistryParse { line: usize, reason: String },

    #[error("maximizer hit the bracket edge at {edge_db:.3} dB; widen the search bracket [{lo_db}, {hi_db}] dB")]
    BracketEdge {
        edge_db: f64,
        lo_db: f64,
        hi_db: f64,
    },

    #[error("{what} did not converge (achieved {achieved:.3e}, wanted {wanted:.3e})")]
    NonConvergence {
        what: &'static str,
        achieved: f64,
        wanted: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RegistryParse { .. } | Error::Io(_) => ErrorKind::Input,
            Error::NonConvergence { .. } => ErrorKind::Numeric,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks that `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

/// Checks that `value` is finite and nonnegative.
pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}

pub(crate) fn ensure_probability(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must lie in (0, 1), got {value}"),
        ))
    }
}
