use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain constructor rejected a value.
    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A configuration document failed validation. `key` is the dotted path
    /// of the offending field.
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{what}, line {line}: {reason}")]
    Parse {
        what: String,
        line: usize,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("vehicles have zero longitudinal separation")]
    ZeroSeparation,

    #[error("azimuth {azimuth_rad} rad needs {residual_rad} rad of steering, beyond the ±{range_rad} rad mirror range")]
    UnreachableAzimuth {
        azimuth_rad: f64,
        residual_rad: f64,
        range_rad: f64,
    },

    #[error("elevation {elevation_rad} rad is beyond the ±{range_rad} rad mirror range")]
    UnreachableElevation { elevation_rad: f64, range_rad: f64 },

    #[error("receiver rotation {0} rad is not below pi/2")]
    ReceiverFacingAway(f64),

    #[error("band [{lo_m}, {hi_m}] m is outside the spectrum support [{min_m}, {max_m}] m")]
    BandOutsideSpectrum {
        lo_m: f64,
        hi_m: f64,
        min_m: f64,
        max_m: f64,
    },

    #[error("time {t_s} s is outside the trace support [{start_s}, {end_s}] s")]
    OutOfSupport { t_s: f64, start_s: f64, end_s: f64 },

    #[error("dynamic compensation needs the signaled perturbation history")]
    MissingHistory,

    #[error("autoregressive model is not stationary")]
    NonStationary,

    #[error("autocovariance system is singular")]
    SingularSystem,

    #[error("trace of {len} samples is too short to fit order {order} (need {needed})")]
    TraceTooShort {
        len: usize,
        order: usize,
        needed: usize,
    },

    #[error("cannot summarize an empty sample set")]
    EmptySamples,

    #[error("at t = {t_s} s: {source}")]
    AtTime {
        t_s: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Re-labels a parameter error as a config error under `prefix`.
    pub(crate) fn at_key(self, prefix: &str) -> Self {
        match self {
            Error::InvalidParameter { name, reason } => Error::Config {
                key: format!("{prefix}.{name}"),
                reason,
            },
            Error::Config { key, reason } => Error::Config {
                key: format!("{prefix}.{key}"),
                reason,
            },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Strips `AtTime` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}
