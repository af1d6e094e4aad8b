//! Error type shared by all solver modules.

/// Errors reported by constructors, solvers and sweep validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar input violated its domain constraint.
    #[error("{name} must be {constraint}, got {value}")]
    Domain {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// Mismatched container shapes (players, bands, allocation rows).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A requested rate is not reachable even with the whole band.
    #[error("target rate {target} exceeds the full-band rate {max}")]
    TargetAboveCapacity { target: f64, max: f64 },

    /// A sweep axis is malformed.
    #[error("invalid sweep axis {name}: {reason}")]
    Axis {
        name: &'static str,
        reason: &'static str,
    },

    /// The worker pool for a parallel sweep could not be created.
    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            constraint: "positive and finite",
            value,
        })
    }
}

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            constraint: "nonnegative and finite",
            value,
        })
    }
}
