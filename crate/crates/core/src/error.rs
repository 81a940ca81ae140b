use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the admissible range {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The continued fraction expansion was truncated before reaching the requested scale.
    #[error("continued fraction exhausted after {depth} partial quotients: {needed}")]
    DepthExhausted { depth: usize, needed: String },

    /// The starting point of a ray lies inside (or on) an obstacle.
    #[error("starting point ({0}, {1}) is not in the obstacle-free domain")]
    InsideObstacle(f64, f64),

    /// The starting point of a slit ray lies on the slit itself.
    #[error("starting point ({0}, {1}) lies on the slit")]
    OnSlit(f64, f64),

    /// No slit crossing was found within the three-length bound.
    #[error("no slit crossing within {crossings} lattice crossings")]
    Horizon { crossings: u64 },

    /// A Gauss map orbit reached zero, i.e. the starting point was rational.
    #[error("Gauss map orbit reached 0 after {0} iterations")]
    RationalOrbit(usize),

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error}")]
    Quadrature { estimate: f64, error: f64 },

    /// Invalid sampler or run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}

/// Checks `lo < value < hi`, rejecting NaN.
pub(crate) fn check_open(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(domain(name, value, expected))
    }
}
