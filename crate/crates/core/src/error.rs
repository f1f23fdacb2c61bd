use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point {point} lies outside the {domain} domain")]
    Domain { point: Complex64, domain: &'static str },

    #[error("{what} did not converge: change {change:e} exceeds {tolerance:e}")]
    Convergence {
        what: &'static str,
        change: f64,
        tolerance: f64,
    },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("unknown semigroup family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("integral diverges: tail decay exponent {alpha:.6} is not above 1")]
    DivergentIntegral { alpha: f64 },

    #[error("quadrature stalled on [{a:e}, {b:e}]: error estimate {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("line means increase with height: {0}")]
    MonotonicityViolation(String),

    #[error("function `{0}` is not a member of the Hardy space")]
    NotMember(String),

    #[error("iteration did not settle after {steps} steps (chordal displacement {displacement:e})")]
    NoConvergence { steps: usize, displacement: f64 },

    #[error("ray estimates disagree: {first} vs {second}")]
    RayDisagreement { first: Complex64, second: Complex64 },

    #[error("sampled infimum {infimum} lies below the ray limit {limit}")]
    InfimumMismatch { infimum: f64, limit: f64 },

    #[error("|G(z)/z| keeps growing along the ray ({0:e})")]
    DivergenceDetected(f64),

    #[error("integration path passes within {distance:e} of a zero of the generator")]
    PathThroughZero { distance: f64 },

    #[error("multiplier G'(d) = {0} is degenerate")]
    DegenerateMultiplier(Complex64),

    #[error("the composition operators are not bounded")]
    UnboundedOperator,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("model function unavailable: {0}")]
    ModelUnavailable(String),

    #[error("the trivial semigroup has no Denjoy-Wolff point")]
    TrivialSemigroup,

    #[error("{what}: measured {measured:e}, tolerance {tolerance:e}")]
    ContractViolation {
        what: String,
        measured: f64,
        tolerance: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
