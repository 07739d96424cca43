use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: must be finite and strictly positive")]
    InvalidParameter { name: String, value: f64 },

    #[error("{what} = {value} is outside the domain: {reason}")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("operation needs two distinct modes, got mode {0} twice")]
    ModeCollision(usize),

    #[error("unknown mode {0}")]
    UnknownMode(String),

    #[error("mode registry error: {0}")]
    Registry(String),

    #[error("registry is missing partner modes: {0:?}")]
    MissingPartners(Vec<f64>),

    #[error("hamiltonian validation failed: {0}")]
    Hamiltonian(String),

    #[error("squeezing parameter undefined: total population {0:e} is zero")]
    UndefinedSqueezing(f64),

    #[error("variance {0:e} is negative beyond round-off")]
    NegativeVariance(f64),

    #[error("evolution produced non-finite values at t = {0:e} s")]
    NonFinite(f64),

    #[error("integrator failed to converge: {0}")]
    Integration(String),

    #[error("fock cutoff too small: truncation tail {tail:e} exceeds {limit:e}; need n_max >= {required}")]
    Cutoff {
        tail: f64,
        limit: f64,
        required: usize,
    },

    #[error("fock space dimension {0} exceeds the limit of 1e6")]
    DimensionLimit(usize),
}
