use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("model validation failed: {0}")]
    ModelValidation(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("degenerate amplitude A_0(t*) = 0")]
    DegenerateAmplitude,

    #[error("non-finite signal sample at x = {x}")]
    NonFiniteSample { x: f64 },

    #[error("band [{lo}, {hi}] does not cover required [{need_lo}, {need_hi}]")]
    BandCoverage {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no bifurcation: pi^2 sigma^2 delta^2 = {value} exceeds 2")]
    NoBifurcation { value: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("phase undefined: |V| = {modulus:e} at (t={t}, eta={eta})")]
    PhaseUndefined { t: f64, eta: f64, modulus: f64 },

    #[error("contour passes through a zero: |V| = {modulus:e}")]
    ContourThroughZero { modulus: f64 },

    #[error("winding not near an integer: {value}")]
    WindingNotInteger { value: f64 },

    #[error("precondition not met: {0}")]
    NotApplicable(String),

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("singular density at xi = {xi}")]
    Singularity { xi: f64 },

    #[error("logarithm argument of {which} is {value} (not positive)")]
    OutOfBranch { which: &'static str, value: f64 },

    #[error("bound violated: {0}")]
    BoundViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {v}"),
        })
    }
}
