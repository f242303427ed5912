use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the range a routine supports.
    #[error("{what} out of supported range: {detail}")]
    Range { what: &'static str, detail: String },

    /// A numerical procedure did not reach its tolerance; carries the best estimate.
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error:e}")]
    Accuracy { estimate: Complex64, error: f64 },

    /// The integrated state became non-finite.
    #[error("integration diverged after t = {last_finite_time}")]
    Divergence { last_finite_time: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid reference frame: (mu, nu) = ({mu}, {nu})")]
    InvalidFrame { mu: f64, nu: f64 },

    #[error("wave function is not normalizable: Re(A) = {re_a}")]
    NonNormalizable { re_a: f64 },

    #[error("angle undefined: {0}")]
    UndefinedAngle(&'static str),

    #[error("coin probability {value} for element ({n}, {np}) falls outside [0, 1]")]
    RepresentationOverflow { n: usize, np: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("relative entropy is infinite: q = {q} with p = {p}")]
    InfiniteDivergence { p: f64, q: f64 },

    /// An iterative reconstruction stopped before its tail criterion was met.
    #[error("{what} did not converge (residual {residual:e})")]
    PartialResult {
        what: &'static str,
        residual: f64,
        partial: Box<crate::density::DensityMatrix>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            what,
            detail: detail.into(),
        }
    }
}
