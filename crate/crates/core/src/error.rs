use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the public API.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// n! does not fit in an f64 (n > 170); the floating backend refuses
    /// rather than returning infinities.
    #[error("factorial of {0} overflows f64 (limit 170 in floating mode)")]
    FactorialOverflow(u32),

    #[error("index {index} exceeds the cap {cap} for {what}")]
    IndexCap {
        what: &'static str,
        index: u32,
        cap: u32,
    },

    /// Two quadrature resolutions disagree beyond the requested tolerance.
    /// Both estimates are carried so the caller can inspect them.
    #[error("quadrature did not converge: coarse {coarse}, refined {refined}, discrepancy {discrepancy:.3e} > tol {tol:.3e}")]
    QuadratureNotConverged {
        coarse: Complex64,
        refined: Complex64,
        discrepancy: f64,
        tol: f64,
    },

    #[error("{name} is not flagged Schwartz-class; pairing against polynomials is undefined")]
    NotSchwartz { name: String },

    #[error("{name} has no moment-generating-function oracle (not exp-stable)")]
    NotExpStable { name: String },

    #[error("{name} has no analytic continuation")]
    NoContinuation { name: String },

    #[error("derivative oracle for {name} unavailable at order {order}")]
    DerivativeUnavailable { name: String, order: u32 },

    /// Gaussian width outside the band where the complex-plane integrand is
    /// absolutely integrable.
    #[error("sigma {sigma} lies outside the absolutely convergent band ({lo:.6}, {hi:.6})")]
    SigmaOutOfDomain { sigma: f64, lo: f64, hi: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
