use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A probe window reached outside the padded domain of a curve.
    #[error("evaluation at t = {t} is outside the padded domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Oscillation was zero on every rung, so no exponent exists.
    #[error("flat curve: zero oscillation on every ladder rung")]
    FlatCurve,

    #[error("ill-conditioned design matrix (condition {condition:.3e} > {limit:.1e}); widen the ladder or shrink the basis")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("inadmissible variation: exponent {beta} < required {required} for curve exponent {alpha}")]
    Inadmissible { beta: f64, required: f64, alpha: f64 },

    #[error("variation must vanish at both endpoints (kind = variation)")]
    NotAVariation,

    #[error("scalar field is missing the x-partial of order {0}")]
    MissingPartial(usize),

    #[error("wavefunction node at (x = {x}, t = {t}): |psi| = {modulus:.3e} is within the zero tolerance")]
    Node { x: f64, t: f64, modulus: f64 },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
