use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice size {0} is too small (need at least {1} sites)")]
    LatticeTooSmall(usize, usize),

    #[error("snapshot stride must be positive")]
    InvalidStride,

    #[error("step count must be positive")]
    InvalidSteps,

    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error("closed-form coin index {0} is outside 0..=5")]
    CoinIndexOutOfRange(usize),

    #[error("model {0} has no six-step stroboscopic stencil")]
    NotStroboscopic(&'static str),

    #[error("fibonacci clock overflowed at j = {0}")]
    ClockOverflow(usize),

    #[error("field has {found} sites, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("probability near the periodic seam is {0:e}; position moments are ambiguous")]
    WrapAmbiguity(f64),

    #[error("wavefront reached the lattice boundary at step {0}")]
    WrappedFront(usize),

    #[error("need at least {needed} points inside the fit window, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("standard deviation vanishes at step {0}; exponent is undefined")]
    ZeroSigma(usize),

    #[error("quantile {0} must lie strictly between 0.5 and 1")]
    InvalidQuantile(f64),

    #[error("probability vector is not normalized (sum = {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
