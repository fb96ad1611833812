use crate::bloch::BlochVector;

/// Failures raised by the core numerics.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point lies outside the Bloch ball (|r|^2 = {norm_sq})")]
    OutsideBall { norm_sq: f64 },
    #[error("matrix is not Hermitian (deviation {deviation})")]
    NotHermitian { deviation: f64 },
    #[error("matrix trace {trace} differs from 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix has a negative eigenvalue {eigenvalue}")]
    NotPositive { eigenvalue: f64 },
    #[error("trace of the elementwise square vanishes")]
    NormalizationUnderflow,
    #[error("rational map evaluated at a pole (z = ±i)")]
    PoleInput,
    #[error("point coincides with the projection pole")]
    PoleProjection,
    #[error("purity {actual} does not match the requested surface purity {expected}")]
    PurityMismatch { expected: f64, actual: f64 },
    #[error("pre-image lies outside the Bloch ball")]
    NoPreimage,
    #[error("target has a unique pre-image on the w axis")]
    DegenerateBranch { preimage: BlochVector },
    #[error("pre-image of z = -1 is the point at infinity")]
    InfinitePreimage,
    #[error("cannot rescale the zero vector")]
    ZeroVector,
    #[error("cycle multiplier {multiplier} is within the marginal band around 1")]
    MarginalCycle { multiplier: f64 },
    #[error("border mask has no set pixel")]
    EmptyMask,
    #[error("all box counts are equal; slope undefined")]
    DegenerateFit,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
