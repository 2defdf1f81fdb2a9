//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular to working precision (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("matrix is not Hermitian (asymmetry {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("direction operator J is not a self-adjoint involution (residual {residual:e})")]
    DirectionNotInvolution { residual: f64 },
    #[error("conservativity violated: |Im A - KJK*| = {residual:e}")]
    ConservativityViolated { residual: f64 },
    #[error("rank mismatch: rank(K) = {rank_k}, rank(Im A) = {rank_im}")]
    RangeMismatch { rank_k: usize, rank_im: usize },
    #[error("random generation failed after {attempts} draws")]
    GenerationFailed { attempts: usize },
    #[error("z = {z} lies in the spectrum")]
    SpectrumHit { z: Complex64 },
    #[error("F is not an orthogonal projection (residual {residual:e})")]
    ProjectionInvalid { residual: f64 },
    #[error("resolvent set of the {0} pencil is empty")]
    EmptyResolventSet(&'static str),
    #[error("direction operators of the coupled systems differ")]
    DirectionMismatch,
    #[error("I - V_F J V_L J is not invertible at z = {z}")]
    FactorNotInvertible { z: Complex64 },
    #[error("z = {z} is a pole")]
    PoleHit { z: Complex64 },
    #[error("denominator vanishes at z = {z}")]
    DenominatorZero { z: Complex64 },
    #[error("input-output space is {m}-dimensional, expected a scalar channel")]
    ChannelNotScalar { m: usize },
    #[error("Im V(i) = {im:e} is not positive")]
    NotHerglotzAtI { im: f64 },
    #[error("Q = 0: the class is preserved by every unimodular transformation, no angle to select")]
    QZero,
    #[error("function is not in the Donoghue class M (V(i) = {value})")]
    InputNotClassM { value: Complex64 },
    #[error("B is not J-unitary (residual {residual:e})")]
    NotJUnitary { residual: f64 },
    #[error("B has an eigenvalue at +1 or -1")]
    EigenvalueAtPlusMinusOne,
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
    #[error("step too large: dt * |A| = {product:e} exceeds 0.1")]
    StepTooLarge { product: f64 },
    #[error("unsupported projection F for time simulation (only F = 0 and F = I)")]
    UnsupportedProjection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable variant name, used in CLI reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::DirectionNotInvolution { .. } => "DirectionNotInvolution",
            Error::ConservativityViolated { .. } => "ConservativityViolated",
            Error::RangeMismatch { .. } => "RangeMismatch",
            Error::GenerationFailed { .. } => "GenerationFailed",
            Error::SpectrumHit { .. } => "SpectrumHit",
            Error::ProjectionInvalid { .. } => "ProjectionInvalid",
            Error::EmptyResolventSet(_) => "EmptyResolventSet",
            Error::DirectionMismatch => "DirectionMismatch",
            Error::FactorNotInvertible { .. } => "FactorNotInvertible",
            Error::PoleHit { .. } => "PoleHit",
            Error::DenominatorZero { .. } => "DenominatorZero",
            Error::ChannelNotScalar { .. } => "ChannelNotScalar",
            Error::NotHerglotzAtI { .. } => "NotHerglotzAtI",
            Error::QZero => "QZero",
            Error::InputNotClassM { .. } => "InputNotClassM",
            Error::NotJUnitary { .. } => "NotJUnitary",
            Error::EigenvalueAtPlusMinusOne => "EigenvalueAtPlusMinusOne",
            Error::InvariantViolated(_) => "InvariantViolated",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::UnsupportedProjection => "UnsupportedProjection",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}
