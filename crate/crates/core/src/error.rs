use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring descriptor mismatch: {0} vs {1}")]
    DescriptorMismatch(String, String),
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("elements do not generate the unit ideal: {0}")]
    NotUnimodular(String),
    #[error("ring {0} does not provide the stable-rank-1 capability")]
    CapabilityMissing(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} is too small for this operation")]
    DimensionTooSmall(usize),
    #[error("matrix does not have determinant 1 (det = {0})")]
    NotSL(String),
    #[error("diagonal entries must multiply to 1 (product = {0})")]
    DetNotOne(String),
    #[error("matrix is not monomial")]
    NotMonomial,
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("transvection at ({0},{1}) is a corner and lies in no terminal Levi subgroup")]
    CornerTransvection(usize, usize),
    #[error("factorisation does not have the pattern U L U L: {0}")]
    BadPattern(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error(
        "no suitable prime found for k <= {0}; termination of this search is only \
         guaranteed under the Generalised Riemann Hypothesis"
    )]
    SearchExhausted(u64),
    #[error("near-singular input: {0}")]
    NearSingular(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
