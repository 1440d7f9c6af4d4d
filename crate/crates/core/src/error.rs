//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("classes belong to different ring presentations ({0} vs {1})")]
    PresentationMismatch(String, String),
    #[error("exponential requires a nilpotent argument (degree-0 component is {0})")]
    NotNilpotent(String),
    #[error("square root requires degree-0 component 1 (found {0})")]
    NotUnitOne(String),
    #[error("inverse requires an invertible degree-0 component (found 0)")]
    NotUnit,
    #[error("unknown catalog entry: {0}")]
    UnknownCatalogEntry(String),
    #[error("inconsistent custom lattice: {0}")]
    InconsistentCustomLattice(String),
    #[error("operation requires a {expected} fibration, got {found}")]
    WrongKind { expected: String, found: String },
    #[error("rank must be positive (got {0})")]
    NonPositiveRank(String),
    #[error("rank must be nonnegative (got {0})")]
    NegativeRank(String),
    #[error("bundle is not SU(n): c1(V) = {0} is nonzero")]
    NotSUn(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty scan range: {0}")]
    EmptyRange(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero rank: reduced polynomial undefined")]
    ZeroRank,
    #[error("support has zero polarized degree")]
    ZeroSupportDegree,
    #[error("bad fraction: {0}")]
    BadFraction(String),
    #[error("invalid ring presentation: {0}")]
    InvalidPresentation(String),
}
