#![forbid(unsafe_code)]

//! Exact-arithmetic engine for cohomological Fourier-Mukai transforms on
//! elliptic fibrations: D-brane charge transformations, heterotic
//! spectral-cover bundle invariants, monodromy and central-charge calculus,
//! and Simpson stability arithmetic.
//!
//! Every coefficient in the crate is an arbitrary-precision rational; every
//! identity test is an equality test.

pub mod charges;
pub mod error;
pub mod fm;
pub mod geometry;
pub mod kernel;
pub mod matrix;
pub mod ring;
pub mod scalar;
pub mod spectral;
pub mod stability;

pub use error::CoreError;
pub use scalar::{CRat, Rat};
