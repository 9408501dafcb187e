//! Exact generalized harmonic numbers, the beta-integral family
//! `F_n(x) = B(x+1, n+1)` with derivatives of any order, and machinery to
//! verify the identities and series limits they satisfy.
//!
//! Numeric routines are generic over [`Scalar`]; [`Rational`] is the exact
//! instantiation and the one every identity check uses.

pub mod beta;
mod error;
pub mod harmonic;
pub mod identity;
pub mod oracle;
pub mod rational;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Ring, Scalar};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Harmonic vector over exact rationals.
pub type HarmonicVectorQ = harmonic::HarmonicVector<Rational>;
/// Harmonic vector over `f64`.
pub type HarmonicVectorF64 = harmonic::HarmonicVector<f64>;
/// Beta value over exact rationals.
pub type BetaValueQ = beta::BetaValue<Rational>;
/// Beta value over `f64`.
pub type BetaValueF64 = beta::BetaValue<f64>;
