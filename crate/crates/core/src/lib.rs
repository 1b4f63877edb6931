//! Exact-arithmetic toolkit for banded totally positive matrices.
//!
//! The crate is layered bottom-up:
//!
//! - [`scalar`], [`index`], [`matrix`], [`minor`], [`poly`]: exact rationals,
//!   label sequences, dense matrices, minors and polynomials.
//! - [`band`]: banded storage and the trivial/nontrivial minor families.
//! - [`criteria`]: total positivity tests, including four equivalent routes to
//!   banded total positivity and a brute-force oracle.
//! - [`pbf`]: positive bidiagonal factorizations, Darboux transformations and
//!   seeded generators.
//! - [`recpoly`]: left/right recursion polynomials and step-line normality.
//! - [`spectral`]: spectra of finite truncations and discrete biorthogonality.

pub mod band;
pub mod criteria;
pub mod error;
pub mod index;
pub mod matrix;
pub mod minor;
pub mod pbf;
pub mod poly;
pub mod recpoly;
pub mod scalar;
pub mod spectral;

pub use band::BandedMatrix;
pub use error::{Error, Result};
pub use index::IndexSeq;
pub use matrix::Matrix;
pub use poly::Polynomial;
pub use scalar::Rational;
