//! Exact polynomial and matrix-polynomial arithmetic.
//!
//! Coefficients are arbitrary precision rationals. Floating point only shows
//! up when a polynomial is evaluated at a real point; every identity that a
//! certificate asserts is checked over the rationals.

mod json;
mod matpoly;
mod poly;
mod rational;
mod univariate;

pub use json::{MatPolyJson, PolyJson, TermJson};
pub use matpoly::{herm_square_sum, norm_sq_poly, CompiledMatPoly, MatPoly};
pub use poly::{CompiledPoly, Monomial, Poly};
pub use rational::{parse_rational, rat, rat_from_f64, rat_to_f64, Rational};
pub use univariate::UniPoly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix polynomial is not symmetric (entry ({row},{col}))")]
    NotSymmetric { row: usize, col: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot represent {0} as an exact rational")]
    NonFinite(f64),
}
