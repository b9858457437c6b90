//! Field-level structure of the sections `x ↦ (μ(x), ν(x))`: profiles over
//! grids, membership in `K_G` and `L_G`, balls outside of which `G` is
//! negative semidefinite, and far-field obstructions in one variable.

mod grid;
mod membership;
mod obstruction;
mod profile;

pub use grid::{Axis, GridSpec};
pub use membership::{detect_ball_nsd, in_k_g, in_l_g};
pub use obstruction::{asymptotic_obstruction, EndpointLimit, ObstructionReport, SectionKind, TailLimit, Verdict};
pub use profile::{mu_nu_profile, SectionProfile};

use thiserror::Error;

use crate::pointwise::PointwiseError;
use crate::polycore::PolyError;

#[derive(Debug, Error)]
pub enum SectionsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Pointwise(#[from] PointwiseError),
    #[error("grid: {0}")]
    Grid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
