//! Linear algebra on constant symmetric matrices: definiteness, extreme
//! eigenvalues, the section `{r : F − rG ≻ 0}` at a point, and the
//! several-constraint trace conditions.

mod hypothesis;
mod interval;
mod matrix;
mod trace;

pub use hypothesis::{check_finsler_hypothesis, HypothesisMode, HypothesisReport};
pub use interval::{finsler_interval, pencil_determinant, ExtendedReal, Section, SectionInterval};
pub use matrix::{eigen_decomposition, eigen_range, is_positive_definite, min_eigenvalue, SymMatrix};
pub use trace::{multi_constraint_trace_check, TraceBudget, TraceCheckResult, TraceStatus};

use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointwiseError {
    #[error("non-finite matrix entry {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
}
