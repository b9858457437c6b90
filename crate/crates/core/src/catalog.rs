//! The concrete matrices used as running examples, with their known section
//! formulas.

use crate::pointwise::SymMatrix;
use crate::polycore::{MatPoly, Poly};

fn x() -> Poly {
    Poly::var(1, 0)
}

fn c(v: i64) -> Poly {
    Poly::from_i64(1, v)
}

/// `G = diag(x, x)`, `F = diag(1 + x, 1)`.
pub fn diag_pair() -> (MatPoly, MatPoly) {
    let f = MatPoly::diag(vec![&c(1) + &x(), c(1)]);
    let g = MatPoly::diag(vec![x(), x()]);
    (f, g)
}

/// `F ⊕ 0` and `G ⊕ -1`.
pub fn lift(f: &MatPoly, g: &MatPoly) -> (MatPoly, MatPoly) {
    let z = Poly::zero(f.nvars());
    let m1 = Poly::from_i64(g.nvars(), -1);
    (
        f.direct_sum(&z).expect("same variable count"),
        g.direct_sum(&m1).expect("same variable count"),
    )
}

/// `G = x diag(2, 1)`, `F = (1 + x) I₂`.
pub fn odd_degree_pair() -> (MatPoly, MatPoly) {
    let f = MatPoly::scalar(2, &(&c(1) + &x()));
    let g = MatPoly::diag(vec![x().scale(&crate::polycore::rat(2, 1)), x()]);
    (f, g)
}

/// `G = diag(2x, x, 1)`, `F = diag(1 + x, 1 + x, 1)`.
pub fn three_by_three_pair() -> (MatPoly, MatPoly) {
    let f = MatPoly::diag(vec![&c(1) + &x(), &c(1) + &x(), c(1)]);
    let g = MatPoly::diag(vec![x().scale(&crate::polycore::rat(2, 1)), x(), c(1)]);
    (f, g)
}

/// Constant triple `(G₁, G₂, F)` satisfying the vector condition but not its
/// trace relaxation.
pub fn two_constraint_triple() -> (SymMatrix, SymMatrix, SymMatrix) {
    (
        SymMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        SymMatrix::from_rows(&[&[0.0, -1.0], &[-1.0, 1.0]]),
        SymMatrix::from_rows(&[&[1.0, -1.0], &[-1.0, 0.0]]),
    )
}

/// Closed-form sections. `None` marks `±∞`.
pub mod closed_forms {
    /// Plain section of [`super::diag_pair`].
    pub fn diag_pair(x: f64) -> (Option<f64>, Option<f64>) {
        if x < 0.0 {
            (Some(1.0 + 1.0 / x), None)
        } else if x == 0.0 {
            (None, None)
        } else {
            (None, Some(1.0 / x))
        }
    }

    /// Section of the lifted [`super::diag_pair`].
    pub fn diag_pair_lifted(x: f64) -> (Option<f64>, Option<f64>) {
        if x < -1.0 {
            (Some(1.0 + 1.0 / x), None)
        } else if x <= 0.0 {
            (Some(0.0), None)
        } else {
            (Some(0.0), Some(1.0 / x))
        }
    }

    /// Positive section of [`super::three_by_three_pair`].
    pub fn three_by_three_positive(x: f64) -> (Option<f64>, Option<f64>) {
        if x < -1.0 {
            (Some((1.0 + x) / x), Some(1.0))
        } else if x <= 1.0 {
            (Some(0.0), Some(1.0))
        } else {
            (Some(0.0), Some((1.0 + x) / (2.0 * x)))
        }
    }
}
