use std::fmt;

use num_traits::One;
use serde::{Serialize, Serializer};

use super::matrix::{eigen_range, is_positive_definite, SymMatrix};
use super::PointwiseError;
use crate::polycore::{rat_from_f64, Rational, UniPoly};

/// `NegInf < Finite(v) < PosInf`, which is the derived variant order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::Finite(v)
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::PosInf => write!(f, "+inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Open interval `(lo, hi)` over the extended reals, or the empty set.
/// A nonempty interval always has `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionInterval {
    pub empty: bool,
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
}

impl SectionInterval {
    pub fn empty() -> Self {
        SectionInterval {
            empty: true,
            lo: ExtendedReal::PosInf,
            hi: ExtendedReal::NegInf,
        }
    }

    pub fn whole_line() -> Self {
        SectionInterval {
            empty: false,
            lo: ExtendedReal::NegInf,
            hi: ExtendedReal::PosInf,
        }
    }

    /// `(lo, hi)`, collapsing to empty when `lo >= hi`.
    pub fn open(lo: ExtendedReal, hi: ExtendedReal) -> Self {
        if lo < hi {
            SectionInterval {
                empty: false,
                lo,
                hi,
            }
        } else {
            Self::empty()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn contains(&self, r: f64) -> bool {
        !self.empty && self.lo < ExtendedReal::Finite(r) && ExtendedReal::Finite(r) < self.hi
    }

    pub fn intersect(&self, other: &SectionInterval) -> SectionInterval {
        if self.empty || other.empty {
            return Self::empty();
        }
        Self::open(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Intersection with `(0, +∞)`.
    pub fn positive_part(&self) -> SectionInterval {
        self.intersect(&Self::open(ExtendedReal::Finite(0.0), ExtendedReal::PosInf))
    }

    /// A point of the interval, preferring the midpoint when both ends are
    /// finite.
    pub fn interior_point(&self) -> Option<f64> {
        if self.empty {
            return None;
        }
        Some(match (self.lo, self.hi) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => 0.5 * (a + b),
            (ExtendedReal::Finite(a), _) => a + a.abs().max(1.0),
            (_, ExtendedReal::Finite(b)) => b - b.abs().max(1.0),
            _ => 0.0,
        })
    }
}

impl fmt::Display for SectionInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            write!(f, "empty")
        } else {
            write!(f, "({}, {})", self.lo, self.hi)
        }
    }
}

/// A section together with a flag raised when root clustering or an
/// identically singular pencil made the answer numerically fragile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Section {
    pub interval: SectionInterval,
    pub low_confidence: bool,
}

/// `det(F - r G)` as an exact polynomial in `r`, by Bareiss fraction-free
/// elimination over `Q[r]`. Every finite double is an exact rational, so no
/// sampling is involved.
pub fn pencil_determinant(fa: &SymMatrix, ga: &SymMatrix) -> Result<UniPoly, PointwiseError> {
    let n = fa.n();
    if ga.n() != n {
        return Err(PointwiseError::DimensionMismatch {
            expected: n,
            found: ga.n(),
        });
    }
    let exact = |v: f64| rat_from_f64(v).map_err(|_| PointwiseError::NonFinite(v));
    if n == 2 {
        let (f00, f01, f11) = (exact(fa.get(0, 0))?, exact(fa.get(0, 1))?, exact(fa.get(1, 1))?);
        let (g00, g01, g11) = (exact(ga.get(0, 0))?, exact(ga.get(0, 1))?, exact(ga.get(1, 1))?);
        let two = Rational::from_integer(2.into());
        return Ok(UniPoly::new(vec![
            &f00 * &f11 - &f01 * &f01,
            two * &f01 * &g01 - &f00 * &g11 - &f11 * &g00,
            &g00 * &g11 - &g01 * &g01,
        ]));
    }
    let mut m: Vec<Vec<UniPoly>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(UniPoly::linear(exact(fa.get(i, j))?, -exact(ga.get(i, j))?));
        }
        m.push(row);
    }
    Ok(bareiss_det(m))
}

fn bareiss_det(mut m: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = m.len();
    if n == 0 {
        return UniPoly::constant(Rational::one());
    }
    let mut negate = false;
    let mut prev = UniPoly::constant(Rational::one());
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.scale(&-Rational::one())
    } else {
        det
    }
}

/// `M = {r : F - r G ≻ 0}` as an open interval.
///
/// Endpoints are real roots of `det(F - r G)`; each cell between
/// consecutive roots is tested for definiteness at its midpoint. The
/// unbounded ends follow the sign law: `hi = +∞` iff `λmax(G) ≤ tol` and
/// `lo = -∞` iff `λmin(G) ≥ -tol`.
pub fn finsler_interval(fa: &SymMatrix, ga: &SymMatrix, tol: f64) -> Result<Section, PointwiseError> {
    let det = pencil_determinant(fa, ga)?;
    let (gmin, gmax) = eigen_range(ga)?;
    if det.is_zero() {
        // Identically singular pencil: never positive definite.
        return Ok(Section {
            interval: SectionInterval::empty(),
            low_confidence: true,
        });
    }
    let roots = det.real_roots();
    let mut low_confidence = roots
        .windows(2)
        .any(|w| w[1] - w[0] <= tol * w[1].abs().max(1.0));

    let pd_at = |r: f64| is_positive_definite(&fa.add_scaled(-r, ga), tol);
    let mut cells: Vec<bool> = Vec::with_capacity(roots.len() + 1);
    if roots.is_empty() {
        cells.push(pd_at(0.0)?);
    } else {
        let first = roots[0];
        cells.push(pd_at(first - first.abs().max(1.0))?);
        for w in roots.windows(2) {
            cells.push(pd_at(0.5 * (w[0] + w[1]))?);
        }
        let last = roots[roots.len() - 1];
        cells.push(pd_at(last + last.abs().max(1.0))?);
    }

    let Some(start) = cells.iter().position(|&c| c) else {
        return Ok(Section {
            interval: SectionInterval::empty(),
            low_confidence,
        });
    };
    let mut end = start;
    while end + 1 < cells.len() && cells[end + 1] {
        end += 1;
    }
    if cells[end + 1..].iter().any(|&c| c) {
        // The true set is convex, so a second run is a numerical artifact.
        low_confidence = true;
    }
    let mut lo = if start == 0 {
        ExtendedReal::NegInf
    } else {
        ExtendedReal::Finite(roots[start - 1])
    };
    let mut hi = if end == roots.len() {
        ExtendedReal::PosInf
    } else {
        ExtendedReal::Finite(roots[end])
    };

    match (gmin >= -tol, lo == ExtendedReal::NegInf) {
        (true, false) => {
            lo = ExtendedReal::NegInf;
        }
        (false, true) => {
            low_confidence = true;
        }
        _ => {}
    }
    match (gmax <= tol, hi == ExtendedReal::PosInf) {
        (true, false) => {
            hi = ExtendedReal::PosInf;
        }
        (false, true) => {
            low_confidence = true;
        }
        _ => {}
    }
    Ok(Section {
        interval: SectionInterval::open(lo, hi),
        low_confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: f64) -> ExtendedReal {
        ExtendedReal::Finite(v)
    }

    #[test]
    fn extended_order() {
        assert!(ExtendedReal::NegInf < fin(-1e300));
        assert!(fin(1e300) < ExtendedReal::PosInf);
        assert!(fin(1.0) < fin(2.0));
    }

    #[test]
    fn diagonal_examples() {
        let s = finsler_interval(&SymMatrix::diag(&[3.0, 1.0]), &SymMatrix::diag(&[2.0, 2.0]), 1e-9).unwrap();
        assert_eq!(s.interval, SectionInterval::open(ExtendedReal::NegInf, fin(0.5)));
        let s = finsler_interval(&SymMatrix::identity(2), &SymMatrix::zeros(2), 1e-9).unwrap();
        assert_eq!(s.interval, SectionInterval::whole_line());
        let s = finsler_interval(
            &SymMatrix::diag(&[3.0, 3.0, 1.0]),
            &SymMatrix::diag(&[4.0, 2.0, 1.0]),
            1e-9,
        )
        .unwrap();
        assert_eq!(s.interval, SectionInterval::open(ExtendedReal::NegInf, fin(0.75)));
        assert_eq!(s.interval.positive_part(), SectionInterval::open(fin(0.0), fin(0.75)));
    }

    #[test]
    fn singular_pencil_is_empty() {
        let f = SymMatrix::diag(&[1.0, 0.0]);
        let g = SymMatrix::diag(&[1.0, 0.0]);
        let s = finsler_interval(&f, &g, 1e-9).unwrap();
        assert!(s.interval.is_empty() && s.low_confidence);
    }

    #[test]
    fn indefinite_constraint_gives_bounded_interval() {
        // F - rG = diag(1 - r, 1 + r)
        let s = finsler_interval(&SymMatrix::identity(2), &SymMatrix::diag(&[1.0, -1.0]), 1e-9).unwrap();
        assert_eq!(s.interval, SectionInterval::open(fin(-1.0), fin(1.0)));
        assert!(!s.low_confidence);
    }
}
