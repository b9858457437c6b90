use std::fmt;

use num_traits::{One, Zero};

use super::poly::{CompiledPoly, Monomial, Poly};
use super::rational::Rational;
use super::PolyError;
use crate::pointwise::SymMatrix;

/// `n x n` matrix whose entries are polynomials in `nvars` variables.
///
/// `symmetric` is recomputed on every construction, so it is true exactly
/// when `entries[i][j] == entries[j][i]` for all `i, j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatPoly {
    n: usize,
    nvars: usize,
    entries: Vec<Poly>,
    symmetric: bool,
}

impl MatPoly {
    /// Row-major constructor.
    pub fn new(n: usize, nvars: usize, entries: Vec<Poly>) -> Result<Self, PolyError> {
        if entries.len() != n * n {
            return Err(PolyError::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, found {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(p) = entries.iter().find(|p| p.nvars() != nvars) {
            return Err(PolyError::DimensionMismatch {
                expected: nvars,
                found: p.nvars(),
            });
        }
        let mut m = MatPoly {
            n,
            nvars,
            entries,
            symmetric: false,
        };
        m.symmetric = m.asymmetry().is_none();
        Ok(m)
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<Poly>>) -> Result<Self, PolyError> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(PolyError::Shape(format!(
                "row of length {} in a matrix with {n} rows",
                r.len()
            )));
        }
        Self::new(n, nvars, rows.into_iter().flatten().collect())
    }

    /// Integer matrix with constant entries.
    pub fn from_i64_rows(nvars: usize, rows: &[&[i64]]) -> Result<Self, PolyError> {
        Self::from_rows(
            nvars,
            rows.iter()
                .map(|r| r.iter().map(|&c| Poly::from_i64(nvars, c)).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize, nvars: usize) -> Self {
        MatPoly {
            n,
            nvars,
            entries: vec![Poly::zero(nvars); n * n],
            symmetric: true,
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        Self::scalar(n, &Poly::one(nvars))
    }

    /// `p * I_n`.
    pub fn scalar(n: usize, p: &Poly) -> Self {
        Self::diag(vec![p.clone(); n])
    }

    pub fn diag(d: Vec<Poly>) -> Self {
        let n = d.len();
        let nvars = d.first().map_or(0, Poly::nvars);
        assert!(d.iter().all(|p| p.nvars() == nvars), "diagonal entries disagree on variable count");
        let mut m = Self::zeros(n, nvars);
        for (i, p) in d.into_iter().enumerate() {
            m.entries[i * n + i] = p;
        }
        m
    }

    /// Matrix unit `E_{ij}` (zero-based).
    pub fn elementary(n: usize, nvars: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, nvars);
        m.entries[i * n + j] = Poly::one(nvars);
        m.symmetric = i == j;
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Poly>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Largest total degree over entries; `None` for the zero matrix.
    pub fn total_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(Poly::total_degree).max()
    }

    /// First `(row, col)` with `row < col` where symmetry fails.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn require_symmetric(&self) -> Result<(), PolyError> {
        match self.asymmetry() {
            None => Ok(()),
            Some((row, col)) => Err(PolyError::NotSymmetric { row, col }),
        }
    }

    fn check_shape(&self, other: &MatPoly) -> Result<(), PolyError> {
        if self.n != other.n {
            return Err(PolyError::Shape(format!(
                "{}x{} against {}x{}",
                self.n, self.n, other.n, other.n
            )));
        }
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &MatPoly,
        f: impl Fn(&Poly, &Poly) -> Poly,
    ) -> Result<MatPoly, PolyError> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        MatPoly::new(self.n, self.nvars, entries)
    }

    pub fn checked_add(&self, other: &MatPoly) -> Result<MatPoly, PolyError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &MatPoly) -> Result<MatPoly, PolyError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &MatPoly) -> Result<MatPoly, PolyError> {
        self.check_shape(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Poly::zero(self.nvars);
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        MatPoly::new(n, self.nvars, entries)
    }

    /// `p * M`.
    pub fn scale_poly(&self, p: &Poly) -> Result<MatPoly, PolyError> {
        if p.nvars() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: p.nvars(),
            });
        }
        let entries = self.entries.iter().map(|e| e * p).collect();
        let mut m = MatPoly::new(self.n, self.nvars, entries)?;
        m.symmetric |= self.symmetric;
        Ok(m)
    }

    pub fn scale(&self, c: &Rational) -> MatPoly {
        MatPoly {
            n: self.n,
            nvars: self.nvars,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
            symmetric: self.symmetric || c.is_zero(),
        }
    }

    pub fn neg(&self) -> MatPoly {
        self.scale(&-Rational::one())
    }

    pub fn transpose(&self) -> MatPoly {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).clone());
            }
        }
        MatPoly {
            n,
            nvars: self.nvars,
            entries,
            symmetric: self.symmetric,
        }
    }

    /// `H^T H`.
    pub fn herm_square(&self) -> MatPoly {
        let n = self.n;
        let mut entries = vec![Poly::zero(self.nvars); n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = Poly::zero(self.nvars);
                for k in 0..n {
                    let (a, b) = (self.get(k, i), self.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries[j * n + i] = acc.clone();
                entries[i * n + j] = acc;
            }
        }
        MatPoly {
            n,
            nvars: self.nvars,
            entries,
            symmetric: true,
        }
    }

    /// Block matrix `M ⊕ c`.
    pub fn direct_sum(&self, c: &Poly) -> Result<MatPoly, PolyError> {
        if c.nvars() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: c.nvars(),
            });
        }
        let n = self.n + 1;
        let mut entries = vec![Poly::zero(self.nvars); n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                entries[i * n + j] = self.get(i, j).clone();
            }
        }
        entries[n * n - 1] = c.clone();
        Ok(MatPoly {
            n,
            nvars: self.nvars,
            entries,
            symmetric: self.symmetric,
        })
    }

    /// Top-left `k x k` block.
    pub fn leading_block(&self, k: usize) -> MatPoly {
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(self.get(i, j).clone());
            }
        }
        MatPoly::new(k, self.nvars, entries).expect("block of a well-formed matrix")
    }

    /// Entrywise real evaluation, row-major, symmetric or not.
    pub fn eval_general(&self, point: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.entries.iter().map(|p| p.eval(point)).collect()
    }

    /// Evaluation of a symmetric matrix polynomial at a real point.
    pub fn eval(&self, point: &[f64]) -> Result<SymMatrix, PolyError> {
        self.require_symmetric()?;
        Ok(SymMatrix::from_row_major(self.n, self.eval_general(point)?))
    }

    pub fn eval_exact(&self, point: &[Rational]) -> Result<Vec<Rational>, PolyError> {
        self.entries.iter().map(|p| p.eval_exact(point)).collect()
    }

    /// First entry `(i, j)` and monomial at which `self` and `other` differ,
    /// scanning row-major and then by monomial order.
    pub fn first_difference(&self, other: &MatPoly) -> Option<(usize, usize, Monomial)> {
        for i in 0..self.n {
            for j in 0..self.n {
                let diff = self.get(i, j) - other.get(i, j);
                let first = diff.terms().next().map(|(m, _)| m.clone());
                if let Some(m) = first {
                    return Some((i, j, m));
                }
            }
        }
        None
    }

    pub fn compile(&self) -> Result<CompiledMatPoly, PolyError> {
        self.require_symmetric()?;
        Ok(CompiledMatPoly {
            n: self.n,
            nvars: self.nvars,
            entries: self.entries.iter().map(Poly::compile).collect(),
        })
    }
}

impl fmt::Display for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// `Σ H_i^T H_i`; the empty sum is the zero matrix of the given shape.
pub fn herm_square_sum(n: usize, nvars: usize, hs: &[MatPoly]) -> Result<MatPoly, PolyError> {
    let mut acc = MatPoly::zeros(n, nvars);
    for h in hs {
        acc = acc.checked_add(&h.herm_square())?;
    }
    Ok(acc)
}

/// `‖x‖² = Σ x_i²`.
pub fn norm_sq_poly(nvars: usize) -> Poly {
    (0..nvars).fold(Poly::zero(nvars), |acc, i| &acc + &Poly::var(nvars, i).square())
}

/// Symmetric matrix polynomial with `f64` coefficients for hot evaluation.
#[derive(Debug, Clone)]
pub struct CompiledMatPoly {
    n: usize,
    nvars: usize,
    entries: Vec<CompiledPoly>,
}

impl CompiledMatPoly {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, point: &[f64]) -> SymMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.entries[i * n + j].eval(point);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix::from_row_major(n, data)
    }
}
