use serde::Serialize;

use super::PointwiseError;

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Jacobi sweeps before giving up; quadratic convergence makes 64 generous.
const MAX_SWEEPS: usize = 64;

impl SymMatrix {
    /// Takes `data` as given; the upper triangle is mirrored into the lower.
    pub fn from_row_major(n: usize, mut data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data length");
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        SymMatrix { n, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_row_major(n, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.data.clone()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// `vᵀ A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            acc += v[i] * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }

    /// `tr(A B)` for symmetric `A`, `B`.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Block matrix `A ⊕ c`.
    pub fn direct_sum(&self, c: f64) -> SymMatrix {
        let n = self.n + 1;
        let mut m = SymMatrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i * n + j] = self.get(i, j);
            }
        }
        m.data[n * n - 1] = c;
        m
    }

    /// Outer product `v vᵀ`.
    pub fn outer(v: &[f64]) -> SymMatrix {
        let n = v.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j];
            }
        }
        m
    }
}

fn check_finite(a: &SymMatrix) -> Result<(), PointwiseError> {
    match a.data.iter().find(|v| !v.is_finite()) {
        Some(&v) => Err(PointwiseError::NonFinite(v)),
        None => Ok(()),
    }
}

/// LDLᵀ with symmetric diagonal pivoting; positive definite iff every
/// pivot exceeds `tol * max(1, ‖A‖∞)`.
pub fn is_positive_definite(a: &SymMatrix, tol: f64) -> Result<bool, PointwiseError> {
    check_finite(a)?;
    let n = a.n;
    let threshold = tol * a.norm_inf().max(1.0);
    let mut m = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[perm[i] * n + perm[i]].total_cmp(&m[perm[j] * n + perm[j]]))
            .expect("nonempty pivot range");
        perm.swap(k, p);
        let pk = perm[k];
        let pivot = m[pk * n + pk];
        if pivot <= threshold {
            return Ok(false);
        }
        for i in k + 1..n {
            let pi = perm[i];
            let l = m[pi * n + pk] / pivot;
            if l == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let pj = perm[j];
                m[pi * n + pj] -= l * m[pk * n + pj];
            }
        }
    }
    Ok(true)
}

/// Eigenvalues (ascending) and matching unit eigenvectors, by cyclic Jacobi.
pub fn eigen_decomposition(a: &SymMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>), PointwiseError> {
    check_finite(a)?;
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = SymMatrix::identity(n).data;
    let scale = a.norm_fro();
    let mut converged = n <= 1 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(PointwiseError::NonConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    Ok((values, vectors))
}

/// `(λmin, λmax)`; both zero for the empty matrix.
pub fn eigen_range(a: &SymMatrix) -> Result<(f64, f64), PointwiseError> {
    let (vals, _) = eigen_decomposition(a)?;
    Ok((
        vals.first().copied().unwrap_or(0.0),
        vals.last().copied().unwrap_or(0.0),
    ))
}

pub fn min_eigenvalue(a: &SymMatrix) -> Result<f64, PointwiseError> {
    eigen_range(a).map(|r| r.0)
}
