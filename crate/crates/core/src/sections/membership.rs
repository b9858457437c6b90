use std::cmp::Ordering;

use crate::pointwise::eigen_range;
use crate::polycore::{CompiledMatPoly, MatPoly, Poly, UniPoly};

use super::SectionsError;

/// `G(a)` is not negative definite: `λmax(G(a)) ≥ -tol`.
pub fn in_k_g(g: &MatPoly, a: &[f64], tol: f64) -> Result<bool, SectionsError> {
    let (_, hi) = eigen_range(&g.eval(a)?)?;
    Ok(hi >= -tol)
}

/// `G(a)` has a nonzero isotropic vector: `λmax ≥ -tol` and `λmin ≤ tol`.
pub fn in_l_g(g: &MatPoly, a: &[f64], tol: f64) -> Result<bool, SectionsError> {
    let (lo, hi) = eigen_range(&g.eval(a)?)?;
    Ok(hi >= -tol && lo <= tol)
}

pub(crate) fn membership_flags(g: &CompiledMatPoly, a: &[f64], tol: f64) -> Result<(bool, bool), SectionsError> {
    let (lo, hi) = eigen_range(&g.eval(a))?;
    Ok((hi >= -tol, hi >= -tol && lo <= tol))
}

/// All principal minors of `m`, as polynomials.
pub(crate) fn principal_minors(m: &MatPoly) -> Vec<Poly> {
    let n = m.n();
    (1u32..(1 << n))
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            det_poly(m, &idx)
        })
        .collect()
}

/// Determinant of the principal submatrix on `idx`, by cofactor expansion;
/// sizes here are tiny.
pub(crate) fn det_poly(m: &MatPoly, idx: &[usize]) -> Poly {
    det_minor(m, idx, idx)
}

fn det_minor(m: &MatPoly, rows: &[usize], cols: &[usize]) -> Poly {
    if rows.is_empty() {
        return Poly::one(m.nvars());
    }
    let r = rows[0];
    let mut acc = Poly::zero(m.nvars());
    for (k, &c) in cols.iter().enumerate() {
        let entry = m.get(r, c);
        if entry.is_zero() {
            continue;
        }
        let rest_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = entry * &det_minor(m, &rows[1..], &rest_cols);
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Smallest sampled radius `R` beyond which `G` is negative semidefinite on
/// the sample grid up to `r_max`. For one variable the tails must also be
/// confirmed by the leading terms of every principal minor of `-G`.
pub fn detect_ball_nsd(
    g: &MatPoly,
    r_max: f64,
    grid_density: usize,
    tol: f64,
) -> Result<Option<f64>, SectionsError> {
    let d = g.nvars();
    let compiled = g.compile()?;
    if d == 1 {
        let neg = g.neg();
        for minor in principal_minors(&neg) {
            let u = UniPoly::from_poly(&minor)?;
            for side in [true, false] {
                if u.sign_at_infinity(side) == Ordering::Less {
                    return Ok(None);
                }
            }
        }
    }
    let steps = grid_density.max(2);
    let axis: Vec<f64> = (0..steps)
        .map(|i| -r_max + 2.0 * r_max * i as f64 / (steps - 1) as f64)
        .collect();
    let mut worst: f64 = 0.0;
    let mut outer_violation = false;
    let mut index = vec![0usize; d];
    loop {
        let a: Vec<f64> = index.iter().map(|&i| axis[i]).collect();
        let radius = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if radius <= r_max {
            let (_, hi) = eigen_range(&compiled.eval(&a))?;
            if hi > tol {
                worst = worst.max(radius);
                if radius >= r_max * (1.0 - 1e-12) {
                    outer_violation = true;
                }
            }
        }
        let mut k = 0;
        while k < d {
            index[k] += 1;
            if index[k] < steps {
                break;
            }
            index[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    if outer_violation || (d != 1 && worst >= r_max * (1.0 - 2.0 / steps as f64)) {
        return Ok(None);
    }
    Ok(Some(worst))
}
