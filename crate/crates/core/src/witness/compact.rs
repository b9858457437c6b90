use nalgebra::{DMatrix, DVector};

use crate::pointwise::{finsler_interval, is_positive_definite, ExtendedReal, DEFAULT_TOL};
use crate::polycore::{rat_from_f64, CompiledMatPoly, MatPoly, Poly};

use super::{box_grid, check_pair, WitnessError};

const REWEIGHT_ROUNDS: usize = 8;
const VERIFY_TOL: f64 = 1e-12;

/// Exponent vectors of total degree `<= deg` in `d` variables.
pub(crate) fn monomials(d: usize, deg: usize) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e as u32);
            rec(d, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, deg, &mut Vec::with_capacity(d), &mut out);
    out.sort_by_key(|m| m.iter().sum::<u32>());
    out
}

fn eval_monomial(m: &[u32], a: &[f64]) -> f64 {
    m.iter().zip(a).map(|(&e, &v)| v.powi(e as i32)).product()
}

#[derive(Clone)]
struct Target {
    point: Vec<f64>,
    value: f64,
    weight: f64,
}

/// Clipped midpoint targets `(max{μ,c} + min{ν,d}) / 2`, weighted by the
/// inverse squared clipped width.
fn targets(fc: &CompiledMatPoly, gc: &CompiledMatPoly, points: &[Vec<f64>]) -> Result<Vec<Target>, WitnessError> {
    let mut sections = Vec::with_capacity(points.len());
    for a in points {
        let s = finsler_interval(&fc.eval(a), &gc.eval(a), DEFAULT_TOL)?.interval;
        if s.is_empty() {
            return Err(WitnessError::HypothesisFails { point: a.clone() });
        }
        sections.push(s);
    }
    let reps: Vec<f64> = sections.iter().filter_map(|s| s.interior_point()).collect();
    let c = reps.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let d = reps.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    Ok(points
        .iter()
        .zip(&sections)
        .map(|(a, s)| {
            let lo = s.lo.max(ExtendedReal::Finite(c)).to_f64();
            let hi = s.hi.min(ExtendedReal::Finite(d)).to_f64();
            let w = (hi - lo).max(1e-12);
            Target {
                point: a.clone(),
                value: 0.5 * (lo + hi),
                weight: 1.0 / (w * w),
            }
        })
        .collect())
}

/// Weighted least squares in the scaled coordinates `a / scale`.
fn solve(targets: &[Target], basis: &[Vec<u32>], scale: f64) -> Option<Vec<f64>> {
    let rows = targets.len();
    let cols = basis.len();
    let mut m = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, t) in targets.iter().enumerate() {
        let sw = t.weight.sqrt();
        let scaled: Vec<f64> = t.point.iter().map(|v| v / scale).collect();
        for (j, mono) in basis.iter().enumerate() {
            m[(i, j)] = sw * eval_monomial(mono, &scaled);
        }
        rhs[i] = sw * t.value;
    }
    let svd = m.svd(true, true);
    let coef = svd.solve(&rhs, 1e-13).ok()?;
    coef.iter().all(|v| v.is_finite()).then(|| coef.iter().copied().collect())
}

fn to_poly(d: usize, basis: &[Vec<u32>], coef: &[f64], scale: f64) -> Result<Poly, WitnessError> {
    let terms: Vec<(Vec<u32>, f64)> = basis
        .iter()
        .zip(coef)
        .map(|(m, &c)| (m.clone(), c / scale.powi(m.iter().sum::<u32>() as i32)))
        .filter(|(_, c)| *c != 0.0 && c.is_finite())
        .collect();
    let mut p = Poly::zero(d);
    for (m, c) in terms {
        p = &p + &Poly::monomial(rat_from_f64(c)?, m);
    }
    Ok(p)
}

fn failures(fc: &CompiledMatPoly, gc: &CompiledMatPoly, p: &Poly, fine: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, WitnessError> {
    let pc = p.compile();
    let mut bad = Vec::new();
    for a in fine {
        let m = fc.eval(a).add_scaled(-pc.eval(a), &gc.eval(a));
        if !is_positive_definite(&m, VERIFY_TOL)? {
            bad.push(a.clone());
        }
    }
    Ok(bad)
}

/// Polynomial `p` with `F - pG ≻ 0` on the closed ball of radius `r`,
/// verified on a grid four times finer than the fitting grid.
pub fn fit_compact_witness(
    f: &MatPoly,
    g: &MatPoly,
    r: f64,
    max_deg: usize,
    grid_density: usize,
) -> Result<Poly, WitnessError> {
    check_pair(f, g)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(WitnessError::Precondition(format!("radius must be finite and non-negative, got {r}")));
    }
    let d = f.nvars();
    let fc = f.compile()?;
    let gc = g.compile()?;
    let density = grid_density.max(3) | 1;
    let coarse = box_grid(d, r, density, true);
    let fine = box_grid(d, r, 4 * (density - 1) + 1, true);
    let base = targets(&fc, &gc, &coarse)?;
    let scale = r.max(1.0);
    for deg in 0..=max_deg {
        let basis = monomials(d, deg);
        let mut fit_set = base.clone();
        for round in 0..REWEIGHT_ROUNDS {
            let Some(coef) = solve(&fit_set, &basis, scale) else { break };
            let p = to_poly(d, &basis, &coef, scale)?;
            let bad = failures(&fc, &gc, &p, &fine)?;
            if bad.is_empty() {
                return Ok(p);
            }
            if basis.len() == 1 && round > 0 {
                break;
            }
            let boost = 10f64.powi(round as i32 + 1);
            let mut extra = targets(&fc, &gc, &bad)?;
            for t in &mut extra {
                t.weight *= boost;
            }
            fit_set.extend(extra);
        }
    }
    Err(WitnessError::DegreeInsufficient { max_deg })
}
