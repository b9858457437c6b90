use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::hypothesis::{unit_vector, zero_crossing};
use super::interval::finsler_interval;
use super::matrix::{min_eigenvalue, SymMatrix};
use super::PointwiseError;
use crate::polycore::{rat_from_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceBudget {
    /// Angles for `n = 2`, random unit vectors otherwise.
    pub sweep_samples: usize,
    /// Random restarts of the separating-matrix descent.
    pub b_restarts: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for TraceBudget {
    fn default() -> Self {
        TraceBudget {
            sweep_samples: 100_000,
            b_restarts: 24,
            seed: 0,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceStatus {
    Decided,
    /// Neither a cone combination nor a separating matrix was found.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCheckResult {
    /// `vᵀGᵢv ≥ 0 ∀i, v ≠ 0 ⇒ vᵀFv > 0`, decided by the sweep.
    pub hypothesis_holds: bool,
    /// Smallest `vᵀFv` over swept feasible unit vectors.
    pub min_feasible_value: Option<f64>,
    /// `B ⪰ 0, B ≠ 0, tr(GᵢB) ≥ 0 ∀i ⇒ tr(FB) > 0`; `None` when inconclusive.
    pub strong_hypothesis_holds: Option<bool>,
    /// `rᵢ ≥ 0` with `λmin(F − Σ rᵢGᵢ) > 0`.
    pub cone_coeffs: Option<Vec<f64>>,
    pub cone_margin: f64,
    /// Unit Frobenius norm.
    pub separating_b: Option<SymMatrix>,
    /// The separating matrix passed the sign conditions in exact arithmetic.
    pub separating_b_exact: bool,
    pub status: TraceStatus,
}

/// Compares the vector condition with its relaxation to positive
/// semidefinite matrices and with the existence of a nonnegative cone
/// combination.
pub fn multi_constraint_trace_check(
    fa: &SymMatrix,
    gas: &[SymMatrix],
    budget: &TraceBudget,
) -> Result<TraceCheckResult, PointwiseError> {
    let n = fa.n();
    if let Some(g) = gas.iter().find(|g| g.n() != n) {
        return Err(PointwiseError::DimensionMismatch {
            expected: n,
            found: g.n(),
        });
    }
    if !fa.is_finite() || gas.iter().any(|g| !g.is_finite()) {
        return Err(PointwiseError::NonFinite(f64::NAN));
    }
    let tol = budget.tol;

    let min_feasible = sweep_min_feasible(fa, gas, budget);
    let hypothesis_holds = min_feasible.is_none_or(|v| v > tol);

    let (coeffs, margin) = search_cone(fa, gas, tol)?;
    let cone_found = margin > tol * fa.norm_inf().max(1.0);

    let mut separating = None;
    let mut exact = false;
    if !cone_found {
        if let Some((b, ex)) = search_separating(fa, gas, budget)? {
            separating = Some(b);
            exact = ex;
        }
    }
    let strong = match (cone_found, separating.is_some()) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    };
    Ok(TraceCheckResult {
        hypothesis_holds,
        min_feasible_value: min_feasible,
        strong_hypothesis_holds: strong,
        cone_coeffs: cone_found.then_some(coeffs),
        cone_margin: margin,
        separating_b: separating,
        separating_b_exact: exact,
        status: if strong.is_some() {
            TraceStatus::Decided
        } else {
            TraceStatus::Inconclusive
        },
    })
}

fn feasible(gas: &[SymMatrix], v: &[f64]) -> bool {
    gas.iter()
        .all(|g| g.quad_form(v) >= -1e-12 * g.norm_fro().max(1e-300))
}

/// Angles where `vᵀGv` changes sign on the half circle, `v = (cos θ, sin θ)`.
fn boundary_angles(g: &SymMatrix) -> Vec<f64> {
    let a = 0.5 * (g.get(0, 0) - g.get(1, 1));
    let b = g.get(0, 1);
    let c = 0.5 * (g.get(0, 0) + g.get(1, 1));
    let r = a.hypot(b);
    if r == 0.0 || r < c.abs() {
        return Vec::new();
    }
    let phase = b.atan2(a);
    let spread = (-c / r).clamp(-1.0, 1.0).acos();
    [phase + spread, phase - spread]
        .iter()
        .map(|t| (0.5 * t).rem_euclid(std::f64::consts::PI))
        .collect()
}

fn sweep_min_feasible(fa: &SymMatrix, gas: &[SymMatrix], budget: &TraceBudget) -> Option<f64> {
    let n = fa.n();
    let mut best: Option<f64> = None;
    let mut visit = |v: &[f64]| {
        if feasible(gas, v) {
            let val = fa.quad_form(v);
            best = Some(best.map_or(val, |b: f64| b.min(val)));
        }
    };
    if n == 2 {
        let count = budget.sweep_samples.max(1);
        for k in 0..count {
            let t = std::f64::consts::PI * k as f64 / count as f64;
            visit(&[t.cos(), t.sin()]);
        }
        for g in gas {
            for t in boundary_angles(g) {
                visit(&[t.cos(), t.sin()]);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let mut pending: Vec<Option<Vec<f64>>> = vec![None; gas.len()];
        for _ in 0..budget.sweep_samples {
            let v = unit_vector(&mut rng, n);
            visit(&v);
            for (g, slot) in gas.iter().zip(pending.iter_mut()) {
                let q = g.quad_form(&v);
                match slot.take() {
                    Some(u) if g.quad_form(&u).signum() != q.signum() && q != 0.0 => {
                        let w = if q > 0.0 {
                            zero_crossing(g, &v, &u)
                        } else {
                            zero_crossing(g, &u, &v)
                        };
                        visit(&w);
                    }
                    Some(u) => *slot = Some(u),
                    None => *slot = Some(v.clone()),
                }
            }
        }
    }
    best
}

fn cone_value(fa: &SymMatrix, gas: &[SymMatrix], r: &[f64]) -> Result<f64, PointwiseError> {
    let mut m = fa.clone();
    for (g, &ri) in gas.iter().zip(r) {
        if ri != 0.0 {
            m = m.add_scaled(-ri, g);
        }
    }
    min_eigenvalue(&m)
}

/// Maximizes the concave `λmin(F − Σ rᵢGᵢ)` over `r ≥ 0`: grid start, then
/// compass search.
fn search_cone(fa: &SymMatrix, gas: &[SymMatrix], tol: f64) -> Result<(Vec<f64>, f64), PointwiseError> {
    let m = gas.len();
    if m == 1 {
        let interval = finsler_interval(fa, &gas[0], tol)?.interval;
        let r = if interval.contains(0.0) {
            Some(0.0)
        } else {
            interval.positive_part().interior_point()
        };
        if let Some(r) = r {
            return Ok((vec![r], cone_value(fa, gas, &[r])?));
        }
    }
    const LEVELS: [f64; 9] = [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let mut best = vec![0.0; m];
    let mut best_val = cone_value(fa, gas, &best)?;
    if m <= 3 {
        let total = LEVELS.len().pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let r: Vec<f64> = (0..m)
                .map(|_| {
                    let v = LEVELS[c % LEVELS.len()];
                    c /= LEVELS.len();
                    v
                })
                .collect();
            let val = cone_value(fa, gas, &r)?;
            if val > best_val {
                best_val = val;
                best = r;
            }
        }
    } else {
        for i in 0..m {
            for &l in &LEVELS[1..] {
                let mut r = best.clone();
                r[i] = l;
                let val = cone_value(fa, gas, &r)?;
                if val > best_val {
                    best_val = val;
                    best = r;
                }
            }
        }
    }
    let mut step = best.iter().copied().fold(1.0, f64::max) * 0.5;
    let mut iters = 0;
    while step > 1e-12 && iters < 4000 {
        iters += 1;
        let mut improved = false;
        for i in 0..m {
            for dir in [1.0, -1.0] {
                let mut r = best.clone();
                r[i] = (r[i] + dir * step).max(0.0);
                if r[i] == best[i] {
                    continue;
                }
                let val = cone_value(fa, gas, &r)?;
                if val > best_val {
                    best_val = val;
                    best = r;
                    improved = true;
                }
            }
        }
        if improved {
            step *= 2.0;
        } else {
            step *= 0.5;
        }
    }
    Ok((best, best_val))
}

fn normalized(a: &SymMatrix) -> SymMatrix {
    let s = a.norm_fro();
    if s == 0.0 {
        a.clone()
    } else {
        a.scale(1.0 / s)
    }
}

struct Penalty<'a> {
    f: &'a SymMatrix,
    gs: &'a [SymMatrix],
    mu: f64,
}

impl Penalty<'_> {
    fn traces(&self, v: &[f64], n: usize) -> (SymMatrix, f64, Vec<f64>) {
        let b = gram(v, n);
        let tf = self.f.trace_product(&b);
        let tg = self.gs.iter().map(|g| g.trace_product(&b)).collect();
        (b, tf, tg)
    }

    fn value(&self, v: &[f64], n: usize) -> f64 {
        let (_, tf, tg) = self.traces(v, n);
        tf + self.mu * tg.iter().map(|t: &f64| t.min(0.0).powi(2)).sum::<f64>()
    }

    fn gradient(&self, v: &[f64], n: usize) -> Vec<f64> {
        let (_, tf, tg) = self.traces(v, n);
        let s: f64 = v.iter().map(|x| x * x).sum();
        let mut grad = vec![0.0; n * n];
        let mut add = |x: &SymMatrix, t: f64, w: f64| {
            for i in 0..n {
                for k in 0..n {
                    let xv: f64 = (0..n).map(|j| x.get(i, j) * v[j * n + k]).sum();
                    grad[i * n + k] += w * 2.0 / s * (xv - t * v[i * n + k]);
                }
            }
        };
        add(self.f, tf, 1.0);
        for (g, &t) in self.gs.iter().zip(&tg) {
            if t < 0.0 {
                add(g, t, 2.0 * self.mu * t);
            }
        }
        grad
    }
}

/// `V Vᵀ / ‖V‖²` for a row-major `n x n` factor.
fn gram(v: &[f64], n: usize) -> SymMatrix {
    let s: f64 = v.iter().map(|x| x * x).sum();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let dot: f64 = (0..n).map(|k| v[i * n + k] * v[j * n + k]).sum();
            data[i * n + j] = dot / s;
        }
    }
    SymMatrix::from_row_major(n, data)
}

/// Looks for `B ⪰ 0`, `tr B = 1`, `tr(GᵢB) ≥ 0`, `tr(FB) ≤ 0`.
fn search_separating(
    fa: &SymMatrix,
    gas: &[SymMatrix],
    budget: &TraceBudget,
) -> Result<Option<(SymMatrix, bool)>, PointwiseError> {
    let n = fa.n();
    let f = normalized(fa);
    let gs: Vec<SymMatrix> = gas.iter().map(normalized).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0x5eed_b0b0);
    let mut fallback = None;
    for _ in 0..budget.b_restarts.max(1) {
        let mut v = unit_vector(&mut rng, n * n);
        for mu in [1.0, 10.0, 1e2, 1e3, 1e4, 1e6] {
            let p = Penalty { f: &f, gs: &gs, mu };
            let mut step = 0.1;
            for _ in 0..300 {
                let g = p.gradient(&v, n);
                let gnorm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if gnorm < 1e-13 {
                    break;
                }
                let cur = p.value(&v, n);
                let mut accepted = false;
                while step > 1e-16 {
                    let cand: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - step * b).collect();
                    if p.value(&cand, n) < cur - 1e-4 * step * gnorm * gnorm {
                        let s = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
                        v = cand.into_iter().map(|x| x / s).collect();
                        step *= 1.5;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
        }
        let b = gram(&v, n);
        for candidate in polish_candidates(&b, &f, &gs) {
            if let Some(exact) = snap_rational(&candidate, fa, gas) {
                return Ok(Some((exact, true)));
            }
            if fallback.is_none() && separates(&candidate, fa, gas, budget.tol)? {
                fallback = Some(normalized(&candidate));
            }
        }
    }
    Ok(fallback.map(|b| (b, false)))
}

fn separates(b: &SymMatrix, fa: &SymMatrix, gas: &[SymMatrix], tol: f64) -> Result<bool, PointwiseError> {
    let b = normalized(b);
    if b.norm_fro() == 0.0 || min_eigenvalue(&b)? < -tol {
        return Ok(false);
    }
    Ok(fa.trace_product(&b) <= tol && gas.iter().all(|g| g.trace_product(&b) >= -tol))
}

/// Projections of `b` onto `{tr B = 1, tr(XB) = 0 for X active}` for a
/// ladder of activity thresholds.
fn polish_candidates(b: &SymMatrix, f: &SymMatrix, gs: &[SymMatrix]) -> Vec<SymMatrix> {
    let n = b.n();
    let mut out = vec![b.clone()];
    let tf = f.trace_product(b);
    let tg: Vec<f64> = gs.iter().map(|g| g.trace_product(b)).collect();
    for th in [1e-9, 1e-6, 1e-4, 1e-2, 1e-1] {
        for with_f in [true, false] {
            let mut rows: Vec<(&SymMatrix, f64)> = Vec::new();
            let ident = SymMatrix::identity(n);
            rows.push((&ident, 1.0));
            for (g, &t) in gs.iter().zip(&tg) {
                if t <= th {
                    rows.push((g, 0.0));
                }
            }
            if with_f {
                if tf < -th {
                    continue;
                }
                rows.push((f, 0.0));
            }
            if let Some(p) = affine_project(b, &rows) {
                out.push(p);
            }
        }
    }
    out
}

fn affine_project(b: &SymMatrix, rows: &[(&SymMatrix, f64)]) -> Option<SymMatrix> {
    let k = rows.len();
    let gram = DMatrix::from_fn(k, k, |i, j| rows[i].0.trace_product(rows[j].0));
    let resid = DVector::from_fn(k, |i, _| rows[i].0.trace_product(b) - rows[i].1);
    let lambda = gram.svd(true, true).solve(&resid, 1e-12).ok()?;
    let mut p = b.clone();
    for (i, (x, _)) in rows.iter().enumerate() {
        p = p.add_scaled(-lambda[i], x);
    }
    Some(p)
}

fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::from_integer(1.into());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= &m[k][k];
        for i in k + 1..n {
            let l = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &l * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

fn exact_psd(b: &[Vec<Rational>]) -> bool {
    let n = b.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let minor = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| b[i][j].clone()).collect())
            .collect();
        !rational_det(minor).is_negative()
    })
}

fn exact_trace(a: &SymMatrix, b: &[Vec<Rational>]) -> Option<Rational> {
    let n = a.n();
    let mut acc = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            acc += rat_from_f64(a.get(i, j)).ok()? * &b[i][j];
        }
    }
    Some(acc)
}

/// Rounds `b` to a small-denominator rational matrix and re-checks every sign
/// condition exactly. Returns the rounded matrix scaled to unit norm.
fn snap_rational(b: &SymMatrix, fa: &SymMatrix, gas: &[SymMatrix]) -> Option<SymMatrix> {
    let n = b.n();
    let peak = b.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return None;
    }
    for den in 1..=64i64 {
        let ints: Vec<i64> = b
            .as_slice()
            .iter()
            .map(|v| (v / peak * den as f64).round() as i64)
            .collect();
        if ints.iter().all(|&k| k == 0) {
            continue;
        }
        let exact: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| Rational::from_integer(ints[i * n + j].into())).collect())
            .collect();
        if !exact_psd(&exact) {
            continue;
        }
        let tf = exact_trace(fa, &exact)?;
        if tf.is_positive() {
            continue;
        }
        if gas
            .iter()
            .map(|g| exact_trace(g, &exact))
            .any(|t| t.is_none_or(|t| t.is_negative()))
        {
            continue;
        }
        let k = SymMatrix::from_row_major(n, ints.iter().map(|&v| v as f64).collect());
        return Some(k.scale(1.0 / k.norm_fro()));
    }
    None
}
