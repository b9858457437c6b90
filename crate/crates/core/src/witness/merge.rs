//! Joining a far-field witness with a compact correction, in one variable.
//!
//! `r₁ = r₀ + N(x) / (1 + x²)^(l+k+1)` with `deg N < 2l`: the correction is
//! bounded by `O(|x|^(-2k-3))`, so it fades faster than the tube around `r₀`
//! narrows, which decays like `(1 + x²)^-k`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::pointwise::{eigen_range, finsler_interval, ExtendedReal, SectionInterval, DEFAULT_TOL};
use crate::polycore::{rat_from_f64, MatPoly, Poly};

use super::{
    bound_semialgebraic, check_pair, CompiledWitness, RegionDescriptor, ValidationReport, WitnessError,
    WitnessRational, DEFAULT_T_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeCaps {
    /// Largest `l`; the numerator has degree `< 2l`.
    pub l_cap: u32,
    pub fit_points: usize,
    pub validation_points: usize,
    pub t_cap: u32,
}

impl Default for MergeCaps {
    fn default() -> Self {
        MergeCaps {
            l_cap: 10,
            fit_points: 801,
            validation_points: 10_000,
            t_cap: DEFAULT_T_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergedWitness {
    pub witness: WitnessRational,
    /// Decay exponent of the far tube.
    pub k: u32,
    /// `0` when `r₀` needed no correction.
    pub l: u32,
    /// Regularization added to `q₀²`, or `0` when `q₀` had no real zeros.
    pub delta: f64,
    pub report: ValidationReport,
}

const REWEIGHT_ROUNDS: usize = 6;

fn section(
    fc: &crate::polycore::CompiledMatPoly,
    gc: &crate::polycore::CompiledMatPoly,
    x: f64,
    positive: bool,
) -> Result<Option<SectionInterval>, WitnessError> {
    let ga = gc.eval(&[x]);
    if eigen_range(&ga)?.1 < -DEFAULT_TOL {
        return Ok(None);
    }
    let mut s = finsler_interval(&fc.eval(&[x]), &ga, DEFAULT_TOL)?.interval;
    if positive {
        s = s.positive_part();
    }
    if s.is_empty() {
        return Err(WitnessError::HypothesisFails { point: vec![x] });
    }
    Ok(Some(s))
}

fn log_tail(radius: f64, count: usize, span: f64) -> Vec<Vec<f64>> {
    let per_side = (count / 2).max(2);
    let mut out = Vec::with_capacity(2 * per_side);
    for s in [1.0, -1.0] {
        for i in 0..per_side {
            out.push(vec![s * radius * span.powf(i as f64 / (per_side - 1) as f64)]);
        }
    }
    out
}

fn linear(half: f64, count: usize) -> Vec<Vec<f64>> {
    let n = count.max(2);
    (0..n).map(|i| vec![-half + 2.0 * half * i as f64 / (n - 1) as f64]).collect()
}

fn one_plus_x2() -> Poly {
    &Poly::one(1) + &Poly::var(1, 0).square()
}

/// `p q / (q² + δ)` removes the real poles of `p / q`; `δ` is halved until
/// the far validation passes again.
fn desingularize(
    r0: &WitnessRational,
    f: &MatPoly,
    g: &MatPoly,
    far: &[Vec<f64>],
) -> Result<(WitnessRational, f64), WitnessError> {
    let q = crate::polycore::UniPoly::from_poly(&r0.q)?;
    if q.degree().unwrap_or(0) == 0 || q.count_real_roots() == 0 {
        return Ok((r0.clone(), 0.0));
    }
    let radius = r0.region.radius().unwrap_or(1.0).max(1.0);
    let mut delta = r0.q.eval(&[radius])?.powi(2).max(1e-300);
    for _ in 0..200 {
        let cand = WitnessRational {
            p: &r0.p * &r0.q,
            q: &r0.q.square() + &Poly::constant(1, rat_from_f64(delta)?),
            region: r0.region,
            positivity_required: r0.positivity_required,
        };
        if cand.validate(f, g, far, DEFAULT_TOL)?.passed {
            return Ok((cand, delta));
        }
        delta *= 0.5;
    }
    Err(WitnessError::FitFails("no regularization keeps r0 valid far away".into()))
}

#[derive(Clone, Copy)]
struct Target {
    x: f64,
    value: f64,
    weight: f64,
}

fn targets(
    fc: &crate::polycore::CompiledMatPoly,
    gc: &crate::polycore::CompiledMatPoly,
    r0: &CompiledWitness,
    xs: &[f64],
    positive: bool,
) -> Result<Vec<Target>, WitnessError> {
    let mut secs = Vec::new();
    for &x in xs {
        if let Some(s) = section(fc, gc, x, positive)? {
            secs.push((x, s));
        }
    }
    let reps: Vec<f64> = secs.iter().filter_map(|(_, s)| s.interior_point()).collect();
    let c = reps.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let d = reps.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    Ok(secs
        .into_iter()
        .map(|(x, s)| {
            let lo = s.lo.max(ExtendedReal::Finite(c)).to_f64();
            let hi = s.hi.min(ExtendedReal::Finite(d)).to_f64();
            let w = (hi - lo).max(1e-12);
            Target {
                x,
                value: 0.5 * (lo + hi) - r0.eval(&[x]),
                weight: 1.0 / (w * w),
            }
        })
        .collect())
}

/// Least-squares numerator coefficients for the basis `x^j / (1 + x²)^L`.
fn solve(targets: &[Target], degree: usize, big_l: u32, scale: f64) -> Option<Vec<f64>> {
    let mut m = DMatrix::<f64>::zeros(targets.len(), degree);
    let mut rhs = DVector::<f64>::zeros(targets.len());
    for (i, t) in targets.iter().enumerate() {
        let sw = t.weight.sqrt();
        let den = (1.0 + t.x * t.x).powi(big_l as i32);
        let u = t.x / scale;
        for j in 0..degree {
            m[(i, j)] = sw * u.powi(j as i32) * scale.powi(2 * big_l as i32) / den;
        }
        rhs[i] = sw * t.value;
    }
    let coef = m.svd(true, true).solve(&rhs, 1e-13).ok()?;
    coef.iter().all(|v| v.is_finite()).then(|| coef.iter().copied().collect())
}

/// Single rational witness on all of `K_G`, built from `r0` valid on the far
/// region of its descriptor.
pub fn merge_far_field(
    f: &MatPoly,
    g: &MatPoly,
    r0: &WitnessRational,
    caps: &MergeCaps,
) -> Result<MergedWitness, WitnessError> {
    check_pair(f, g)?;
    if f.nvars() != 1 || r0.nvars() != 1 {
        return Err(WitnessError::Shape("merging is implemented for one variable".into()));
    }
    let radius = r0.region.radius().unwrap_or(0.0).max(1.0);
    let far = log_tail(radius, 4000, 1000.0);
    let far_check = WitnessRational {
        region: RegionDescriptor::KGOutside { r: radius },
        ..r0.clone()
    }
    .validate(f, g, &far, DEFAULT_TOL)?;
    if !far_check.passed {
        return Err(WitnessError::Precondition(format!(
            "r0 is not valid on K_G outside (-{radius}, {radius}); first failure at {:?}",
            far_check.first_failure.unwrap_or_default()
        )));
    }
    let positive = r0.positivity_required;
    let (base, delta) = desingularize(r0, f, g, &far)?;

    let whole = RegionDescriptor::KGWhole;
    let span = 4.0 * (radius + 1.0);
    let mut check = linear(span, caps.validation_points / 2);
    check.extend(log_tail(span, caps.validation_points / 2, 1000.0));
    let as_whole = WitnessRational {
        region: whole,
        ..base.clone()
    };
    let report = as_whole.validate(f, g, &check, DEFAULT_TOL)?;
    if report.passed {
        return Ok(MergedWitness {
            witness: as_whole,
            k: 0,
            l: 0,
            delta,
            report,
        });
    }

    let fc = f.compile()?;
    let gc = g.compile()?;
    let rc = base.compile();
    let mut gaps = Vec::new();
    for p in &far {
        let x = p[0];
        if let Some(s) = section(&fc, &gc, x, positive)? {
            let v = rc.eval(&[x]);
            let width = (s.hi.to_f64() - v).min(v - s.lo.to_f64());
            if width.is_finite() && width > 0.0 {
                gaps.push((vec![x], 1.0 / width));
            }
        }
    }
    let k = if gaps.is_empty() {
        0
    } else {
        bound_semialgebraic(&gaps, caps.t_cap)?.t
    };

    let fit_xs: Vec<f64> = linear(span, caps.fit_points)
        .into_iter()
        .chain(log_tail(span, caps.fit_points / 4, 64.0))
        .map(|p| p[0])
        .collect();
    let base_targets = targets(&fc, &gc, &rc, &fit_xs, positive)?;
    let fine: Vec<f64> = check.iter().map(|p| p[0]).collect();
    for l in 1..=caps.l_cap {
        let big_l = l + k + 1;
        let degree = 2 * l as usize;
        let mut fit = base_targets.clone();
        for round in 0..REWEIGHT_ROUNDS {
            let Some(coef) = solve(&fit, degree, big_l, span) else { break };
            let witness = assemble(&base, &coef, big_l, span, positive)?;
            let report = witness.validate(f, g, &check, DEFAULT_TOL)?;
            if report.passed {
                return Ok(MergedWitness {
                    witness,
                    k,
                    l,
                    delta,
                    report,
                });
            }
            let wc = witness.compile();
            let bad: Vec<f64> = fine
                .iter()
                .copied()
                .filter(|&x| {
                    section(&fc, &gc, x, positive)
                        .ok()
                        .flatten()
                        .is_some_and(|s| !s.contains(wc.eval(&[x])))
                })
                .collect();
            let mut extra = targets(&fc, &gc, &rc, &bad, positive)?;
            let boost = 10f64.powi(round as i32 + 1);
            for t in &mut extra {
                t.weight *= boost;
            }
            fit.extend(extra);
        }
    }
    Err(WitnessError::FitFails(format!(
        "no correction with l <= {} keeps r1 inside the sections",
        caps.l_cap
    )))
}

fn assemble(
    base: &WitnessRational,
    coef: &[f64],
    big_l: u32,
    scale: f64,
    positive: bool,
) -> Result<WitnessRational, WitnessError> {
    let mut num = Poly::zero(1);
    for (j, &c) in coef.iter().enumerate() {
        // Undo the scaling x -> x / scale and the factor scale^(2L).
        let v = c * scale.powi(2 * big_l as i32 - j as i32);
        if v != 0.0 && v.is_finite() {
            num = &num + &Poly::monomial(rat_from_f64(v)?, vec![j as u32]);
        }
    }
    let w = one_plus_x2().pow(big_l);
    Ok(WitnessRational {
        p: &(&base.p * &w) + &(&base.q * &num),
        q: &base.q * &w,
        region: RegionDescriptor::KGWhole,
        positivity_required: positive,
    })
}
