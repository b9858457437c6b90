//! Rational witnesses for 2×2 univariate pencils, valid on `K_G` outside a
//! symmetric interval `(-R, R)`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::pointwise::{eigen_range, finsler_interval, DEFAULT_TOL};
use crate::polycore::{rat, rat_from_f64, rat_to_f64, MatPoly, Poly, Rational, UniPoly};

use super::{
    bound_semialgebraic, check_pair, LaurentSeries, RegionDescriptor, ValidationReport, WitnessError,
    WitnessRational, DEFAULT_T_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoByTwoCaps {
    /// Half-width of the `(B1')` hypothesis scan.
    pub scan_half_width: f64,
    pub scan_points: usize,
    /// Series terms are doubled from 4 up to this cap.
    pub max_terms: usize,
    pub validation_points: usize,
    pub t_cap: u32,
}

impl Default for TwoByTwoCaps {
    fn default() -> Self {
        TwoByTwoCaps {
            scan_half_width: 100.0,
            scan_points: 4001,
            max_terms: 32,
            validation_points: 10_000,
            t_cap: DEFAULT_T_CAP,
        }
    }
}

/// Congruence applied to make `G` diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Transform {
    Identity,
    /// `[[1, 1], [1, -1]]`, for `g₁₁ ≡ g₂₂ ≡ 0`.
    Hadamard,
    /// `[[g₁₁, 0], [-g₁₂, g₁₁]]`.
    Lower,
    /// Coordinate swap followed by [`Transform::Lower`].
    SwapLower,
}

/// Behavior of one tail `x → ±∞` after diagonalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailCase {
    OutsideKg,
    /// `det F ≤ 0`: `r` must lie strictly between `r₊` and `r₋`.
    FiveA,
    /// `det F > 0`: `0 ≤ r < r₋`.
    FiveB,
    /// `g₂₂ ≡ 0` and `g₁₁ > 0` on the tail.
    G11Positive,
    /// `g₂₂ ≡ 0` and `g₁₁ < 0` on the tail.
    G11Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Construction {
    Zero,
    /// `(r₊ + r₋) / 2`.
    Midpoint,
    /// `1 + φ²`.
    OnePlusPhiSquared,
    /// `φ ∓ ε x (1 + x²)^-k`.
    PhiShift { epsilon: f64, k: u32 },
    /// Truncated expansion of `r₋ - (1 + x²)^-k / (2C)` at the named tail.
    Series { terms: usize, tail_positive: bool, c: f64, k: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoByTwoWitness {
    pub witness: WitnessRational,
    pub transform: Transform,
    pub construction: Construction,
    pub tail_pos: TailCase,
    pub tail_neg: TailCase,
    pub radius: f64,
    pub report: ValidationReport,
}

/// Entries of a diagonalized pencil.
struct Diagonal {
    f11: UniPoly,
    f12: UniPoly,
    f22: UniPoly,
    a: UniPoly,
    b: UniPoly,
}

impl Diagonal {
    fn det_f(&self) -> UniPoly {
        self.f11.mul(&self.f22).sub(&self.f12.mul(&self.f12))
    }

    fn s(&self) -> UniPoly {
        self.f11.mul(&self.b).add(&self.f22.mul(&self.a))
    }

    fn p(&self) -> UniPoly {
        self.a.mul(&self.b)
    }

    fn d(&self) -> UniPoly {
        let s = self.s();
        s.mul(&s).sub(&self.p().mul(&self.det_f()).scale(&rat(4, 1)))
    }
}

fn uni(m: &MatPoly, i: usize, j: usize) -> Result<UniPoly, WitnessError> {
    Ok(UniPoly::from_poly(m.get(i, j))?)
}

fn congruence(b: &MatPoly, m: &MatPoly) -> Result<MatPoly, WitnessError> {
    Ok(b.checked_mul(m)?.checked_mul(&b.transpose())?)
}

/// `(BFBᵀ, BGBᵀ)` with `B = [[g₁₁, 0], [-g₁₂, g₁₁]]`; then
/// `BGBᵀ = diag(g₁₁³, g₁₁ det G)`.
pub fn b_transform(f: &MatPoly, g: &MatPoly) -> Result<(MatPoly, MatPoly), WitnessError> {
    require_2x2_univariate(f, g)?;
    let (g11, g12) = (g.get(0, 0).clone(), g.get(0, 1).clone());
    let b = MatPoly::from_rows(1, vec![vec![g11.clone(), Poly::zero(1)], vec![-&g12, g11]])?;
    Ok((congruence(&b, f)?, congruence(&b, g)?))
}

/// `(f₁₁g₂₂ + f₂₂g₁₁)² - 4 g₁₁g₂₂ det F`; `G` must be diagonal.
pub fn discriminant(f: &MatPoly, g: &MatPoly) -> Result<Poly, WitnessError> {
    Ok(diagonal(f, g)?.d().to_poly())
}

/// `(f₁₁g₂₂ - f₂₂g₁₁)² + 4 g₁₁g₂₂ f₁₂²`; `G` must be diagonal.
pub fn discriminant_sos(f: &MatPoly, g: &MatPoly) -> Result<Poly, WitnessError> {
    let dg = diagonal(f, g)?;
    let delta = dg.f11.mul(&dg.b).sub(&dg.f22.mul(&dg.a));
    let cross = dg.p().mul(&dg.f12).mul(&dg.f12).scale(&rat(4, 1));
    Ok(delta.mul(&delta).add(&cross).to_poly())
}

fn require_2x2_univariate(f: &MatPoly, g: &MatPoly) -> Result<(), WitnessError> {
    check_pair(f, g)?;
    if f.n() != 2 || f.nvars() != 1 {
        return Err(WitnessError::Shape(format!(
            "expected 2x2 matrices in one variable, found {}x{} in {} variables",
            f.n(),
            f.n(),
            f.nvars()
        )));
    }
    Ok(())
}

fn diagonal(f: &MatPoly, g: &MatPoly) -> Result<Diagonal, WitnessError> {
    require_2x2_univariate(f, g)?;
    if !g.get(0, 1).is_zero() {
        return Err(WitnessError::Precondition("G is not diagonal".into()));
    }
    Ok(Diagonal {
        f11: uni(f, 0, 0)?,
        f12: uni(f, 0, 1)?,
        f22: uni(f, 1, 1)?,
        a: uni(g, 0, 0)?,
        b: uni(g, 1, 1)?,
    })
}

fn diagonalize(f: &MatPoly, g: &MatPoly) -> Result<(Transform, MatPoly, MatPoly), WitnessError> {
    let g11 = g.get(0, 0);
    let g22 = g.get(1, 1);
    if !g.get(0, 1).is_zero() || (g11.is_zero() && g22.is_zero()) {
        if !g11.is_zero() {
            let (fb, gb) = b_transform(f, g)?;
            return Ok((Transform::Lower, fb, gb));
        }
        if !g22.is_zero() {
            let swap = MatPoly::from_i64_rows(1, &[&[0, 1], &[1, 0]])?;
            let (fs, gs) = (congruence(&swap, f)?, congruence(&swap, g)?);
            let (fb, gb) = b_transform(&fs, &gs)?;
            return Ok((Transform::SwapLower, fb, gb));
        }
        if !g.get(0, 1).is_zero() {
            let h = MatPoly::from_i64_rows(1, &[&[1, 1], &[1, -1]])?;
            return Ok((Transform::Hadamard, congruence(&h, f)?, congruence(&h, g)?));
        }
    }
    Ok((Transform::Identity, f.clone(), g.clone()))
}

fn max_root(polys: &[&UniPoly]) -> f64 {
    polys
        .iter()
        .filter(|u| u.degree().is_some_and(|d| d > 0))
        .flat_map(|u| u.real_roots())
        .map(f64::abs)
        .fold(0.0, f64::max)
}

fn sign(u: &UniPoly, positive: bool) -> Ordering {
    u.sign_at_infinity(positive)
}

/// Numerically stable `(r₊, r₋)` at a point with `g₁₁g₂₂ ≠ 0`.
fn roots_at(dg: &Diagonal, x: f64) -> (f64, f64) {
    let (f11, f12, f22) = (dg.f11.eval(x), dg.f12.eval(x), dg.f22.eval(x));
    let (a, b) = (dg.a.eval(x), dg.b.eval(x));
    let s = f11 * b + f22 * a;
    let p = a * b;
    let det = f11 * f22 - f12 * f12;
    let root = (s * s - 4.0 * p * det).max(0.0).sqrt();
    if s >= 0.0 {
        let plus = (s + root) / (2.0 * p);
        let minus = if s + root == 0.0 { 0.0 } else { 2.0 * det / (s + root) };
        (plus, minus)
    } else {
        let minus = (s - root) / (2.0 * p);
        let plus = 2.0 * det / (s - root);
        (plus, minus)
    }
}

fn poly_from_terms(terms: &[(i64, Rational)]) -> Result<(Poly, Poly), WitnessError> {
    let shift = terms.iter().map(|(e, _)| -e).max().unwrap_or(0).max(0);
    let mut p = Poly::zero(1);
    for (e, c) in terms {
        // Rounded to a double: the tube has slack far beyond 53 bits.
        let c = rat_from_f64(rat_to_f64(c))?;
        p = &p + &Poly::monomial(c, vec![(e + shift) as u32]);
    }
    Ok((p, Poly::monomial(rat(1, 1), vec![shift as u32])))
}

/// Truncated expansion of `ψ = r₋ - (1 + x²)^-k / (2C)` at one tail.
fn psi_terms(dg: &Diagonal, tail_positive: bool, c: f64, k: u32, terms: usize) -> Option<Vec<(i64, Rational)>> {
    let prec = terms + 2 * k as usize + 24;
    let s = dg.s();
    let d = dg.d();
    let m = d.degree()? / 2;
    if d.degree()? % 2 != 0 {
        return None;
    }
    let mut root = LaurentSeries::from_unipoly(&d, prec).sqrt()?;
    if !tail_positive && m % 2 == 1 {
        root = root.neg();
    }
    let s_ser = LaurentSeries::from_unipoly(&s, prec);
    let r_minus = if sign(&s, tail_positive) == Ordering::Greater {
        LaurentSeries::from_unipoly(&dg.det_f(), prec)
            .scale(&rat(2, 1))
            .div(&s_ser.add(&root))?
    } else {
        s_ser
            .sub(&root)
            .div(&LaurentSeries::from_unipoly(&dg.p(), prec).scale(&rat(2, 1)))?
    };
    let one_plus = LaurentSeries::from_unipoly(&UniPoly::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]), prec);
    let corr = one_plus.inv()?.pow(k).scale(&(Rational::from_integer(1.into()) / (rat_from_f64(2.0 * c).ok()?)));
    let psi = r_minus.sub(&corr);
    let max_exp = (psi.valuation() + terms as i64 - 1).max(2 * k as i64 + 1);
    if max_exp > psi.known_to() {
        return None;
    }
    Some(psi.truncate_to_x_terms(max_exp))
}

/// Log-spaced samples `±R · 1000^u`, split between the two tails.
fn tail_samples(radius: f64, count: usize) -> Vec<Vec<f64>> {
    let per_side = (count / 2).max(2);
    let mut out = Vec::with_capacity(2 * per_side);
    for s in [1.0, -1.0] {
        for i in 0..per_side {
            let u = i as f64 / (per_side - 1) as f64;
            out.push(vec![s * radius * 1000f64.powf(u)]);
        }
    }
    out
}

struct Candidate {
    witness: WitnessRational,
    construction: Construction,
}

/// Witness on `K_G \ (-R, R)` for a 2×2 pencil in one variable, with `r ≥ 0`
/// there.
pub fn construct_2x2_univariate_witness(
    f: &MatPoly,
    g: &MatPoly,
    caps: &TwoByTwoCaps,
) -> Result<TwoByTwoWitness, WitnessError> {
    require_2x2_univariate(f, g)?;
    let (transform, ft, gt) = diagonalize(f, g)?;
    let dg = diagonal(&ft, &gt)?;
    let orig: Vec<UniPoly> = [(0, 0), (0, 1), (1, 1)]
        .iter()
        .map(|&(i, j)| uni(g, i, j))
        .collect::<Result<_, _>>()?;
    let det_g = orig[0].mul(&orig[2]).sub(&orig[1].mul(&orig[1]));
    let (det_f, s, p, d) = (dg.det_f(), dg.s(), dg.p(), dg.d());
    let radius = 2.0
        * max_root(&[
            &orig[0], &orig[1], &orig[2], &det_g, &dg.a, &dg.b, &dg.f22, &det_f, &s, &p, &d,
        ])
        .max(1.0);

    check_hypothesis(f, g, caps, radius)?;

    let region = RegionDescriptor::KGOutside { r: radius };
    let zero = || Candidate {
        witness: WitnessRational {
            p: Poly::zero(1),
            q: Poly::one(1),
            region,
            positivity_required: false,
        },
        construction: Construction::Zero,
    };
    let rational = |p: Poly, q: Poly, construction: Construction| Candidate {
        witness: WitnessRational {
            p,
            q,
            region,
            positivity_required: false,
        },
        construction,
    };

    let (tail_pos, tail_neg, candidates): (TailCase, TailCase, Vec<Candidate>) = if dg.a.is_zero() && dg.b.is_zero() {
        (TailCase::G11Positive, TailCase::G11Positive, vec![zero()])
    } else if dg.b.is_zero() {
        let side = |pos: bool| {
            if sign(&dg.a, pos) == Ordering::Greater {
                TailCase::G11Positive
            } else {
                TailCase::G11Negative
            }
        };
        let (tp, tn) = (side(true), side(false));
        let q = dg.a.mul(&dg.f22);
        let phi_sign = |pos: bool| sign(&det_f, pos) as i32 * sign(&q, pos) as i32;
        let cands = match (tn, tp) {
            (TailCase::G11Positive, TailCase::G11Positive) => vec![zero()],
            (TailCase::G11Negative, TailCase::G11Negative) => {
                let qq = q.mul(&q);
                vec![rational(qq.add(&det_f.mul(&det_f)).to_poly(), qq.to_poly(), Construction::OnePlusPhiSquared)]
            }
            (neg_side, _) => {
                // The tail where g₁₁ < 0 carries the lower bound φ.
                let lower_positive = neg_side != TailCase::G11Negative;
                if phi_sign(lower_positive) < 0 {
                    vec![zero()]
                } else {
                    vec![phi_shift(&dg, &det_f, &q, lower_positive, radius, caps, &rational)?]
                }
            }
        };
        (tp, tn, cands)
    } else {
        let side = |pos: bool| {
            let in_kg = !(sign(&dg.a, pos) == Ordering::Less && sign(&dg.b, pos) == Ordering::Less);
            if !in_kg {
                TailCase::OutsideKg
            } else if sign(&det_f, pos) != Ordering::Greater {
                TailCase::FiveA
            } else {
                TailCase::FiveB
            }
        };
        let (tp, tn) = (side(true), side(false));
        let cases = [tp, tn];
        let has = |c: TailCase| cases.contains(&c);
        let cands = if has(TailCase::FiveA) && has(TailCase::FiveB) {
            series_candidates(&dg, tp == TailCase::FiveA, radius, caps, &rational)?
        } else if has(TailCase::FiveA) {
            vec![rational(s.to_poly(), p.scale(&rat(2, 1)).to_poly(), Construction::Midpoint)]
        } else {
            vec![zero()]
        };
        (tp, tn, cands)
    };

    let points = tail_samples(radius, caps.validation_points);
    let mut last_err = None;
    for cand in candidates {
        let report = cand.witness.validate(f, g, &points, DEFAULT_TOL)?;
        if report.passed && report.min_value >= 0.0 {
            return Ok(TwoByTwoWitness {
                witness: cand.witness,
                transform,
                construction: cand.construction,
                tail_pos,
                tail_neg,
                radius,
                report,
            });
        }
        let at = report.first_failure.clone().or(report.worst_point.clone()).unwrap_or_default();
        last_err = Some(WitnessError::ValidationFails {
            point: at,
            reason: format!(
                "{:?}: min λ(F - rG) = {:.3e}, min r = {:.3e}",
                cand.construction, report.min_lambda, report.min_value
            ),
        });
    }
    Err(last_err.unwrap_or_else(|| WitnessError::FitFails("no candidate witness".into())))
}

/// `(B1')`: every sampled point of `K_G` admits some `r ≥ 0`.
fn check_hypothesis(f: &MatPoly, g: &MatPoly, caps: &TwoByTwoCaps, radius: f64) -> Result<(), WitnessError> {
    let fc = f.compile()?;
    let gc = g.compile()?;
    let half = caps.scan_half_width.max(4.0 * radius);
    let n = caps.scan_points.max(2);
    for i in 0..n {
        let a = [-half + 2.0 * half * i as f64 / (n - 1) as f64];
        let ga = gc.eval(&a);
        if eigen_range(&ga)?.1 < -DEFAULT_TOL {
            continue;
        }
        let s = finsler_interval(&fc.eval(&a), &ga, DEFAULT_TOL)?.interval;
        if s.positive_part().is_empty() {
            return Err(WitnessError::HypothesisFails { point: a.to_vec() });
        }
    }
    Ok(())
}

/// `r = φ - ε x (1 + x²)^-k` (or `+` when the lower bound sits at `+∞`),
/// with `ε` and `k` from a growth bound on `±x / φ` over the other tail.
fn phi_shift(
    dg: &Diagonal,
    det_f: &UniPoly,
    q: &UniPoly,
    lower_positive: bool,
    radius: f64,
    caps: &TwoByTwoCaps,
    rational: &dyn Fn(Poly, Poly, Construction) -> Candidate,
) -> Result<Candidate, WitnessError> {
    let upper_sign = if lower_positive { -1.0 } else { 1.0 };
    let samples: Vec<(Vec<f64>, f64)> = (0..=48)
        .map(|j| {
            let x = upper_sign * radius * 2f64.powf(j as f64 / 4.0);
            let phi = det_f.eval(x) / (dg.a.eval(x) * dg.f22.eval(x));
            (vec![x], x.abs() / phi)
        })
        .collect();
    let bound = bound_semialgebraic(&samples, caps.t_cap)?;
    let epsilon = 0.5 / bound.c;
    let k = bound.t;
    let w = UniPoly::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]);
    let mut wk = UniPoly::constant(rat(1, 1));
    for _ in 0..k {
        wk = wk.mul(&w);
    }
    // Moving away from the upper tail: subtract when it is at +∞.
    let eps = rat_from_f64(epsilon)? * rat(upper_sign as i64, 1);
    let x = UniPoly::linear(rat(0, 1), rat(1, 1));
    let num = det_f.mul(&wk).sub(&x.mul(q).scale(&eps));
    let den = q.mul(&wk);
    Ok(rational(num.to_poly(), den.to_poly(), Construction::PhiShift { epsilon, k }))
}

fn series_candidates(
    dg: &Diagonal,
    five_a_positive: bool,
    radius: f64,
    caps: &TwoByTwoCaps,
    rational: &dyn Fn(Poly, Poly, Construction) -> Candidate,
) -> Result<Vec<Candidate>, WitnessError> {
    let mut samples = Vec::new();
    for j in 0..=48 {
        let t = radius * 2f64.powf(j as f64 / 4.0);
        let xa = if five_a_positive { t } else { -t };
        let (plus, minus) = roots_at(dg, xa);
        samples.push((vec![xa], 1.0 / (minus - plus)));
        let xb = -xa;
        let (_, minus) = roots_at(dg, xb);
        samples.push((vec![xb], 1.0 / minus));
    }
    let bound = bound_semialgebraic(&samples, caps.t_cap)?;
    let mut out = Vec::new();
    let mut terms = 4;
    while terms <= caps.max_terms {
        for tail_positive in [five_a_positive, !five_a_positive] {
            if let Some(t) = psi_terms(dg, tail_positive, bound.c, bound.t, terms) {
                let (p, q) = poly_from_terms(&t)?;
                out.push(rational(
                    p,
                    q,
                    Construction::Series {
                        terms,
                        tail_positive,
                        c: bound.c,
                        k: bound.t,
                    },
                ));
            }
        }
        terms *= 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn c(v: i64) -> Poly {
        Poly::from_i64(1, v)
    }

    #[test]
    fn lower_transform_law() {
        let g = MatPoly::from_rows(1, vec![vec![&x() + &c(2), x().square()], vec![x().square(), c(-1)]]).unwrap();
        let f = MatPoly::identity(2, 1);
        let (_, gb) = b_transform(&f, &g).unwrap();
        let g11 = g.get(0, 0);
        let det = &(g11 * g.get(1, 1)) - &(g.get(0, 1) * g.get(0, 1));
        assert_eq!(gb, MatPoly::diag(vec![g11.pow(3), g11 * &det]));
    }

    #[test]
    fn hadamard_shape() {
        let g = MatPoly::from_rows(1, vec![vec![c(0), x()], vec![x(), c(0)]]).unwrap();
        let f = MatPoly::identity(2, 1);
        let (t, _, gt) = diagonalize(&f, &g).unwrap();
        assert_eq!(t, Transform::Hadamard);
        let two_x = x().scale(&rat(2, 1));
        assert_eq!(gt, MatPoly::diag(vec![two_x.clone(), -&two_x]));
    }

    #[test]
    fn discriminant_identity() {
        let f = MatPoly::from_rows(1, vec![vec![&c(3) + &x().square(), x()], vec![x(), &c(2) - &x()]]).unwrap();
        let g = MatPoly::diag(vec![&x() - &c(1), &c(2) * &x()]);
        assert_eq!(discriminant(&f, &g).unwrap(), discriminant_sos(&f, &g).unwrap());
    }

    #[test]
    fn indefinite_diagonal_tail_uses_zero() {
        let f = MatPoly::identity(2, 1);
        let g = MatPoly::diag(vec![x(), c(-1)]);
        let w = construct_2x2_univariate_witness(&f, &g, &TwoByTwoCaps::default()).unwrap();
        assert_eq!(w.tail_pos, TailCase::FiveB);
        assert_eq!(w.construction, Construction::Zero);
        assert!(w.report.passed && w.report.checked > 0);
    }

    #[test]
    fn planted_inverse_square() {
        // F = H + r* G with r* = 1/(1+x²), scaled by (1+x²).
        let one_plus = &c(1) + &x().square();
        let g = MatPoly::from_rows(1, vec![vec![x(), c(1)], vec![c(1), c(-2)]]).unwrap();
        let h = MatPoly::from_rows(1, vec![vec![c(2), c(1)], vec![c(1), c(3)]]).unwrap();
        let f = h.scale_poly(&one_plus).unwrap().checked_add(&g).unwrap();
        let g = g.scale_poly(&one_plus).unwrap();
        let w = construct_2x2_univariate_witness(&f, &g, &TwoByTwoCaps::default()).unwrap();
        assert!(w.report.passed, "{w:?}");
        assert!(w.report.min_value >= 0.0);
    }
}
