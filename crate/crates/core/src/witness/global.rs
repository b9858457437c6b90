use serde::Serialize;

use crate::pointwise::{finsler_interval, is_positive_definite, DEFAULT_TOL};
use crate::polycore::{norm_sq_poly, rat_from_f64, MatPoly, Poly, Rational};
use crate::sections::detect_ball_nsd;

use super::{
    bound_semialgebraic, box_grid, check_pair, fit_compact_witness, radial_points, BoundFit, RegionDescriptor,
    ValidationReport, WitnessError, WitnessRational,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalCaps {
    /// Radius scanned when looking for the ball outside which `G ⪯ 0`.
    pub r_max: f64,
    /// Points per axis of the scan for that ball.
    pub nsd_density: usize,
    /// Points per axis of the compact fitting grid.
    pub grid_density: usize,
    pub max_deg: usize,
    pub k_cap: u32,
    pub t_cap: u32,
    /// Approximate size of the final validation grid.
    pub validation_points: usize,
}

impl Default for GlobalCaps {
    fn default() -> Self {
        GlobalCaps {
            r_max: 50.0,
            nsd_density: 401,
            grid_density: 41,
            max_deg: 12,
            k_cap: 64,
            t_cap: super::DEFAULT_T_CAP,
            validation_points: 10_000,
        }
    }
}

/// `p_k = p + ε ((1 + ‖x‖²) / (1 + R²))^k`, with the ingredients kept for
/// inspection. `epsilon` and `radius` are dyadic, so their `f64` values are
/// exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalWitness {
    pub p: Poly,
    pub p_k: Poly,
    pub epsilon: f64,
    pub radius: f64,
    pub k: u32,
    pub bound: BoundFit,
    pub report: ValidationReport,
}

impl GlobalWitness {
    /// `ε ((1 + ‖x‖²) / (1 + R²))^k` as an exact polynomial.
    pub fn correction(&self) -> Result<Poly, WitnessError> {
        correction(self.p.nvars(), self.epsilon, self.radius, self.k)
    }

    pub fn witness(&self) -> WitnessRational {
        WitnessRational::polynomial(self.p_k.clone(), RegionDescriptor::AllSpace)
    }
}

fn correction(d: usize, epsilon: f64, radius: f64, k: u32) -> Result<Poly, WitnessError> {
    let r = rat_from_f64(radius)?;
    let denom: Rational = Rational::from_integer(1.into()) + &r * &r;
    let base = &Poly::one(d) + &norm_sq_poly(d);
    let scale = rat_from_f64(epsilon)? / num_traits::pow::pow(denom, k as usize);
    Ok(base.pow(k).scale(&scale))
}

/// Radii `(R + 1) 2^(j/2)` for `j = 1..=12`.
fn far_radii(radius: f64) -> Vec<f64> {
    (1..=12).map(|j| (radius + 1.0) * 2f64.powf(j as f64 / 2.0)).collect()
}

fn dyadic_ceil(v: f64) -> f64 {
    (v * 64.0).ceil() / 64.0
}

/// Largest `ε = 2^-j >= 1e-6` with `F - (p + ε)G ≻ 0` on the samples.
fn epsilon_sweep(f: &MatPoly, g: &MatPoly, p: &Poly, points: &[Vec<f64>]) -> Result<f64, WitnessError> {
    let fc = f.compile()?;
    let gc = g.compile()?;
    let pc = p.compile();
    let mats: Vec<_> = points.iter().map(|a| (fc.eval(a), gc.eval(a), pc.eval(a))).collect();
    let mut eps = 1.0;
    while eps >= 1e-6 {
        let mut ok = true;
        for (fa, ga, pa) in &mats {
            if !is_positive_definite(&fa.add_scaled(-(pa + eps), ga), 1e-12)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Err(WitnessError::CapExceeded("no ε >= 1e-6 keeps F - (p + ε)G positive definite on B(0,R)".into()))
}

/// Global polynomial witness for `G` negative semidefinite outside a ball.
pub fn construct_global_witness_nsd(f: &MatPoly, g: &MatPoly, caps: &GlobalCaps) -> Result<GlobalWitness, WitnessError> {
    check_pair(f, g)?;
    let d = f.nvars();
    let detected = detect_ball_nsd(g, caps.r_max, caps.nsd_density, DEFAULT_TOL)?.ok_or_else(|| {
        WitnessError::Precondition(format!(
            "G is not negative semidefinite outside any ball of radius below {}",
            caps.r_max
        ))
    })?;
    // One scan step of slack: the true boundary may sit between grid points.
    let step = 2.0 * caps.r_max / (caps.nsd_density.max(2) - 1) as f64;
    let radius = if detected > 0.0 { dyadic_ceil(detected + step) } else { 0.0 };

    let p = fit_compact_witness(f, g, radius + 1.0, caps.max_deg, caps.grid_density)?;
    let inner = box_grid(d, radius, caps.grid_density.max(3) | 1, true);
    let epsilon = epsilon_sweep(f, g, &p, &inner)?;

    let fc = f.compile()?;
    let gc = g.compile()?;
    let pc = p.compile();
    let mut outer: Vec<Vec<f64>> = radial_points(d, &far_radii(radius));
    let span = 64.0 * (radius + 1.0);
    outer.extend(
        box_grid(d, span, if d == 1 { 2001 } else { 61 }, false)
            .into_iter()
            .filter(|a| a.iter().map(|v| v * v).sum::<f64>().sqrt() >= radius + 1.0),
    );
    let mut samples = Vec::with_capacity(outer.len());
    for a in &outer {
        let s = finsler_interval(&fc.eval(a), &gc.eval(a), DEFAULT_TOL)?.interval;
        if s.is_empty() {
            return Err(WitnessError::HypothesisFails { point: a.clone() });
        }
        let pa = pc.eval(a);
        let mu = s.lo.finite().unwrap_or(f64::NEG_INFINITY);
        samples.push((a.clone(), mu.max(pa)));
    }
    let bound = bound_semialgebraic(&samples, caps.t_cap)?;

    let denom = 1.0 + radius * radius;
    let k = (0..=caps.k_cap)
        .find(|&k| {
            samples.iter().all(|(a, _)| {
                let w = (1.0 + a.iter().map(|v| v * v).sum::<f64>()) / denom;
                pc.eval(a) + epsilon * w.powi(k as i32) > bound.eval(a)
            })
        })
        .ok_or_else(|| WitnessError::CapExceeded(format!("no k <= {} lifts p above the bound", caps.k_cap)))?;

    let p_k = &p + &correction(d, epsilon, radius, k)?;
    let witness = WitnessRational::polynomial(p_k.clone(), RegionDescriptor::AllSpace);
    let report = witness
        .validate(f, g, &validation_grid(d, radius, caps.validation_points), DEFAULT_TOL)?
        .into_result()?;
    Ok(GlobalWitness {
        p,
        p_k,
        epsilon,
        radius,
        k,
        bound,
        report,
    })
}

/// About `count` grid points on `[-4(R+1), 4(R+1)]^d` plus the far radii.
pub(crate) fn validation_grid(d: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    let per_axis = ((count as f64).powf(1.0 / d as f64).round() as usize).max(2);
    let mut pts = box_grid(d, 4.0 * (radius + 1.0), per_axis, false);
    pts.extend(radial_points(d, &far_radii(radius)));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    #[test]
    fn negative_identity() {
        let f = MatPoly::identity(2, 1);
        let g = MatPoly::identity(2, 1).neg();
        let w = construct_global_witness_nsd(&f, &g, &GlobalCaps::default()).unwrap();
        assert_eq!(w.radius, 0.0);
        assert!(w.report.min_lambda > 0.0);
        assert_eq!(&w.p_k - &w.p, w.correction().unwrap());
    }

    #[test]
    fn shrinking_diagonal() {
        let one = Poly::one(1);
        let f = MatPoly::scalar(2, &(&Poly::from_i64(1, 2) + &x().square()));
        let g = MatPoly::diag(vec![&one - &x().square(), -&one]);
        let w = construct_global_witness_nsd(&f, &g, &GlobalCaps::default()).unwrap();
        assert!(w.radius >= 1.0);
        let pc = w.p_k.compile();
        let fc = f.compile().unwrap();
        let gc = g.compile().unwrap();
        for i in 0..=4000 {
            let a = [-20.0 + 0.01 * i as f64];
            let m = fc.eval(&a).add_scaled(-pc.eval(&a), &gc.eval(&a));
            assert!(is_positive_definite(&m, 0.0).unwrap(), "x = {}", a[0]);
        }
        assert_eq!(&w.p_k - &w.p, w.correction().unwrap());
    }

    #[test]
    fn diagonal_example_is_rejected() {
        let (f, g) = crate::catalog::diag_pair();
        assert!(matches!(
            construct_global_witness_nsd(&f, &g, &GlobalCaps::default()),
            Err(WitnessError::Precondition(_))
        ));
    }
}
