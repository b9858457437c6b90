use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::interval::{finsler_interval, Section};
use super::matrix::SymMatrix;
use super::PointwiseError;

/// Which pointwise condition is being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HypothesisMode {
    /// `vᵀGv = 0, v ≠ 0 ⇒ vᵀFv > 0`; equivalent to a nonempty section.
    ZeroSet,
    /// `vᵀGv ≥ 0, v ≠ 0 ⇒ vᵀFv > 0`; equivalent to a section meeting `(0, ∞)`.
    NonNegSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// Decided from the section, never from sampling.
    pub holds: bool,
    pub section: Section,
    /// A sampled unit vector that violates the condition, if one was seen.
    pub sampled_violation: Option<Vec<f64>>,
    pub feasible_samples: usize,
    /// Sampling saw a violation although the section says the condition
    /// holds.
    pub contradiction: bool,
}

pub(crate) fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Point of the segment `[u, w]` where `vᵀGv` vanishes, normalized; the
/// caller guarantees `uᵀGu > 0 > wᵀGw`.
pub(crate) fn zero_crossing(g: &SymMatrix, u: &[f64], w: &[f64]) -> Vec<f64> {
    let a = g.quad_form(u);
    let b = g.quad_form(w);
    let n = u.len();
    let mut c = 0.0;
    for i in 0..n {
        for j in 0..n {
            c += u[i] * g.get(i, j) * w[j];
        }
    }
    // q(t) = A t² + B t + C on [0, 1], q(0) = a > 0 > b = q(1).
    let qa = a - 2.0 * c + b;
    let qb = 2.0 * (c - a);
    let qc = a;
    let t = if qa.abs() <= 1e-14 * (a.abs() + b.abs()) {
        -qc / qb
    } else {
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        let q = -0.5 * (qb + qb.signum() * disc);
        let r1 = q / qa;
        let r2 = if q != 0.0 { qc / q } else { r1 };
        if (0.0..=1.0).contains(&r1) {
            r1
        } else {
            r2
        }
    };
    let v: Vec<f64> = u.iter().zip(w).map(|(x, y)| (1.0 - t) * x + t * y).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Decides the pointwise hypothesis from the section and cross-checks it by
/// sampling `sphere_samples` unit vectors with a seeded generator.
pub fn check_finsler_hypothesis(
    fa: &SymMatrix,
    ga: &SymMatrix,
    mode: HypothesisMode,
    sphere_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<HypothesisReport, PointwiseError> {
    let section = finsler_interval(fa, ga, tol)?;
    let holds = match mode {
        HypothesisMode::ZeroSet => !section.interval.is_empty(),
        HypothesisMode::NonNegSet => !section.interval.positive_part().is_empty(),
    };

    let n = fa.n();
    let scale = fa.norm_fro() + ga.norm_fro();
    let zero_tol = 1e-12 * ga.norm_fro().max(1e-300);
    let violation_tol = 1e-9 * scale.max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positives: Vec<Vec<f64>> = Vec::new();
    let mut negatives: Vec<Vec<f64>> = Vec::new();
    let mut feasible = 0usize;
    let mut violation = None;

    let inspect = |v: Vec<f64>, feasible: &mut usize, violation: &mut Option<Vec<f64>>| {
        *feasible += 1;
        if violation.is_none() && fa.quad_form(&v) < -violation_tol {
            *violation = Some(v);
        }
    };

    for _ in 0..sphere_samples {
        let v = unit_vector(&mut rng, n);
        let q = ga.quad_form(&v);
        if q.abs() <= zero_tol {
            inspect(v, &mut feasible, &mut violation);
            continue;
        }
        if q > 0.0 {
            if mode == HypothesisMode::NonNegSet {
                inspect(v.clone(), &mut feasible, &mut violation);
            }
            match negatives.pop() {
                Some(w) => inspect(zero_crossing(ga, &v, &w), &mut feasible, &mut violation),
                None => positives.push(v),
            }
        } else {
            match positives.pop() {
                Some(u) => inspect(zero_crossing(ga, &u, &v), &mut feasible, &mut violation),
                None => negatives.push(v),
            }
        }
    }

    let contradiction = holds && violation.is_some();
    Ok(HypothesisReport {
        holds,
        section,
        sampled_violation: violation,
        feasible_samples: feasible,
        contradiction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_constraint_exposes_negative_direction() {
        let f = SymMatrix::diag(&[1.0, -1.0]);
        let g = SymMatrix::zeros(2);
        let r = check_finsler_hypothesis(&f, &g, HypothesisMode::ZeroSet, 1000, 0, 1e-9).unwrap();
        assert!(!r.holds);
        assert!(r.sampled_violation.is_some());
        assert!(!r.contradiction);
    }

    #[test]
    fn crossing_lands_on_zero_set() {
        let g = SymMatrix::from_rows(&[&[1.0, 0.3], &[0.3, -2.0]]);
        let v = zero_crossing(&g, &[1.0, 0.0], &[0.0, 1.0]);
        assert!(g.quad_form(&v).abs() < 1e-14);
    }

    #[test]
    fn example_pair_holds_on_zero_set() {
        // x = 2 slice of F = diag(1+x, 1), G = diag(x, x)
        let f = SymMatrix::diag(&[3.0, 1.0]);
        let g = SymMatrix::diag(&[2.0, 2.0]);
        let r = check_finsler_hypothesis(&f, &g, HypothesisMode::ZeroSet, 1000, 1, 1e-9).unwrap();
        assert!(r.holds && !r.contradiction);
    }
}
