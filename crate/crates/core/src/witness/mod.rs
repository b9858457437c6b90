//! Witness builders: polynomial and rational `r(x)` with `F - rG ≻ 0` on a
//! stated region.
//!
//! Every builder validates its output numerically before returning it; a
//! witness that fails its own grid is an error, never a silent result.

mod bound;
mod compact;
mod global;
mod laurent;
mod merge;
mod two_by_two;

pub use bound::{bound_semialgebraic, BoundFit, DEFAULT_T_CAP};
pub use compact::fit_compact_witness;
pub use global::{construct_global_witness_nsd, GlobalCaps, GlobalWitness};
pub use laurent::LaurentSeries;
pub use merge::{merge_far_field, MergeCaps, MergedWitness};
pub use two_by_two::{
    b_transform, construct_2x2_univariate_witness, discriminant, discriminant_sos, Construction, TailCase, Transform,
    TwoByTwoCaps, TwoByTwoWitness,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pointwise::{min_eigenvalue, PointwiseError};
use crate::polycore::{CompiledPoly, MatPoly, Poly, PolyError};
use crate::sections::SectionsError;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("hypothesis fails at {point:?}: the section is empty")]
    HypothesisFails { point: Vec<f64> },
    #[error("no polynomial of degree <= {max_deg} verifies on the fine grid")]
    DegreeInsufficient { max_deg: usize },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("validation fails at {point:?}: {reason}")]
    ValidationFails { point: Vec<f64>, reason: String },
    #[error("fit fails: {0}")]
    FitFails(String),
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Pointwise(#[from] PointwiseError),
    #[error(transparent)]
    Sections(#[from] SectionsError),
}

/// Where a witness is claimed to be valid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum RegionDescriptor {
    AllSpace,
    Ball {
        #[serde(rename = "R")]
        r: f64,
    },
    OutsideBall {
        #[serde(rename = "R")]
        r: f64,
    },
    KGWhole,
    KGOutside {
        #[serde(rename = "R")]
        r: f64,
    },
}

impl RegionDescriptor {
    pub fn radius(&self) -> Option<f64> {
        match *self {
            RegionDescriptor::Ball { r } | RegionDescriptor::OutsideBall { r } | RegionDescriptor::KGOutside { r } => {
                Some(r)
            }
            _ => None,
        }
    }

    pub fn needs_kg(&self) -> bool {
        matches!(self, RegionDescriptor::KGWhole | RegionDescriptor::KGOutside { .. })
    }

    /// `g_max` is `λmax(G(a))`; only read for the `K_G` variants.
    pub fn contains(&self, a: &[f64], g_max: f64, tol: f64) -> bool {
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        match *self {
            RegionDescriptor::AllSpace => true,
            RegionDescriptor::Ball { r } => norm <= r,
            RegionDescriptor::OutsideBall { r } => norm >= r,
            RegionDescriptor::KGWhole => g_max >= -tol,
            RegionDescriptor::KGOutside { r } => g_max >= -tol && norm >= r,
        }
    }
}

/// `r = p / q` together with the region it is claimed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRational {
    pub p: Poly,
    pub q: Poly,
    pub region: RegionDescriptor,
    #[serde(rename = "positive")]
    pub positivity_required: bool,
}

impl WitnessRational {
    pub fn polynomial(p: Poly, region: RegionDescriptor) -> Self {
        let q = Poly::one(p.nvars());
        WitnessRational {
            p,
            q,
            region,
            positivity_required: false,
        }
    }

    pub fn nvars(&self) -> usize {
        self.p.nvars()
    }

    pub fn eval(&self, a: &[f64]) -> Result<f64, PolyError> {
        Ok(self.p.eval(a)? / self.q.eval(a)?)
    }

    pub fn compile(&self) -> CompiledWitness {
        CompiledWitness {
            p: self.p.compile(),
            q: self.q.compile(),
        }
    }

    /// Checks `F - rG ≻ 0` (and `r > 0` when required) at every sample that
    /// lies in the region.
    pub fn validate(
        &self,
        f: &MatPoly,
        g: &MatPoly,
        points: &[Vec<f64>],
        tol: f64,
    ) -> Result<ValidationReport, WitnessError> {
        check_pair(f, g)?;
        if self.nvars() != f.nvars() || self.q.nvars() != f.nvars() {
            return Err(WitnessError::Shape(format!(
                "witness has {} variables but the matrices have {}",
                self.nvars(),
                f.nvars()
            )));
        }
        let fc = f.compile()?;
        let gc = g.compile()?;
        let r = self.compile();
        let mut report = ValidationReport::new(points.len());
        for a in points {
            let ga = gc.eval(a);
            let g_max = if self.region.needs_kg() {
                crate::pointwise::eigen_range(&ga)?.1
            } else {
                0.0
            };
            if !self.region.contains(a, g_max, tol) {
                continue;
            }
            let q = r.q.eval(a);
            let value = r.p.eval(a) / q;
            let lambda = if q == 0.0 || !value.is_finite() {
                f64::NEG_INFINITY
            } else {
                min_eigenvalue(&fc.eval(a).add_scaled(-value, &ga))?
            };
            report.record(a, lambda, value, self.positivity_required);
        }
        Ok(report)
    }
}

pub struct CompiledWitness {
    pub p: CompiledPoly,
    pub q: CompiledPoly,
}

impl CompiledWitness {
    pub fn eval(&self, a: &[f64]) -> f64 {
        self.p.eval(a) / self.q.eval(a)
    }
}

/// Outcome of a grid validation. A region that no sample reaches passes
/// vacuously; `checked` tells the two apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub checked: usize,
    pub min_lambda: f64,
    pub min_value: f64,
    pub worst_point: Option<Vec<f64>>,
    pub first_failure: Option<Vec<f64>>,
    pub passed: bool,
}

impl ValidationReport {
    fn new(samples: usize) -> Self {
        ValidationReport {
            samples,
            checked: 0,
            min_lambda: f64::INFINITY,
            min_value: f64::INFINITY,
            worst_point: None,
            first_failure: None,
            passed: true,
        }
    }

    fn record(&mut self, a: &[f64], lambda: f64, value: f64, positive: bool) {
        self.checked += 1;
        if lambda < self.min_lambda || self.worst_point.is_none() {
            self.min_lambda = lambda;
            self.worst_point = Some(a.to_vec());
        }
        self.min_value = self.min_value.min(value);
        let ok = lambda > 0.0 && (!positive || value > 0.0);
        if !ok && self.passed {
            self.passed = false;
            self.first_failure = Some(a.to_vec());
        }
    }

    pub(crate) fn into_result(self) -> Result<ValidationReport, WitnessError> {
        match &self.first_failure {
            Some(p) => Err(WitnessError::ValidationFails {
                point: p.clone(),
                reason: format!("min λ(F - rG) = {:.3e}, min r = {:.3e}", self.min_lambda, self.min_value),
            }),
            None => Ok(self),
        }
    }
}

pub(crate) fn check_pair(f: &MatPoly, g: &MatPoly) -> Result<(), WitnessError> {
    if f.n() != g.n() {
        return Err(WitnessError::Shape(format!("F is {}x{} but G is {}x{}", f.n(), f.n(), g.n(), g.n())));
    }
    if f.nvars() != g.nvars() {
        return Err(WitnessError::Shape(format!(
            "F has {} variables but G has {}",
            f.nvars(),
            g.nvars()
        )));
    }
    f.require_symmetric()?;
    g.require_symmetric()?;
    Ok(())
}

/// Regular grid on `[-half, half]^d` with `steps` points per axis, filtered
/// to the closed ball when `ball` is set.
pub(crate) fn box_grid(d: usize, half: f64, steps: usize, ball: bool) -> Vec<Vec<f64>> {
    let steps = steps.max(2);
    let axis: Vec<f64> = (0..steps)
        .map(|i| if i == steps - 1 { half } else { -half + 2.0 * half * i as f64 / (steps - 1) as f64 })
        .collect();
    let mut out = Vec::new();
    let mut index = vec![0usize; d];
    loop {
        let a: Vec<f64> = index.iter().map(|&i| axis[i]).collect();
        if !ball || a.iter().map(|v| v * v).sum::<f64>() <= half * half * (1.0 + 1e-12) {
            out.push(a);
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
    out
}

/// Points at the given radii along each signed axis direction and, for
/// `d ≥ 2`, the signed diagonals.
pub(crate) fn radial_points(d: usize, radii: &[f64]) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[i] = s;
            dirs.push(v);
        }
    }
    if d >= 2 {
        let c = 1.0 / (d as f64).sqrt();
        for mask in 0..(1u32 << d) {
            dirs.push((0..d).map(|i| if mask & (1 << i) != 0 { -c } else { c }).collect());
        }
    }
    let mut out = Vec::with_capacity(dirs.len() * radii.len());
    for &r in radii {
        for u in &dirs {
            out.push(u.iter().map(|v| v * r).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_membership() {
        let reg = RegionDescriptor::KGOutside { r: 2.0 };
        assert!(reg.contains(&[3.0], 0.5, 1e-9));
        assert!(!reg.contains(&[1.0], 0.5, 1e-9));
        assert!(!reg.contains(&[3.0], -0.5, 1e-9));
        assert!(RegionDescriptor::Ball { r: 1.0 }.contains(&[0.6, 0.6], 0.0, 0.0));
        assert!(!RegionDescriptor::Ball { r: 0.8 }.contains(&[0.6, 0.6], 0.0, 0.0));
    }

    #[test]
    fn region_json_shape() {
        let s = serde_json::to_string(&RegionDescriptor::KGOutside { r: 2.5 }).unwrap();
        assert_eq!(s, r#"{"tag":"KGOutside","R":2.5}"#);
        let back: RegionDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, RegionDescriptor::KGOutside { r: 2.5 });
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(box_grid(2, 1.0, 3, false).len(), 9);
        assert_eq!(box_grid(2, 1.0, 3, true).len(), 5);
        assert_eq!(radial_points(2, &[1.0, 2.0]).len(), 16);
    }
}
