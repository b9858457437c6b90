use serde::Serialize;

use super::WitnessError;

pub const DEFAULT_T_CAP: u32 = 32;

/// `value ≤ C (1 + ‖a‖²)^t` on the fitted samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundFit {
    #[serde(rename = "C")]
    pub c: f64,
    pub t: u32,
}

impl BoundFit {
    pub fn eval(&self, a: &[f64]) -> f64 {
        self.c * weight(a).powi(self.t as i32)
    }
}

fn weight(a: &[f64]) -> f64 {
    1.0 + a.iter().map(|v| v * v).sum::<f64>()
}

/// Growth exponent of the positive samples, measured against `1 + ‖a‖²` on
/// the outer half by radius. Only the tail decides `t`; on a finite sample
/// set any `t` fits once `C` is large enough, so `t` must come from the
/// growth rate for the bound to survive a wider resample.
fn tail_exponent(samples: &[(Vec<f64>, f64)]) -> f64 {
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(a, v)| (weight(a).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let tail = &pts[pts.len() / 2..];
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-12 {
        return 0.0;
    }
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Fits `q = C (1 + ‖a‖²)^t`. `t` is the smallest integer above the tail
/// growth exponent; `C` is the smallest `10^(k/20)` with 10% headroom over
/// every sample.
pub fn bound_semialgebraic(samples: &[(Vec<f64>, f64)], t_cap: u32) -> Result<BoundFit, WitnessError> {
    if samples.is_empty() {
        return Err(WitnessError::FitFails("no samples to bound".into()));
    }
    if let Some((a, v)) = samples.iter().find(|(_, v)| !v.is_finite()) {
        return Err(WitnessError::FitFails(format!("non-finite sample {v} at {a:?}")));
    }
    let slope = tail_exponent(samples);
    let t_real = (slope - 0.05).ceil().max(0.0);
    if t_real > t_cap as f64 {
        return Err(WitnessError::CapExceeded(format!(
            "growth exponent {slope:.2} needs t = {t_real} > t_cap = {t_cap}"
        )));
    }
    let t = t_real as u32;
    let ratio = samples
        .iter()
        .map(|(a, v)| v / weight(a).powi(t as i32))
        .fold(f64::NEG_INFINITY, f64::max);
    let target = 1.1 * ratio;
    let c = if target <= 0.0 {
        1.0
    } else {
        let mut k = (20.0 * target.log10()).floor() as i32;
        while 10f64.powf(k as f64 / 20.0) < target {
            k += 1;
        }
        10f64.powf(k as f64 / 20.0)
    };
    Ok(BoundFit { c, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples() {
        let s: Vec<_> = (0..50).map(|i| (vec![i as f64 * 0.2 - 5.0], 5.0)).collect();
        let b = bound_semialgebraic(&s, DEFAULT_T_CAP).unwrap();
        assert_eq!(b.t, 0);
        assert!(b.c >= 5.5 && b.c < 5.5 * 10f64.powf(0.05), "{}", b.c);
    }

    #[test]
    fn cubic_needs_two() {
        let s: Vec<_> = (0..=200)
            .map(|i| {
                let x = -10.0 + 0.1 * i as f64;
                (vec![x], x.abs().powi(3))
            })
            .collect();
        let b = bound_semialgebraic(&s, DEFAULT_T_CAP).unwrap();
        assert_eq!(b.t, 2);
        for (a, v) in &s {
            assert!(*v <= b.eval(a));
        }
        for i in 0..=2000 {
            let x = -100.0 + 0.1 * i as f64;
            assert!(x.abs().powi(3) <= b.eval(&[x]));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s: Vec<_> = (1..50).map(|i| (vec![i as f64], (i as f64).powi(9))).collect();
        assert!(matches!(bound_semialgebraic(&s, 2), Err(WitnessError::CapExceeded(_))));
    }
}
