use serde::Serialize;

use crate::pointwise::{finsler_interval, ExtendedReal, SectionInterval};
use crate::polycore::MatPoly;

use super::SectionsError;

/// Which section the detector looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SectionKind {
    /// `{r : F - rG ≻ 0}`.
    Plain,
    /// `{r > 0 : F - rG ≻ 0}`.
    Positive,
}

/// Limit behavior of one section endpoint along a tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EndpointLimit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl EndpointLimit {
    fn as_extended(self) -> ExtendedReal {
        match self {
            EndpointLimit::Finite(v) => ExtendedReal::Finite(v),
            EndpointLimit::PlusInfinity => ExtendedReal::PosInf,
            EndpointLimit::MinusInfinity => ExtendedReal::NegInf,
        }
    }
}

/// Closed interval of admissible limits for `r(x)` along one tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailLimit {
    pub lo: EndpointLimit,
    pub hi: EndpointLimit,
    /// Some far section was empty, so nothing is admissible.
    pub empty: bool,
}

impl TailLimit {
    fn unbounded_above(&self) -> bool {
        !self.empty && self.hi == EndpointLimit::PlusInfinity
    }

    fn unbounded_below(&self) -> bool {
        !self.empty && self.lo == EndpointLimit::MinusInfinity
    }

    fn unbounded(&self) -> bool {
        self.unbounded_above() || self.unbounded_below()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    NoObstruction,
    RationalWitnessImpossible(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub limit_pos: TailLimit,
    pub limit_neg: TailLimit,
    pub verdict: Verdict,
}

impl ObstructionReport {
    pub fn is_obstructed(&self) -> bool {
        matches!(self.verdict, Verdict::RationalWitnessImpossible(_))
    }
}

const FAR_SAMPLES: usize = 6;

/// Log-log slope above which a finite endpoint is taken to diverge.
const DIVERGENCE_SLOPE: f64 = 0.25;

fn endpoint_limit(values: &[ExtendedReal], xs: &[f64]) -> EndpointLimit {
    let last = values[values.len() - 1];
    match last {
        ExtendedReal::PosInf => return EndpointLimit::PlusInfinity,
        ExtendedReal::NegInf => return EndpointLimit::MinusInfinity,
        ExtendedReal::Finite(_) => {}
    }
    let finite: Vec<(f64, f64)> = values
        .iter()
        .zip(xs)
        .filter_map(|(v, &x)| v.finite().map(|v| (x.abs(), v)))
        .collect();
    let k = finite.len();
    if k < 2 {
        return EndpointLimit::Finite(last.to_f64());
    }
    let (x4, e4) = finite[k - 2];
    let (x5, e5) = finite[k - 1];
    if e4.abs() > 0.0 && e5.abs() > 1.0 {
        let slope = (e5.abs().ln() - e4.abs().ln()) / (x5.ln() - x4.ln());
        if slope > DIVERGENCE_SLOPE && e4.signum() == e5.signum() {
            return if e5 > 0.0 {
                EndpointLimit::PlusInfinity
            } else {
                EndpointLimit::MinusInfinity
            };
        }
    }
    // Leading correction of a rational tail is c/x; doubling x cancels it.
    EndpointLimit::Finite(2.0 * e5 - e4)
}

fn tail_limit(
    f: &MatPoly,
    g: &MatPoly,
    sign: f64,
    x_far: f64,
    kind: SectionKind,
    tol: f64,
) -> Result<TailLimit, SectionsError> {
    let xs: Vec<f64> = (0..FAR_SAMPLES).map(|j| sign * x_far * 2f64.powi(j as i32)).collect();
    let mut los = Vec::with_capacity(FAR_SAMPLES);
    let mut his = Vec::with_capacity(FAR_SAMPLES);
    for &x in &xs {
        let mut iv: SectionInterval = finsler_interval(&f.eval(&[x])?, &g.eval(&[x])?, tol)?.interval;
        if kind == SectionKind::Positive {
            iv = iv.positive_part();
        }
        if iv.is_empty() {
            return Ok(TailLimit {
                lo: EndpointLimit::PlusInfinity,
                hi: EndpointLimit::MinusInfinity,
                empty: true,
            });
        }
        los.push(iv.lo);
        his.push(iv.hi);
    }
    Ok(TailLimit {
        lo: endpoint_limit(&los, &xs),
        hi: endpoint_limit(&his, &xs),
        empty: false,
    })
}

/// Gap between two closed extended intervals; zero or negative when they
/// meet.
fn separation(a: &TailLimit, b: &TailLimit) -> f64 {
    let (alo, ahi) = (a.lo.as_extended(), a.hi.as_extended());
    let (blo, bhi) = (b.lo.as_extended(), b.hi.as_extended());
    let gap = |hi: ExtendedReal, lo: ExtendedReal| match (hi, lo) {
        (ExtendedReal::Finite(h), ExtendedReal::Finite(l)) => l - h,
        (ExtendedReal::PosInf, _) | (_, ExtendedReal::NegInf) => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    };
    gap(ahi, blo).max(gap(bhi, alo))
}

/// Compares the far-field sections as `x → ±∞` (one variable only).
///
/// A rational function without poles has either one finite common limit at
/// both ends or diverges at both ends. Impossibility is reported only when
/// the closed limit intervals are more than `10 tol` apart and the two tails
/// do not both admit divergence.
pub fn asymptotic_obstruction(
    f: &MatPoly,
    g: &MatPoly,
    x_far: f64,
    kind: SectionKind,
    tol: f64,
) -> Result<ObstructionReport, SectionsError> {
    if f.nvars() != 1 || g.nvars() != 1 {
        return Err(SectionsError::Unsupported(
            "asymptotic obstruction detection needs one variable".into(),
        ));
    }
    if f.n() != g.n() {
        return Err(SectionsError::Shape(format!("F is {}x{} but G is {}x{}", f.n(), f.n(), g.n(), g.n())));
    }
    let limit_pos = tail_limit(f, g, 1.0, x_far, kind, tol)?;
    let limit_neg = tail_limit(f, g, -1.0, x_far, kind, tol)?;

    let verdict = if limit_pos.empty || limit_neg.empty {
        Verdict::RationalWitnessImpossible("some far-field section is empty".into())
    } else if limit_pos.unbounded() && limit_neg.unbounded() {
        Verdict::NoObstruction
    } else {
        let gap = separation(&limit_pos, &limit_neg);
        if gap > 10.0 * tol {
            Verdict::RationalWitnessImpossible(format!(
                "limits at +inf lie in [{}, {}] and at -inf in [{}, {}], {gap:.3e} apart; \
                 a pole-free rational function needs a common limit or divergence at both ends",
                limit_pos.lo.as_extended(),
                limit_pos.hi.as_extended(),
                limit_neg.lo.as_extended(),
                limit_neg.hi.as_extended(),
            ))
        } else {
            Verdict::NoObstruction
        }
    };
    Ok(ObstructionReport {
        limit_pos,
        limit_neg,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Poly;

    #[test]
    fn quadratic_growth_is_unobstructed() {
        let x = Poly::var(1, 0);
        let f = MatPoly::scalar(2, &(&Poly::from_i64(1, 2) + &x.square()));
        let g = MatPoly::identity(2, 1);
        let r = asymptotic_obstruction(&f, &g, 100.0, SectionKind::Plain, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::NoObstruction);
        assert_eq!(r.limit_pos.hi, EndpointLimit::PlusInfinity);
    }

    #[test]
    fn richardson_removes_first_order_term() {
        let xs: Vec<f64> = (0..6).map(|j| 100.0 * 2f64.powi(j)).collect();
        let vals: Vec<ExtendedReal> = xs.iter().map(|x| ExtendedReal::Finite(1.0 + 1.0 / x)).collect();
        match endpoint_limit(&vals, &xs) {
            EndpointLimit::Finite(v) => assert!((v - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
