//! Truncated Laurent series in `t = 1/x`, used for asymptotic expansions as
//! `|x| → ∞`.
//!
//! Coefficients are rationals rounded to `PRECISION_BITS` significant bits
//! after every operation; only square roots are inexact beyond that.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::polycore::{Rational, UniPoly};

const PRECISION_BITS: u64 = 256;

/// `Σ coeffs[i] t^(val + i)`, known up to `t^(val + len - 1)`. An empty
/// coefficient list is the zero series, known to `val - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    val: i64,
    coeffs: Vec<Rational>,
}

fn round(c: Rational) -> Rational {
    if c.is_zero() {
        return c;
    }
    let mag = c.numer().bits() as i64 - c.denom().bits() as i64;
    let shift = PRECISION_BITS as i64 - mag;
    let scale = |e: i64| BigInt::one() << (e as usize);
    let scaled = if shift >= 0 {
        c * Rational::from_integer(scale(shift))
    } else {
        c / Rational::from_integer(scale(-shift))
    };
    let rounded = Rational::from_integer(scaled.round().to_integer());
    if shift >= 0 {
        rounded / Rational::from_integer(scale(shift))
    } else {
        rounded * Rational::from_integer(scale(-shift))
    }
}

/// Square root of a positive rational to about `PRECISION_BITS` bits.
fn sqrt_rational(c: &Rational) -> Rational {
    let k = PRECISION_BITS as usize + 8;
    let num = c.numer() * c.denom() << (2 * k);
    Rational::new(num.sqrt(), c.denom() << k)
}

impl LaurentSeries {
    pub fn zero(known_to: i64) -> Self {
        LaurentSeries {
            val: known_to + 1,
            coeffs: vec![],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of `t` of the leading term.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Exponent of `t` up to which the series is known.
    pub fn known_to(&self) -> i64 {
        self.val + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn normalized(mut val: i64, mut coeffs: Vec<Rational>) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => LaurentSeries::zero(val + coeffs.len() as i64 - 1),
            Some(k) => {
                coeffs.drain(..k);
                val += k as i64;
                LaurentSeries {
                    val,
                    coeffs: coeffs.into_iter().map(round).collect(),
                }
            }
        }
    }

    /// A polynomial in `x`, expanded in `t` and kept to `terms` coefficients.
    pub fn from_unipoly(u: &UniPoly, terms: usize) -> Self {
        match u.degree() {
            None => LaurentSeries::zero(terms as i64),
            Some(deg) => {
                let mut coeffs: Vec<Rational> = u.coeffs().iter().rev().cloned().collect();
                coeffs.resize(terms.max(coeffs.len()), Rational::zero());
                coeffs.truncate(terms.max(1));
                LaurentSeries::normalized(-(deg as i64), coeffs)
            }
        }
    }

    /// `t^e`, kept to `terms` coefficients.
    pub fn monomial(c: Rational, e: i64, terms: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); terms.max(1)];
        coeffs[0] = c;
        LaurentSeries::normalized(e, coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LaurentSeries::normalized(self.val, self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, other: &LaurentSeries) -> Self {
        let known = self.known_to().min(other.known_to());
        let val = self.val.min(other.val);
        if known < val {
            return LaurentSeries::zero(known);
        }
        let mut coeffs = vec![Rational::zero(); (known - val + 1) as usize];
        for s in [self, other] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let e = s.val + i as i64;
                if e <= known {
                    coeffs[(e - val) as usize] += c;
                }
            }
        }
        LaurentSeries::normalized(val, coeffs)
    }

    pub fn sub(&self, other: &LaurentSeries) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentSeries) -> Self {
        if self.is_zero() || other.is_zero() {
            let known = (self.known_to() + other.val.min(other.known_to() + 1))
                .min(other.known_to() + self.val.min(self.known_to() + 1));
            return LaurentSeries::zero(known);
        }
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![Rational::zero(); len];
        for (i, out) in coeffs.iter_mut().enumerate() {
            for j in 0..=i {
                *out += &self.coeffs[j] * &other.coeffs[i - j];
            }
        }
        LaurentSeries::normalized(self.val + other.val, coeffs)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = LaurentSeries::monomial(Rational::one(), 0, self.coeffs.len());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn inv(&self) -> Option<Self> {
        let c0 = self.coeffs.first()?.clone();
        let inv0 = Rational::one() / &c0;
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = Rational::zero();
            for i in 1..=n {
                acc += &self.coeffs[i] * &out[n - i];
            }
            out.push(round(-acc * &inv0));
        }
        Some(LaurentSeries::normalized(-self.val, out))
    }

    pub fn div(&self, other: &LaurentSeries) -> Option<Self> {
        Some(self.mul(&other.inv()?))
    }

    /// Square root with positive leading coefficient; needs an even
    /// valuation and a positive leading coefficient.
    pub fn sqrt(&self) -> Option<Self> {
        let c0 = self.coeffs.first()?;
        if self.val % 2 != 0 || !c0.is_positive() {
            return None;
        }
        let s0 = round(sqrt_rational(c0));
        let two_s0 = &s0 * Rational::from_integer(2.into());
        let mut out = vec![s0];
        for n in 1..self.coeffs.len() {
            let mut acc = self.coeffs[n].clone();
            for i in 1..n {
                acc -= &out[i] * &out[n - i];
            }
            out.push(round(acc / &two_s0));
        }
        Some(LaurentSeries::normalized(self.val / 2, out))
    }

    /// Terms with `t`-exponent `<= max_exp`, as `(x-exponent, coefficient)`.
    pub fn truncate_to_x_terms(&self, max_exp: i64) -> Vec<(i64, Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (self.val + i as i64, c))
            .filter(|(e, c)| *e <= max_exp && !c.is_zero())
            .map(|(e, c)| (-e, c.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{rat, rat_to_f64};

    fn u(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&v| rat(v, 1)).collect())
    }

    #[test]
    fn geometric_inverse() {
        // 1 / (x - 1) = t + t^2 + t^3 + ...
        let s = LaurentSeries::from_unipoly(&u(&[-1, 1]), 8).inv().unwrap();
        assert_eq!(s.valuation(), 1);
        assert!(s.coeffs().iter().all(|c| *c == rat(1, 1)));
    }

    #[test]
    fn sqrt_of_square() {
        // sqrt(x^2 + 2x + 1) = x + 1
        let s = LaurentSeries::from_unipoly(&u(&[1, 2, 1]), 6).sqrt().unwrap();
        assert_eq!(s.valuation(), -1);
        assert!((rat_to_f64(&s.coeffs()[0]) - 1.0).abs() < 1e-60);
        assert!((rat_to_f64(&s.coeffs()[1]) - 1.0).abs() < 1e-60);
        assert!(rat_to_f64(&s.coeffs()[2]).abs() < 1e-60);
    }

    #[test]
    fn sqrt_matches_numeric() {
        // sqrt(2x^2 + 1) at x = 50
        let s = LaurentSeries::from_unipoly(&u(&[1, 0, 2]), 12).sqrt().unwrap();
        let x: f64 = 50.0;
        let v: f64 = s
            .truncate_to_x_terms(i64::MAX)
            .iter()
            .map(|(e, c)| rat_to_f64(c) * x.powi(*e as i32))
            .sum();
        assert!((v - (2.0 * x * x + 1.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cancellation_is_exact() {
        let a = LaurentSeries::from_unipoly(&u(&[3, 1]), 6);
        let b = LaurentSeries::from_unipoly(&u(&[1, 1]), 6);
        let d = a.sub(&b);
        assert_eq!(d.valuation(), 0);
        assert_eq!(d.coeffs()[0], rat(2, 1));
    }
}
