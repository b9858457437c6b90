use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::PolyError;

pub type Rational = BigRational;

/// `num/den` as a rational. Panics when `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of a finite double (every finite `f64` is dyadic).
pub fn rat_from_f64(x: f64) -> Result<Rational, PolyError> {
    if x == 0.0 {
        return Ok(Rational::zero());
    }
    Rational::from_float(x).ok_or(PolyError::NonFinite(x))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => {
            // Ratio::to_f64 gives up on huge numerators or denominators.
            let n = r.numer().to_f64().unwrap_or(f64::NAN);
            let d = r.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Parses `"num"` or `"num/den"` with decimal integers.
pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, PolyError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| PolyError::Parse(format!("bad integer `{t}` in coefficient `{s}`")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(PolyError::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
    }
}
