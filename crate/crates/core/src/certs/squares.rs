//! Nonnegative rationals as sums of at most four rational squares, so a
//! positive weight can always be folded into a list of squares.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

use super::CertError;
use crate::polycore::Rational;

/// Integers beyond this are not decomposed; the greedy search would still
/// terminate but the fixtures never need it.
const MAX_INTEGER: u128 = 1 << 100;

fn integer_squares(n: u128, k: usize) -> Option<Vec<u128>> {
    if n == 0 {
        return Some(vec![]);
    }
    if k == 0 {
        return None;
    }
    let top = n.sqrt();
    // The largest of k squares summing to n is at least n / k.
    let floor = (n / k as u128).sqrt();
    let mut a = top;
    loop {
        if let Some(mut rest) = integer_squares(n - a * a, k - 1) {
            rest.insert(0, a);
            return Some(rest);
        }
        if a == 0 || a <= floor {
            return None;
        }
        a -= 1;
    }
}

/// `c = Σ rᵢ²` with at most four terms.
pub fn rational_squares(c: &Rational) -> Result<Vec<Rational>, CertError> {
    if c.is_negative() {
        return Err(CertError::Decomposition(format!("{c} is negative and not a sum of squares")));
    }
    if c.is_zero() {
        return Ok(vec![]);
    }
    // c = num/den = (num·den)/den².
    let prod: BigInt = c.numer() * c.denom();
    let n = prod
        .to_u128()
        .filter(|&n| n <= MAX_INTEGER)
        .ok_or_else(|| CertError::Decomposition(format!("{c} is too large to split into squares")))?;
    let roots = integer_squares(n, 4).expect("Lagrange: every natural number is a sum of four squares");
    Ok(roots
        .into_iter()
        .map(|a| Rational::new(BigInt::from(a), c.denom().clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rat;

    #[test]
    fn small_rationals_split() {
        for (num, den) in [(7, 1), (2, 3), (15, 4), (1, 1), (0, 1), (1023, 17)] {
            let c = rat(num, den);
            let roots = rational_squares(&c).unwrap();
            assert!(roots.len() <= 4);
            let sum: Rational = roots.iter().map(|r| r * r).sum();
            assert_eq!(sum, c);
        }
        assert!(rational_squares(&rat(-1, 2)).is_err());
    }
}
