use std::cmp::Ordering;

use nalgebra::{DMatrix, Schur};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::float::FloatCore;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::rational::{rat_to_f64, Rational};
use super::PolyError;

/// Dense univariate polynomial over the rationals, lowest degree first.
/// The coefficient vector never ends in a zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `a + b r`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    pub fn from_poly(p: &Poly) -> Result<Self, PolyError> {
        if p.nvars() != 1 {
            return Err(PolyError::DimensionMismatch {
                expected: 1,
                found: p.nvars(),
            });
        }
        let deg = p.total_degree().map_or(0, |d| d as usize + 1);
        let mut coeffs = vec![Rational::zero(); deg];
        for (m, c) in p.terms() {
            coeffs[m.exps()[0] as usize] = c.clone();
        }
        Ok(Self::new(coeffs))
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            1,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32], c.clone())),
        )
        .expect("univariate terms have one exponent")
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval_exact(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        UniPoly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
                .collect(),
        )
    }

    /// Euclidean division; panics when `divisor` is zero.
    pub fn divrem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading_coeff();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (UniPoly::zero(), UniPoly::zero());
        };
        if nd < dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (i, b) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &c * b;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Exact quotient; `None` if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divrem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn square_free_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides its argument").monic()
    }

    /// Sign of the polynomial as `x -> +∞` (`positive = true`) or `-∞`.
    pub fn sign_at_infinity(&self, positive: bool) -> Ordering {
        let Some(d) = self.degree() else {
            return Ordering::Equal;
        };
        let s = if self.leading_coeff().is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        };
        if positive || d % 2 == 0 {
            s
        } else {
            s.reverse()
        }
    }

    fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].divrem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            // Positive rescaling keeps signs and curbs coefficient growth.
            seq.push(r.scale(&-r.leading_coeff().abs().recip()));
        }
        seq
    }

    /// Number of distinct real roots, counted exactly by a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        let changes = |pos: bool| {
            let signs: Vec<Ordering> = seq
                .iter()
                .map(|p| p.sign_at_infinity(pos))
                .filter(|s| *s != Ordering::Equal)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(false) - changes(true)
    }

    /// Distinct real roots in increasing order.
    ///
    /// Companion eigenvalues of the square-free part are accepted when exact
    /// sign changes confirm all of them; otherwise Sturm counts isolate each
    /// root inside a dyadic interval, which is then bisected to a double.
    pub fn real_roots(&self) -> Vec<f64> {
        if self.degree() == Some(2) {
            if let Some(r) = self.quadratic_roots() {
                return r;
            }
        }
        let sf = self.square_free_part();
        let count = sf.count_real_roots();
        if count == 0 {
            return Vec::new();
        }
        if sf.degree() == Some(1) {
            return vec![-rat_to_f64(&(&sf.coeffs[0] / &sf.coeffs[1]))];
        }
        if let Some(roots) = eigen_roots(&sf, count) {
            return roots;
        }
        sturm_roots(&sf, count)
    }
}

/// Roots of a square-free `p` with `count` real roots, isolated in dyadic
/// intervals by exact Sturm counts.
fn sturm_roots(p: &UniPoly, count: usize) -> Vec<f64> {
    let seq = p.sturm_sequence();
    let changes = |t: &Rational| {
        let signs: Vec<Ordering> = seq
            .iter()
            .map(|p| p.eval_exact(t).cmp(&Rational::zero()))
            .filter(|s| *s != Ordering::Equal)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    // Power of two above the Cauchy bound 1 + max |cᵢ / cₙ|.
    let lead = p.leading_coeff();
    let cauchy = p.coeffs.iter().map(|c| (c / &lead).abs()).max().unwrap_or_else(Rational::zero)
        + Rational::one();
    let mut bound = Rational::one();
    while bound <= cauchy {
        bound *= Rational::from_integer(2.into());
    }
    // Each stack entry holds (lo, hi, V(lo), V(hi)); roots counted in (lo, hi].
    let lo = -bound.clone();
    let mut stack = vec![(lo.clone(), bound.clone(), changes(&lo), changes(&bound))];
    let mut roots = Vec::with_capacity(count);
    let half = Rational::new(1.into(), 2.into());
    while let Some((lo, hi, vlo, vhi)) = stack.pop() {
        match vlo - vhi {
            0 => {}
            1 => roots.push(bisect_root(p, &lo, &hi)),
            _ => {
                let mid = (&lo + &hi) * &half;
                let vmid = changes(&mid);
                stack.push((lo, mid.clone(), vlo, vmid));
                stack.push((mid, hi, vmid, vhi));
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// The single root of a square-free `p` in `(lo, hi]`; the dyadic
/// endpoints are exact doubles.
fn bisect_root(p: &UniPoly, lo: &Rational, hi: &Rational) -> f64 {
    let (mut lo, mut hi) = (rat_to_f64(lo), rat_to_f64(hi));
    let oracle = SignOracle::new(p);
    // `p(hi) ≠ 0` fixes the sign on (root, hi]; `lo` may itself be a root.
    let shi = oracle.at(hi);
    if shi == Ordering::Equal {
        return hi;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return oracle.nearer(lo, hi);
        }
        match oracle.at(mid) {
            Ordering::Equal => return mid + 0.0,
            s if s == shi => hi = mid,
            _ => lo = mid,
        }
    }
}

impl UniPoly {
    /// Exact discriminant sign decides the count; the stable formula seeds
    /// the exact refinement.
    fn quadratic_roots(&self) -> Option<Vec<f64>> {
        let (c, b, a) = (&self.coeffs[0], &self.coeffs[1], &self.coeffs[2]);
        let disc = b * b - Rational::from_integer(4.into()) * a * c;
        match disc.cmp(&Rational::zero()) {
            Ordering::Less => Some(Vec::new()),
            Ordering::Equal => Some(vec![rat_to_f64(&(-b / (a * Rational::from_integer(2.into()))))]),
            Ordering::Greater => {
                let (af, bf, cf) = (rat_to_f64(a), rat_to_f64(b), rat_to_f64(c));
                let sq = rat_to_f64(&disc).sqrt();
                let q = -0.5 * (bf + if bf >= 0.0 { sq } else { -sq });
                if q == 0.0 || !q.is_finite() || af == 0.0 {
                    return None;
                }
                let mut roots = vec![refine_exact(self, q / af), refine_exact(self, cf / q)];
                roots.sort_by(f64::total_cmp);
                Some(roots)
            }
        }
    }
}

/// Sign of a polynomial at doubles: Horner in `f64` decides whenever the
/// value clears its error bound, integer arithmetic otherwise.
struct SignOracle {
    c: Vec<f64>,
    ints: Vec<BigInt>,
    slack: f64,
}

impl SignOracle {
    fn new(p: &UniPoly) -> Self {
        let c: Vec<f64> = p.coeffs.iter().map(rat_to_f64).collect();
        let slack = 4.0 * (c.len() as f64 + 2.0) * f64::EPSILON;
        SignOracle {
            c,
            ints: integer_coeffs(p),
            slack,
        }
    }

    fn at(&self, t: f64) -> Ordering {
        let (mut v, mut mag) = (0.0f64, 0.0f64);
        for &ci in self.c.iter().rev() {
            v = v * t + ci;
            mag = mag * t.abs() + ci.abs();
        }
        if v.is_finite() && v.abs() > self.slack * mag {
            return v.partial_cmp(&0.0).expect("finite");
        }
        exact_sign(&self.ints, t)
    }

    /// Whichever of two adjacent doubles has the smaller `|p|`, with `-0.0`
    /// folded into `0.0`.
    fn nearer(&self, lo: f64, hi: f64) -> f64 {
        let eval = |t: f64| self.c.iter().rev().fold(0.0, |acc, c| acc * t + c).abs();
        (if eval(lo) <= eval(hi) { lo } else { hi }) + 0.0
    }
}

/// Bisects to adjacent doubles using exact signs, when `x` is within a
/// small bracket of a simple root.
fn refine_exact(p: &UniPoly, x: f64) -> f64 {
    bracket_root(&SignOracle::new(p), x).unwrap_or(x)
}

/// `None` unless the sign provably changes across `x ± 1e-10 max(1, |x|)`.
fn bracket_root(oracle: &SignOracle, x: f64) -> Option<f64> {
    let delta = 1e-10 * x.abs().max(1.0);
    let (mut lo, mut hi) = (x - delta, x + delta);
    let (slo, shi) = (oracle.at(lo), oracle.at(hi));
    if slo == Ordering::Equal {
        return Some(lo + 0.0);
    }
    if shi == Ordering::Equal {
        return Some(hi + 0.0);
    }
    if slo == shi {
        return None;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match oracle.at(mid) {
            Ordering::Equal => return Some(mid + 0.0),
            s if s == slo => lo = mid,
            _ => hi = mid,
        }
    }
    Some(oracle.nearer(lo, hi))
}

/// Companion-matrix eigenvalues, kept only when they yield `count`
/// distinct roots each bracketed by an exact sign change. For a
/// square-free `p` that accounts for every real root.
fn eigen_roots(p: &UniPoly, count: usize) -> Option<Vec<f64>> {
    let deg = p.degree()?;
    let lead = rat_to_f64(&p.leading_coeff());
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -rat_to_f64(&p.coeffs[i]) / lead;
    }
    if !comp.iter().all(|v| v.is_finite()) {
        return None;
    }
    let schur = Schur::try_new(comp, f64::EPSILON, 200 * deg)?;
    let mut eig: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    eig.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
    let oracle = SignOracle::new(p);
    let mut roots = eig
        .iter()
        .take(count)
        .map(|&(re, _)| bracket_root(&oracle, re))
        .collect::<Option<Vec<f64>>>()?;
    roots.sort_by(f64::total_cmp);
    roots.windows(2).all(|w| w[0] < w[1]).then_some(roots)
}

/// Coefficients times the lcm of their denominators; same signs everywhere.
fn integer_coeffs(p: &UniPoly) -> Vec<BigInt> {
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect()
}

/// Sign of `Σ c_i t^i` at a finite double `t = ±m 2^e`, in integers.
fn exact_sign(c: &[BigInt], t: f64) -> Ordering {
    if !t.is_finite() || c.is_empty() {
        return Ordering::Equal;
    }
    let (mant, exp, sgn) = FloatCore::integer_decode(t);
    let mut m = BigInt::from(mant);
    if sgn < 0 {
        m = -m;
    }
    let d = c.len() - 1;
    let mut acc = c[d].clone();
    if exp >= 0 {
        m <<= exp as usize;
        for ci in c[..d].iter().rev() {
            acc = acc * &m + ci;
        }
    } else {
        // Scaled by 2^(k d) with k = -exp.
        let k = (-(exp as i64)) as usize;
        for (i, ci) in c[..d].iter().enumerate().rev() {
            acc = acc * &m + (ci << (k * (d - i)));
        }
    }
    match acc.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rat;

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&v| rat(v, 1)).collect())
    }

    #[test]
    fn gcd_and_square_free() {
        // (r-1)^2 (r+2)
        let p = up(&[-1, 2, -1]).scale(&rat(-1, 1)).mul(&up(&[2, 1]));
        assert_eq!(p.square_free_part(), up(&[-2, 1, 1]));
        assert_eq!(p.count_real_roots(), 2);
        let g = p.gcd(&up(&[-1, 1]));
        assert_eq!(g, up(&[-1, 1]));
    }

    #[test]
    fn roots_of_products_of_linears() {
        let p = up(&[3, -2]).mul(&up(&[1, -2])); // (3-2r)(1-2r)
        let r = p.real_roots();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.5).abs() < 1e-15 && (r[1] - 1.5).abs() < 1e-15);
        assert!(up(&[1, 0, 1]).real_roots().is_empty());
        assert!(up(&[5]).real_roots().is_empty());
    }

    #[test]
    fn sign_at_infinity_follows_parity() {
        let p = up(&[0, 0, 0, -1]);
        assert_eq!(p.sign_at_infinity(true), Ordering::Less);
        assert_eq!(p.sign_at_infinity(false), Ordering::Greater);
        assert_eq!(UniPoly::zero().sign_at_infinity(true), Ordering::Equal);
    }

    #[test]
    fn poly_roundtrip() {
        let p = up(&[1, 0, -3, 2]);
        assert_eq!(UniPoly::from_poly(&p.to_poly()).unwrap(), p);
    }
}
#[cfg(test)]
mod isolation_tests {
    use super::*;
    use crate::polycore::rat_from_f64;

    /// `r (2.01 - 1.01 r)(1 - 1.01 r)`: the Sturm route splits at `0`, a
    /// root, and must still find the root just above it.
    #[test]
    fn both_routes_agree_with_root_at_split_point() {
        let a = rat_from_f64(2.01).unwrap();
        let b = rat_from_f64(1.01).unwrap();
        let p = UniPoly::linear(a, -b.clone())
            .mul(&UniPoly::linear(Rational::one(), -b))
            .mul(&UniPoly::linear(Rational::zero(), Rational::one()))
            .monic();
        let fast = eigen_roots(&p, 3).unwrap();
        assert_eq!(fast, sturm_roots(&p, 3));
        assert_eq!(fast[0], 0.0);
        assert!((fast[1] - 1.0 / 1.01).abs() < 1e-15);
    }
}
