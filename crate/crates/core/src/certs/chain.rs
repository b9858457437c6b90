//! Composer for the algebraic archimedean argument: from
//! `f (I_n + Q) ∈ I_n + N_G` with `f = R² − ‖x‖²` to
//! `(1 + s)(R² (m/2 + 1)² − ‖x‖²) I_n ∈ N_G`.
//!
//! `Q` is an input: no construction of it is known in general.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    first_mismatch, scalar_mismatch, CertError, HermSosCert, Mismatch, NgElement, Provenance, SosCert,
};
use crate::polycore::{norm_sq_poly, MatPoly, Poly, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EqStep {
    Eq1,
    Eq2,
    Eq3,
    Eq4,
    Eq5,
    Eq6,
    Eq7,
}

impl EqStep {
    pub const ALL: [EqStep; 7] = [
        EqStep::Eq1,
        EqStep::Eq2,
        EqStep::Eq3,
        EqStep::Eq4,
        EqStep::Eq5,
        EqStep::Eq6,
        EqStep::Eq7,
    ];
}

impl fmt::Display for EqStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = EqStep::ALL.iter().position(|s| s == self).unwrap_or(0) + 1;
        write!(f, "eq{k}")
    }
}

mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::polycore::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Everything the chain consumes. `f = R² − ‖x‖²` throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCert {
    #[serde(rename = "R", with = "rational_str")]
    pub radius: Rational,
    /// `Q = Σ HᵀH`.
    #[serde(rename = "Q")]
    pub q_mat: HermSosCert,
    /// `f (I_n + Q) = I_n + eq1`.
    pub eq1: NgElement,
    pub q: SosCert,
    /// `q I_n − Q = Σ KᵀK`.
    pub q_bound: HermSosCert,
    pub m: u64,
    /// `m − 1 − q = s₀ + s₁ f`.
    pub s0: SosCert,
    pub s1: SosCert,
    pub s: SosCert,
    /// `(1 + s)((1 + q) I_n − Q)(I_n + Q) = I_n + eq3`.
    pub eq3: HermSosCert,
    #[serde(default)]
    pub provenance: Provenance,
}

/// `target = element`, with `target = (1 + s)(R²(m/2 + 1)² − ‖x‖²) I_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub target: MatPoly,
    pub scalar: Poly,
    pub element: NgElement,
    pub provenance: Provenance,
}

fn broken(step: EqStep, m: Option<Mismatch>) -> Result<(), CertError> {
    match m {
        None => Ok(()),
        Some(mismatch) => Err(CertError::ChainBroken { step, mismatch }),
    }
}

fn constant(d: usize, c: &Rational) -> Poly {
    Poly::constant(d, c.clone())
}

/// Runs eq1 through eq7, checking each identity exactly before moving on.
pub fn wormann_chain(g: &MatPoly, cert: &ChainCert) -> Result<ChainResult, CertError> {
    let (n, d) = (g.n(), g.nvars());
    let gs = std::slice::from_ref(g);
    let id = MatPoly::identity(n, d);
    let r2 = &cert.radius * &cert.radius;
    let norm = norm_sq_poly(d);
    let f = &constant(d, &r2) - &norm;
    let q_val = cert.q.value(d);
    let q_mat = cert.q_mat.value(n, d)?;
    let i_plus_q = id.checked_add(&q_mat)?;
    let one_s = cert.s.one_plus(d);
    let one_s_val = one_s.value(d);
    let m = Rational::from_integer(cert.m.into());
    let as_element = |h: HermSosCert| NgElement::squares_only(h, 1);
    let id_factor = HermSosCert::new(vec![id.clone()]);

    // eq1: f (I + Q) ∈ I + N_G.
    let lhs1 = i_plus_q.scale_poly(&f)?;
    broken(EqStep::Eq1, first_mismatch(&lhs1, &id.checked_add(&cert.eq1.value(gs)?)?))?;
    let e1 = as_element(id_factor.clone()).plus(&cert.eq1)?;

    // eq2: (m − 1 − q)(I + Q) = s₀ (I + Q) + s₁ f (I + Q) ∈ N_G.
    let arch_lhs = &constant(d, &(&m - Rational::from_integer(1.into()))) - &q_val;
    let arch_rhs = &cert.s0.value(d) + &(&cert.s1.value(d) * &f);
    broken(EqStep::Eq2, scalar_mismatch(&arch_lhs, &arch_rhs))?;
    let bound_lhs = MatPoly::scalar(n, &q_val).checked_sub(&q_mat)?;
    broken(EqStep::Eq2, first_mismatch(&bound_lhs, &cert.q_bound.value(n, d)?))?;
    let i_plus_q_sq = id_factor.plus(&cert.q_mat);
    let e2 = as_element(i_plus_q_sq.weighted(&cert.s0)?).plus(&e1.weighted(&cert.s1)?)?;
    let target2 = i_plus_q.scale_poly(&arch_lhs)?;
    broken(EqStep::Eq2, first_mismatch(&target2, &e2.value(gs)?))?;

    // eq3: (1 + s)((1 + q) I − Q)(I + Q) ∈ I + ΣM².
    let one_q_minus_q = MatPoly::scalar(n, &(&Poly::one(d) + &q_val)).checked_sub(&q_mat)?;
    let lhs3 = one_q_minus_q.checked_mul(&i_plus_q)?.scale_poly(&one_s_val)?;
    broken(EqStep::Eq3, first_mismatch(&lhs3, &id.checked_add(&cert.eq3.value(n, d)?)?))?;
    let e3 = as_element(HermSosCert::new(vec![id.clone()]).plus(&cert.eq3));

    // eq4: (1 + s)(m I − Q)(I + Q) = (1 + s)·eq2 + eq3.
    let e4 = e2.weighted(&one_s)?.plus(&e3)?;
    let m_minus_q = MatPoly::scalar(n, &constant(d, &m)).checked_sub(&q_mat)?;
    let target4 = m_minus_q.checked_mul(&i_plus_q)?.scale_poly(&one_s_val)?;
    broken(EqStep::Eq4, first_mismatch(&target4, &e4.value(gs)?))?;

    // eq5: add (1 + s)(m/2 I − Q)² to reach (1 + s)((m²/4 + m) I − Q).
    let half_m = &m / Rational::from_integer(2.into());
    let half_m_minus_q = MatPoly::scalar(n, &constant(d, &half_m)).checked_sub(&q_mat)?;
    let e5 = e4.plus(&as_element(HermSosCert::new(vec![half_m_minus_q]).weighted(&one_s)?))?;
    let c5 = &(&half_m * &half_m) + &m;
    let inner5 = MatPoly::scalar(n, &constant(d, &c5)).checked_sub(&q_mat)?;
    let target5 = inner5.scale_poly(&one_s_val)?;
    broken(EqStep::Eq5, first_mismatch(&target5, &e5.value(gs)?))?;

    // eq6: R²·eq5 + (1 + s)·eq1 + (1 + s)‖x‖² Q.
    let r_sos = SosCert::new(vec![constant(d, &cert.radius)]);
    let coords = SosCert::new((0..d).map(|i| Poly::var(d, i)).collect());
    let e6 = e5
        .weighted(&r_sos)?
        .plus(&e1.weighted(&one_s)?)?
        .plus(&as_element(cert.q_mat.weighted(&coords.times(&one_s))?))?;
    let target6 = target5
        .scale(&r2)
        .checked_add(&lhs1.scale_poly(&one_s_val)?)?
        .checked_add(&q_mat.scale_poly(&(&norm * &one_s_val))?)?;
    broken(EqStep::Eq6, first_mismatch(&target6, &e6.value(gs)?))?;

    // eq7: the same element equals (1 + s)(R²(m/2 + 1)² − ‖x‖²) I.
    let c7 = &half_m + Rational::from_integer(1.into());
    let scalar = &(&constant(d, &(&r2 * &c7 * &c7)) - &norm) * &one_s_val;
    let target7 = MatPoly::scalar(n, &scalar);
    broken(EqStep::Eq7, first_mismatch(&target7, &e6.value(gs)?))?;

    let provenance = Provenance::node(
        "chain",
        format!("R = {}, m = {}", cert.radius, cert.m),
        EqStep::ALL.iter().map(|s| Provenance::leaf(&s.to_string())).collect(),
    );
    Ok(ChainResult {
        target: target7,
        scalar,
        element: e6,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certs::fixtures;

    #[test]
    fn negative_identity_chain() {
        let (g, cert) = fixtures::chain_negative_identity();
        let out = wormann_chain(&g, &cert).unwrap();
        // (1 + s)(9/4 − x²) with s = 0.
        assert_eq!(out.scalar, &Poly::constant(1, crate::polycore::rat(9, 4)) - &Poly::var(1, 0).square());
        assert_eq!(out.element.value(&[g]).unwrap(), out.target);
    }

    #[test]
    fn planted_chains_compose() {
        for seed in 0..6 {
            let (g, cert) = fixtures::planted_chain(seed);
            let out = wormann_chain(&g, &cert).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(out.element.value(&[g]).unwrap(), out.target);
        }
    }

    #[test]
    fn corrupt_s1_breaks_eq2() {
        let (g, mut cert) = fixtures::planted_chain(1);
        cert.s1.squares.push(Poly::one(g.nvars()));
        match wormann_chain(&g, &cert) {
            Err(CertError::ChainBroken { step, .. }) => assert_eq!(step, EqStep::Eq2),
            other => panic!("expected eq2 failure, got {other:?}"),
        }
    }

    #[test]
    fn chain_json_roundtrip() {
        let (_, cert) = fixtures::planted_chain(0);
        let text = serde_json::to_string(&cert).unwrap();
        let back: ChainCert = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
