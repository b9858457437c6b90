//! Certificate combinators. Each one follows the rewriting steps of the
//! matching proof and re-checks every intermediate identity exactly, so a
//! returned certificate has already been verified once.

use serde::{Deserialize, Serialize};

use super::{
    check_target, common_shape, first_mismatch, one_plus_times, scalar_mismatch, verify_og, verify_wqm, CertError,
    HermSosCert, NgElement, OgCert, Provenance, SosCert, Verdict, WqmCert,
};
use crate::polycore::{MatPoly, Poly};

/// `h I_n + M = Σ KᵀK` with `h` a sum of squares: the shift that makes `M`
/// a sum of hermitian squares.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShiftCert {
    pub h: SosCert,
    pub herm: HermSosCert,
}

/// `(1 + s) F − (1 + t) G = I_n + Σ HᵀH`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitCert {
    pub s: SosCert,
    pub t: SosCert,
    pub herm: HermSosCert,
    #[serde(default)]
    pub provenance: Provenance,
}

/// `(1 + s₁) q² = 1 + t`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DenominatorCert {
    pub s1: SosCert,
    pub t: SosCert,
}

/// `(1 + s) (q² F − p q G) = I_n + Σ HᵀH`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PencilCert {
    pub s: SosCert,
    pub herm: HermSosCert,
}

fn require(verdict: Verdict, which: &str) -> Result<(), CertError> {
    match verdict {
        Verdict::Verified => Ok(()),
        Verdict::Mismatch(mismatch) => Err(CertError::InputFails {
            which: which.into(),
            mismatch,
        }),
    }
}

fn self_check(lhs: &MatPoly, rhs: &MatPoly, step: &str) -> Result<(), CertError> {
    match first_mismatch(lhs, rhs) {
        None => Ok(()),
        Some(mismatch) => Err(CertError::SelfCheck {
            step: step.into(),
            mismatch,
        }),
    }
}

fn one_plus(nvars: usize, s: &SosCert) -> Poly {
    &Poly::one(nvars) + &s.value(nvars)
}

/// Row factor `e₁ wᵀ`, whose hermitian square is `w wᵀ`.
fn row_factor(w: Vec<Poly>, nvars: usize) -> MatPoly {
    let n = w.len();
    let mut entries = vec![Poly::zero(nvars); n * n];
    for (j, v) in w.into_iter().enumerate() {
        entries[j] = v;
    }
    MatPoly::new(n, nvars, entries).expect("row factor shape")
}

/// A shift `h` with `h I_n + M = Σ KᵀK`, for symmetric `M`.
///
/// With `G = −M`, `p = (g + 1)/2` and `m = (g − 1)/2` for each entry `g`:
/// `p² − m² = g` and `p² + m² = (g² + 1)/2`. Diagonal entries contribute
/// `p² E_ii − g E_ii = m² E_ii`; off-diagonal pairs contribute
/// `(p² + m²)(E_ii + E_jj) − g(E_ij + E_ji) = p²(e_i − e_j)(·)ᵀ + m²(e_i + e_j)(·)ᵀ`.
/// `h` is the sum over rows of those diagonal loads, and each row's slack is
/// a sum of the other rows' squares.
pub fn shift_for(m: &MatPoly) -> Result<ShiftCert, CertError> {
    m.require_symmetric()?;
    let (n, d) = (m.n(), m.nvars());
    let half = crate::polycore::rat(1, 2);
    let one = Poly::one(d);
    let unit = |i: usize, c: Poly| {
        let mut w = vec![Poly::zero(d); n];
        w[i] = c;
        w
    };
    let mut loads: Vec<Vec<Poly>> = vec![vec![]; n];
    let mut factors = Vec::new();
    for i in 0..n {
        let g = -m.get(i, i);
        if !g.is_zero() {
            let p = (&g + &one).scale(&half);
            let q = (&g - &one).scale(&half);
            loads[i].push(p);
            factors.push(row_factor(unit(i, q), d));
        }
        for j in i + 1..n {
            let g = -m.get(i, j);
            if g.is_zero() {
                continue;
            }
            let p = (&g + &one).scale(&half);
            let q = (&g - &one).scale(&half);
            for k in [i, j] {
                loads[k].push(p.clone());
                loads[k].push(q.clone());
            }
            let mut w = unit(i, p.clone());
            w[j] = -&p;
            factors.push(row_factor(w, d));
            let mut w = unit(i, q.clone());
            w[j] = q.clone();
            factors.push(row_factor(w, d));
        }
    }
    for i in 0..n {
        for (k, load) in loads.iter().enumerate() {
            if k != i {
                for r in load {
                    factors.push(row_factor(unit(i, r.clone()), d));
                }
            }
        }
    }
    let cert = ShiftCert {
        h: SosCert::new(loads.into_iter().flatten().collect()),
        herm: HermSosCert::new(factors),
    };
    if let Verdict::Mismatch(mismatch) = verify_shift(m, &cert)? {
        return Err(CertError::SelfCheck {
            step: "hI + M".into(),
            mismatch,
        });
    }
    Ok(cert)
}

pub fn verify_shift(m: &MatPoly, cert: &ShiftCert) -> Result<Verdict, CertError> {
    let (n, nvars) = (m.n(), m.nvars());
    let lhs = MatPoly::scalar(n, &cert.h.value(nvars)).checked_add(m)?;
    let rhs = cert.herm.value(n, nvars)?;
    Ok(first_mismatch(&lhs, &rhs).map_or(Verdict::Verified, Verdict::Mismatch))
}

pub fn verify_split(f: &MatPoly, g: &MatPoly, cert: &SplitCert) -> Result<Verdict, CertError> {
    let (n, nvars) = (g.n(), g.nvars());
    check_target(f, n, nvars)?;
    let lhs = one_plus_times(&cert.s, f)?.checked_sub(&one_plus_times(&cert.t, g)?)?;
    let rhs = MatPoly::identity(n, nvars).checked_add(&cert.herm.value(n, nvars)?)?;
    Ok(first_mismatch(&lhs, &rhs).map_or(Verdict::Verified, Verdict::Mismatch))
}

pub fn verify_denominator(q: &Poly, cert: &DenominatorCert) -> Verdict {
    let d = q.nvars();
    let lhs = &one_plus(d, &cert.s1) * &q.square();
    scalar_mismatch(&lhs, &one_plus(d, &cert.t)).map_or(Verdict::Verified, Verdict::Mismatch)
}

pub fn verify_pencil(f: &MatPoly, g: &MatPoly, p: &Poly, q: &Poly, cert: &PencilCert) -> Result<Verdict, CertError> {
    let (n, nvars) = (g.n(), g.nvars());
    check_target(f, n, nvars)?;
    let h = f.scale_poly(&q.square())?.checked_sub(&g.scale_poly(&(p * q))?)?;
    let lhs = one_plus_times(&cert.s, &h)?;
    let rhs = MatPoly::identity(n, nvars).checked_add(&cert.herm.value(n, nvars)?)?;
    Ok(first_mismatch(&lhs, &rhs).map_or(Verdict::Verified, Verdict::Mismatch))
}

/// From `t F = I_n + N` and `h I_n + F = Σ KᵀK` to `(1 + s) F ∈ I_n + N_G`
/// with `u = 1 + (1 + h) t` and `s = (1 + h) u²`.
///
/// Step one multiplies by `1 + h` and adds `F`, giving `u F = I_n + N₂`;
/// step two multiplies by `u`; step three repeats step one on `u² F`.
pub fn htrick_combine(
    f: &MatPoly,
    gs: &[MatPoly],
    t: &SosCert,
    t_f: &NgElement,
    shift: &ShiftCert,
) -> Result<WqmCert, CertError> {
    let (n, d) = common_shape(gs)?;
    check_target(f, n, d)?;
    let id = MatPoly::identity(n, d);
    let t_val = t.value(d);
    require(
        first_mismatch(&f.scale_poly(&t_val)?, &id.checked_add(&t_f.value(gs)?)?)
            .map_or(Verdict::Verified, Verdict::Mismatch),
        "tF",
    )?;
    require(verify_shift(f, shift)?, "h")?;

    let one_h = shift.h.one_plus(d);
    let k_part = NgElement::squares_only(shift.herm.clone(), gs.len());

    // u F = (1 + h) t F + F = I_n + (1 + h) N + Σ KᵀK.
    let n2 = t_f.weighted(&one_h)?.plus(&k_part)?;
    let u_minus_1 = t.times(&one_h);
    let u_sos = u_minus_1.one_plus(d);
    let u = u_sos.value(d);
    self_check(&f.scale_poly(&u)?, &id.checked_add(&n2.value(gs)?)?, "uF")?;

    // u² F = u (I_n + N₂) = I_n + (u − 1) I_n + u N₂.
    let n3 = NgElement::squares_only(HermSosCert::scalar(&u_minus_1, n), gs.len()).plus(&n2.weighted(&u_sos)?)?;
    let u2 = u.square();
    self_check(&f.scale_poly(&u2)?, &id.checked_add(&n3.value(gs)?)?, "u²F")?;

    // (1 + h) u² F + F = I_n + (1 + h) N₃ + Σ KᵀK.
    let rest = n3.weighted(&one_h)?.plus(&k_part)?;
    let s = SosCert::new(vec![u.clone()]).plus(&shift.h.times_square(&u));
    let cert = WqmCert {
        s,
        herm: rest.herm,
        g_multipliers: rest.multipliers,
        provenance: Provenance::node(
            "htrick",
            "u = 1 + (1+h)t, s = (1+h)u²",
            vec![
                Provenance::leaf("tF ∈ I + N"),
                Provenance::leaf("hI + F ∈ ΣM²"),
                Provenance::leaf("uF ∈ I + N"),
                Provenance::leaf("u²F ∈ I + N"),
                Provenance::leaf("(1+s)F ∈ I + N"),
            ],
        ),
    };
    if let Verdict::Mismatch(mismatch) = verify_wqm(f, gs, &cert)? {
        return Err(CertError::SelfCheck {
            step: "(1+s)F".into(),
            mismatch,
        });
    }
    Ok(cert)
}

/// From `(1 + s) F = I_n + W + σ G` and `h I_n − G = Σ KᵀK` to the split form
/// `(1 + h)(1 + s) F − (1 + (1 + h) σ) G = I_n + (1 + h) W + Σ KᵀK`.
pub fn wqm_to_split(f: &MatPoly, g: &MatPoly, cert: &WqmCert, shift: &ShiftCert) -> Result<SplitCert, CertError> {
    let gs = std::slice::from_ref(g);
    require(verify_wqm(f, gs, cert)?, "(1+s)F ∈ I + N_G")?;
    require(verify_shift(&g.neg(), shift)?, "hI − G")?;
    let sigma = cert
        .g_multipliers
        .first()
        .ok_or_else(|| CertError::Shape("expected one multiplier".into()))?;
    let split = SplitCert {
        s: shift.h.plus(&cert.s).plus(&shift.h.times(&cert.s)),
        t: sigma.plus(&shift.h.times(sigma)),
        herm: cert.herm.weighted(&shift.h.one_plus(g.nvars()))?.plus(&shift.herm),
        provenance: Provenance::node("split", "multiply by 1+h, absorb hI − G", vec![cert.provenance.clone()]),
    };
    if let Verdict::Mismatch(mismatch) = verify_split(f, g, &split)? {
        return Err(CertError::SelfCheck {
            step: "split".into(),
            mismatch,
        });
    }
    Ok(split)
}

/// Lifts `(1 + s) F − (1 + t) G = I_n + W` to
/// `(1 + s) F̃ − p G̃ = I_{n+1} + W ⊕ z` with `z = t`, `p = 1 + z`,
/// `F̃ = F ⊕ 0` and `G̃ = G ⊕ −1`.
pub fn btoa_transform(f: &MatPoly, g: &MatPoly, cert: &SplitCert) -> Result<OgCert, CertError> {
    require(verify_split(f, g, cert)?, "(1+s')F − (1+t')G")?;
    let d = g.nvars();
    let zero = Poly::zero(d);
    let mut factors = Vec::with_capacity(cert.herm.factors.len() + cert.t.squares.len());
    for h in &cert.herm.factors {
        factors.push(h.direct_sum(&zero)?);
    }
    for z in &cert.t.squares {
        factors.push(MatPoly::zeros(g.n(), d).direct_sum(z)?);
    }
    let lifted = OgCert {
        s: cert.s.clone(),
        herm: HermSosCert::new(factors),
        g_multiplier: one_plus(d, &cert.t),
        provenance: Provenance::node("btoa", "p = 1 + z", vec![cert.provenance.clone()]),
    };
    let (ft, gt) = crate::catalog::lift(f, g);
    if let Verdict::Mismatch(mismatch) = verify_og(&ft, &gt, &lifted)? {
        return Err(CertError::SelfCheck {
            step: "lifted".into(),
            mismatch,
        });
    }
    Ok(lifted)
}

fn block_kind(h: &MatPoly) -> Option<bool> {
    // Some(true): H' ⊕ 0, Some(false): 0 ⊕ z, None: neither. An all-zero
    // factor counts as the former.
    let n = h.n() - 1;
    let border_zero = (0..n).all(|i| h.get(i, n).is_zero() && h.get(n, i).is_zero());
    if !border_zero {
        return None;
    }
    if h.get(n, n).is_zero() {
        return Some(true);
    }
    let top_zero = (0..n).all(|i| (0..n).all(|j| h.get(i, j).is_zero()));
    top_zero.then_some(false)
}

/// Splits a lifted certificate back into the form
/// `(1 + s) F − (1 + z) G = I_n + W`.
pub fn btoa_inverse(f: &MatPoly, g: &MatPoly, lifted: &OgCert) -> Result<SplitCert, CertError> {
    let (ft, gt) = crate::catalog::lift(f, g);
    require(verify_og(&ft, &gt, lifted)?, "lifted")?;
    let n = g.n();
    let mut herm = Vec::new();
    let mut z = Vec::new();
    for (i, h) in lifted.herm.factors.iter().enumerate() {
        match block_kind(h) {
            Some(true) => herm.push(h.leading_block(n)),
            Some(false) => z.push(h.get(n, n).clone()),
            None => return Err(CertError::BlockStructure(format!("factor {} mixes the two blocks", i + 1))),
        }
    }
    let t = SosCert::new(z);
    let d = g.nvars();
    if lifted.g_multiplier != one_plus(d, &t) {
        return Err(CertError::BlockStructure("multiplier p differs from 1 + z".into()));
    }
    Ok(SplitCert {
        s: lifted.s.clone(),
        t,
        herm: HermSosCert::new(herm),
        provenance: Provenance::node("btoa⁻¹", "W ⊕ z split", vec![lifted.provenance.clone()]),
    })
}

/// From `r = p/q` with `(1 + s₁) q² = 1 + t` and
/// `(1 + s₂)(q² F − p q G) = I_n + Σ HᵀH` to
/// `(1 + t)(1 + s₂) F = I_n + s₁ I_n + (1 + s₁) Σ HᵀH + (1 + s₁)(1 + s₂) p q G`.
///
/// The product `(1 + t)(1 + s₂)` already has the form `1 + s`, so no further
/// normalization is needed.
pub fn rational_to_certificate(
    f: &MatPoly,
    g: &MatPoly,
    p: &Poly,
    q: &Poly,
    cert_q: &DenominatorCert,
    cert_h: &PencilCert,
) -> Result<OgCert, CertError> {
    let d = g.nvars();
    if p.nvars() != d || q.nvars() != d {
        return Err(CertError::Shape("p and q must live in the variables of G".into()));
    }
    require(verify_denominator(q, cert_q), "(1+s₁)q² = 1+t")?;
    require(verify_pencil(f, g, p, q, cert_h)?, "(1+s₂)(q²F − pqG)")?;
    let t = &cert_q.t;
    let s2 = &cert_h.s;
    let one_s1 = cert_q.s1.one_plus(d);
    let cert = OgCert {
        s: t.plus(s2).plus(&t.times(s2)),
        herm: HermSosCert::scalar(&cert_q.s1, g.n()).plus(&cert_h.herm.weighted(&one_s1)?),
        g_multiplier: &(&one_s1.value(d) * &one_plus(d, s2)) * &(p * q),
        provenance: Provenance::node(
            "rational",
            "(1+t)(1+s₂)F ∈ I + O_G",
            vec![Provenance::leaf("(1+s₁)q² = 1+t"), Provenance::leaf("(1+s₂)(q²F − pqG) ∈ I + ΣM²")],
        ),
    };
    if let Verdict::Mismatch(mismatch) = verify_og(f, g, &cert)? {
        return Err(CertError::SelfCheck {
            step: "(1+s)F".into(),
            mismatch,
        });
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certs::fixtures;

    #[test]
    fn htrick_with_zero_t_gives_one_plus_h() {
        let inst = fixtures::planted_htrick(3, true);
        let cert = htrick_combine(&inst.f, &inst.gs, &inst.t, &inst.t_f, &inst.shift).unwrap();
        let d = inst.f.nvars();
        let one_h = &Poly::one(d) + &inst.shift.h.value(d);
        assert_eq!(cert.s.value(d), one_h);
    }

    #[test]
    fn htrick_output_verifies() {
        for seed in 0..5 {
            let inst = fixtures::planted_htrick(seed, false);
            let cert = htrick_combine(&inst.f, &inst.gs, &inst.t, &inst.t_f, &inst.shift).unwrap();
            assert!(verify_wqm(&inst.f, &inst.gs, &cert).unwrap().is_verified());
        }
    }

    #[test]
    fn htrick_rejects_a_broken_input() {
        let inst = fixtures::planted_htrick(1, false);
        let mut t = inst.t.clone();
        t.squares.push(Poly::one(inst.f.nvars()));
        assert!(matches!(
            htrick_combine(&inst.f, &inst.gs, &t, &inst.t_f, &inst.shift),
            Err(CertError::InputFails { .. })
        ));
    }

    #[test]
    fn btoa_roundtrip() {
        for seed in 0..5 {
            let inst = fixtures::planted_split(seed);
            let lifted = btoa_transform(&inst.f, &inst.g, &inst.cert).unwrap();
            let d = inst.g.nvars();
            let z = &lifted.g_multiplier - &Poly::one(d);
            assert_eq!(z, inst.cert.t.value(d));
            let back = btoa_inverse(&inst.f, &inst.g, &lifted).unwrap();
            assert_eq!(back.s, inst.cert.s);
            assert_eq!(back.t, inst.cert.t);
            assert_eq!(back.herm, inst.cert.herm);
        }
    }

    #[test]
    fn btoa_with_zero_z() {
        let inst = fixtures::planted_split_with(2, false);
        assert!(inst.cert.t.squares.is_empty());
        let lifted = btoa_transform(&inst.f, &inst.g, &inst.cert).unwrap();
        assert_eq!(lifted.g_multiplier, Poly::one(inst.g.nvars()));
    }

    #[test]
    fn btoa_inverse_needs_block_structure() {
        let inst = fixtures::planted_split(0);
        let mut lifted = btoa_transform(&inst.f, &inst.g, &inst.cert).unwrap();
        let n = inst.g.n() + 1;
        let d = inst.g.nvars();
        // E_{1,n+1} - E_{n+1,1} has H^T H = E_11 + E_{n+1,n+1}, which is not
        // of block form; compensate so the identity still holds.
        let mixed = MatPoly::elementary(n, d, 0, n - 1).checked_sub(&MatPoly::elementary(n, d, n - 1, 0)).unwrap();
        let split_a = MatPoly::elementary(n, d, 0, 0);
        let split_b = MatPoly::elementary(n, d, n - 1, n - 1);
        let pos = lifted
            .herm
            .factors
            .iter()
            .position(|h| h == &split_a)
            .or_else(|| lifted.herm.factors.iter().position(|h| h == &split_b));
        if let Some(i) = pos {
            lifted.herm.factors.remove(i);
            lifted.herm.factors.push(mixed);
        } else {
            lifted.herm.factors.push(split_a);
        }
        assert!(btoa_inverse(&inst.f, &inst.g, &lifted).is_err());
    }

    #[test]
    fn shift_for_general_symmetric() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let m = MatPoly::from_rows(
            2,
            vec![
                vec![&x * &y, &x - &Poly::one(2), Poly::zero(2)],
                vec![&x - &Poly::one(2), -&y.square(), y.clone()],
                vec![Poly::zero(2), y.clone(), Poly::from_i64(2, -3)],
            ],
        )
        .unwrap();
        let shift = shift_for(&m).unwrap();
        assert!(verify_shift(&m, &shift).unwrap().is_verified());
    }

    #[test]
    fn wqm_to_split_then_lift() {
        let (_, g) = crate::catalog::odd_degree_pair();
        let f = MatPoly::identity(2, 1).checked_add(&g).unwrap();
        let cert = WqmCert {
            g_multipliers: vec![SosCert::new(vec![Poly::one(1)])],
            ..Default::default()
        };
        let shift = shift_for(&g.neg()).unwrap();
        let split = wqm_to_split(&f, &g, &cert, &shift).unwrap();
        let lifted = btoa_transform(&f, &g, &split).unwrap();
        let (ft, gt) = crate::catalog::lift(&f, &g);
        assert!(verify_og(&ft, &gt, &lifted).unwrap().is_verified());
    }

    #[test]
    fn rational_with_trivial_denominator_relabels() {
        let (f, g) = crate::catalog::diag_pair();
        let (p, q, cq, ch) = fixtures::diag_pair_pencil();
        let cert = rational_to_certificate(&f, &g, &p, &q, &cq, &ch).unwrap();
        assert!(verify_og(&f, &g, &cert).unwrap().is_verified());
        // q = 1, s₁ = t = 0: the multiplier is (1 + s₂) p.
        let d = 1;
        assert_eq!(cert.g_multiplier, &(&Poly::one(d) + &ch.s.value(d)) * &p);
        assert_eq!(cert.s, ch.s);
    }

    #[test]
    fn rational_rejects_mutated_denominator() {
        let (f, g) = crate::catalog::diag_pair();
        let (p, q, mut cq, ch) = fixtures::diag_pair_pencil();
        cq.t.squares.push(Poly::one(1));
        assert!(matches!(
            rational_to_certificate(&f, &g, &p, &q, &cq, &ch),
            Err(CertError::InputFails { .. })
        ));
    }

    #[test]
    fn planted_rational_certificates_verify() {
        for seed in 0..5 {
            let inst = fixtures::planted_rational(seed);
            let cert = rational_to_certificate(&inst.f, &inst.g, &inst.p, &inst.q, &inst.cert_q, &inst.cert_h).unwrap();
            assert!(verify_og(&inst.f, &inst.g, &cert).unwrap().is_verified());
        }
    }
}
