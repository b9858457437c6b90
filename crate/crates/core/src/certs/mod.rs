//! Exact certificates for membership in `I_n + N_G`, `I_n + O_G` and
//! `I_n + J + J^T`, combinators that turn one certificate into another, and
//! a bounded ledger for the scalar part of the weak preordering `T_G`.
//!
//! Every check is a polynomial identity over the rationals; no tolerance
//! appears anywhere in this module. Certificates are never synthesized
//! numerically: they come from the combinators, planted constructions or
//! hand-built fixtures.

mod chain;
mod combinators;
pub mod fixtures;
mod ledger;
mod squares;

pub use chain::{wormann_chain, ChainCert, ChainResult, EqStep};
pub use combinators::{
    btoa_inverse, btoa_transform, htrick_combine, rational_to_certificate, shift_for, verify_denominator, verify_pencil,
    verify_shift, verify_split, wqm_to_split, DenominatorCert, PencilCert, ShiftCert, SplitCert,
};
pub use ledger::{
    parity_invariant, parity_invariant_check, tg_ledger_build, LedgerCaps, LedgerEntry, LedgerProvenance, TgLedger,
};
pub use squares::rational_squares;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polycore::{MatPoly, Monomial, Poly, PolyError};

#[derive(Debug, Error)]
pub enum CertError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input certificate `{which}` does not verify: {mismatch}")]
    InputFails { which: String, mismatch: Mismatch },
    #[error("{step} does not hold: {mismatch}")]
    ChainBroken { step: EqStep, mismatch: Mismatch },
    #[error("composed identity `{step}` does not hold: {mismatch}")]
    SelfCheck { step: String, mismatch: Mismatch },
    #[error("lifted certificate lacks the W ⊕ z block structure: {0}")]
    BlockStructure(String),
    #[error("decomposition fails: {0}")]
    Decomposition(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// First place where the two sides of an identity differ. `row` and `col`
/// are one-based, as printed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub monomial: Vec<u32>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "entry ({},{}), monomial {}: lhs coefficient {}, rhs coefficient {}",
            self.row,
            self.col,
            Monomial::new(self.monomial.clone()),
            self.lhs,
            self.rhs
        )
    }
}

/// Row-major, then monomial order.
pub fn first_mismatch(lhs: &MatPoly, rhs: &MatPoly) -> Option<Mismatch> {
    let (i, j, m) = lhs.first_difference(rhs)?;
    Some(Mismatch {
        row: i + 1,
        col: j + 1,
        monomial: m.exps().to_vec(),
        lhs: lhs.get(i, j).coeff(&m).to_string(),
        rhs: rhs.get(i, j).coeff(&m).to_string(),
    })
}

pub(crate) fn scalar_mismatch(lhs: &Poly, rhs: &Poly) -> Option<Mismatch> {
    first_mismatch(&MatPoly::scalar(1, lhs), &MatPoly::scalar(1, rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Mismatch(Mismatch),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    pub fn mismatch(&self) -> Option<&Mismatch> {
        match self {
            Verdict::Verified => None,
            Verdict::Mismatch(m) => Some(m),
        }
    }

    fn compare(lhs: &MatPoly, rhs: &MatPoly) -> Verdict {
        first_mismatch(lhs, rhs).map_or(Verdict::Verified, Verdict::Mismatch)
    }
}

/// Where a certificate came from, one node per rewriting step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Provenance>,
}

impl Provenance {
    pub fn leaf(rule: &str) -> Self {
        Provenance {
            rule: rule.into(),
            note: None,
            children: vec![],
        }
    }

    pub fn node(rule: &str, note: impl Into<String>, children: Vec<Provenance>) -> Self {
        Provenance {
            rule: rule.into(),
            note: Some(note.into()),
            children,
        }
    }
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance::leaf("given")
    }
}

/// `Σ qᵢ²`; the empty list is zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SosCert {
    pub squares: Vec<Poly>,
}

impl SosCert {
    pub fn new(squares: Vec<Poly>) -> Self {
        SosCert { squares }
    }

    pub fn zero() -> Self {
        SosCert::default()
    }

    pub fn value(&self, nvars: usize) -> Poly {
        self.squares.iter().fold(Poly::zero(nvars), |acc, q| &acc + &q.square())
    }

    /// `1 + s`, as squares.
    pub fn one_plus(&self, nvars: usize) -> SosCert {
        let mut squares = vec![Poly::one(nvars)];
        squares.extend(self.squares.iter().cloned());
        SosCert { squares }
    }

    /// `a + b`.
    pub fn plus(&self, other: &SosCert) -> SosCert {
        let mut squares = self.squares.clone();
        squares.extend(other.squares.iter().cloned());
        SosCert { squares }
    }

    /// `a · b`, as the pairwise products of roots.
    pub fn times(&self, other: &SosCert) -> SosCert {
        let mut squares = Vec::with_capacity(self.squares.len() * other.squares.len());
        for a in &self.squares {
            for b in &other.squares {
                squares.push(a * b);
            }
        }
        SosCert { squares }
    }

    /// `p² · s`.
    pub fn times_square(&self, p: &Poly) -> SosCert {
        SosCert {
            squares: self.squares.iter().map(|q| q * p).collect(),
        }
    }

    fn check(&self, nvars: usize, what: &str) -> Result<(), CertError> {
        match self.squares.iter().find(|q| q.nvars() != nvars) {
            Some(q) => Err(CertError::Shape(format!(
                "{what}: a square root has {} variables, expected {nvars}",
                q.nvars()
            ))),
            None => Ok(()),
        }
    }
}

/// `Σ Hᵢᵀ Hᵢ`; the factors need not be symmetric.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermSosCert {
    pub factors: Vec<MatPoly>,
}

impl HermSosCert {
    pub fn new(factors: Vec<MatPoly>) -> Self {
        HermSosCert { factors }
    }

    pub fn value(&self, n: usize, nvars: usize) -> Result<MatPoly, CertError> {
        self.check(n, nvars, "hermitian squares")?;
        Ok(crate::polycore::herm_square_sum(n, nvars, &self.factors)?)
    }

    /// `s · I_n` as the factors `qᵢ I_n`.
    pub fn scalar(s: &SosCert, n: usize) -> HermSosCert {
        HermSosCert {
            factors: s.squares.iter().map(|q| MatPoly::scalar(n, q)).collect(),
        }
    }

    /// `s · Σ HᵀH` as the factors `qᵢ Hⱼ`.
    pub fn weighted(&self, s: &SosCert) -> Result<HermSosCert, CertError> {
        let mut factors = Vec::with_capacity(self.factors.len() * s.squares.len());
        for q in &s.squares {
            for h in &self.factors {
                factors.push(h.scale_poly(q)?);
            }
        }
        Ok(HermSosCert { factors })
    }

    pub fn plus(&self, other: &HermSosCert) -> HermSosCert {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        HermSosCert { factors }
    }

    fn check(&self, n: usize, nvars: usize, what: &str) -> Result<(), CertError> {
        match self.factors.iter().find(|h| h.n() != n || h.nvars() != nvars) {
            Some(h) => Err(CertError::Shape(format!(
                "{what}: factor is {}x{} in {} variables, expected {n}x{n} in {nvars}",
                h.n(),
                h.n(),
                h.nvars()
            ))),
            None => Ok(()),
        }
    }
}

/// `Σ HᵀH + Σ σⱼ Gⱼ`, an element of `N_G` for the listed `Gⱼ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NgElement {
    pub herm: HermSosCert,
    pub multipliers: Vec<SosCert>,
}

impl NgElement {
    pub fn value(&self, gs: &[MatPoly]) -> Result<MatPoly, CertError> {
        let (n, nvars) = common_shape(gs)?;
        if self.multipliers.len() != gs.len() {
            return Err(CertError::Shape(format!(
                "{} multipliers for {} constraint matrices",
                self.multipliers.len(),
                gs.len()
            )));
        }
        let mut acc = self.herm.value(n, nvars)?;
        for (sigma, g) in self.multipliers.iter().zip(gs) {
            sigma.check(nvars, "multiplier")?;
            acc = acc.checked_add(&g.scale_poly(&sigma.value(nvars))?)?;
        }
        Ok(acc)
    }

    /// `s · self`.
    pub fn weighted(&self, s: &SosCert) -> Result<NgElement, CertError> {
        Ok(NgElement {
            herm: self.herm.weighted(s)?,
            multipliers: self.multipliers.iter().map(|m| m.times(s)).collect(),
        })
    }

    pub fn plus(&self, other: &NgElement) -> Result<NgElement, CertError> {
        if self.multipliers.len() != other.multipliers.len() {
            return Err(CertError::Shape("adding elements of different N_G".into()));
        }
        Ok(NgElement {
            herm: self.herm.plus(&other.herm),
            multipliers: self.multipliers.iter().zip(&other.multipliers).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    /// A pure sum of hermitian squares, with zero multipliers.
    pub fn squares_only(herm: HermSosCert, ngens: usize) -> NgElement {
        NgElement {
            herm,
            multipliers: vec![SosCert::zero(); ngens],
        }
    }
}

/// `(1 + s) F = I_n + Σ HᵀH + Σ σⱼ Gⱼ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WqmCert {
    pub s: SosCert,
    pub herm: HermSosCert,
    #[serde(rename = "multipliers")]
    pub g_multipliers: Vec<SosCert>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl WqmCert {
    pub fn rest(&self) -> NgElement {
        NgElement {
            herm: self.herm.clone(),
            multipliers: self.g_multipliers.clone(),
        }
    }
}

/// `(1 + s) F = I_n + Σ HᵀH + p G` with `p` of either sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OgCert {
    pub s: SosCert,
    pub herm: HermSosCert,
    #[serde(rename = "multipliers")]
    pub g_multiplier: Poly,
    #[serde(default)]
    pub provenance: Provenance,
}

/// `(1 + s) F = I_n + Σ HᵀH + Σ (Aᵢ Gᵢ + (Aᵢ Gᵢ)ᵀ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealCert {
    pub s: SosCert,
    pub herm: HermSosCert,
    #[serde(rename = "multipliers")]
    pub left_factors: Vec<MatPoly>,
    #[serde(default)]
    pub provenance: Provenance,
}

/// The wire format: `{"kind": "wqm" | "og" | "ideal" | "chain", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Wqm(WqmCert),
    Og(OgCert),
    Ideal(IdealCert),
    Chain(ChainCert),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Wqm(_) => "wqm",
            Certificate::Og(_) => "og",
            Certificate::Ideal(_) => "ideal",
            Certificate::Chain(_) => "chain",
        }
    }
}

pub(crate) fn common_shape(gs: &[MatPoly]) -> Result<(usize, usize), CertError> {
    let first = gs
        .first()
        .ok_or_else(|| CertError::Shape("at least one constraint matrix is required".into()))?;
    if let Some(g) = gs.iter().find(|g| g.n() != first.n() || g.nvars() != first.nvars()) {
        return Err(CertError::Shape(format!(
            "constraint matrices disagree: {}x{} in {} variables vs {}x{} in {}",
            first.n(),
            first.n(),
            first.nvars(),
            g.n(),
            g.n(),
            g.nvars()
        )));
    }
    Ok((first.n(), first.nvars()))
}

pub(crate) fn check_target(f: &MatPoly, n: usize, nvars: usize) -> Result<(), CertError> {
    if f.n() != n || f.nvars() != nvars {
        return Err(CertError::Shape(format!(
            "target is {}x{} in {} variables, constraints are {n}x{n} in {nvars}",
            f.n(),
            f.n(),
            f.nvars()
        )));
    }
    Ok(())
}

/// `(1 + s) F`.
pub(crate) fn one_plus_times(s: &SosCert, f: &MatPoly) -> Result<MatPoly, CertError> {
    s.check(f.nvars(), "s")?;
    Ok(f.scale_poly(&(&Poly::one(f.nvars()) + &s.value(f.nvars())))?)
}

pub fn verify_wqm(f: &MatPoly, gs: &[MatPoly], cert: &WqmCert) -> Result<Verdict, CertError> {
    let (n, nvars) = common_shape(gs)?;
    check_target(f, n, nvars)?;
    let lhs = one_plus_times(&cert.s, f)?;
    let rhs = MatPoly::identity(n, nvars).checked_add(&cert.rest().value(gs)?)?;
    Ok(Verdict::compare(&lhs, &rhs))
}

pub fn verify_og(f: &MatPoly, g: &MatPoly, cert: &OgCert) -> Result<Verdict, CertError> {
    let (n, nvars) = (g.n(), g.nvars());
    check_target(f, n, nvars)?;
    if cert.g_multiplier.nvars() != nvars {
        return Err(CertError::Shape(format!(
            "multiplier has {} variables, expected {nvars}",
            cert.g_multiplier.nvars()
        )));
    }
    let lhs = one_plus_times(&cert.s, f)?;
    let rhs = MatPoly::identity(n, nvars)
        .checked_add(&cert.herm.value(n, nvars)?)?
        .checked_add(&g.scale_poly(&cert.g_multiplier)?)?;
    Ok(Verdict::compare(&lhs, &rhs))
}

pub fn verify_ideal(f: &MatPoly, gs: &[MatPoly], cert: &IdealCert) -> Result<Verdict, CertError> {
    let (n, nvars) = common_shape(gs)?;
    check_target(f, n, nvars)?;
    if cert.left_factors.len() != gs.len() {
        return Err(CertError::Shape(format!(
            "{} left factors for {} constraint matrices",
            cert.left_factors.len(),
            gs.len()
        )));
    }
    let lhs = one_plus_times(&cert.s, f)?;
    let mut rhs = MatPoly::identity(n, nvars).checked_add(&cert.herm.value(n, nvars)?)?;
    for (a, g) in cert.left_factors.iter().zip(gs) {
        check_target(a, n, nvars)?;
        let ag = a.checked_mul(g)?;
        rhs = rhs.checked_add(&ag)?.checked_add(&ag.transpose())?;
    }
    Ok(Verdict::compare(&lhs, &rhs))
}

/// Log line for one step of a composite verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepLog {
    pub step: String,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub kind: &'static str,
    pub verdict: Verdict,
    pub steps: Vec<StepLog>,
}

/// Checks any wire-format certificate. `f` is the target for the identity
/// kinds; a chain certificate carries its own target and reads only `gs[0]`.
pub fn verify_certificate(cert: &Certificate, f: Option<&MatPoly>, gs: &[MatPoly]) -> Result<CertReport, CertError> {
    let need_f = || f.ok_or_else(|| CertError::Shape(format!("a `{}` certificate needs a target F", cert.kind())));
    let single = |gs: &[MatPoly]| -> Result<MatPoly, CertError> {
        match gs {
            [g] => Ok(g.clone()),
            _ => Err(CertError::Shape(format!(
                "a `{}` certificate needs exactly one G, found {}",
                cert.kind(),
                gs.len()
            ))),
        }
    };
    let (verdict, steps) = match cert {
        Certificate::Wqm(c) => (verify_wqm(need_f()?, gs, c)?, vec![]),
        Certificate::Og(c) => (verify_og(need_f()?, &single(gs)?, c)?, vec![]),
        Certificate::Ideal(c) => (verify_ideal(need_f()?, gs, c)?, vec![]),
        Certificate::Chain(c) => {
            let g = single(gs)?;
            match wormann_chain(&g, c) {
                Ok(_) => (
                    Verdict::Verified,
                    EqStep::ALL
                        .iter()
                        .map(|s| StepLog {
                            step: s.to_string(),
                            verified: true,
                        })
                        .collect(),
                ),
                Err(CertError::ChainBroken { step, mismatch }) => {
                    let steps = EqStep::ALL
                        .iter()
                        .take_while(|s| **s <= step)
                        .map(|s| StepLog {
                            step: s.to_string(),
                            verified: *s < step,
                        })
                        .collect();
                    (Verdict::Mismatch(mismatch), steps)
                }
                Err(e) => return Err(e),
            }
        }
    };
    Ok(CertReport {
        kind: cert.kind(),
        verdict,
        steps,
    })
}
