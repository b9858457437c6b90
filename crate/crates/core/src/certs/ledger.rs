//! A bounded, certified sample of `T = ∪ Tᵢ`, the scalar part of `T_G`:
//! `T₀ = Σℝ[x]²` and `T_{i+1}` holds the finite products of scalars `z` with
//! `z I_n ∈ Tᵢ · N_G`.
//!
//! Membership in `(Tᵢ · N_G) ∩ Z` is not decidable in general, so new
//! scalars come from a diagonal ansatz for diagonal `G = diag(g₁, …, g_n)`:
//! for a multiplier `s ∈ Tᵢ`, a base `t ∈ Tᵢ ∪ {0}` and a pivot `k*`,
//!
//! `z = t + s (g_{k*} + Σ_{k ≠ k*} ((δ_k − 1)/2)²)`, `δ_k = g_{k*} − g_k`,
//!
//! so that `z − s g_k = t + s·σ_k` with `σ_k` an explicit sum of squares,
//! using `((δ − 1)/2)² + δ = ((δ + 1)/2)²`. The ledger is always a
//! truncation; `truncated` says whether a cap actually cut something off.

use std::collections::HashSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{scalar_mismatch, CertError, SosCert};
use crate::polycore::{rat, MatPoly, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCaps {
    pub deg_cap: u32,
    pub iter_cap: usize,
    /// New scalars admitted per level, counting products.
    pub width_cap: usize,
}

impl Default for LedgerCaps {
    fn default() -> Self {
        LedgerCaps {
            deg_cap: 8,
            iter_cap: 3,
            width_cap: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum LedgerProvenance {
    /// `root²`.
    Square { root: Poly },
    /// `z I_n = diag(t + s σ_k) + s G` with `σ_k = Σ diag_squares[k]²`.
    Module {
        multiplier: usize,
        base: Option<usize>,
        pivot: usize,
        diag_squares: Vec<Vec<Poly>>,
    },
    /// Product of earlier entries.
    Product { factors: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub id: usize,
    pub level: usize,
    pub value: Poly,
    pub provenance: LedgerProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TgLedger {
    pub caps: LedgerCaps,
    pub entries: Vec<LedgerEntry>,
    /// Entry ids per level, level 0 first.
    pub levels: Vec<Vec<usize>>,
    pub truncated: bool,
    pub notes: Vec<String>,
}

fn diagonal_entries(g: &MatPoly) -> Option<Vec<Poly>> {
    let n = g.n();
    for i in 0..n {
        for j in 0..n {
            if i != j && !g.get(i, j).is_zero() {
                return None;
            }
        }
    }
    Some((0..n).map(|i| g.get(i, i).clone()).collect())
}

fn monomials_up_to(d: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; d]];
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &out {
            for i in 0..d {
                let mut e = m.clone();
                e[i] += 1;
                next.push(e);
            }
        }
        out.extend(next);
        out.sort();
        out.dedup();
    }
    out.retain(|m| m.iter().sum::<u32>() <= deg);
    out
}

fn degree(p: &Poly) -> u32 {
    p.total_degree().unwrap_or(0)
}

/// The squares for the non-pivot diagonal entries and, per entry `k`, the
/// roots of `σ_k` with `z − s g_k = t + s σ_k`.
fn ansatz(diag: &[Poly], pivot: usize) -> (Poly, Vec<Vec<Poly>>) {
    let d = diag[pivot].nvars();
    let half = rat(1, 2);
    let one = Poly::one(d);
    let minus: Vec<Option<Poly>> = diag
        .iter()
        .enumerate()
        .map(|(k, gk)| (k != pivot).then(|| (&(&diag[pivot] - gk) - &one).scale(&half)))
        .collect();
    let phi = minus
        .iter()
        .flatten()
        .fold(diag[pivot].clone(), |acc, r| &acc + &r.square());
    let mut roots = Vec::with_capacity(diag.len());
    for k in 0..diag.len() {
        let mut sq = Vec::new();
        for (j, r) in minus.iter().enumerate() {
            if let Some(r) = r {
                if j == k {
                    sq.push(&(&diag[pivot] - &diag[k]) .scale(&half) + &one.scale(&half));
                } else {
                    sq.push(r.clone());
                }
            }
        }
        roots.push(sq);
    }
    (phi, roots)
}

pub fn tg_ledger_build(g: &MatPoly, caps: LedgerCaps) -> Result<TgLedger, CertError> {
    if caps.deg_cap == 0 || caps.iter_cap == 0 {
        return Err(CertError::Shape("ledger caps must be positive".into()));
    }
    let d = g.nvars();
    let mut ledger = TgLedger {
        caps,
        entries: vec![],
        levels: vec![vec![]],
        truncated: false,
        notes: vec![],
    };
    let mut seen: HashSet<Poly> = HashSet::new();
    for exps in monomials_up_to(d, caps.deg_cap / 2) {
        let root = Poly::monomial(rat(1, 1), exps);
        let value = root.square();
        seen.insert(value.clone());
        let id = ledger.entries.len();
        ledger.entries.push(LedgerEntry {
            id,
            level: 0,
            value,
            provenance: LedgerProvenance::Square { root },
        });
        ledger.levels[0].push(id);
    }

    let diag = match diagonal_entries(g) {
        Some(diag) => diag,
        None => {
            ledger.truncated = true;
            ledger
                .notes
                .push("G is not diagonal; the diagonal ansatz proposes nothing beyond the seed".into());
            return Ok(ledger);
        }
    };
    if caps.width_cap == 0 {
        ledger.truncated = true;
        ledger.notes.push("width cap 0: no search".into());
        return Ok(ledger);
    }

    let pivots: Vec<(usize, Poly, Vec<Vec<Poly>>)> = (0..diag.len())
        .map(|k| {
            let (phi, roots) = ansatz(&diag, k);
            (k, phi, roots)
        })
        .collect();

    for level in 1..=caps.iter_cap {
        let known: Vec<usize> = (0..ledger.entries.len()).collect();
        let mut fresh: Vec<LedgerEntry> = Vec::new();
        let mut full = false;
        'gen: for &s_id in &known {
            for (pivot, phi, roots) in &pivots {
                let s = &ledger.entries[s_id].value;
                let core = s * phi;
                for base in std::iter::once(None).chain(known.iter().map(|&t| Some(t))) {
                    let value = match base {
                        None => core.clone(),
                        Some(t) => &core + &ledger.entries[t].value,
                    };
                    if degree(&value) > caps.deg_cap {
                        ledger.truncated = true;
                        continue;
                    }
                    if !seen.insert(value.clone()) {
                        continue;
                    }
                    if fresh.len() >= caps.width_cap {
                        ledger.truncated = true;
                        full = true;
                        break 'gen;
                    }
                    fresh.push(LedgerEntry {
                        id: 0,
                        level,
                        value,
                        provenance: LedgerProvenance::Module {
                            multiplier: s_id,
                            base,
                            pivot: *pivot,
                            diag_squares: roots.clone(),
                        },
                    });
                }
            }
        }
        let mut ids = Vec::new();
        for mut e in fresh {
            e.id = ledger.entries.len();
            ids.push(e.id);
            ledger.entries.push(e);
        }
        // Products of the new scalars with everything known so far.
        if !full {
            let mut added = 0usize;
            'prod: for &a in &ids {
                for b in 0..ledger.entries.len() {
                    if ledger.entries[b].level == 0 {
                        continue;
                    }
                    let value = &ledger.entries[a].value * &ledger.entries[b].value;
                    if degree(&value) > caps.deg_cap {
                        ledger.truncated = true;
                        continue;
                    }
                    if !seen.insert(value.clone()) {
                        continue;
                    }
                    if ids.len() + added >= caps.width_cap {
                        ledger.truncated = true;
                        break 'prod;
                    }
                    let id = ledger.entries.len();
                    ledger.entries.push(LedgerEntry {
                        id,
                        level,
                        value,
                        provenance: LedgerProvenance::Product { factors: vec![a, b] },
                    });
                    added += 1;
                }
            }
            let start = ids.last().map_or(ledger.entries.len(), |&l| l + 1);
            ids.extend(start..ledger.entries.len());
        }
        let empty = ids.is_empty();
        ledger.levels.push(ids);
        if empty {
            ledger.notes.push(format!("level {level} added nothing new; stopping"));
            return Ok(ledger);
        }
    }
    ledger.truncated = true;
    ledger.notes.push(format!("iteration cap {} reached", caps.iter_cap));
    Ok(ledger)
}

impl TgLedger {
    /// Re-derives every entry from its provenance and checks it exactly.
    pub fn verify(&self, g: &MatPoly) -> Result<(), CertError> {
        let d = g.nvars();
        for e in &self.entries {
            let earlier = |id: usize, strict: bool| -> Result<&LedgerEntry, CertError> {
                let dep = self
                    .entries
                    .get(id)
                    .filter(|dep| dep.id < e.id && (if strict { dep.level < e.level } else { dep.level <= e.level }))
                    .ok_or_else(|| CertError::Decomposition(format!("entry {} cites unusable entry {id}", e.id)))?;
                Ok(dep)
            };
            let fail = |what: &str| CertError::Decomposition(format!("entry {}: {what}", e.id));
            match &e.provenance {
                LedgerProvenance::Square { root } => {
                    if root.square() != e.value {
                        return Err(fail("value is not the square of its root"));
                    }
                }
                LedgerProvenance::Product { factors } => {
                    let mut acc = Poly::one(d);
                    for &f in factors {
                        acc = &acc * &earlier(f, false)?.value;
                    }
                    if let Some(m) = scalar_mismatch(&e.value, &acc) {
                        return Err(fail(&format!("product mismatch at {m}")));
                    }
                }
                LedgerProvenance::Module {
                    multiplier,
                    base,
                    pivot: _,
                    diag_squares,
                } => {
                    let diag = diagonal_entries(g).ok_or_else(|| fail("G is not diagonal"))?;
                    if diag_squares.len() != diag.len() {
                        return Err(fail("one square list per diagonal entry is required"));
                    }
                    let s = &earlier(*multiplier, true)?.value;
                    let t = match base {
                        Some(b) => earlier(*b, true)?.value.clone(),
                        None => Poly::zero(d),
                    };
                    for (k, gk) in diag.iter().enumerate() {
                        let lhs = &e.value - &(s * gk);
                        let rhs = &t + &(s * &SosCert::new(diag_squares[k].clone()).value(d));
                        if let Some(m) = scalar_mismatch(&lhs, &rhs) {
                            return Err(fail(&format!("diagonal entry {} mismatch at {m}", k + 1)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// For a module entry: `(α_k, s)` with `z = α_k + s g_k`.
    pub fn decomposition(&self, id: usize, g: &MatPoly) -> Option<(Vec<Poly>, Poly)> {
        let e = self.entries.get(id)?;
        let LedgerProvenance::Module { multiplier, .. } = &e.provenance else {
            return None;
        };
        let diag = diagonal_entries(g)?;
        let s = self.entries[*multiplier].value.clone();
        let alphas = diag.iter().map(|gk| &e.value - &(&s * gk)).collect();
        Some((alphas, s))
    }

    pub fn values(&self) -> impl Iterator<Item = &Poly> {
        self.entries.iter().map(|e| &e.value)
    }
}

/// Zero, or even degree with a positive leading coefficient.
pub fn parity_invariant(p: &Poly) -> bool {
    match (p.total_degree(), p.leading_coeff_univariate()) {
        (None, _) => true,
        (Some(deg), Some(c)) => deg % 2 == 0 && c.is_positive(),
        _ => false,
    }
}

/// Checks `z = t₁ + 2x s = t₂ + x s` exactly and the invariant on `t₁, t₂,
/// s`, then reports whether `z` carries the invariant too. Only meaningful
/// for `G = x diag(2, 1)`; the inputs must be univariate.
pub fn parity_invariant_check(z: &Poly, t1: &Poly, t2: &Poly, s: &Poly) -> Result<bool, CertError> {
    if [z, t1, t2, s].iter().any(|p| p.nvars() != 1) {
        return Err(CertError::Shape("the parity invariant is stated for univariate scalars".into()));
    }
    let x = Poly::var(1, 0);
    let xs = &x * s;
    if let Some(m) = scalar_mismatch(z, &(t1 + &(&xs + &xs))) {
        return Err(CertError::Decomposition(format!("z ≠ t₁ + 2xs at {m}")));
    }
    if let Some(m) = scalar_mismatch(z, &(t2 + &xs)) {
        return Err(CertError::Decomposition(format!("z ≠ t₂ + xs at {m}")));
    }
    for (name, p) in [("t₁", t1), ("t₂", t2), ("s", s)] {
        if !parity_invariant(p) {
            return Err(CertError::Decomposition(format!(
                "{name} = {p} lacks even degree with positive leading coefficient"
            )));
        }
    }
    Ok(parity_invariant(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::odd_degree_pair;

    #[test]
    fn seed_only_at_zero_width() {
        let (_, g) = odd_degree_pair();
        let ledger = tg_ledger_build(
            &g,
            LedgerCaps {
                width_cap: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(ledger.levels.len(), 1);
        assert!(ledger.truncated);
        assert!(ledger.entries.iter().all(|e| matches!(e.provenance, LedgerProvenance::Square { .. })));
    }

    #[test]
    fn odd_degree_pair_keeps_parity() {
        let (_, g) = odd_degree_pair();
        let ledger = tg_ledger_build(&g, LedgerCaps::default()).unwrap();
        ledger.verify(&g).unwrap();
        assert!(ledger.entries.len() > ledger.levels[0].len());
        for e in &ledger.entries {
            assert!(parity_invariant(&e.value), "entry {} = {}", e.id, e.value);
            if let Some((alphas, s)) = ledger.decomposition(e.id, &g) {
                assert!(parity_invariant_check(&e.value, &alphas[0], &alphas[1], &s).unwrap());
            }
        }
    }

    #[test]
    fn ledger_leaves_pure_squares() {
        // (x² + 6x + 1)/4 is negative at x = −3 but nonnegative on K_G = [0, ∞).
        let (_, g) = odd_degree_pair();
        let ledger = tg_ledger_build(&g, LedgerCaps::default()).unwrap();
        let x = [-3.0];
        assert!(ledger.values().any(|v| v.eval(&x).unwrap() < 0.0));
        for v in ledger.values() {
            for i in 0..200 {
                let a = [i as f64 * 0.25];
                assert!(v.eval(&a).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn parity_examples() {
        let x2 = Poly::var(1, 0).square();
        let zero = Poly::zero(1);
        let z = &(&x2 + &x2) - &x2;
        assert!(parity_invariant_check(&z, &x2, &x2, &zero).unwrap());
        let one_plus_x = &Poly::one(1) + &Poly::var(1, 0);
        assert!(!parity_invariant(&one_plus_x));
    }

    #[test]
    fn tampered_entry_is_caught() {
        let (_, g) = odd_degree_pair();
        let mut ledger = tg_ledger_build(&g, LedgerCaps::default()).unwrap();
        let id = ledger.levels[1][0];
        ledger.entries[id].value = &ledger.entries[id].value + &Poly::var(1, 0);
        assert!(ledger.verify(&g).is_err());
    }
}
