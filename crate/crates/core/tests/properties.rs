use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use finsler::catalog::odd_degree_pair;
use finsler::certs::{fixtures, tg_ledger_build, verify_wqm, LedgerCaps, TgLedger};
use finsler::pointwise::{finsler_interval, ExtendedReal, SymMatrix};
use finsler::polycore::{rat, rat_from_f64, rat_to_f64, MatPoly, Poly, Rational, UniPoly};
use finsler::sections::{in_k_g, in_l_g};

fn eigen_bounds(m: &SymMatrix) -> (f64, f64) {
    let n = m.n();
    let e = SymmetricEigen::new(DMatrix::from_fn(n, n, |i, j| m.get(i, j))).eigenvalues;
    (e.min(), e.max())
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn poly2() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..=3, 0u32..=3), small_rat()), 0..6)
        .prop_map(|ts| Poly::from_terms(2, ts.into_iter().map(|((a, b), c)| (vec![a, b], c))).unwrap())
}

fn sym_pair(n: usize) -> impl Strategy<Value = (SymMatrix, SymMatrix)> {
    let entries = n * (n + 1) / 2;
    (
        prop::collection::vec(-5.0f64..5.0, entries),
        prop::collection::vec(-5.0f64..5.0, entries),
    )
        .prop_map(move |(a, b)| (upper_to_sym(n, &a), upper_to_sym(n, &b)))
}

fn upper_to_sym(n: usize, upper: &[f64]) -> SymMatrix {
    let mut m = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[i * n + j] = upper[k];
            m[j * n + i] = upper[k];
            k += 1;
        }
    }
    SymMatrix::from_row_major(n, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly2(), q in poly2(), a in small_rat(), b in small_rat()) {
        let pt = [a, b];
        let (pv, qv) = (p.eval_exact(&pt).unwrap(), q.eval_exact(&pt).unwrap());
        prop_assert_eq!((&p + &q).eval_exact(&pt).unwrap(), &pv + &qv);
        prop_assert_eq!((&p * &q).eval_exact(&pt).unwrap(), &pv * &qv);
        prop_assert_eq!(&p * &q, &q * &p);
    }

    #[test]
    fn matrix_json_roundtrip(entries in prop::collection::vec(poly2(), 3)) {
        let m = MatPoly::from_rows(2, vec![
            vec![entries[0].clone(), entries[1].clone()],
            vec![entries[1].clone(), entries[2].clone()],
        ]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: MatPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, m);
    }

    /// Products of distinct linear factors: every root is found, in order.
    #[test]
    fn real_roots_of_split_polynomials(roots in prop::collection::btree_set(-40i64..=40, 1..7), extra in 0usize..2) {
        let mut p = UniPoly::constant(rat(1, 1));
        for &r in &roots {
            p = p.mul(&UniPoly::linear(rat(-r, 4), rat(1, 1)));
        }
        if extra == 1 {
            // An irreducible quadratic factor adds no real roots.
            p = p.mul(&UniPoly::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]));
        }
        let found = p.real_roots();
        let want: Vec<f64> = roots.iter().map(|&r| r as f64 / 4.0).collect();
        prop_assert_eq!(found.len(), want.len());
        for (f, w) in found.iter().zip(&want) {
            prop_assert!((f - w).abs() <= 1e-12 * w.abs().max(1.0), "{f} vs {w}");
        }
    }

    /// Inside the section `F - rG ≻ 0`; just beyond a finite end it is not.
    #[test]
    fn section_membership(pair in (2usize..=4).prop_flat_map(sym_pair)) {
        let (f, g) = pair;
        let s = finsler_interval(&f, &g, 1e-9).unwrap();
        prop_assume!(!s.low_confidence);
        let iv = s.interval;
        let pd = |r: f64| eigen_bounds(&f.add_scaled(-r, &g)).0;
        if iv.is_empty() {
            for r in [-10.0, -1.0, 0.0, 1.0, 10.0] {
                prop_assert!(pd(r) <= 1e-7);
            }
            return Ok(());
        }
        let inside = match (iv.lo, iv.hi) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => 0.5 * (a + b),
            (ExtendedReal::Finite(a), _) => a + 1.0,
            (_, ExtendedReal::Finite(b)) => b - 1.0,
            _ => 0.0,
        };
        prop_assert!(pd(inside) > -1e-9, "λmin {} at r = {inside}", pd(inside));
        for (end, dir) in [(iv.lo, -1.0), (iv.hi, 1.0)] {
            if let ExtendedReal::Finite(e) = end {
                let beyond = e + dir * 1e-4 * e.abs().max(1.0);
                prop_assert!(pd(beyond) < 1e-9, "λmin {} beyond {e}", pd(beyond));
            }
        }
    }

    /// `(F, cG)` has the section of `(F, G)` divided by `c > 0`.
    #[test]
    fn section_scales_with_constraint(pair in sym_pair(3), c in 0.25f64..4.0) {
        let (f, g) = pair;
        let base = finsler_interval(&f, &g, 1e-9).unwrap();
        let scaled = finsler_interval(&f, &g.scale(c), 1e-9).unwrap();
        prop_assume!(!base.low_confidence && !scaled.low_confidence);
        prop_assert_eq!(base.interval.is_empty(), scaled.interval.is_empty());
        if !base.interval.is_empty() {
            for (a, b) in [(base.interval.lo, scaled.interval.lo), (base.interval.hi, scaled.interval.hi)] {
                match (a, b) {
                    (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                        prop_assert!((a / c - b).abs() <= 1e-7 * b.abs().max(1.0), "{a}/{c} vs {b}");
                    }
                    (a, b) => prop_assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn l_g_is_inside_k_g(pair in sym_pair(3), x in -3.0f64..3.0) {
        let (_, ga) = pair;
        let m = MatPoly::from_rows(1, (0..3).map(|i| (0..3).map(|j| {
            Poly::from_terms(1, [(vec![0], rat_from_f64(ga.get(i, j)).unwrap()), (vec![1], rat(1, 1))]).unwrap()
        }).collect()).collect()).unwrap();
        if in_l_g(&m, &[x], 1e-9).unwrap() {
            prop_assert!(in_k_g(&m, &[x], 1e-9).unwrap());
        }
    }

    /// A verified certificate holds exactly at rational points, and where
    /// every `Gⱼ(a) ⪰ 0` it forces `F(a) ≻ 0`.
    #[test]
    fn verified_certificates_are_pointwise_sound(seed in 0u64..400, a in small_rat(), b in small_rat()) {
        let p = fixtures::planted_wqm(seed);
        prop_assert!(verify_wqm(&p.f, &p.gs, &p.cert).unwrap().is_verified());
        let nvars = p.f.nvars();
        let pt: Vec<Rational> = [a, b].into_iter().take(nvars).collect();
        let s = p.cert.s.value(nvars).eval_exact(&pt).unwrap();
        let lhs: Vec<Rational> = p.f.eval_exact(&pt).unwrap().into_iter()
            .map(|v| v * (rat(1, 1) + &s)).collect();
        let n = p.f.n();
        let rest = p.cert.rest().value(&p.gs).unwrap().eval_exact(&pt).unwrap();
        let rhs: Vec<Rational> = (0..n * n)
            .map(|k| &rest[k] + if k / n == k % n { rat(1, 1) } else { rat(0, 1) })
            .collect();
        prop_assert_eq!(lhs, rhs);

        let fp: Vec<f64> = pt.iter().map(rat_to_f64).collect();
        let feasible = p.gs.iter().all(|g| eigen_bounds(&g.eval(&fp).unwrap()).0 >= 0.0);
        if feasible {
            prop_assert!(eigen_bounds(&p.f.eval(&fp).unwrap()).0 > 0.0);
        }
    }

    #[test]
    fn odd_degree_ledger_is_nonnegative_on_k_g(x in 0.0f64..1e3) {
        let (ledger, _) = odd_ledger();
        for e in &ledger.entries {
            let v = e.value.eval(&[x]).unwrap();
            prop_assert!(v >= -1e-9 * (1.0 + x).powi(8), "entry {} = {v} at {x}", e.id);
        }
    }

    /// For `G = x I` every module entry reads `z = α + s x` with one common
    /// `α` and `s` drawn from the ledger, which is the shape of `T_x`.
    #[test]
    fn scalar_constraint_ledger_lies_in_t_g(pick in any::<prop::sample::Index>(), x in 0.0f64..50.0) {
        let (ledger, g) = scalar_ledger();
        let e = &ledger.entries[pick.index(ledger.entries.len())];
        if let Some((alphas, s)) = ledger.decomposition(e.id, g) {
            prop_assert!(alphas.windows(2).all(|w| w[0] == w[1]));
            let x_poly = Poly::var(1, 0);
            prop_assert_eq!(&alphas[0] + &(&s * &x_poly), e.value.clone());
            prop_assert!(ledger.values().any(|v| *v == s));
            prop_assert!(s.eval(&[x]).unwrap() >= -1e-9 * (1.0 + x).powi(8));
        }
        prop_assert!(e.value.eval(&[x]).unwrap() >= -1e-9 * (1.0 + x).powi(8));
    }
}

fn odd_ledger() -> &'static (TgLedger, MatPoly) {
    static LEDGER: OnceLock<(TgLedger, MatPoly)> = OnceLock::new();
    LEDGER.get_or_init(|| {
        let (_, g) = odd_degree_pair();
        let caps = LedgerCaps {
            deg_cap: 6,
            iter_cap: 2,
            ..LedgerCaps::default()
        };
        (tg_ledger_build(&g, caps).unwrap(), g)
    })
}

fn scalar_ledger() -> &'static (TgLedger, MatPoly) {
    static LEDGER: OnceLock<(TgLedger, MatPoly)> = OnceLock::new();
    LEDGER.get_or_init(|| {
        let g = MatPoly::scalar(2, &Poly::var(1, 0));
        let caps = LedgerCaps {
            deg_cap: 6,
            iter_cap: 2,
            ..LedgerCaps::default()
        };
        let ledger = tg_ledger_build(&g, caps).unwrap();
        ledger.verify(&g).unwrap();
        (ledger, g)
    })
}
