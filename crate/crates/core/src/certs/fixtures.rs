//! Hand-built certificates and seeded planted instances: data is chosen
//! first and the target (or one constraint matrix) is defined so the
//! identity holds by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    rational_squares, Certificate, ChainCert, DenominatorCert, HermSosCert, IdealCert, NgElement,
    OgCert, PencilCert, Provenance, ShiftCert, SosCert, SplitCert, WqmCert,
};
use crate::polycore::{rat, MatPoly, Poly, Rational};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_poly(rng: &mut ChaCha8Rng, d: usize, deg: u32, range: i64) -> Poly {
    let mut terms = Vec::new();
    let mut exps = vec![0u32; d];
    loop {
        if exps.iter().sum::<u32>() <= deg && rng.gen_bool(0.7) {
            terms.push((exps.clone(), rat(rng.gen_range(-range..=range), 1)));
        }
        let mut k = 0;
        while k < d {
            exps[k] += 1;
            if exps[k] <= deg {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    Poly::from_terms(d, terms).expect("exponent vectors have length d")
}

fn random_nonzero(rng: &mut ChaCha8Rng, d: usize, deg: u32, range: i64) -> Poly {
    loop {
        let p = random_poly(rng, d, deg, range);
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize, deg: u32) -> MatPoly {
    let entries = (0..n * n).map(|_| random_poly(rng, d, deg, 2)).collect();
    MatPoly::new(n, d, entries).expect("square shape")
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, d: usize, deg: u32) -> MatPoly {
    let mut entries = vec![Poly::zero(d); n * n];
    for i in 0..n {
        for j in i..n {
            let p = random_poly(rng, d, deg, 3);
            entries[i * n + j] = p.clone();
            entries[j * n + i] = p;
        }
    }
    MatPoly::new(n, d, entries).expect("square shape")
}

fn random_sos(rng: &mut ChaCha8Rng, d: usize, deg: u32, max_count: usize) -> SosCert {
    let count = rng.gen_range(0..=max_count);
    SosCert::new((0..count).map(|_| random_nonzero(rng, d, deg, 2)).collect())
}

fn random_herm(rng: &mut ChaCha8Rng, n: usize, d: usize, deg: u32, max_count: usize) -> HermSosCert {
    let count = rng.gen_range(0..=max_count);
    HermSosCert::new((0..count).map(|_| random_matrix(rng, n, d, deg)).collect())
}

fn x() -> Poly {
    Poly::var(1, 0)
}

fn squares_of(c: &Rational, d: usize) -> Vec<Poly> {
    rational_squares(c)
        .expect("nonnegative by construction")
        .into_iter()
        .map(|r| Poly::constant(d, r))
        .collect()
}

/// `G = x diag(2, 1)`, `F = (1 + x) I₂` and the certificate
/// `(I₂ + E₁₁) F = I₂ + E₁₁ + G`, checked against the target `(I₂ + E₁₁) F`.
pub fn remark_certificate() -> (MatPoly, Vec<MatPoly>, WqmCert) {
    let (f, g) = crate::catalog::odd_degree_pair();
    let multiplier = MatPoly::identity(2, 1).checked_add(&MatPoly::elementary(2, 1, 0, 0)).unwrap();
    let target = multiplier.checked_mul(&f).unwrap();
    let cert = WqmCert {
        s: SosCert::zero(),
        herm: HermSosCert::new(vec![MatPoly::elementary(2, 1, 0, 0)]),
        g_multipliers: vec![SosCert::new(vec![Poly::one(1)])],
        provenance: Provenance::node("remark", "(I₂ + E₁₁)F = I₂ + E₁₁ + G", vec![]),
    };
    (target, vec![g], cert)
}

/// `r = −x` for `F = diag(1 + x, 1)`, `G = diag(x, x)`: `q = 1`, and
/// `2 (F + x G) = I₂ + diag((x + 1)² + x², 1 + 2x²)`.
pub fn diag_pair_pencil() -> (Poly, Poly, DenominatorCert, PencilCert) {
    let p = -x();
    let q = Poly::one(1);
    let e = |i, j| MatPoly::elementary(2, 1, i, j);
    let herm = HermSosCert::new(vec![
        e(0, 0).scale_poly(&(&x() + &Poly::one(1))).unwrap(),
        e(0, 0).scale_poly(&x()).unwrap(),
        e(1, 1),
        e(1, 1).scale_poly(&x()).unwrap(),
        e(1, 1).scale_poly(&x()).unwrap(),
    ]);
    let cert_h = PencilCert {
        s: SosCert::new(vec![Poly::one(1)]),
        herm,
    };
    (p, q, DenominatorCert::default(), cert_h)
}

pub struct PlantedWqm {
    pub f: MatPoly,
    pub gs: Vec<MatPoly>,
    pub cert: WqmCert,
}

/// Even seeds define `F` from the identity with `s = 0`; odd seeds pick `F`
/// and `s` freely, set `σ₁ = 1` and define `G₁`.
pub fn planted_wqm(seed: u64) -> PlantedWqm {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let d = r.gen_range(1..=2);
    let k = r.gen_range(1..=2);
    let herm = random_herm(&mut r, n, d, 1, 2);
    let mut gs: Vec<MatPoly> = (0..k).map(|_| random_symmetric(&mut r, n, d, 1)).collect();
    let mut sigmas: Vec<SosCert> = (0..k).map(|_| random_sos(&mut r, d, 1, 2)).collect();
    let id = MatPoly::identity(n, d);
    let (f, s) = if seed % 2 == 0 {
        let rest = NgElement {
            herm: herm.clone(),
            multipliers: sigmas.clone(),
        };
        (id.checked_add(&rest.value(&gs).unwrap()).unwrap(), SosCert::zero())
    } else {
        let f = random_symmetric(&mut r, n, d, 2);
        let s = random_sos(&mut r, d, 1, 2);
        sigmas[0] = SosCert::new(vec![Poly::one(d)]);
        let others = NgElement {
            herm: herm.clone(),
            multipliers: std::iter::once(SosCert::zero()).chain(sigmas[1..].iter().cloned()).collect(),
        };
        let lhs = f.scale_poly(&s.one_plus(d).value(d)).unwrap();
        gs[0] = lhs.checked_sub(&id).unwrap().checked_sub(&others.value(&gs).unwrap()).unwrap();
        (f, s)
    };
    PlantedWqm {
        f,
        gs,
        cert: WqmCert {
            s,
            herm,
            g_multipliers: sigmas,
            provenance: Provenance::node("planted", format!("seed {seed}"), vec![]),
        },
    }
}

pub struct PlantedOg {
    pub f: MatPoly,
    pub g: MatPoly,
    pub cert: OgCert,
}

pub fn planted_og(seed: u64) -> PlantedOg {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let d = r.gen_range(1..=2);
    let herm = random_herm(&mut r, n, d, 1, 2);
    let id = MatPoly::identity(n, d);
    let sq = herm.value(n, d).unwrap();
    let (f, g, s, p) = if seed % 2 == 0 {
        let g = random_symmetric(&mut r, n, d, 1);
        let p = random_poly(&mut r, d, 2, 3);
        let f = id.checked_add(&sq).unwrap().checked_add(&g.scale_poly(&p).unwrap()).unwrap();
        (f, g, SosCert::zero(), p)
    } else {
        let f = random_symmetric(&mut r, n, d, 2);
        let s = random_sos(&mut r, d, 1, 2);
        let sign = if r.gen_bool(0.5) { 1 } else { -1 };
        let lhs = f.scale_poly(&s.one_plus(d).value(d)).unwrap();
        let g = lhs.checked_sub(&id).unwrap().checked_sub(&sq).unwrap().scale(&rat(sign, 1));
        (f, g, s, Poly::from_i64(d, sign))
    };
    PlantedOg {
        f,
        g,
        cert: OgCert {
            s,
            herm,
            g_multiplier: p,
            provenance: Provenance::node("planted", format!("seed {seed}"), vec![]),
        },
    }
}

pub struct PlantedIdeal {
    pub f: MatPoly,
    pub gs: Vec<MatPoly>,
    pub cert: IdealCert,
}

fn ideal_sum(a: &MatPoly, g: &MatPoly) -> MatPoly {
    let ag = a.checked_mul(g).unwrap();
    ag.checked_add(&ag.transpose()).unwrap()
}

/// Even seeds define `F`; odd seeds use `A₁ = ½ I`, so that
/// `A₁ G₁ + (A₁ G₁)ᵀ = G₁`, and define `G₁`.
pub fn planted_ideal(seed: u64) -> PlantedIdeal {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let d = r.gen_range(1..=2);
    let k = r.gen_range(1..=2);
    let herm = random_herm(&mut r, n, d, 1, 2);
    let mut gs: Vec<MatPoly> = (0..k).map(|_| random_symmetric(&mut r, n, d, 1)).collect();
    let mut a_s: Vec<MatPoly> = (0..k).map(|_| random_matrix(&mut r, n, d, 1)).collect();
    let id = MatPoly::identity(n, d);
    let sq = herm.value(n, d).unwrap();
    let (f, s) = if seed % 2 == 0 {
        let mut f = id.checked_add(&sq).unwrap();
        for (a, g) in a_s.iter().zip(&gs) {
            f = f.checked_add(&ideal_sum(a, g)).unwrap();
        }
        (f, SosCert::zero())
    } else {
        let f = random_symmetric(&mut r, n, d, 2);
        let s = random_sos(&mut r, d, 1, 2);
        a_s[0] = id.scale(&rat(1, 2));
        let mut g0 = f.scale_poly(&s.one_plus(d).value(d)).unwrap().checked_sub(&id).unwrap().checked_sub(&sq).unwrap();
        for (a, g) in a_s.iter().zip(&gs).skip(1) {
            g0 = g0.checked_sub(&ideal_sum(a, g)).unwrap();
        }
        gs[0] = g0;
        (f, s)
    };
    PlantedIdeal {
        f,
        gs,
        cert: IdealCert {
            s,
            herm,
            left_factors: a_s,
            provenance: Provenance::node("planted", format!("seed {seed}"), vec![]),
        },
    }
}

pub struct PlantedHtrick {
    pub f: MatPoly,
    pub gs: Vec<MatPoly>,
    pub t: SosCert,
    pub t_f: NgElement,
    pub shift: ShiftCert,
}

/// `n = 2`, `d = 1`, degrees at most two. `F = Σ KᵀK − h I` and
/// `G = t F − I − Σ HᵀH`, so `t F = I + Σ HᵀH + 1·G`.
pub fn planted_htrick(seed: u64, zero_t: bool) -> PlantedHtrick {
    let mut r = rng(seed);
    let (n, d) = (2, 1);
    let h = random_sos(&mut r, d, 1, 2);
    let k = HermSosCert::new((0..r.gen_range(1..=2)).map(|_| random_matrix(&mut r, n, d, 1)).collect());
    let f = k
        .value(n, d)
        .unwrap()
        .checked_sub(&MatPoly::scalar(n, &h.value(d)))
        .unwrap();
    let t = if zero_t {
        SosCert::zero()
    } else {
        SosCert::new((0..r.gen_range(1..=2)).map(|_| random_nonzero(&mut r, d, 1, 2)).collect())
    };
    let herm = random_herm(&mut r, n, d, 1, 2);
    let g = f
        .scale_poly(&t.value(d))
        .unwrap()
        .checked_sub(&MatPoly::identity(n, d))
        .unwrap()
        .checked_sub(&herm.value(n, d).unwrap())
        .unwrap();
    PlantedHtrick {
        f,
        gs: vec![g],
        t,
        t_f: NgElement {
            herm,
            multipliers: vec![SosCert::new(vec![Poly::one(d)])],
        },
        shift: ShiftCert { h, herm: k },
    }
}

pub struct PlantedSplit {
    pub f: MatPoly,
    pub g: MatPoly,
    pub cert: SplitCert,
}

pub fn planted_split(seed: u64) -> PlantedSplit {
    planted_split_with(seed, true)
}

/// `F = (1 + t) G₀ + I + Y`, `G = (1 + s) G₀`, so that
/// `(1 + s) F − (1 + t) G = I + s I + (1 + s) Y`.
pub fn planted_split_with(seed: u64, with_t: bool) -> PlantedSplit {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let d = r.gen_range(1..=2);
    let g0 = random_symmetric(&mut r, n, d, 1);
    let s = random_sos(&mut r, d, 1, 2);
    let t = if with_t {
        SosCert::new((0..r.gen_range(1..=2)).map(|_| random_nonzero(&mut r, d, 1, 2)).collect())
    } else {
        SosCert::zero()
    };
    let y = random_herm(&mut r, n, d, 1, 2);
    let id = MatPoly::identity(n, d);
    let f = g0
        .scale_poly(&t.one_plus(d).value(d))
        .unwrap()
        .checked_add(&id)
        .unwrap()
        .checked_add(&y.value(n, d).unwrap())
        .unwrap();
    let g = g0.scale_poly(&s.one_plus(d).value(d)).unwrap();
    let herm = HermSosCert::scalar(&s, n).plus(&y.weighted(&s.one_plus(d)).unwrap());
    PlantedSplit {
        f,
        g,
        cert: SplitCert {
            s,
            t,
            herm,
            provenance: Provenance::node("planted", format!("seed {seed}"), vec![]),
        },
    }
}

pub struct PlantedRational {
    pub f: MatPoly,
    pub g: MatPoly,
    pub p: Poly,
    pub q: Poly,
    pub cert_q: DenominatorCert,
    pub cert_h: PencilCert,
}

/// `q = c (1 + σ)` has no real zero, `(1 + s₁) q² − 1` is a sum of squares
/// by expansion, `p = q p₀` and `F = p₀ G + I + Y`, so
/// `(1 + s₁)(q² F − p q G) = (1 + t)(I + Y)`.
pub fn planted_rational(seed: u64) -> PlantedRational {
    let mut r = rng(seed);
    let n = 2;
    let d = r.gen_range(1..=2);
    let c = rat(r.gen_range(1..=3), 1);
    let sigma = SosCert::new((0..r.gen_range(1..=2)).map(|_| random_nonzero(&mut r, d, 1, 2)).collect());
    let sigma_val = sigma.value(d);
    let q = (&Poly::one(d) + &sigma_val).scale(&c);
    let s1 = random_sos(&mut r, d, 1, 2);
    // t = (c² − 1) + 2c²σ + c²σ² + s₁ q².
    let cpoly = Poly::constant(d, c.clone());
    let mut t = squares_of(&(&c * &c - rat(1, 1)), d);
    for root in &sigma.squares {
        let scaled = &cpoly * root;
        t.push(scaled.clone());
        t.push(scaled);
    }
    t.push(&cpoly * &sigma_val);
    t.extend(s1.squares.iter().map(|a| a * &q));
    let t = SosCert::new(t);
    let p0 = random_poly(&mut r, d, 1, 2);
    let p = &q * &p0;
    let g = random_symmetric(&mut r, n, d, 1);
    let y = random_herm(&mut r, n, d, 1, 2);
    let f = g
        .scale_poly(&p0)
        .unwrap()
        .checked_add(&MatPoly::identity(n, d))
        .unwrap()
        .checked_add(&y.value(n, d).unwrap())
        .unwrap();
    let herm = HermSosCert::scalar(&t, n).plus(&y.weighted(&t.one_plus(d)).unwrap());
    PlantedRational {
        f,
        g,
        p,
        q,
        cert_q: DenominatorCert { s1: s1.clone(), t },
        cert_h: PencilCert { s: s1, herm },
    }
}

/// `G = −I₂`, `R = 1`, `Q = 0`, `q = 0`, `m = 1`: `f I = I + x²(−I)`.
pub fn chain_negative_identity() -> (MatPoly, ChainCert) {
    let g = MatPoly::identity(2, 1).neg();
    let cert = ChainCert {
        radius: rat(1, 1),
        q_mat: HermSosCert::default(),
        eq1: NgElement {
            herm: HermSosCert::default(),
            multipliers: vec![SosCert::new(vec![x()])],
        },
        q: SosCert::zero(),
        q_bound: HermSosCert::default(),
        m: 1,
        s0: SosCert::zero(),
        s1: SosCert::zero(),
        s: SosCert::zero(),
        eq3: HermSosCert::default(),
        provenance: Provenance::node("fixture", "G = −I", vec![]),
    };
    (g, cert)
}

/// Rational orthogonal `U`: identity, a swap, or a 3-4-5 rotation in one
/// coordinate plane.
fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    let mut u: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| rat((i == j) as i64, 1)).collect())
        .collect();
    let a = rng.gen_range(0..n - 1);
    match rng.gen_range(0..3) {
        0 => {}
        1 => u.swap(a, a + 1),
        _ => {
            u[a][a] = rat(3, 5);
            u[a][a + 1] = rat(4, 5);
            u[a + 1][a] = rat(-4, 5);
            u[a + 1][a + 1] = rat(3, 5);
        }
    }
    u
}

/// Planted chain data with `Q = Uᵀ D U`, `D` diagonal with entries
/// `d_k = c_k² + Σᵢ (a_{k,i} xᵢ)²`, so that `Q`, `q I − Q` and
/// `((1 + q) I − Q)(I + Q)` all diagonalize in the rows `u_k` of `U`.
/// `G` is defined by `f (I + Q) = I + Σ KᵀK + G`.
pub fn planted_chain(seed: u64) -> (MatPoly, ChainCert) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let d = r.gen_range(1..=2);
    let radius = [rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)].choose(&mut r).unwrap().clone();
    let u = orthogonal(&mut r, n);
    let row = |k: usize, c: &Poly| -> MatPoly {
        let mut entries = vec![Poly::zero(d); n * n];
        for j in 0..n {
            entries[j] = c.scale(&u[k][j]);
        }
        MatPoly::new(n, d, entries).unwrap()
    };
    // Roots of each d_k and the weights w_i of xᵢ² in q.
    let mut roots: Vec<Vec<Poly>> = Vec::with_capacity(n);
    let mut q0 = rat(0, 1);
    let mut w = vec![rat(0, 1); d];
    for _ in 0..n {
        let mut rk = Vec::new();
        let c = r.gen_range(0..=2);
        if c != 0 {
            rk.push(Poly::from_i64(d, c));
            q0 += rat(c * c, 1);
        }
        for (i, wi) in w.iter_mut().enumerate() {
            let a = r.gen_range(0..=1);
            if a != 0 {
                rk.push(Poly::var(d, i).scale(&rat(a, 1)));
                *wi += rat(a * a, 1);
            }
        }
        roots.push(rk);
    }
    let q_mat = HermSosCert::new(
        roots
            .iter()
            .enumerate()
            .flat_map(|(k, rk)| rk.iter().map(move |c| (k, c)))
            .map(|(k, c)| row(k, c))
            .collect(),
    );
    let q = SosCert::new(roots.iter().flatten().cloned().collect());
    let q_bound = HermSosCert::new(
        (0..n)
            .flat_map(|k| {
                roots
                    .iter()
                    .enumerate()
                    .filter(move |(j, _)| *j != k)
                    .flat_map(|(_, rj)| rj.iter())
                    .map(move |c| (k, c.clone()))
            })
            .map(|(k, c)| row(k, &c))
            .collect(),
    );
    // eq3 with s: (1 + s)(I + U^T diag(q + e_k d_k) U) − I = s I + (1 + s)(...).
    let s = random_sos(&mut r, d, 0, 1);
    let mut inner = Vec::new();
    for k in 0..n {
        for c in &q.squares {
            inner.push(row(k, c));
        }
        for (j, rj) in roots.iter().enumerate() {
            if j == k {
                continue;
            }
            for a in rj {
                for b in &roots[k] {
                    inner.push(row(k, &(a * b)));
                }
            }
        }
    }
    let eq3 = HermSosCert::scalar(&s, n).plus(&HermSosCert::new(inner).weighted(&s.one_plus(d)).unwrap());
    // Archimedean data: s₁ = W, s₀ = (m − 1 − q0 − W R²) + Σ (W − wᵢ) xᵢ².
    let big_w = w.iter().cloned().fold(rat(0, 1), |a, b| if b > a { b } else { a }) + rat(r.gen_range(0..=1), 1);
    let r2 = &radius * &radius;
    let base = rat(1, 1) + &q0 + &big_w * &r2;
    let m = base.ceil().to_integer() + num_bigint::BigInt::from(r.gen_range(0..=2));
    let m_rat = Rational::from_integer(m.clone());
    let mut s0 = squares_of(&(&m_rat - &base), d);
    for (i, wi) in w.iter().enumerate() {
        for c in squares_of(&(&big_w - wi), d) {
            s0.push(&c * &Poly::var(d, i));
        }
    }
    let s1 = SosCert::new(squares_of(&big_w, d));
    // eq1: G = f (I + Q) − I − Σ KᵀK.
    let norm = crate::polycore::norm_sq_poly(d);
    let f = &Poly::constant(d, r2) - &norm;
    let id = MatPoly::identity(n, d);
    let k_herm = random_herm(&mut r, n, d, 1, 2);
    let g = id
        .checked_add(&q_mat.value(n, d).unwrap())
        .unwrap()
        .scale_poly(&f)
        .unwrap()
        .checked_sub(&id)
        .unwrap()
        .checked_sub(&k_herm.value(n, d).unwrap())
        .unwrap();
    use num_traits::ToPrimitive;
    let cert = ChainCert {
        radius,
        q_mat,
        eq1: NgElement {
            herm: k_herm,
            multipliers: vec![SosCert::new(vec![Poly::one(d)])],
        },
        q,
        q_bound,
        m: m.to_u64().expect("small m"),
        s0: SosCert::new(s0),
        s1,
        s,
        eq3,
        provenance: Provenance::node("planted", format!("seed {seed}"), vec![]),
    };
    (g, cert)
}

/// A single-coefficient mutation and the change it makes to `lhs − rhs`,
/// computed from the mutated component alone.
pub struct Mutation {
    pub cert: Certificate,
    pub delta: MatPoly,
    pub slot: String,
}

fn bump(p: &Poly, rng: &mut ChaCha8Rng) -> Poly {
    let d = p.nvars();
    let exps: Vec<u32> = match p.terms().map(|(m, _)| m.exps().to_vec()).collect::<Vec<_>>().choose(rng) {
        Some(e) if rng.gen_bool(0.8) => e.clone(),
        _ => (0..d).map(|_| rng.gen_range(0..=1)).collect(),
    };
    p + &Poly::monomial(rat(1, 7), exps)
}

fn bump_entry(h: &MatPoly, rng: &mut ChaCha8Rng) -> (MatPoly, usize, usize) {
    let n = h.n();
    let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let mut rows = h.rows();
    rows[i][j] = bump(&rows[i][j], rng);
    (MatPoly::from_rows(h.nvars(), rows).unwrap(), i, j)
}

/// Mutates one coefficient of `s`, a hermitian factor or a multiplier.
/// Retries until the mutation changes the identity; returns `None` only if
/// nothing in the certificate can be mutated visibly.
pub fn mutate(cert: &Certificate, f: &MatPoly, gs: &[MatPoly], seed: u64) -> Option<Mutation> {
    let mut r = rng(seed);
    let d = f.nvars();
    for _ in 0..64 {
        let mut out = cert.clone();
        let (delta, slot) = match &mut out {
            Certificate::Wqm(c) => {
                let slots = c.s.squares.len() + c.herm.factors.len() + c.g_multipliers.iter().map(|m| m.squares.len() + 1).sum::<usize>();
                let mut k = r.gen_range(0..slots);
                if k < c.s.squares.len() {
                    let old = c.s.squares[k].clone();
                    c.s.squares[k] = bump(&old, &mut r);
                    let ds = &c.s.squares[k].square() - &old.square();
                    (f.scale_poly(&ds).unwrap(), format!("s[{k}]"))
                } else if k - c.s.squares.len() < c.herm.factors.len() {
                    k -= c.s.squares.len();
                    let old = c.herm.factors[k].clone();
                    let (new, i, j) = bump_entry(&old, &mut r);
                    c.herm.factors[k] = new.clone();
                    let dh = old.herm_square().checked_sub(&new.herm_square()).unwrap();
                    (dh, format!("herm[{k}][{},{}]", i + 1, j + 1))
                } else {
                    k -= c.s.squares.len() + c.herm.factors.len();
                    let mut found = None;
                    for (j, m) in c.g_multipliers.iter_mut().enumerate() {
                        if k <= m.squares.len() {
                            found = Some((j, k));
                            break;
                        }
                        k -= m.squares.len() + 1;
                    }
                    let (j, k) = found?;
                    let m = &mut c.g_multipliers[j];
                    let (old, new) = if k == m.squares.len() {
                        let new = bump(&Poly::zero(d), &mut r);
                        m.squares.push(new.clone());
                        (Poly::zero(d), new)
                    } else {
                        let old = m.squares[k].clone();
                        m.squares[k] = bump(&old, &mut r);
                        (old, m.squares[k].clone())
                    };
                    let dsig = &old.square() - &new.square();
                    (gs[j].scale_poly(&dsig).unwrap(), format!("multipliers[{j}][{k}]"))
                }
            }
            Certificate::Og(c) => {
                if c.herm.factors.is_empty() || r.gen_bool(0.5) {
                    let old = c.g_multiplier.clone();
                    c.g_multiplier = bump(&old, &mut r);
                    let dp = &old - &c.g_multiplier;
                    (gs[0].scale_poly(&dp).unwrap(), "multiplier".to_string())
                } else {
                    let k = r.gen_range(0..c.herm.factors.len());
                    let old = c.herm.factors[k].clone();
                    let (new, i, j) = bump_entry(&old, &mut r);
                    c.herm.factors[k] = new.clone();
                    let dh = old.herm_square().checked_sub(&new.herm_square()).unwrap();
                    (dh, format!("herm[{k}][{},{}]", i + 1, j + 1))
                }
            }
            Certificate::Ideal(c) => {
                let k = r.gen_range(0..c.left_factors.len());
                let old = c.left_factors[k].clone();
                let (new, i, j) = bump_entry(&old, &mut r);
                c.left_factors[k] = new.clone();
                let diff = old.checked_sub(&new).unwrap();
                (ideal_sum(&diff, &gs[k]), format!("A[{k}][{},{}]", i + 1, j + 1))
            }
            Certificate::Chain(_) => return None,
        };
        if !delta.is_zero() {
            return Some(Mutation { cert: out, delta, slot });
        }
    }
    None
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::certs::verify_certificate;

    fn planted(seed: u64) -> (Certificate, MatPoly, Vec<MatPoly>) {
        match seed % 3 {
            0 => {
                let p = planted_wqm(seed);
                (Certificate::Wqm(p.cert), p.f, p.gs)
            }
            1 => {
                let p = planted_og(seed);
                (Certificate::Og(p.cert), p.f, vec![p.g])
            }
            _ => {
                let p = planted_ideal(seed);
                (Certificate::Ideal(p.cert), p.f, p.gs)
            }
        }
    }

    #[test]
    fn planted_verify_and_mutations_localize() {
        for seed in 0..30 {
            let (cert, f, gs) = planted(seed);
            let report = verify_certificate(&cert, Some(&f), &gs).unwrap();
            assert!(report.verdict.is_verified(), "seed {seed}: {:?}", report.verdict);
            let m = mutate(&cert, &f, &gs, seed).expect("mutable");
            let report = verify_certificate(&m.cert, Some(&f), &gs).unwrap();
            let got = report.verdict.mismatch().expect("rejected").clone();
            let zero = MatPoly::zeros(f.n(), f.nvars());
            let (i, j, mono) = m.delta.first_difference(&zero).unwrap();
            assert_eq!((got.row, got.col), (i + 1, j + 1), "seed {seed} slot {}", m.slot);
            assert_eq!(got.monomial, mono.exps().to_vec(), "seed {seed} slot {}", m.slot);
        }
    }
}
