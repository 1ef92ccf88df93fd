//! Property suites shared by the per-module tests and the acceptance run.
//! Every suite uses a fixed seed and returns the first counterexample.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestError, TestRunner};

use hodge_bgw::closed_forms::{loop_solve_wk, JetPoly};
use hodge_bgw::gbgw::{caj_apply_w, caj_iterate, virasoro_apply};
use hodge_bgw::util::{q, qi};
use hodge_bgw::wk::wk_correlator;
use hodge_bgw::{ring_new, Monomial, Rational, Ring, Series, Tag, TruncationPolicy, Var};

pub const CASES: u32 = 128;

fn runner(seed: u64) -> TestRunner {
    TestRunner::new(Config { cases: CASES, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() })
}

fn run<S: Strategy>(seed: u64, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(seed).run(&s, f).map_err(|e| match e {
        TestError::Fail(why, v) => format!("{why} for {v:?}"),
        TestError::Abort(why) => format!("aborted: {why}"),
    })
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// `(X exponent, T_1, T_3, hbar^2 exponent)` terms.
type Terms = Vec<((i32, i32, i32, i32), Rational)>;

fn terms(len: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(((0i32..=3, 0i32..=2, 0i32..=1, 0i32..=1), rational()), 0..len)
}

fn big_ring() -> Ring {
    let p = TruncationPolicy::unbounded().with_genus(Some(2)).with_t_count(Some(3)).with_t_index(Some(1)).with_x_degree(Some(4));
    ring_new(p, &[Tag::X, Tag::Todd, Tag::Hbar2])
}

fn small_ring() -> Ring {
    let p = TruncationPolicy::unbounded().with_genus(Some(1)).with_t_count(Some(2)).with_t_index(Some(1)).with_x_degree(Some(2));
    ring_new(p, &[Tag::X, Tag::Todd, Tag::Hbar2])
}

fn build(ring: Ring, t: &Terms) -> Series {
    let mut s = ring.zero();
    for ((x, t1, t3, h), c) in t {
        let m = Monomial::from_pairs(&[(Var::X, *x), (Var::Todd(0), *t1), (Var::Todd(1), *t3), (Var::Hbar2, *h)]);
        if ring.policy.admits(&m) {
            s.add_term(m, c.clone()).unwrap();
        }
    }
    s
}

fn eq(a: &Series, b: &Series, what: &str) -> Result<(), TestCaseError> {
    prop_assert!(a == b, "{}: {} != {}", what, a, b);
    Ok(())
}

/// Commutative ring axioms, inverse, exp/log and Leibniz in a truncated ring.
pub fn ring_axioms() -> Result<(), String> {
    run(0x5e1e5, (terms(6), terms(6), terms(6)), |(ta, tb, tc)| {
        let r = big_ring();
        let (a, b, c) = (build(r, &ta), build(r, &tb), build(r, &tc));
        eq(&(&a + &b), &(&b + &a), "a+b")?;
        eq(&(&a * &b), &(&b * &a), "ab")?;
        eq(&(&(&a * &b) * &c), &(&a * &(&b * &c)), "(ab)c")?;
        eq(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), "a(b+c)")?;
        eq(&(&a + &a.scale(&qi(-1))), &r.zero(), "a + (-a)")?;
        eq(&(&a * &r.one()), &a, "a1")?;
        let a0 = a.filter(|m| !m.is_one());
        let one_a = &r.one() + &a0;
        eq(&(&one_a * &one_a.inv().unwrap()), &r.one(), "(1+a)/(1+a)")?;
        eq(&one_a.log().unwrap().exp().unwrap(), &one_a, "exp log")?;
        let d = r.policy.x_degree_max.unwrap() as i32;
        let lhs = (&a * &b).derive(Var::X).filter(|m| m.exponent(Var::X) < d);
        let rhs = (&(&a.derive(Var::X) * &b) + &(&a * &b.derive(Var::X))).filter(|m| m.exponent(Var::X) < d);
        eq(&lhs, &rhs, "Leibniz")
    })
}

/// Truncating to a smaller policy commutes with every ring operation.
pub fn truncation_coherence() -> Result<(), String> {
    run(0x7c0e, (terms(6), terms(6)), |(ta, tb)| {
        let (big, small) = (big_ring(), small_ring());
        let (a, b) = (build(big, &ta), build(big, &tb));
        let t = |s: &Series| s.truncate_to(small).unwrap();
        eq(&t(&(&a + &b)), &(&t(&a) + &t(&b)), "sum")?;
        eq(&t(&(&a * &b)), &(&t(&a) * &t(&b)), "product")?;
        let a0 = a.filter(|m| !m.is_one());
        eq(&t(&a0.exp().unwrap()), &t(&a0).exp().unwrap(), "exp")?;
        eq(&t(&a0.pow(3).unwrap()), &t(&a0).pow(3).unwrap(), "cube")
    })
}

fn indices(max_len: usize) -> impl Strategy<Value = (u32, Vec<u32>)> {
    (0u32..=3, prop::collection::vec(0u32..=7, 1..=max_len))
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Dimension rule, string equation and dilaton equation.
pub fn wk_dimension_string_dilaton() -> Result<(), String> {
    run(0xd11a, indices(4), |(g, idx)| {
        let n = idx.len() as i64;
        let s: i64 = idx.iter().map(|&i| i as i64).sum();
        let v = wk_correlator(g, &idx);
        if s != 3 * g as i64 - 3 + n {
            prop_assert_eq!(v, qi(0));
        }
        if stable(g, idx.len()) {
            let mut with0 = idx.clone();
            with0.push(0);
            let mut want = qi(0);
            for i in 0..idx.len() {
                if idx[i] > 0 {
                    let mut lowered = idx.clone();
                    lowered[i] -= 1;
                    want += wk_correlator(g, &lowered);
                }
            }
            prop_assert_eq!(wk_correlator(g, &with0), want, "string");
            let mut with1 = idx.clone();
            with1.push(1);
            prop_assert_eq!(wk_correlator(g, &with1), qi(2 * g as i64 - 2 + n) * wk_correlator(g, &idx), "dilaton");
        }
        Ok(())
    })
}

fn gbgw_ring() -> Ring {
    ring_new(TruncationPolicy::unbounded().with_floor(0), &[Tag::Todd, Tag::Nu, Tag::Hbar2])
}

/// `(T_1, T_3, T_5, nu, hbar^2)` exponents.
type GTerms = Vec<((i32, i32, i32, i32, i32), Rational)>;

fn gterms(len: usize) -> impl Strategy<Value = GTerms> {
    prop::collection::vec(((0i32..=3, 0i32..=2, 0i32..=1, 0i32..=2, 0i32..=2), rational()), 0..len)
}

fn gbuild(t: &GTerms, keep: impl Fn(&Monomial) -> bool) -> Series {
    let r = gbgw_ring();
    let mut s = r.zero();
    for ((a, b, c, nu, h), k) in t {
        let m = Monomial::from_pairs(&[(Var::Todd(0), *a), (Var::Todd(1), *b), (Var::Todd(2), *c), (Var::Nu, *nu), (Var::Hbar2, *h)]);
        if keep(&m) {
            s.add_term(m, k.clone()).unwrap();
        }
    }
    s
}

fn weights(s: &Series) -> Vec<i32> {
    let mut w: Vec<i32> = s.iter().map(|(m, _)| m.weight()).collect();
    w.sort_unstable();
    w.dedup();
    w
}

/// The cut-and-join operator raises the grading by exactly one, and its
/// iterates from 1 are homogeneous.
pub fn caj_homogeneity() -> Result<(), String> {
    let state = caj_iterate(7, None);
    for (k, it) in state.iterates.iter().enumerate() {
        if !it.is_zero() && weights(it) != vec![k as i32] {
            return Err(format!("iterate {k} has weights {:?}", weights(it)));
        }
    }
    run(0xca1, (gterms(6), 1i32..=9), |(t, w)| {
        let p = gbuild(&t, |m| m.weight() == w);
        let image = caj_apply_w(&p);
        prop_assert!(image.is_zero() == p.is_zero());
        if !p.is_zero() {
            prop_assert_eq!(weights(&image), vec![w + 1]);
        }
        Ok(())
    })
}

/// `[L_m, L_n] = (m - n) L_{m+n}` on random polynomials.
pub fn virasoro_brackets() -> Result<(), String> {
    run(0xb7a, gterms(6), |t| {
        let p = gbuild(&t, |_| true);
        for (m, n) in [(0u32, 1u32), (1, 2), (0, 2)] {
            let lhs = &virasoro_apply(m, &virasoro_apply(n, &p)) - &virasoro_apply(n, &virasoro_apply(m, &p));
            let rhs = virasoro_apply(m + n, &p).scale(&qi(m as i64 - n as i64));
            prop_assert!(lhs == rhs, "[L_{}, L_{}] on {}", m, n, p);
        }
        Ok(())
    })
}

/// Homogeneous jet polynomial of weight `w` with `z_1` exponent absorbing
/// the remainder.
fn jet_poly(t: &[((i32, i32, i32), Rational)], w: i32) -> JetPoly {
    let mut p = JetPoly::zero();
    for ((e2, e3, e4), c) in t {
        let e1 = w - 2 * e2 - 3 * e3 - 4 * e4;
        p.add_term(vec![e1, *e2, *e3, *e4], c.clone());
    }
    p
}

fn jterms() -> impl Strategy<Value = Vec<((i32, i32, i32), Rational)>> {
    prop::collection::vec(((0i32..=3, 0i32..=2, 0i32..=1), rational()), 1..5)
}

/// Total derivative raises the jet weight by one, the Euler operator
/// returns it, weights add under products, and Leibniz holds.
pub fn jet_homogeneity() -> Result<(), String> {
    for g in 2..=3 {
        let f = loop_solve_wk(g).map_err(|e| e.to_string())?;
        if f.poly.homogeneous_weight() != Some(2 * g as i32 - 2) {
            return Err(format!("F_{g} is not homogeneous of weight {}", 2 * g - 2));
        }
    }
    run(0x1e7, (jterms(), jterms(), -4i32..=4, -4i32..=4), |(ta, tb, wa, wb)| {
        let (a, b) = (jet_poly(&ta, wa), jet_poly(&tb, wb));
        if !a.is_zero() {
            prop_assert_eq!(a.homogeneous_weight(), Some(wa));
            prop_assert_eq!(a.euler(), a.scale(&qi(wa as i64)));
            let da = a.total_derivative();
            prop_assert!(da.is_zero() || da.homogeneous_weight() == Some(wa + 1));
        }
        let ab = a.mul(&b);
        if !ab.is_zero() {
            prop_assert_eq!(ab.homogeneous_weight(), Some(wa + wb));
        }
        let lhs = ab.total_derivative();
        let rhs = a.total_derivative().mul(&b).add(&a.mul(&b.total_derivative()));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

/// Every suite, by name.
pub type Suite = fn() -> Result<(), String>;

pub fn all_suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("ring axioms", ring_axioms),
        ("truncation coherence", truncation_coherence),
        ("wk dimension/string/dilaton", wk_dimension_string_dilaton),
        ("cut-and-join homogeneity", caj_homogeneity),
        ("virasoro brackets", virasoro_brackets),
        ("jet homogeneity", jet_homogeneity),
    ]
}
