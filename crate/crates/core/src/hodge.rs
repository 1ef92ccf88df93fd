//! Cubic Hodge integrals with weights (-1, -1, 1/2), obtained from psi-class
//! intersection numbers, and kappa-decorated integrals via the forgetful map.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::series::{ring_new, Monomial, Rational, Series, Tag, TruncationPolicy, Var};
use crate::util::{bernoulli, inv_automorphism, multisets_with_sum, pow_q, q, qi};
use crate::wk::{multiset_splits, wk_correlator, WkKey};

/// `(2^{-2j} - 1) B_{2j} / (j (2j - 1))`.
pub fn fp_coefficient(j: u32) -> Result<Rational> {
    if j == 0 {
        return Err(Error::Domain("fp_coefficient needs j >= 1".into()));
    }
    let two_pow = pow_q(&qi(2), -2 * j as i64);
    Ok((two_pow - qi(1)) * bernoulli(2 * j) / qi(j as i64 * (2 * j as i64 - 1)))
}

fn fp(j: u32) -> Rational {
    fp_coefficient(j).expect("j >= 1")
}

pub type HodgeKey = WkKey;

/// Lambda-degree `3g - 3 + n - sum(indices)` of a key.
pub fn lambda_degree(g: u32, indices: &[u32]) -> i64 {
    3 * g as i64 - 3 + indices.len() as i64 - indices.iter().map(|&i| i as i64).sum::<i64>()
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

#[derive(Default)]
pub struct HodgeTable {
    memo: Mutex<HashMap<HodgeKey, Rational>>,
}

impl HodgeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static HodgeTable {
        static TABLE: OnceLock<HodgeTable> = OnceLock::new();
        TABLE.get_or_init(HodgeTable::new)
    }

    pub fn insert(&self, key: HodgeKey, value: Rational) {
        self.memo.lock().unwrap().insert(key, value);
    }

    pub fn entries(&self) -> Vec<(HodgeKey, Rational)> {
        let mut v: Vec<_> = self.memo.lock().unwrap().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        v.sort();
        v
    }

    pub fn correlator(&self, g: u32, indices: &[u32]) -> Rational {
        let delta = lambda_degree(g, indices);
        if delta < 0 || delta > 3 * g as i64 || !stable(g, indices.len()) {
            return Rational::zero();
        }
        if delta == 0 {
            return wk_correlator(g, indices);
        }
        let key = HodgeKey::new(g, indices);
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.compute(&key, delta as u32);
        self.insert(key, v.clone());
        v
    }

    fn compute(&self, key: &HodgeKey, delta: u32) -> Rational {
        let g = key.g;
        let idx = &key.indices;
        let n = idx.len();
        if n > 0 && idx[0] == 0 && stable(g, n - 1) {
            let rest = &idx[1..];
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] == 0 || (j > 0 && rest[j] == rest[j - 1]) {
                    continue;
                }
                let mult = rest.iter().filter(|&&v| v == rest[j]).count() as i64;
                let mut d = rest.to_vec();
                d[j] -= 1;
                acc += qi(mult) * self.correlator(g, &d);
            }
            return acc;
        }
        if let Some(p) = idx.iter().position(|&i| i == 1) {
            if stable(g, n - 1) {
                let mut rest = idx.clone();
                rest.remove(p);
                return qi(2 * g as i64 - 3 + n as i64) * self.correlator(g, &rest);
            }
        }
        // Lambda-degree recursion: the degree operator commutes through the
        // exponential of the operators D_j with weight 2j - 1.
        let mut total = Rational::zero();
        let mut j = 1;
        while 2 * j - 1 <= delta {
            let w = fp(j) * qi(2 * j as i64 - 1);
            let mut bracket = Rational::zero();
            let mut add = idx.clone();
            add.push(2 * j);
            bracket += self.correlator(g, &add);
            for p in 0..n {
                if p > 0 && idx[p] == idx[p - 1] {
                    continue;
                }
                let mult = idx.iter().filter(|&&v| v == idx[p]).count() as i64;
                let mut d = idx.clone();
                d[p] += 2 * j - 1;
                bracket -= qi(mult) * self.correlator(g, &d);
            }
            let mut quad = Rational::zero();
            for a in 0..=(2 * j - 2) {
                let b = 2 * j - 2 - a;
                let sgn = if a % 2 == 0 { qi(1) } else { qi(-1) };
                let mut inner = Rational::zero();
                if g > 0 {
                    let mut d = idx.clone();
                    d.push(a);
                    d.push(b);
                    inner += self.correlator(g - 1, &d);
                }
                for (left, right, m) in multiset_splits(idx) {
                    for g1 in 0..=g {
                        // The two lambda-degrees add up to less than delta, so
                        // once one factor is nonzero the other is simpler.
                        let mut l = left.clone();
                        l.push(a);
                        let mut r = right.clone();
                        r.push(b);
                        let (dl, dr) = (lambda_degree(g1, &l), lambda_degree(g - g1, &r));
                        if dl < 0 || dr < 0 || !stable(g1, l.len()) || !stable(g - g1, r.len()) {
                            continue;
                        }
                        let x = self.correlator(g1, &l);
                        if x.is_zero() {
                            continue;
                        }
                        inner += &m * x * self.correlator(g - g1, &r);
                    }
                }
                quad += sgn * inner;
            }
            bracket += quad / qi(2);
            total += w * bracket;
            j += 1;
        }
        total / qi(delta as i64)
    }
}

/// `<Lambda(-1)^2 Lambda(1/2) tau_{indices}>_g` from the shared table.
pub fn hodge_correlator(g: u32, indices: &[u32]) -> Rational {
    HodgeTable::global().correlator(g, indices)
}

/// `D_j(p)` with `t~_1 = t_1 - 1` and `eps^2` stored as `Hbar2`.
pub fn apply_d_j(p: &Series, j: u32) -> Series {
    let ring = p.ring();
    let t = |i: u32| Var::Tsmall(i as u16);
    let shift = 2 * j - 1;
    let mut out = p.derive(t(2 * j));
    let max_idx = p.iter().filter_map(|(m, _)| m.max_t_index()).max().unwrap_or(0) as u32;
    for i in 0..=max_idx {
        if i + shift > max_idx {
            break;
        }
        let d = p.derive(t(i + shift));
        out = &out - &d.mul_monomial(&Monomial::var(t(i)), &qi(1)).unwrap();
    }
    for a in 0..=(2 * j - 2) {
        let c = if a % 2 == 0 { q(1, 2) } else { q(-1, 2) };
        let d = p.derive(t(a)).derive(t(2 * j - 2 - a));
        out = &out + &d.mul_monomial(&Monomial::var(Var::Hbar2), &c).unwrap();
    }
    let _ = ring;
    out
}

/// `exp(sum_j f_j D_j)` applied to a polynomial; the series terminates since
/// each `D_j` lowers index sum plus number of factors.
pub fn apply_exp_g(p: &Series) -> Series {
    let mut out = p.clone();
    let mut term = p.clone();
    let mut k = 1i64;
    loop {
        let max_idx = term.iter().filter_map(|(m, _)| m.max_t_index()).max().unwrap_or(0) as u32;
        let mut next = term.ring().zero();
        for j in 1..=(max_idx / 2 + 1) {
            next = &next + &apply_d_j(&term, j).scale(&fp(j));
        }
        if next.is_zero() {
            return out;
        }
        term = next.scale(&q(1, k));
        out = &out + &term;
        k += 1;
    }
}

/// Ring used for WK and Hodge partition polynomials.
pub fn hodge_poly_ring(g_max: u32, n_max: u32) -> crate::series::Ring {
    crate::wk::wk_ring(g_max, n_max)
}

/// Univariate truncated `exp` on coefficient vectors (index = degree).
pub fn uni_exp(a: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let mut e = vec![Rational::zero(); n];
    if n == 0 {
        return e;
    }
    e[0] = Rational::one();
    for m in 1..n {
        let mut s = Rational::zero();
        for k in 1..=m {
            s += qi(k as i64) * &a[k] * &e[m - k];
        }
        e[m] = s / qi(m as i64);
    }
    e
}

/// Univariate truncated `log` for constant term 1.
pub fn uni_log(e: &[Rational]) -> Vec<Rational> {
    let n = e.len();
    let mut l = vec![Rational::zero(); n];
    for m in 1..n {
        let mut s = qi(m as i64) * &e[m];
        for k in 1..m {
            s -= qi(k as i64) * &l[k] * &e[m - k];
        }
        l[m] = s / qi(m as i64);
    }
    l
}

/// Weights `s_d` of `exp(sum s_d kappa_d)` with the derived `b_d`, both
/// stored for `1 <= d <= degree` at index `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaSpec {
    pub s: Vec<Rational>,
    pub b: Vec<Rational>,
}

impl KappaSpec {
    /// From `s_1..s_degree`.
    pub fn from_s(degree: u32, s: impl Fn(u32) -> Rational) -> Self {
        let mut sv = vec![Rational::zero(); degree as usize + 1];
        for d in 1..=degree {
            sv[d as usize] = s(d);
        }
        let neg: Vec<Rational> = sv.iter().map(|x| -x.clone()).collect();
        let e = uni_exp(&neg);
        let b = e.iter().enumerate().map(|(d, x)| if d == 0 { Rational::zero() } else { -x.clone() }).collect();
        KappaSpec { s: sv, b }
    }

    /// From `b_1..b_degree`, solving `exp(-sum s_d z^d) = 1 - sum b_d z^d`.
    pub fn from_b(degree: u32, b: impl Fn(u32) -> Rational) -> Self {
        let mut e = vec![Rational::one(); degree as usize + 1];
        let mut bv = vec![Rational::zero(); degree as usize + 1];
        for d in 1..=degree {
            bv[d as usize] = b(d);
            e[d as usize] = -b(d);
        }
        let s = uni_log(&e).into_iter().map(|x| -x).collect();
        KappaSpec { s, b: bv }
    }

    /// `s_d = -(1/d)(-1/2)^d`.
    pub fn elsv(degree: u32) -> Self {
        KappaSpec::from_s(degree, |d| -pow_q(&q(-1, 2), d as i64) / qi(d as i64))
    }

    /// `exp(-sum s_d z^d) = sum (-1)^d (2d+1)!! z^d`.
    pub fn kw_bernoulli(degree: u32) -> Self {
        KappaSpec::from_b(degree, |d| {
            let v = crate::util::odf_q(d + 1);
            if d % 2 == 0 {
                -v
            } else {
                v
            }
        })
    }

    pub fn degree(&self) -> u32 {
        self.b.len() as u32 - 1
    }
}

/// A marked point of a kappa-decorated integral.
#[derive(Clone, Debug, PartialEq)]
pub enum Insertion {
    /// `psi^d`
    Psi(u32),
    /// `1 / (1 + alpha psi)`
    Denominator(Rational),
}

/// `int e^{sum s_d kappa_d} C prod(insertions)` where `corr` evaluates the
/// undecorated integrals of the class `C`, which must pull back along
/// forgetful maps.
pub fn kappa_integral(
    g: u32,
    points: &[Insertion],
    ks: &KappaSpec,
    corr: &dyn Fn(u32, &[u32]) -> Rational,
) -> Result<Rational> {
    let n = points.len() as i64;
    let dim0 = 3 * g as i64 - 3 + n;
    if dim0 < 0 {
        return Ok(Rational::zero());
    }
    let fixed: Vec<u32> = points.iter().filter_map(|p| if let Insertion::Psi(d) = p { Some(*d) } else { None }).collect();
    let alphas: Vec<&Rational> = points
        .iter()
        .filter_map(|p| if let Insertion::Denominator(a) = p { Some(a) } else { None })
        .collect();
    let fixed_sum: i64 = fixed.iter().map(|&d| d as i64).sum();
    if fixed_sum > dim0 {
        return Ok(Rational::zero());
    }
    let budget = (dim0 - fixed_sum) as u32;
    if budget > ks.degree() && ks.b[1..].iter().any(|b| !b.is_zero()) {
        // Extra points can need b_d with d up to the budget.
        if (ks.degree() as usize) < budget as usize {
            return Err(Error::OutOfRange(format!("kappa weights known to degree {}, need {}", ks.degree(), budget)));
        }
    }
    let mut total = Rational::zero();
    for nprime in 0..=budget {
        for kappa_sum in nprime..=budget {
            for ds in multisets_with_sum(nprime as usize, kappa_sum, 1) {
                let mut w = inv_automorphism(&ds);
                for &d in &ds {
                    w *= ks.b.get(d as usize).cloned().unwrap_or_else(Rational::zero);
                }
                if w.is_zero() {
                    continue;
                }
                let mut base = fixed.clone();
                base.extend(ds.iter().map(|d| d + 1));
                let rest_budget = budget - kappa_sum;
                for m in bounded_vectors(alphas.len(), rest_budget) {
                    let mut coeff = w.clone();
                    let mut idx = base.clone();
                    for (a, &mi) in alphas.iter().zip(&m) {
                        coeff *= pow_q(&-(*a).clone(), mi as i64);
                        idx.push(mi);
                    }
                    if coeff.is_zero() {
                        continue;
                    }
                    total += coeff * corr(g, &idx);
                }
            }
        }
    }
    Ok(total)
}

/// All vectors of `len` nonnegative integers with sum at most `bound`.
fn bounded_vectors(len: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for v in &out {
            let used: u32 = v.iter().sum();
            for x in 0..=(bound - used) {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Kappa-decorated cubic Hodge integral.
pub fn kappa_hodge_integral(g: u32, points: &[Insertion], ks: &KappaSpec) -> Result<Rational> {
    kappa_integral(g, points, ks, &hodge_correlator)
}

/// Residual of the asymptotic identity `Phi(z+1)/Phi(z) = (z+1/2)/sqrt(z(z+1))`
/// with `log Phi(z) = sum_k f_k z^{1-2k}`, as a series in `1/z` through `order`.
pub fn phi_ratio_residual(order: u32, f: &dyn Fn(u32) -> Rational) -> Series {
    let ring = ring_new(TruncationPolicy::unbounded().with_aux(Some(order)), &[Tag::Zinv]);
    let w = ring.var(Var::Zinv);
    let one = ring.one();
    let one_w = &one + &w;
    let mut r = ring.zero();
    let mut k = 1;
    while 2 * k - 1 <= order {
        let wpow = w.pow(2 * k - 1).unwrap();
        let inv = one_w.pow(2 * k - 1).unwrap().inv().unwrap();
        r = &r + &(&wpow * &(&inv - &one)).scale(&f(k));
        k += 1;
    }
    let half_w = &one + &w.scale(&q(1, 2));
    r = &r - &half_w.log().unwrap();
    r = &r + &one_w.log().unwrap().scale(&q(1, 2));
    r
}

pub fn phi_ratio_check(order: u32) -> VerificationReport {
    phi_ratio_check_with(order, &fp)
}

/// Same as [`phi_ratio_check`] with caller-supplied coefficients.
pub fn phi_ratio_check_with(order: u32, f: &dyn Fn(u32) -> Rational) -> VerificationReport {
    let r = phi_ratio_residual(order, f);
    let mut rep = VerificationReport::new("phi-ratio", Some(*r.policy()));
    for e in 1..=order {
        let m = Monomial::pow(Var::Zinv, e as i32);
        rep.check(m.to_string(), r.get(&m), Rational::zero());
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_values() {
        assert_eq!(fp_coefficient(1).unwrap(), q(-1, 8));
        assert_eq!(fp_coefficient(2).unwrap(), q(1, 192));
        assert!(fp_coefficient(0).is_err());
    }

    #[test]
    fn low_genus_values() {
        assert_eq!(hodge_correlator(0, &[0, 0, 0]), qi(1));
        assert_eq!(hodge_correlator(1, &[0]), q(-1, 16));
        assert_eq!(hodge_correlator(1, &[1]), q(1, 24));
        for idx in [vec![0, 0, 0, 1], vec![0, 0, 0, 0, 2], vec![0, 0, 1, 1, 1]] {
            assert_eq!(hodge_correlator(0, &idx), wk_correlator(0, &idx));
        }
    }

    #[test]
    fn d_operator_examples() {
        let ring = hodge_poly_ring(2, 4);
        let t = |i| ring.var(Var::Tsmall(i));
        assert_eq!(apply_d_j(&t(2), 1), &ring.one() - &t(1));
        let sq = &t(0) * &t(0);
        assert_eq!(apply_d_j(&sq, 1), ring.var(Var::Hbar2));
        assert!(apply_d_j(&ring.one(), 1).is_zero());
        assert_eq!(apply_exp_g(&ring.one()), ring.one());
    }

    #[test]
    fn kappa_weights() {
        let ks = KappaSpec::elsv(6);
        for d in 1..=6u32 {
            assert_eq!(ks.b[d as usize], -pow_q(&q(-1, 2), d as i64));
        }
        let kw = KappaSpec::kw_bernoulli(4);
        assert_eq!(kw.s[1], qi(3));
        let back = KappaSpec::from_s(4, |d| kw.s[d as usize].clone());
        assert_eq!(back.b, kw.b);
    }

    #[test]
    fn phi_ratio() {
        assert!(phi_ratio_check(8).passed());
        let bad = phi_ratio_check_with(4, &|k| if k == 1 { fp(1) + qi(1) } else { fp(k) });
        // f_1 enters only through (z+1)^{-1} - z^{-1}, which starts at z^{-2}.
        assert_eq!(bad.failures[0].monomial, "zinv^2");
    }
}
