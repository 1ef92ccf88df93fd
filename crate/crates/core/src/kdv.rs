//! Pseudodifferential operators over truncated series and the KdV flows.
//!
//! Odd powers of `hbar` never appear: with `L = hbar^2 d^2 + 2u` and
//! `w = u / hbar^2 = d^2 log Z`, the flows read
//! `dw/dT_{2a+1} = hbar^{2a} / (2 (2a+1)!!) [(L'^{(2a+1)/2})_+, L']`
//! for `L' = d^2 + 2w`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gbgw::{caj_iterate, full_free_energy_x, x_power};
use crate::report::VerificationReport;
use crate::series::{ring_new, Monomial, Rational, Ring, Series, Tag, TruncationPolicy, Var};
use crate::util::{binomial_signed, odf_q, q, qi};
use crate::wk::WkTable;

/// Orders at or above this are exact for a purely differential operator.
const EXACT: i32 = i32::MIN / 4;

/// `sum_k a_k d^k` with coefficients on the left. Orders below `k_min` are
/// unknown; every order at or above it is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Pdo {
    ring: Ring,
    x: Var,
    k_min: i32,
    coeffs: BTreeMap<i32, Series>,
}

/// `d^n s / dx^n`.
pub fn d_n(s: &Series, x: Var, n: u32) -> Series {
    (0..n).fold(s.clone(), |acc, _| acc.derive(x))
}

impl Pdo {
    /// A differential operator from `(order, coefficient)` pairs.
    pub fn differential(ring: Ring, x: Var, terms: &[(i32, Series)]) -> Result<Pdo> {
        let mut p = Pdo { ring, x, k_min: EXACT, coeffs: BTreeMap::new() };
        for (k, c) in terms {
            if *k < 0 {
                return Err(Error::Precondition("differential operator with a negative order".into()));
            }
            p.add_coeff(*k, c)?;
        }
        Ok(p)
    }

    /// A general operator known exactly at orders `>= k_min`.
    pub fn with_window(ring: Ring, x: Var, k_min: i32, terms: &[(i32, Series)]) -> Result<Pdo> {
        let mut p = Pdo { ring, x, k_min, coeffs: BTreeMap::new() };
        for (k, c) in terms {
            if *k >= k_min {
                p.add_coeff(*k, c)?;
            }
        }
        Ok(p)
    }

    /// `hbar`-free Lax operator `d^2 + 2w`.
    pub fn lax(w: &Series, x: Var) -> Result<Pdo> {
        let ring = w.ring();
        Pdo::differential(ring, x, &[(2, ring.one()), (0, w.scale(&qi(2)))])
    }

    fn add_coeff(&mut self, k: i32, c: &Series) -> Result<()> {
        let e = self.coeffs.entry(k).or_insert_with(|| self.ring.zero());
        *e = e.checked_add(c)?;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
        Ok(())
    }

    pub fn coeff(&self, k: i32) -> Series {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn k_min(&self) -> Option<i32> {
        (self.k_min != EXACT).then_some(self.k_min)
    }

    /// Highest order with a nonzero coefficient.
    pub fn top(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn orders(&self) -> impl Iterator<Item = (&i32, &Series)> {
        self.coeffs.iter()
    }

    fn check_compatible(&self, other: &Pdo) -> Result<()> {
        if self.ring != other.ring || self.x != other.x {
            return Err(Error::PolicyMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Pdo) -> Result<Pdo> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.k_min = self.k_min.max(other.k_min);
        for (k, c) in &other.coeffs {
            out.add_coeff(*k, c)?;
        }
        out.coeffs.retain(|k, _| *k >= out.k_min);
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Pdo {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = v.scale(c);
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    pub fn sub(&self, other: &Pdo) -> Result<Pdo> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// All contributions of the given terms at orders `>= lo`.
    fn mul_from(&self, other: &Pdo, lo: i32) -> Result<Pdo> {
        let mut out = Pdo { ring: self.ring, x: self.x, k_min: lo, coeffs: BTreeMap::new() };
        for (&m, am) in &self.coeffs {
            for (&n, bn) in &other.coeffs {
                // a d^m b d^n = sum_j C(m, j) a b^{(j)} d^{m+n-j}
                let mut deriv = bn.clone();
                let mut j = 0i64;
                while m as i64 + n as i64 - j >= lo as i64 && !deriv.is_zero() {
                    if m >= 0 && j > m as i64 {
                        break;
                    }
                    let c = binomial_signed(m as i64, j as u32);
                    if !c.is_zero() {
                        out.add_coeff(m + n - j as i32, &am.checked_mul(&deriv)?.scale(&c))?;
                    }
                    deriv = deriv.derive(self.x);
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// Composition, exact wherever both factors allow it.
    pub fn mul(&self, other: &Pdo) -> Result<Pdo> {
        self.check_compatible(other)?;
        let lo = match (self.top(), other.top()) {
            (Some(ta), Some(tb)) => (self.k_min.saturating_add(tb)).max(other.k_min.saturating_add(ta)),
            _ => EXACT,
        };
        if lo == EXACT && self.coeffs.keys().any(|&k| k < 0) {
            return Err(Error::WindowUnderflow("product of exact operators with negative orders".into()));
        }
        self.mul_from(other, lo.max(EXACT))
    }

    pub fn commutator(&self, other: &Pdo) -> Result<Pdo> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Nonnegative orders; fails if any of them is not known exactly.
    pub fn plus_part(&self) -> Result<Pdo> {
        if self.k_min > 0 {
            return Err(Error::WindowUnderflow(format!("plus part needs order 0, window starts at {}", self.k_min)));
        }
        let coeffs = self.coeffs.iter().filter(|(k, _)| **k >= 0).map(|(k, v)| (*k, v.clone())).collect();
        Ok(Pdo { ring: self.ring, x: self.x, k_min: EXACT, coeffs })
    }

    /// Negative orders, with the same window.
    pub fn minus_part(&self) -> Pdo {
        let coeffs = self.coeffs.iter().filter(|(k, _)| **k < 0).map(|(k, v)| (*k, v.clone())).collect();
        Pdo { ring: self.ring, x: self.x, k_min: self.k_min, coeffs }
    }

    /// Square root `d + r_0 + r_{-1} d^{-1} + ...` of an operator `d^2 + ...`,
    /// order by order down to `-depth`.
    pub fn sqrt(&self, depth: u32) -> Result<Pdo> {
        if self.top() != Some(2) || self.coeff(2) != self.ring.one() || self.k_min > -(depth as i32) + 1 {
            return Err(Error::Precondition("sqrt needs a monic second-order operator".into()));
        }
        let mut r = Pdo { ring: self.ring, x: self.x, k_min: EXACT, coeffs: BTreeMap::new() };
        r.add_coeff(1, &self.ring.one())?;
        for k in (-(depth as i32)..=0).rev() {
            // Only r_k is missing at order k+1, where it enters as 2 r_k.
            let sq = r.mul_from(&r, k + 1)?;
            let rk = self.coeff(k + 1).checked_sub(&sq.coeff(k + 1))?.scale(&q(1, 2));
            r.add_coeff(k, &rk)?;
        }
        r.k_min = -(depth as i32);
        Ok(r)
    }

    /// `L^a R` with `R` the square root.
    pub fn odd_half_power(&self, a: u32, depth: u32) -> Result<Pdo> {
        let root = self.sqrt(depth)?;
        let mut out = root;
        for _ in 0..a {
            out = self.mul(&out)?;
        }
        Ok(out)
    }
}

/// `(1 / (2 (2a+1)!!)) [(L'^{(2a+1)/2})_+, L']` for `L' = d^2 + 2w`, without the
/// `hbar^{2a}` factor. Returns the order-zero part and the full commutator.
pub fn kdv_rhs(w: &Series, x: Var, a: u32) -> Result<(Series, Pdo)> {
    let lax = Pdo::lax(w, x)?;
    let p = lax.odd_half_power(a, 2 * a + 3)?.plus_part()?;
    let c = p.commutator(&lax)?.scale(&(qi(2) * odf_q(a + 1)).recip());
    Ok((c.coeff(0), c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KdvSide {
    /// `w = d^2 F_WK / dt_0^2`, flows in `t_a`.
    Wk,
    /// `w = d^2 log Z_gBGW / dT_1^2` in the nu-form, flows in `T_{2a+1}`.
    Gbgw,
}

/// Checks the flow `dw/dT_{2a+1} = hbar^{2a} (...)` on one solution.
///
/// The WK solution is kept through genus `genus_max` with `size` counting the
/// `t`-factors that remain exact; the gBGW solution is kept to weight
/// `size + 2a + 3`.
type Keep = Box<dyn Fn(&Monomial) -> bool>;

pub fn verify_kdv_flow(a: u32, side: KdvSide, genus_max: u32, size: u32) -> Result<VerificationReport> {
    let (w, x, t, keep): (Series, Var, Var, Keep) = match side {
        KdvSide::Wk => {
            let n = size + 2 * a + 3;
            let policy = TruncationPolicy::unbounded()
                .with_t_count(Some(n))
                .with_genus(Some(genus_max))
                .with_floor(-(a as i32) - 2);
            let ring = ring_new(policy, &[Tag::Tsmall, Tag::Hbar2]);
            let f = WkTable::global().free_energy_poly(ring, genus_max, n);
            let x = Var::Tsmall(0);
            (d_n(&f, x, 2), x, Var::Tsmall(a as u16), Box::new(move |m: &Monomial| m.t_count() <= size as i32))
        }
        KdvSide::Gbgw => {
            let k = size + 2 * a + 3;
            let z = caj_iterate(k, None).zg;
            let f = z.log()?;
            let x = Var::Todd(0);
            (d_n(&f, x, 2), x, Var::Todd(a as u16), Box::new(move |m: &Monomial| m.weight() <= size as i32))
        }
    };
    let name = format!("kdv-flow a={a} {side:?}");
    let mut rep = VerificationReport::new(&name, Some(*w.policy()));
    let lhs = w.derive(t);
    let (rhs0, comm) = kdv_rhs(&w, x, a)?;
    let rhs = rhs0.mul_monomial(&Monomial::pow(Var::Hbar2, a as i32), &Rational::one())?;
    rep.compare_series(&lhs, &rhs, &keep);
    for (k, c) in comm.orders() {
        if *k != 0 {
            rep.compare_series(c, &w.ring().zero(), &keep);
        }
    }
    Ok(rep)
}

/// The `T_1`-only sector of `u = hbar^2 d^2 F / dT_1^2` against
/// `(x^2/4 + hbar^2/8) / (1 - T_1)^2` in the x-form, and against
/// `hbar^2 (1/8 - nu/2) / (1 - T_1)^2` in the nu-form, through `T_1^{t1_max}`.
pub fn verify_tau_initial(t1_max: u32, genus_max: u32, x_degree_max: u32) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("tau-initial", None);
    let only_t1 = |m: &Monomial| m.iter().all(|(v, _)| !matches!(v, Var::Todd(a) if a > 0));
    let hbar2 = Monomial::var(Var::Hbar2);

    let fx = full_free_energy_x(genus_max, t1_max + 2, 0, x_degree_max)?;
    let ring = fx.ring();
    let ux = d_n(&fx, Var::Todd(0), 2).mul_monomial(&hbar2, &Rational::one())?;
    let geom = (&ring.one() - &ring.var(Var::Todd(0))).pow(2)?.inv()?;
    let init = &x_power(ring, 2)?.scale(&q(1, 4)) + &ring.monomial(hbar2.clone(), q(1, 8));
    let want = init.checked_mul(&geom)?;
    let deg = t1_max as i32;
    rep.compare_series(&ux.filter(only_t1), &want, |m| m.t_count() <= deg);

    let z = caj_iterate(t1_max + 2, None).zg;
    let nring = z.ring();
    let un = d_n(&z.log()?, Var::Todd(0), 2).mul_monomial(&hbar2, &Rational::one())?;
    let geom = (&nring.one() - &nring.var(Var::Todd(0))).pow(2)?.inv()?;
    let init = &nring.monomial(hbar2.clone(), q(1, 8)) - &nring.monomial(hbar2.mul(&Monomial::var(Var::Nu)), q(1, 2));
    let want = init.checked_mul(&geom)?;
    rep.compare_series(&un.filter(only_t1), &want, |m| m.t_count() <= deg);
    Ok(rep)
}

/// `<tau_0 tau_0 tau_6>_2 = <tau_4>_2` from the sixth KdV flow at
/// `t_1 = t_2 = ... = 0`, where `w = t_0 / eps^2` exactly.
pub fn tau4_genus2_via_kdv() -> Result<Rational> {
    let policy = TruncationPolicy::unbounded().with_floor(-9);
    let ring = ring_new(policy, &[Tag::Tsmall, Tag::Hbar2]);
    let w = ring.monomial(Monomial::from_pairs(&[(Var::Tsmall(0), 1), (Var::Hbar2, -1)]), Rational::one());
    let (rhs, _) = kdv_rhs(&w, Var::Tsmall(0), 6)?;
    let rhs = rhs.mul_monomial(&Monomial::pow(Var::Hbar2, 6), &Rational::one())?;
    Ok(rhs.get(&Monomial::var(Var::Hbar2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        ring_new(TruncationPolicy::unbounded().with_t_count(Some(6)).with_t_index(Some(0)), &[Tag::Tsmall])
    }

    #[test]
    fn leibniz_and_plus_part() {
        let r = ring();
        let x = Var::Tsmall(0);
        let u = r.var(x).pow(3).unwrap();
        let dinv = Pdo::with_window(r, x, -4, &[(-1, r.one())]).unwrap();
        let uop = Pdo::differential(r, x, &[(0, u.clone())]).unwrap();
        let p = dinv.mul(&uop).unwrap();
        assert_eq!(p.coeff(-1), u);
        assert_eq!(p.coeff(-2), u.derive(x).scale(&qi(-1)));
        assert_eq!(p.coeff(-3), d_n(&u, x, 2));
        let d = Pdo::differential(r, x, &[(1, r.one())]).unwrap();
        assert_eq!(d.commutator(&uop).unwrap().coeff(0), u.derive(x));
        let mixed = d.add(&dinv).unwrap();
        assert_eq!(mixed.plus_part().unwrap().coeff(1), r.one());
        assert!(mixed.plus_part().unwrap().coeff(-1).is_zero());
    }

    #[test]
    fn roots() {
        let r = ring();
        let x = Var::Tsmall(0);
        let w = &r.var(x).pow(2).unwrap() + &r.var(x);
        let lax = Pdo::lax(&w, x).unwrap();
        let root = lax.sqrt(6).unwrap();
        assert_eq!(root.coeff(0), r.zero());
        assert_eq!(root.coeff(-1), w);
        let sq = root.mul(&root).unwrap();
        for k in sq.k_min().unwrap()..=2 {
            assert_eq!(sq.coeff(k), lax.coeff(k), "order {k}");
        }
        // (L^{3/2})_+ = d^3 + 3w d + (3/2) w'
        let p = lax.odd_half_power(1, 5).unwrap().plus_part().unwrap();
        assert_eq!(p.coeff(3), r.one());
        assert_eq!(p.coeff(1), w.scale(&qi(3)));
        assert_eq!(p.coeff(0), w.derive(x).scale(&q(3, 2)));
        // [(L^{3/2})_+, L]/6 = w w' + w'''/12
        let (rhs, _) = kdv_rhs(&w, x, 1).unwrap();
        let want = &(&w * &w.derive(x)) + &d_n(&w, x, 3).scale(&q(1, 12));
        assert_eq!(rhs, want);
    }

    #[test]
    fn flows_small() {
        for side in [KdvSide::Wk, KdvSide::Gbgw] {
            for a in 0..=1 {
                let rep = verify_kdv_flow(a, side, 2, 2).unwrap();
                assert!(rep.passed(), "{side:?} a={a}: {:?}", rep.failures);
            }
        }
    }

    #[test]
    fn tau_initial() {
        let rep = verify_tau_initial(4, 2, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn tau4_dual_route() {
        assert_eq!(tau4_genus2_via_kdv().unwrap(), q(1, 1152));
        assert_eq!(tau4_genus2_via_kdv().unwrap(), crate::wk::wk_correlator(2, &[4]));
    }
}
