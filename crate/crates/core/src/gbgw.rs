//! Generalized BGW partition function by cut-and-join, its Virasoro
//! constraints, the correlators `c_g(a)` and the free energy in `x`.
//!
//! Internally everything lives in the polynomial form with `nu = N^2`.
//! The substitution `nu = -x^2/(2 hbar^2)`, `x = X - 2` happens only when the
//! x-form free energy is assembled.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::series::{ring_new, Monomial, Rational, Ring, Series, Tag, TruncationPolicy, Var};
use crate::util::{bernoulli, factorial_q, odf_q, pow_q, q, qi};

fn todd(a: u32) -> Var {
    Var::Todd(a as u16)
}

/// Policy of the cut-and-join ring: only the grading is bounded.
pub fn caj_ring(weight_max: u32) -> Ring {
    let policy = TruncationPolicy::unbounded().with_weight(Some(weight_max)).with_floor(0);
    ring_new(policy, &[Tag::Todd, Tag::Nu, Tag::Hbar2])
}

/// One application of the cut-and-join operator.
pub fn caj_apply_w(s: &Series) -> Series {
    let ring = s.ring();
    let mut out = ring.zero();
    for (m, c) in s.iter() {
        // T_{2a+1} T_{2b+1} d/dT_{2a+2b+1}
        for (v, e) in m.iter() {
            let Var::Todd(k) = v else { continue };
            let k = k as u32;
            let base = m.with(v, e - 1);
            let ce = c * qi(e as i64);
            for a in 0..=k {
                let b = k - a;
                let coef = odf_q(k + 1) / (odf_q(a) * odf_q(b));
                let nm = base.mul(&Monomial::from_pairs(&[(todd(a), 1), (todd(b), 1)]));
                out.add_term(nm, &ce * coef).unwrap();
            }
        }
        // hbar^2/2 T_{2a+2b+3} d^2/dT_{2a+1} dT_{2b+1}, ordered pairs (a, b)
        let todds: Vec<(u32, i32)> = m
            .iter()
            .filter_map(|(v, e)| if let Var::Todd(a) = v { Some((a as u32, e)) } else { None })
            .collect();
        for (i, &(a, ea)) in todds.iter().enumerate() {
            for &(b, eb) in &todds[i..] {
                let (mult, nm) = if a == b {
                    if ea < 2 {
                        continue;
                    }
                    (qi(ea as i64 * (ea as i64 - 1)), m.with(todd(a), ea - 2))
                } else {
                    (qi(ea as i64 * eb as i64) * qi(2), m.with(todd(a), ea - 1).with(todd(b), eb - 1))
                };
                let coef = odf_q(a + 1) * odf_q(b + 1) / odf_q(a + b + 1) * q(1, 2);
                let nm = nm.mul(&Monomial::from_pairs(&[(todd(a + b + 1), 1), (Var::Hbar2, 1)]));
                out.add_term(nm, c * mult * coef).unwrap();
            }
        }
        // (1/8 - nu/2) T_1
        let t1 = m.mul(&Monomial::var(todd(0)));
        out.add_term(t1.clone(), c * q(1, 8)).unwrap();
        out.add_term(t1.mul(&Monomial::var(Var::Nu)), c * q(-1, 2)).unwrap();
    }
    out
}

/// Cut-and-join state: the iterates and their sum.
pub struct GbgwState {
    pub iterates: Vec<Series>,
    pub zg: Series,
}

/// `Z = sum_{k <= K} W^k(1)/k!` with `K = weight_max`. When `count_max` is
/// given, monomials that can no longer come back below it are pruned.
pub fn caj_iterate(weight_max: u32, count_max: Option<u32>) -> GbgwState {
    let ring = caj_ring(weight_max);
    let mut iterates = vec![ring.one()];
    let mut z = ring.one();
    for k in 1..=weight_max {
        let mut next = caj_apply_w(iterates.last().unwrap()).scale(&q(1, k as i64));
        if let Some(c) = count_max {
            let slack = (c + weight_max - k) as i32;
            next = next.filter(|m| m.t_count() <= slack);
        }
        z = &z + &next;
        iterates.push(next);
    }
    GbgwState { iterates, zg: z }
}

/// Ring of the truncated `Z_gBGW` and its logarithm for a target policy.
pub fn nu_ring(t_count_max: u32, t_index_max: u32) -> Ring {
    let policy = TruncationPolicy::unbounded()
        .with_t_count(Some(t_count_max))
        .with_t_index(Some(t_index_max))
        .with_floor(0);
    ring_new(policy, &[Tag::Todd, Tag::Nu, Tag::Hbar2])
}

/// `Z_gBGW` exact for every monomial with at most `c` factors of index at most `a`.
pub fn gbgw_partition(c: u32, a: u32) -> Series {
    let state = caj_iterate(c * (2 * a + 1), Some(c));
    state.zg.truncate_to(nu_ring(c, a)).expect("same variables")
}

/// `log Z_gBGW` under the same truncation.
pub fn gbgw_free_energy(c: u32, a: u32) -> Series {
    gbgw_partition(c, a).log().expect("Z(0) = 1")
}

/// Table of correlators read off a free energy in the nu-form.
pub struct GbgwCorrelators {
    fe: Series,
    c: u32,
    a: u32,
}

impl GbgwCorrelators {
    pub fn new(c: u32, a: u32) -> Self {
        GbgwCorrelators { fe: gbgw_free_energy(c, a), c, a }
    }

    pub fn free_energy(&self) -> &Series {
        &self.fe
    }

    /// `c_g(a_1, ..., a_l)`.
    pub fn correlator(&self, g: u32, a: &[u32]) -> Result<Rational> {
        if a.is_empty() {
            return Err(Error::Domain("correlator needs at least one T".into()));
        }
        if a.len() as u32 > self.c || a.iter().any(|&x| x > self.a) {
            return Err(Error::OutOfRange(format!("c_{g}{a:?} outside count {} / index {}", self.c, self.a)));
        }
        let abs: i64 = a.iter().map(|&x| x as i64).sum();
        let j = abs - g as i64 + 1;
        if j < 0 {
            return Ok(Rational::zero());
        }
        let mut m = Monomial::from_pairs(&[(Var::Hbar2, abs as i32), (Var::Nu, j as i32)]);
        let mut sorted = a.to_vec();
        sorted.sort_unstable();
        for &x in &sorted {
            m = m.mul(&Monomial::var(todd(x)));
        }
        let mut aut = Rational::one();
        for (_, e) in m.iter().filter(|(v, _)| matches!(v, Var::Todd(_))) {
            aut *= factorial_q(e as u32);
        }
        Ok(self.fe.get(&m) * aut / pow_q(&qi(-2), j))
    }
}

/// `c_g(a)` computed with the smallest sufficient truncation.
pub fn correlator_c(g: u32, a: &[u32]) -> Result<Rational> {
    let amax = a.iter().copied().max().unwrap_or(0);
    GbgwCorrelators::new(a.len() as u32, amax).correlator(g, a)
}

/// `L_m` in the nu-form.
pub fn virasoro_apply(m: u32, s: &Series) -> Series {
    virasoro_apply_with(m, s, &q(1, 16))
}

/// `L_m` with a caller-chosen constant in place of `1/16`.
pub fn virasoro_apply_with(m: u32, s: &Series, constant: &Rational) -> Series {
    let ring = s.ring();
    let two = |e: u32| pow_q(&qi(2), e as i64);
    let mut out = ring.zero();
    let max_idx = s.iter().filter_map(|(mm, _)| mm.max_t_index()).max().unwrap_or(0) as u32;
    let lead = two(2 * m + 1).recip();
    // -d/dT_{2m+1} from the shift T~_1 = T_1 - 1
    out = &out - &s.derive(todd(m)).scale(&(odf_q(m + 1) * &lead));
    for a in 0..=max_idx {
        if a + m > max_idx {
            break;
        }
        let c = odf_q(a + m + 1) / odf_q(a) * &lead;
        let d = s.derive(todd(a + m));
        out = &out + &d.mul_monomial(&Monomial::var(todd(a)), &c).unwrap();
    }
    if m >= 1 {
        for a in 0..m {
            let b = m - 1 - a;
            let c = odf_q(a + 1) * odf_q(b + 1) / two(2 * m + 2);
            let d = s.derive(todd(a)).derive(todd(b));
            out = &out + &d.mul_monomial(&Monomial::var(Var::Hbar2), &c).unwrap();
        }
    } else {
        out = &out + &s.scale(constant);
        out = &out - &s.mul_monomial(&Monomial::var(Var::Nu), &q(1, 4)).unwrap();
    }
    out
}

/// Checks `L_m Z = 0` for `m <= m_max` on a cut-and-join series of grading
/// bound `weight_max`, in the region the truncation determines.
pub fn virasoro_check(m_max: u32, weight_max: u32) -> VerificationReport {
    let z = caj_iterate(weight_max, None).zg;
    let mut rep = VerificationReport::new("virasoro", Some(*z.policy()));
    for m in 0..=m_max {
        if 2 * m + 1 > weight_max {
            break;
        }
        let r = virasoro_apply(m, &z);
        let bound = (weight_max - (2 * m + 1)) as i32;
        rep.compare_residual(&r, &z.derive(todd(m)), |mm| mm.weight() <= bound);
    }
    rep
}

/// Ring of the x-form free energy.
pub fn x_ring(genus_max: u32, t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Ring {
    let policy = TruncationPolicy::new(genus_max, t_count_max, t_index_max, x_degree_max, 0);
    ring_new(policy, &[Tag::X, Tag::Todd, Tag::Hbar2])
}

/// `(X - 2)^e` for any integer `e` in `ring`.
pub fn x_power(ring: Ring, e: i64) -> Result<Series> {
    let xm2 = &ring.var(Var::X) - &ring.constant(qi(2));
    if e >= 0 {
        xm2.pow(e as u32)
    } else {
        xm2.pow((-e) as u32)?.inv()
    }
}

/// `B(x, hbar)` with `x = X - 2`.
pub fn b_series(ring: Ring) -> Result<Series> {
    let genus_max = ring.policy.genus_max.ok_or_else(|| Error::Precondition("B needs a genus bound".into()))?;
    let one = ring.one();
    let lg = (&one - &ring.var(Var::X).scale(&q(1, 2))).log()?;
    let x2 = x_power(ring, 2)?;
    let g0 = &(&x2 * &lg).scale(&q(1, 4)) - &x2.scale(&q(3, 8));
    let mut b = g0.mul_monomial(&Monomial::pow(Var::Hbar2, -1), &qi(1))?;
    b = &b + &lg.scale(&q(1, 12));
    for g in 2..=genus_max {
        let c = bernoulli_genus_constant(g);
        let term = x_power(ring, 2 - 2 * g as i64)?.mul_monomial(&Monomial::pow(Var::Hbar2, g as i32 - 1), &c)?;
        b = &b + &term;
    }
    Ok(b)
}

/// `(-1)^g 2^{g-1} B_{2g} / (2g (2g-2))`.
pub fn bernoulli_genus_constant(g: u32) -> Rational {
    let sign = if g.is_multiple_of(2) { qi(1) } else { qi(-1) };
    sign * pow_q(&qi(2), g as i64 - 1) * bernoulli(2 * g) / qi(2 * g as i64 * (2 * g as i64 - 2))
}

/// Rewrites a nu-form series with `nu = -(X-2)^2/(2 hbar^2)`.
pub fn nu_to_x(s: &Series, ring: Ring) -> Result<Series> {
    let mut out = ring.zero();
    let mut powers: Vec<Series> = vec![ring.one()];
    for (m, c) in s.iter() {
        let j = m.exponent(Var::Nu);
        let k = m.exponent(Var::Hbar2);
        let e = k - j;
        if let Some(gm) = ring.policy.genus_max {
            if e + 1 > gm as i32 {
                continue;
            }
        }
        let rest = m.without(Var::Nu).with(Var::Hbar2, e);
        if !ring.policy.admits(&rest.without(Var::Hbar2)) {
            continue;
        }
        while powers.len() <= j as usize {
            let next = powers.last().unwrap() * &x_power(ring, 2)?;
            powers.push(next);
        }
        let coef = c * pow_q(&q(-1, 2), j as i64);
        out = &out + &powers[j as usize].mul_monomial(&rest, &coef)?;
    }
    Ok(out)
}

/// `F(x, T; hbar) = B + log Z_gBGW` in the ring of the given bounds.
pub fn full_free_energy_x(genus_max: u32, t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<Series> {
    let ring = x_ring(genus_max, t_count_max, t_index_max, x_degree_max);
    let fe = gbgw_free_energy(t_count_max, t_index_max);
    let corr = nu_to_x(&fe, ring)?;
    Ok(&b_series(ring)? + &corr)
}

/// Genus-`g` part of an x-form free energy (coefficient of `hbar^{2g-2}`).
pub fn genus_part(f: &Series, g: u32) -> Series {
    f.hbar2_sector(g as i32 - 1)
}

/// Checks the genus-wise dilaton identity
/// `-x dF_g/dx + sum_a 2a T_{2a+1} dF_g/dT_{2a+1} = (2g-2) F_g - x^2/4 [g=0] - 1/12 [g=1]`
/// on the X-degrees the truncation determines.
pub fn dilaton_check(f: &Series, genus_max: u32) -> VerificationReport {
    dilaton_check_with(f, genus_max, &q(1, 12))
}

pub fn dilaton_check_with(f: &Series, genus_max: u32, genus1_constant: &Rational) -> VerificationReport {
    let ring = f.ring();
    let mut rep = VerificationReport::new("dilaton", Some(ring.policy));
    let d = ring.policy.x_degree_max.unwrap_or(0) as i32;
    let xm2 = &ring.var(Var::X) - &ring.constant(qi(2));
    for g in 0..=genus_max {
        let fg = genus_part(f, g);
        let mut lhs = (&xm2 * &fg.derive(Var::X)).scale(&qi(-1));
        let max_idx = fg.iter().filter_map(|(m, _)| m.max_t_index()).max().unwrap_or(0);
        for a in 1..=max_idx as u32 {
            let dv = fg.derive(todd(a));
            lhs = &lhs + &dv.mul_monomial(&Monomial::var(todd(a)), &qi(2 * a as i64)).unwrap();
        }
        let mut rhs = fg.scale(&qi(2 * g as i64 - 2));
        if g == 0 {
            rhs = &rhs - &(&xm2 * &xm2).scale(&q(1, 4));
        }
        if g == 1 {
            rhs = &rhs - &ring.constant(genus1_constant.clone());
        }
        rep.compare_series(&lhs, &rhs, |m| m.exponent(Var::X) < d);
    }
    rep
}
