//! Genus-zero free energy from `Q` and from the explicit series in `T_3, T_5, ...`.

use crate::error::Result;
use crate::gbgw::{full_free_energy_x, genus_part, x_power};
use crate::report::VerificationReport;
use crate::series::{Monomial, Rational, Ring, Series, Var};
use crate::util::{factorial_q, q, qi};

use super::qseries::{interior, q_ring, q_seed, solve_q};

fn t_tilde(ring: Ring, a: u32) -> Series {
    let t = ring.var(Var::Todd(a as u16));
    if a == 0 {
        &t - &ring.one()
    } else {
        t
    }
}

/// `1/2 sum T~T~ Q^{2a+2b+2}/(a! b! (a+b+1)) - x sum T~ Q^{2b+1}/(b!(2b+1)) + x^2/4 log Q`.
pub fn f0_closed(ring: Ring) -> Result<Series> {
    let qd = solve_q(ring)?;
    let amax = ring.policy.t_index_max.unwrap_or(0);
    let x = x_power(ring, 1)?;
    let qp: Vec<Series> = {
        let mut v = vec![ring.one()];
        for _ in 0..(4 * amax + 2) {
            let next = v.last().unwrap().checked_mul(&qd.q)?;
            v.push(next);
        }
        v
    };
    let mut out = x_power(ring, 2)?.checked_mul(&qd.q.log()?)?.scale(&q(1, 4));
    for a in 0..=amax {
        for b in 0..=amax {
            let c = q(1, 2) / (factorial_q(a) * factorial_q(b) * qi((a + b + 1) as i64));
            let term = t_tilde(ring, a).checked_mul(&t_tilde(ring, b))?.checked_mul(&qp[(2 * a + 2 * b + 2) as usize])?;
            out = out.checked_add(&term.scale(&c))?;
        }
        let c = -(factorial_q(a) * qi(2 * a as i64 + 1)).recip();
        let term = x.checked_mul(&t_tilde(ring, a))?.checked_mul(&qp[(2 * a + 1) as usize])?;
        out = out.checked_add(&term.scale(&c))?;
    }
    Ok(out)
}

/// Vectors `j_1..j_len` with `sum j_i <= count`.
fn count_vectors(len: usize, count: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for v in &out {
            let used: u32 = v.iter().sum();
            for j in 0..=(count - used) {
                let mut w = v.clone();
                w.push(j);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// The explicit expansion in `T_3, T_5, ...` with `(1 - T_1)` denominators.
pub fn f0_explicit(ring: Ring) -> Result<Series> {
    let amax = ring.policy.t_index_max.unwrap_or(0);
    let count = ring.policy.t_count_max.unwrap_or(0);
    let one_minus_t1 = &ring.one() - &ring.var(Var::Todd(0));
    let inv = one_minus_t1.inv()?;
    let x2 = x_power(ring, 2)?;
    let mut out = x2.checked_mul(&q_seed(ring).log()?)?.scale(&q(1, 4));
    out = out.checked_sub(&x2.scale(&q(3, 8)))?;
    out = out.checked_sub(&x2.checked_mul(&one_minus_t1.log()?)?.scale(&q(1, 4)))?;
    let mut inv_pows = vec![ring.one()];
    for j in count_vectors(amax as usize, count) {
        let k: u32 = j.iter().enumerate().map(|(i, &ji)| (i as u32 + 1) * ji).sum();
        if k == 0 {
            continue;
        }
        let p: u32 = j.iter().enumerate().map(|(i, &ji)| (2 * i as u32 + 3) * ji).sum();
        let mut c: Rational = factorial_q(p - 1) / (qi(2).pow(2 * k as i32 + 1) * factorial_q(2 * k + 2));
        let mut m = Monomial::one();
        for (i, &ji) in j.iter().enumerate() {
            if ji > 0 {
                c /= factorial_q(i as u32 + 1).pow(ji as i32) * factorial_q(ji);
                m.set(Var::Todd(i as u16 + 1), ji as i32);
            }
        }
        while inv_pows.len() <= p as usize {
            let next = inv_pows.last().unwrap().checked_mul(&inv)?;
            inv_pows.push(next);
        }
        let term = x_power(ring, 2 * k as i64 + 2)?.checked_mul(&inv_pows[p as usize])?.mul_monomial(&m, &c)?;
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

/// Genus-zero sector of `B + log Z` in the `Q` ring.
pub fn f0_cut_and_join(ring: Ring) -> Result<Series> {
    let p = ring.policy;
    let f = full_free_energy_x(1, p.t_count_max.unwrap_or(0), p.t_index_max.unwrap_or(0), p.x_degree_max.unwrap_or(0))?;
    genus_part(&f, 0).map_monomials(ring, |m| Some(m.clone()))
}

/// `c_0(a)`: the coefficient of `x^{2a+2} T_{2a+1}` in the genus-zero free energy.
pub fn c0(f0: &Series, a: u32) -> Rational {
    f0.get(&Monomial::from_pairs(&[(Var::X, 2 * a as i32 + 2), (Var::Todd(a as u16), 1)]))
}

/// Three-way equality of the genus-zero routes, the second-derivative
/// identities in terms of `Q`, and the spot values `c_0(a)`.
pub fn verify_genus0(t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<VerificationReport> {
    let ring = q_ring(t_count_max, t_index_max, x_degree_max);
    let mut rep = VerificationReport::new("genus-0", Some(ring.policy));
    let closed = f0_closed(ring)?;
    let explicit = f0_explicit(ring)?;
    let caj = f0_cut_and_join(ring)?;
    rep.compare_series(&closed, &explicit, |_| true);
    rep.compare_series(&closed, &caj, |_| true);

    let qd = solve_q(ring)?;
    let xx = closed.derive(Var::X).derive(Var::X);
    rep.compare_series(&xx, &qd.q.log()?.scale(&q(1, 2)), interior(ring, 0, 2));
    for b in 0..=t_index_max {
        let xt = closed.derive(Var::X).derive(Var::Todd(b as u16));
        let rhs = qd.q.pow(2 * b + 1)?.scale(&-(factorial_q(b) * qi(2 * b as i64 + 1)).recip());
        rep.compare_series(&xt, &rhs, interior(ring, 1, 1));
        for a in 0..=t_index_max {
            let tt = closed.derive(Var::Todd(a as u16)).derive(Var::Todd(b as u16));
            let rhs = qd.q.pow(2 * a + 2 * b + 2)?.scale(&(factorial_q(a) * factorial_q(b) * qi((a + b + 1) as i64)).recip());
            rep.compare_series(&tt, &rhs, interior(ring, 2, 0));
        }
    }
    let spots = [q(1, 4), q(1, 96), q(1, 1920)];
    for (a, want) in spots.iter().enumerate() {
        if a as u32 <= t_index_max && 2 * a as u32 + 2 <= x_degree_max {
            rep.check(format!("c0({a})"), c0(&caj, a as u32), want.clone());
        }
    }
    Ok(rep)
}
