//! Genus one and two through jet variables: the `u`-jets in `x`, the
//! `T_1`-jets of `y = Q^2`, and the `I_k` jet variables.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gbgw::{bernoulli_genus_constant, full_free_energy_x, genus_part, x_power};
use crate::hodge::{hodge_correlator, kappa_integral, KappaSpec};
use crate::report::VerificationReport;
use crate::series::{ring_new, Monomial, Rational, Ring, Series, Tag, TruncationPolicy, Var};
use crate::util::{bernoulli, factorial_q, inv_automorphism, multisets_with_sum, odf_q, q, qi};
use crate::wk::wk_correlator;

use super::jets::JetPoly;
use super::loops::{loop_solve_gbgw, loop_solve_wk};
use super::qseries::{flow_t1_residual, q_ring, solve_q, QData};

/// Genus-`g` sector of `B + log Z` for the given bounds, in the `Q` ring.
pub fn caj_genus(g: u32, t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<Series> {
    let f = full_free_energy_x(g.max(1), t_count_max, t_index_max, x_degree_max)?;
    genus_part(&f, g).map_monomials(q_ring(t_count_max, t_index_max, x_degree_max), |m| Some(m.clone()))
}

/// `d^k y / dT_1^k` for `k = 1..=k_max`.
pub fn t1_jets(y: &Series, k_max: usize) -> Vec<Series> {
    let mut out = vec![y.derive(Var::Todd(0))];
    while out.len() < k_max {
        let next = out.last().unwrap().derive(Var::Todd(0));
        out.push(next);
    }
    out
}

/// `d^k u / dx^k` for `k = 1..=k_max`.
pub fn x_jets(u: &Series, k_max: usize) -> Vec<Series> {
    let mut out = vec![u.derive(Var::X)];
    while out.len() < k_max {
        let next = out.last().unwrap().derive(Var::X);
        out.push(next);
    }
    out
}

fn within(t_count_max: u32, x_degree_max: u32) -> impl Fn(&Monomial) -> bool {
    move |m: &Monomial| m.t_count() <= t_count_max as i32 && m.exponent(Var::X) <= x_degree_max as i32
}

/// `(1/24) log(z_1 / 2)`: the genus-one formula in `T_1`-jets with the
/// constant `log 2` absorbed into the leading coefficient of `z_1`.
fn f1_from_z1(z1: &Series) -> Result<Series> {
    Ok(z1.scale(&q(1, 2)).log()?.scale(&q(1, 24)))
}

/// `(1/24) log u_x - u/16`.
fn f1_from_u(qd: &QData) -> Result<Series> {
    let ux = qd.u.derive(Var::X);
    ux.log()?.scale(&q(1, 24)).checked_sub(&qd.u.scale(&q(1, 16)))
}

/// Both genus-one jet formulas against the cut-and-join genus-one sector,
/// plus `c_1(0) = 1/8`.
pub fn f1_formulas(t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<VerificationReport> {
    let ring = q_ring(t_count_max + 1, t_index_max, x_degree_max + 1);
    let mut rep = VerificationReport::new("genus-1", Some(ring.policy));
    let qd = solve_q(ring)?;
    let via_y = f1_from_z1(&t1_jets(&qd.y, 1)[0])?;
    let via_u = f1_from_u(&qd)?;
    let caj = caj_genus(1, t_count_max, t_index_max, x_degree_max)?;
    let keep = within(t_count_max, x_degree_max);
    rep.compare_series(&via_y, &caj, &keep);
    rep.compare_series(&via_u, &caj, &keep);
    rep.compare_series(&via_y, &via_u, &keep);
    rep.check("c1(0)", caj.get(&Monomial::var(Var::Todd(0))), q(1, 8));
    Ok(rep)
}

/// Genus one and two of the generalized BGW free energy as topological jet
/// functions of the `T_1`-derivatives of `y`.
pub fn verify_os_jets(genus_max: u32, t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<VerificationReport> {
    if !(1..=2).contains(&genus_max) {
        return Err(Error::OutOfRange(format!("jet check supports genus 1..=2, got {genus_max}")));
    }
    let top = 3 * genus_max - 2;
    let ring = q_ring(t_count_max + top, t_index_max, x_degree_max);
    let mut rep = VerificationReport::new("genus-jets", Some(ring.policy));
    let qd = solve_q(ring)?;
    let keep = within(t_count_max, x_degree_max);
    for a in 0..=t_index_max {
        rep.compare_residual(&flow_t1_residual(&qd.y, a)?, &qd.y.derive(crate::series::Var::Todd(a as u16)), within(t_count_max + top - 1, x_degree_max));
    }
    let jets = t1_jets(&qd.y, top as usize);
    rep.compare_series(&f1_from_z1(&jets[0])?, &caj_genus(1, t_count_max, t_index_max, x_degree_max)?, &keep);
    if genus_max >= 2 {
        let f2 = loop_solve_wk(2)?.poly.evaluate(&jets)?;
        rep.compare_series(&f2, &caj_genus(2, t_count_max, t_index_max, x_degree_max)?, &keep);
    }
    Ok(rep)
}

/// Ring in the `t_i` with `t_count_max` factors of index at most `t_index_max`.
pub fn t_ring(t_count_max: u32, t_index_max: u32) -> Ring {
    let policy = TruncationPolicy::unbounded().with_t_count(Some(t_count_max)).with_t_index(Some(t_index_max));
    ring_new(policy, &[Tag::Tsmall])
}

fn t_monomial(idx: &[u32]) -> Monomial {
    let mut m = Monomial::one();
    for &i in idx {
        m.set(Var::Tsmall(i as u16), m.exponent(Var::Tsmall(i as u16)) + 1);
    }
    m
}

/// `d^k v / dt_0^k` with `v = d^2 F_0 / dt_0^2`, straight from genus-zero correlators.
pub fn wk_jets(ring: Ring, k_max: usize) -> Vec<Series> {
    let c = ring.policy.t_count_max.unwrap_or(0);
    (1..=k_max as u32)
        .map(|k| {
            let mut s = ring.zero();
            for n in 0..=c {
                for idx in multisets_with_sum(n as usize, k - 1 + n, 0) {
                    let mut full = vec![0; (k + 2) as usize];
                    full.extend(&idx);
                    full.sort();
                    let v = wk_correlator(0, &full) * inv_automorphism(&idx);
                    s.add_term(t_monomial(&idx), v).expect("no hbar");
                }
            }
            s
        })
        .collect()
}

/// `sum_I <tau_I>_g t^I / |Aut I|` over `corr`, for every `I` the ring admits.
pub fn genus_free_energy_t(ring: Ring, g: u32, corr: &dyn Fn(u32, &[u32]) -> Rational) -> Series {
    let c = ring.policy.t_count_max.unwrap_or(0);
    let imax = ring.policy.t_index_max.unwrap_or(0);
    let mut s = ring.zero();
    for n in 0..=c {
        let dim = 3 * g as i64 - 3 + n as i64;
        if dim < 0 || (g == 0 && n < 3) || (g == 1 && n == 0) {
            continue;
        }
        for total in 0..=dim as u32 {
            for idx in multisets_with_sum(n as usize, total, 0) {
                if idx.iter().any(|&i| i > imax) {
                    continue;
                }
                let v = corr(g, &idx);
                if !v.is_zero() {
                    s.add_term(t_monomial(&idx), v * inv_automorphism(&idx)).expect("no hbar");
                }
            }
        }
    }
    s
}

/// The genus-two loop solutions evaluated on jets: the topological one on
/// `v`-jets against the recursion, the generalized BGW one on `u`-jets against
/// the cut-and-join sector, and the latter over `-4` on `v`-jets against the
/// cubic Hodge recursion.
pub fn verify_loop_genus2(t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("loop-equations", None);
    let wk = loop_solve_wk(2)?;
    let bgw = loop_solve_gbgw(2)?;
    for (name, f) in [("wk", &wk.poly), ("gbgw", &bgw.poly)] {
        rep.check(format!("{name} homogeneity"), qi(f.homogeneous_weight().map_or(-1, |w| w as i64)), qi(2));
    }

    // All genus-two keys with index sum at most 6 have at most 3 points.
    let tr = t_ring(3, 6);
    let vj = wk_jets(tr, 4);
    let wk_eval = wk.poly.evaluate(&vj)?;
    rep.compare_series(&wk_eval, &genus_free_energy_t(tr, 2, &wk_correlator), |_| true);
    let hodge_eval = bgw.poly.evaluate(&vj)?.scale(&q(-1, 4));
    rep.compare_series(&hodge_eval, &genus_free_energy_t(tr, 2, &hodge_correlator), |_| true);

    let ring = q_ring(t_count_max, t_index_max, x_degree_max + 4);
    let qd = solve_q(ring)?;
    let uj = x_jets(&qd.u, 4);
    let f2 = bgw.poly.evaluate(&uj)?;
    let caj = caj_genus(2, t_count_max, t_index_max, x_degree_max)?;
    rep.compare_series(&f2, &caj, within(t_count_max, x_degree_max));
    Ok(rep)
}

/// `I_1 = 1 - 1/z_1`, `I_{l+1} = d(I_l) / z_1`.
pub fn iz_variables(k_max: usize) -> Vec<JetPoly> {
    let inv_z1 = JetPoly::monomial(&[-1], qi(1));
    let mut out = vec![JetPoly::one().sub(&inv_z1)];
    while out.len() < k_max {
        let next = out.last().unwrap().total_derivative().mul(&inv_z1);
        out.push(next);
    }
    out
}

/// `I_k(x, T) = [k=1] - x (-1)^k (2k-1)!! / (2^{k+1} Q^{2k+1}) + sum_a Q^{2a} T_{2a+2k+1} / a!`.
pub fn iz_closed(qd: &QData, k: u32) -> Result<Series> {
    let ring = qd.q.ring();
    let amax = ring.policy.t_index_max.unwrap_or(0);
    let sign = if k.is_multiple_of(2) { qi(1) } else { qi(-1) };
    let c = -(sign * odf_q(k)) / qi(2).pow(k as i32 + 1);
    let mut out = x_power(ring, 1)?.checked_mul(&qd.q.pow(2 * k + 1)?.inv()?)?.scale(&c);
    if k == 1 {
        out = out.checked_add(&ring.one())?;
    }
    for a in 0..=amax.saturating_sub(k) {
        let t = ring.var(Var::Todd((a + k) as u16));
        out = out.checked_add(&qd.q.pow(2 * a)?.checked_mul(&t)?.scale(&factorial_q(a).recip()))?;
    }
    Ok(out)
}

/// `F_g^WK(0, 0, J_2, ..., J_{3g-2}, 0, ...)` for series `J_k`, `J[k-2]` holding `J_k`.
fn wk_free_energy_at(g: u32, j: &[Series]) -> Result<Series> {
    let ring = j[0].ring();
    let top = 3 * g - 2;
    let mut out = ring.zero();
    for n in 1..=g as usize * 3 {
        for idx in multisets_with_sum(n, 3 * g - 3 + n as u32, 2) {
            if idx.iter().any(|&i| i > top) {
                continue;
            }
            let v = wk_correlator(g, &idx) * inv_automorphism(&idx);
            let mut term = ring.constant(v);
            for &i in &idx {
                term = term.checked_mul(&j[i as usize - 2])?;
            }
            out = out.checked_add(&term)?;
        }
    }
    Ok(out)
}

/// The `I_k` variables on `T_1`-jets against their closed form, and
/// the genus-one and genus-two identities they satisfy.
pub fn verify_iz(genus_max: u32, t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Result<VerificationReport> {
    if !(1..=2).contains(&genus_max) {
        return Err(Error::OutOfRange(format!("IZ check supports genus 1..=2, got {genus_max}")));
    }
    let top = 3 * genus_max - 2;
    let ring = q_ring(t_count_max + top, t_index_max, x_degree_max);
    let mut rep = VerificationReport::new("iz-variables", Some(ring.policy));
    let qd = solve_q(ring)?;
    let keep = within(t_count_max, x_degree_max);
    let jets = t1_jets(&qd.y, top as usize);
    let iz = iz_variables(top as usize);
    let mut closed = Vec::new();
    for (k, ik) in iz.iter().enumerate() {
        let c = iz_closed(&qd, k as u32 + 1)?;
        rep.compare_series(&ik.evaluate(&jets)?, &c, &keep);
        closed.push(c);
    }
    let one_minus_i1 = ring.one().checked_sub(&closed[0])?;
    let inv = one_minus_i1.inv()?;
    rep.compare_series(&inv, &jets[0], &keep);
    rep.compare_series(&f1_from_z1(&inv)?, &caj_genus(1, t_count_max, t_index_max, x_degree_max)?, &keep);
    if genus_max >= 2 {
        let j: Vec<Series> = closed[1..].iter().map(|c| c.checked_mul(&inv)).collect::<Result<_>>()?;
        let f2 = wk_free_energy_at(2, &j)?.checked_mul(&inv.pow(2)?)?;
        rep.compare_series(&f2, &caj_genus(2, t_count_max, t_index_max, x_degree_max)?, &keep);
    }
    Ok(rep)
}

/// `int_{M_{g,0}} exp(sum s_d kappa_d)` with `exp(-sum s_d z^d) = sum (-1)^d (2d+1)!! z^d`
/// against `(-1)^g B_{2g} / (2g (2g-2))`.
pub fn kw_bernoulli_check(g: u32) -> Result<VerificationReport> {
    if g < 2 {
        return Err(Error::OutOfRange(format!("needs g >= 2, got {g}")));
    }
    let mut rep = VerificationReport::new("kappa-bernoulli", None);
    let value = kappa_integral(g, &[], &KappaSpec::kw_bernoulli(3 * g - 3), &wk_correlator)?;
    let sign = if g.is_multiple_of(2) { qi(1) } else { qi(-1) };
    let want = sign * bernoulli(2 * g) / qi(2 * g as i64 * (2 * g as i64 - 2));
    rep.notes.push(format!("computed {value} vs target {want}"));
    rep.check(format!("g={g}"), value, want);
    Ok(rep)
}

/// `F_g(x, 0)` as predicted by the Bernoulli constants, for `g >= 2`.
pub fn bernoulli_sector(ring: Ring, g: u32) -> Result<Series> {
    Ok(x_power(ring, 2 - 2 * g as i64)?.scale(&bernoulli_genus_constant(g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iz_examples() {
        let iz = iz_variables(3);
        assert_eq!(iz[1], JetPoly::monomial(&[-3, 1], qi(1)));
        let want = JetPoly::monomial(&[-4, 0, 1], qi(1)).add(&JetPoly::monomial(&[-5, 2], qi(-3)));
        assert_eq!(iz[2], want);
    }

    #[test]
    fn kw_bernoulli_genus_two() {
        let rep = kw_bernoulli_check(2).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(kappa_integral(2, &[], &KappaSpec::kw_bernoulli(3), &wk_correlator).unwrap(), q(-1, 240));
    }

    #[test]
    fn genus_one_small() {
        let rep = f1_formulas(2, 1, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn jets_small() {
        let rep = verify_os_jets(2, 1, 1, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let rep = verify_iz(2, 1, 1, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn loops_small() {
        let rep = verify_loop_genus2(1, 1, 2).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }
}
