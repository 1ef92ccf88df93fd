//! The genus-zero series `Q(x, T)` with `Q = -x/2 + sum_a T_{2a+1} Q^{2a+1} / a!`.

use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::series::{ring_new, Monomial, Ring, Series, Tag, TruncationPolicy, Var};
use crate::util::{factorial_q, q, qi};

/// Ring in `X = x + 2` and the `T_{2a+1}`.
pub fn q_ring(t_count_max: u32, t_index_max: u32, x_degree_max: u32) -> Ring {
    let policy = TruncationPolicy::unbounded()
        .with_t_count(Some(t_count_max))
        .with_t_index(Some(t_index_max))
        .with_x_degree(Some(x_degree_max));
    ring_new(policy, &[Tag::X, Tag::Todd])
}

/// `Q`, `y = Q^2` and `u = -2 log Q` in one ring.
#[derive(Clone, Debug)]
pub struct QData {
    pub q: Series,
    pub y: Series,
    pub u: Series,
    /// Newton steps taken.
    pub steps: u32,
}

/// `-x/2 = 1 - X/2`.
pub fn q_seed(ring: Ring) -> Series {
    &ring.one() - &ring.var(Var::X).scale(&q(1, 2))
}

fn t_index_max(ring: Ring) -> u32 {
    ring.policy.t_index_max.unwrap_or(0)
}

/// `F(Q) = Q + x/2 - sum_a T_{2a+1} Q^{2a+1} / a!` and `F'(Q)`.
fn newton_parts(q_: &Series) -> Result<(Series, Series)> {
    let ring = q_.ring();
    let mut f = q_.checked_sub(&q_seed(ring))?;
    let mut df = ring.one();
    let q2 = q_.checked_mul(q_)?;
    let mut q_even = ring.one();
    for a in 0..=t_index_max(ring) {
        let t = ring.var(Var::Todd(a as u16));
        let c = factorial_q(a).recip();
        let odd = q_even.checked_mul(q_)?;
        f = f.checked_sub(&t.checked_mul(&odd)?.scale(&c))?;
        df = df.checked_sub(&t.checked_mul(&q_even)?.scale(&(c * qi(2 * a as i64 + 1))))?;
        q_even = q_even.checked_mul(&q2)?;
    }
    Ok((f, df))
}

/// The defining equation's residual `F(Q)`.
pub fn q_residual(q_: &Series) -> Result<Series> {
    Ok(newton_parts(q_)?.0)
}

/// Solves for `Q` by Newton iteration from `1 - X/2`.
pub fn solve_q(ring: Ring) -> Result<QData> {
    let c = ring.policy.t_count_max.ok_or_else(|| Error::Precondition("Q needs a T-count bound".into()))?;
    if ring.policy.x_degree_max.is_none() {
        return Err(Error::Precondition("Q needs an X-degree bound".into()));
    }
    // The correct T-order doubles with each step.
    let budget = 2 + (32 - (c + 1).leading_zeros());
    let mut q_ = q_seed(ring);
    let mut steps = 0;
    loop {
        let (f, df) = newton_parts(&q_)?;
        if f.is_zero() {
            break;
        }
        if steps == budget {
            return Err(Error::NonConvergence(format!("Newton for Q after {steps} steps")));
        }
        q_ = q_.checked_sub(&f.checked_mul(&df.inv()?)?)?;
        steps += 1;
    }
    let y = q_.checked_mul(&q_)?;
    let u = q_.log()?.scale(&qi(-2));
    Ok(QData { q: q_, y, u, steps })
}

/// `dQ/dT_{2a+1} + (2/a!) Q^{2a+1} dQ/dx`.
pub fn flow_q_residual(q_: &Series, a: u32) -> Result<Series> {
    let lhs = q_.derive(Var::Todd(a as u16));
    let rhs = q_.pow(2 * a + 1)?.checked_mul(&q_.derive(Var::X))?.scale(&(qi(2) / factorial_q(a)));
    lhs.checked_add(&rhs)
}

/// `dy/dT_{2a+1} - (y^a / a!) dy/dT_1`.
pub fn flow_t1_residual(y: &Series, a: u32) -> Result<Series> {
    let lhs = y.derive(Var::Todd(a as u16));
    let rhs = y.pow(a)?.checked_mul(&y.derive(Var::Todd(0)))?.scale(&factorial_q(a).recip());
    lhs.checked_sub(&rhs)
}

/// Monomials whose coefficients survive `dt` lowerings of the T-count and
/// `dx` lowerings of the X-degree.
pub fn interior(ring: Ring, dt: i32, dx: i32) -> impl Fn(&Monomial) -> bool {
    let c = ring.policy.t_count_max.map(|c| c as i32);
    let d = ring.policy.x_degree_max.map(|d| d as i32);
    move |m: &Monomial| c.is_none_or(|c| m.t_count() <= c - dt) && d.is_none_or(|d| m.exponent(Var::X) <= d - dx)
}

/// Checks the defining equation, the flows in `x`, the `T_1` flows of `y`,
/// and the `T_1`-only closed form `Q = -x/(2(1-T_1))`.
pub fn verify_q(ring: Ring) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("q-series", Some(ring.policy));
    let qd = solve_q(ring)?;
    rep.compare_residual(&q_residual(&qd.q)?, &qd.q, |_| true);
    for a in 0..=t_index_max(ring) {
        let t = Var::Todd(a as u16);
        rep.compare_residual(&flow_q_residual(&qd.q, a)?, &qd.q.derive(t), interior(ring, 1, 1));
        rep.compare_residual(&flow_t1_residual(&qd.y, a)?, &qd.y.derive(t), interior(ring, 1, 0));
    }
    let t1_only = q_seed(ring).checked_mul(&(&ring.one() - &ring.var(Var::Todd(0))).inv()?)?;
    let q_t1 = qd.q.filter(|m| m.iter().all(|(v, _)| matches!(v, Var::X | Var::Todd(0))));
    rep.compare_series(&q_t1, &t1_only, |_| true);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_checks() {
        let ring = q_ring(4, 2, 5);
        let rep = verify_q(ring).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let qd = solve_q(ring).unwrap();
        // Q(x, 0) = 1 - X/2
        let at_zero = qd.q.filter(|m| m.t_count() == 0);
        assert_eq!(at_zero, q_seed(ring));
    }

    #[test]
    fn perturbed_q_fails() {
        let ring = q_ring(3, 1, 4);
        let mut qd = solve_q(ring).unwrap();
        qd.q.add_term(Monomial::from_pairs(&[(Var::Todd(1), 1), (Var::X, 2)]), q(1, 7)).unwrap();
        assert!(!q_residual(&qd.q).unwrap().is_zero());
        assert!(!flow_q_residual(&qd.q, 0).unwrap().filter(interior(ring, 1, 1)).is_zero());
    }
}
