//! Truncated multivariate series over the rationals.

use hodge_bgw::util::q;
use hodge_bgw::{ring_new, Tag, TruncationPolicy, Var};

fn main() -> hodge_bgw::Result<()> {
    let policy = TruncationPolicy::unbounded().with_t_count(Some(4)).with_t_index(Some(1)).with_x_degree(Some(3));
    let ring = ring_new(policy, &[Tag::X, Tag::Todd]);
    let t1 = ring.var(Var::Todd(0));
    let one_minus = &ring.one() - &t1;
    let inv = one_minus.inv()?;
    println!("1/(1 - T1)      = {inv}");
    println!("log(1 - T1)     = {}", one_minus.log()?);
    let e = t1.scale(&q(1, 2)).exp()?;
    println!("exp(T1/2)       = {e}");
    println!("exp(T1/2)^2 - exp(T1) = {}", e.checked_mul(&e)?.checked_sub(&t1.exp()?)?);
    let x = ring.var(Var::X);
    println!("d/dX (X^2 (1-T1)^-1) = {}", x.checked_mul(&x)?.checked_mul(&inv)?.derive(Var::X));
    Ok(())
}
