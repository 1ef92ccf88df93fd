//! Free energies in jet variables from the loop equations, and the
//! higher-genus checks built on them.

use hodge_bgw::closed_forms::{iz_variables, kw_bernoulli_check, loop_solve_gbgw, loop_solve_wk, verify_iz, verify_loop_genus2, verify_os_jets};

fn main() -> hodge_bgw::Result<()> {
    for g in 1..=2 {
        let w = loop_solve_wk(g)?;
        println!("WK  F_{g} = {} + ({}) log z1", w.poly, w.log_coeff);
        let b = loop_solve_gbgw(g)?;
        println!("BGW F_{g} = {} + ({}) log u1 + ({}) u0", b.poly, b.log_coeff, b.z0_coeff);
    }
    for (k, i) in iz_variables(3).iter().enumerate() {
        println!("I_{} = {i}", k + 1);
    }
    for (name, rep) in [
        ("jets", verify_os_jets(2, 2, 2, 4)?),
        ("iz", verify_iz(2, 2, 2, 4)?),
        ("loop g=2", verify_loop_genus2(2, 2, 4)?),
        ("kappa-bernoulli", kw_bernoulli_check(2)?),
    ] {
        println!("{name}: {} coefficients, {}", rep.checked, if rep.passed() { "pass" } else { "fail" });
    }
    Ok(())
}
