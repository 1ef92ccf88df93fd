//! KdV hierarchy through pseudo-differential operators.

use hodge_bgw::kdv::{tau4_genus2_via_kdv, verify_kdv_flow, verify_tau_initial, KdvSide};
use hodge_bgw::wk::wk_correlator;

fn main() -> hodge_bgw::Result<()> {
    for side in [KdvSide::Wk, KdvSide::Gbgw] {
        for a in 0..=1 {
            let rep = verify_kdv_flow(a, side, 3, 3)?;
            println!("{side:?} flow {a}: {} coefficients, {}", rep.checked, if rep.passed() { "pass" } else { "fail" });
        }
    }
    let rep = verify_tau_initial(6, 3, 4)?;
    println!("initial tau value: {}", if rep.passed() { "pass" } else { "fail" });
    println!("<tau_4>_2 from the sixth flow {} vs recursion {}", tau4_genus2_via_kdv()?, wk_correlator(2, &[4]));
    Ok(())
}
