//! The ELSV-like expression for the generalized BGW correlators.

use hodge_bgw::correspondence::{elsv_constant, elsv_rhs, verify_elsv};
use hodge_bgw::gbgw::correlator_c;

fn main() -> hodge_bgw::Result<()> {
    for (g, a) in [(0u32, vec![0u32]), (1, vec![0]), (1, vec![1, 1]), (2, vec![2])] {
        println!("c_{g}{a:?}: cut-and-join {} / ELSV {}", correlator_c(g, &a)?, elsv_rhs(g, &a)?);
    }
    let rep = verify_elsv(2, 3, 3)?;
    println!("ELSV through genus 2, index 3, length 3: {} cases, {}", rep.checked, if rep.passed() { "pass" } else { "fail" });
    for g in 2..=3 {
        println!("{}", elsv_constant(g)?.notes.join(""));
    }
    Ok(())
}
