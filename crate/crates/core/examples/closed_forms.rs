//! Genus-zero and genus-one closed forms via the series Q.

use hodge_bgw::closed_forms::{f1_formulas, q_ring, solve_q, verify_genus0, verify_q};

fn main() -> hodge_bgw::Result<()> {
    let ring = q_ring(3, 1, 4);
    let qd = solve_q(ring)?;
    println!("Q after {} Newton steps: {} terms", qd.steps, qd.q.len());
    for (name, rep) in [("Q", verify_q(ring)?), ("F0", verify_genus0(3, 2, 6)?), ("F1", f1_formulas(3, 2, 6)?)] {
        println!("{name}: {} coefficients, {}", rep.checked, if rep.passed() { "pass" } else { "fail" });
    }
    Ok(())
}
