//! Both free energies compared coefficient by coefficient.

use hodge_bgw::correspondence::{bgw_side_free_energy, verify_main};
use hodge_bgw::TruncationPolicy;

fn main() -> hodge_bgw::Result<()> {
    let policy = TruncationPolicy::new(2, 3, 2, 5, 0);
    let f = bgw_side_free_energy(&policy)?;
    println!("B + log Z: {} monomials", f.len());
    let rep = verify_main(&policy)?;
    println!("{}: {} coefficients, {}", rep.name, rep.checked, if rep.passed() { "pass" } else { "fail" });
    for m in rep.failures.iter().take(5) {
        println!("  {}: {} vs {}", m.monomial, m.lhs, m.rhs);
    }
    Ok(())
}
