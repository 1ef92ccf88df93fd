//! Generalized BGW partition function by cut-and-join, and its correlators.

use hodge_bgw::gbgw::{gbgw_free_energy, virasoro_check, GbgwCorrelators};

fn main() -> hodge_bgw::Result<()> {
    let f = gbgw_free_energy(2, 1);
    println!("log Z with at most two T, index <= 1: {} terms", f.len());
    let c = GbgwCorrelators::new(2, 2);
    for (g, a) in [(0, vec![0]), (0, vec![1]), (0, vec![2]), (1, vec![0]), (1, vec![1]), (2, vec![2]), (1, vec![0, 1])] {
        println!("c_{g}{a:?} = {}", c.correlator(g, &a)?);
    }
    let rep = virasoro_check(3, 7);
    println!("Virasoro L_0..L_3 through weight 7: {} ({} coefficients)", if rep.passed() { "pass" } else { "fail" }, rep.checked);
    Ok(())
}
