//! Cubic Hodge integrals with weights (-1, -1, 1/2) and kappa-decorated integrals.

use hodge_bgw::hodge::{fp_coefficient, hodge_correlator, kappa_hodge_integral, KappaSpec};

fn main() -> hodge_bgw::Result<()> {
    for j in 1..=4 {
        println!("f({j}) = {}", fp_coefficient(j)?);
    }
    for g in 1..=3u32 {
        println!("<Lambda tau_0^0>_{g} (no points) = {}", hodge_correlator(g, &[]));
    }
    println!("<Lambda tau_0 tau_1>_1 = {}", hodge_correlator(1, &[0, 1]));
    println!("<Lambda tau_2>_2 = {}", hodge_correlator(2, &[2]));
    for g in 2..=3u32 {
        let v = kappa_hodge_integral(g, &[], &KappaSpec::elsv(3 * g))?;
        println!("kappa-weighted genus {g} integral = {v}");
    }
    Ok(())
}
