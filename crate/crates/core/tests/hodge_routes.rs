//! The lambda-degree recursion against the operator route exp(G) Z_WK.

use hodge_bgw::hodge::{apply_exp_g, hodge_correlator};
use hodge_bgw::util::{inv_automorphism, q};
use hodge_bgw::wk::wk_partition_poly;
use hodge_bgw::{Monomial, Var};

fn key_monomial(g: u32, idx: &[u32]) -> Monomial {
    let mut m = Monomial::pow(Var::Hbar2, g as i32 - 1);
    for &i in idx {
        let v = Var::Tsmall(i as u16);
        m.set(v, m.exponent(v) + 1);
    }
    m
}

#[test]
fn operator_route_matches_recursion() {
    // Keys whose disconnected contributions stay inside the truncation of Z_WK.
    let keys: [(u32, &[u32]); 5] = [(1, &[0]), (1, &[0, 0]), (1, &[1]), (1, &[0, 1]), (0, &[0, 0, 0])];
    for n in [7, 8] {
        let z = wk_partition_poly(1, n);
        let h = apply_exp_g(&z).log().unwrap();
        assert_eq!(h.get(&Monomial::var(Var::Tsmall(0))), q(-1, 16));
        for (g, idx) in keys {
            let lhs = h.get(&key_monomial(g, idx));
            assert_eq!(lhs, hodge_correlator(g, idx) * inv_automorphism(idx), "g={g} {idx:?} n={n}");
        }
    }
}
