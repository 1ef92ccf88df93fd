//! Intersection numbers against closed formulas that the recursion does not use.

use hodge_bgw::kdv::tau4_genus2_via_kdv;
use hodge_bgw::util::{factorial_q, q, qi};
use hodge_bgw::wk::{virasoro_wk, wk_correlator, wk_partition_poly};
use hodge_bgw::{Monomial, Var};

#[test]
fn one_point() {
    // <tau_{3g-2}>_g = 1 / (24^g g!)
    for g in 1..=6u32 {
        let want = (qi(24).pow(g as i32) * factorial_q(g)).recip();
        assert_eq!(wk_correlator(g, &[3 * g - 2]), want, "g={g}");
    }
}

#[test]
fn genus_zero_multinomial() {
    // <tau_{k_1} ... tau_{k_n}>_0 = (n-3)! / prod k_i!
    for idx in [vec![0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 0, 1, 1], vec![0, 0, 0, 0, 1, 2], vec![0, 0, 0, 0, 0, 2, 2], vec![0, 0, 0, 0, 0, 1, 1, 3]] {
        let n = idx.len() as u32;
        let mut want = factorial_q(n - 3);
        for &k in &idx {
            want /= factorial_q(k);
        }
        assert_eq!(wk_correlator(0, &idx), want, "{idx:?}");
    }
}

#[test]
fn genus_one_tau1_powers() {
    // <tau_1^n>_1 = (n-1)!/24
    for n in 1..=6u32 {
        assert_eq!(wk_correlator(1, &vec![1; n as usize]), factorial_q(n - 1) * q(1, 24));
    }
}

#[test]
fn tau4_two_routes() {
    assert_eq!(wk_correlator(2, &[4]), q(1, 1152));
    assert_eq!(tau4_genus2_via_kdv().unwrap(), wk_correlator(2, &[4]));
}

#[test]
fn spec_values() {
    assert_eq!(wk_correlator(0, &[0, 0, 0]), qi(1));
    assert_eq!(wk_correlator(1, &[1]), q(1, 24));
    assert_eq!(wk_correlator(1, &[0]), qi(0));
    let z = wk_partition_poly(2, 5);
    let t03 = Monomial::from_pairs(&[(Var::Tsmall(0), 3), (Var::Hbar2, -1)]);
    assert_eq!(z.get(&t03), q(1, 6));
    assert_eq!(z.get(&Monomial::var(Var::Tsmall(1))), q(1, 24));
    let f = z.log().unwrap();
    // the t_0^2/hbar^2 term of L_{-1} pulls genus 2 down to hbar^0, and the
    // second derivatives of L_{k>0} need two more t than the result has
    for k in -1..=2 {
        let r = virasoro_wk(k, &z);
        let low = r.filter(|m| m.t_count() <= 3 && m.exponent(Var::Hbar2) <= 0);
        assert!(low.is_zero(), "L_{k} Z: {low}");
    }
    assert_eq!(f.get(&t03), q(1, 6));
}
