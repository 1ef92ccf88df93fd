//! Genus 0/1/2 closed forms, jet routes and KdV flows at small truncations.

use hodge_bgw::closed_forms::{
    f0_closed, f0_explicit, f1_formulas, kw_bernoulli_check, loop_solve_gbgw, loop_solve_wk, q_ring, solve_q, verify_genus0, verify_iz,
    verify_loop_genus2, verify_os_jets, verify_q, LoopKind, loop_solve_all,
};
use hodge_bgw::gbgw::x_power;
use hodge_bgw::kdv::{verify_kdv_flow, verify_tau_initial, KdvSide};
use hodge_bgw::report::VerificationReport;
use hodge_bgw::util::q;
use hodge_bgw::Var;

fn pass(name: &str, rep: VerificationReport) {
    assert!(rep.passed(), "{name}: {:?}", &rep.failures[..rep.failures.len().min(3)]);
    assert!(rep.checked > 0, "{name} checked nothing");
}

#[test]
fn q_and_genus_zero() {
    pass("Q", verify_q(q_ring(4, 2, 5)).unwrap());
    pass("F0", verify_genus0(3, 2, 6).unwrap());
    let ring = q_ring(2, 1, 4);
    assert_eq!(solve_q(ring).unwrap().q.filter(|m| m.t_count() == 0), &ring.one() - &ring.var(Var::X).scale(&q(1, 2)));
    assert_eq!(f0_closed(ring).unwrap(), f0_explicit(ring).unwrap());
    // F0(x, 0) = x^2/4 log(-x/2) - 3x^2/8
    let f0 = f0_closed(ring).unwrap().filter(|m| m.t_count() == 0);
    let x2 = x_power(ring, 2).unwrap();
    let log = (&ring.one() - &ring.var(Var::X).scale(&q(1, 2))).log().unwrap();
    assert_eq!(f0, &(&x2 * &log).scale(&q(1, 4)) - &x2.scale(&q(3, 8)));
}

#[test]
fn genus_one() {
    pass("F1", f1_formulas(2, 2, 5).unwrap());
    pass("jets g=1", verify_os_jets(1, 2, 2, 5).unwrap());
}

#[test]
fn genus_two_routes() {
    pass("jets g=2", verify_os_jets(2, 2, 1, 4).unwrap());
    pass("iz", verify_iz(2, 2, 1, 4).unwrap());
    pass("loop", verify_loop_genus2(2, 1, 4).unwrap());
    pass("kappa g=2", kw_bernoulli_check(2).unwrap());
    pass("kappa g=3", kw_bernoulli_check(3).unwrap());
}

#[test]
fn loop_solutions() {
    let w1 = loop_solve_wk(1).unwrap();
    assert!(w1.poly.is_zero());
    assert_eq!(w1.log_coeff, q(1, 24));
    let b1 = loop_solve_gbgw(1).unwrap();
    assert_eq!((b1.log_coeff, b1.z0_coeff), (q(1, 24), q(-1, 16)));
    // z_1^{-2} z_4 carries <tau_4>_2
    assert_eq!(loop_solve_wk(2).unwrap().poly.coeff(&[-2, 0, 0, 1]), q(1, 1152));
    let all = loop_solve_all(LoopKind::Wk, 3).unwrap();
    assert_eq!(all.len(), 3);
    assert_eq!(all[2].poly.homogeneous_weight(), Some(4));
}

#[test]
fn kdv_flows() {
    for side in [KdvSide::Wk, KdvSide::Gbgw] {
        for a in 0..=1 {
            pass(&format!("{side:?} a={a}"), verify_kdv_flow(a, side, 2, 3).unwrap());
        }
    }
    pass("tau initial", verify_tau_initial(5, 2, 4).unwrap());
}
