//! Psi-class intersection numbers on moduli of curves.

use hodge_bgw::wk::{wk_correlator, wk_partition_poly, WkTable};

fn main() {
    let cases: &[(u32, &[u32])] = &[(0, &[0, 0, 0]), (1, &[1]), (2, &[4]), (2, &[2, 3]), (3, &[7]), (4, &[10])];
    for (g, idx) in cases {
        println!("<tau{idx:?}>_{g} = {}", wk_correlator(*g, idx));
    }
    println!("memoized entries: {}", WkTable::global().len());
    let z = wk_partition_poly(1, 3);
    println!("Z truncated to genus 1, three insertions: {} terms", z.len());
}
