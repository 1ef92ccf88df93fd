//! Closed-form genus expansions: genus zero through the implicit `Q`, genus one,
//! and higher genera through jet-variable representations.

pub mod genus0;
pub mod jetroutes;
pub mod jets;
pub mod loops;
pub mod qseries;

pub use genus0::{f0_explicit, f0_closed, verify_genus0};
pub use jetroutes::{bernoulli_sector, f1_formulas, iz_variables, kw_bernoulli_check, verify_iz, verify_loop_genus2, verify_os_jets};
pub use jets::JetPoly;
pub use loops::{loop_solve_all, loop_solve_gbgw, loop_solve_wk, LoopKind, LoopSolution};
pub use qseries::{q_ring, solve_q, verify_q, QData};
