//! Exact computations relating Hodge integrals on moduli of curves to the
//! generalized BGW tau-function.

pub mod cache;
pub mod closed_forms;
pub mod config;
pub mod correspondence;
pub mod error;
pub mod export;
pub mod gbgw;
pub mod hodge;
pub mod kdv;
pub mod linsolve;
pub mod report;
pub mod series;
pub mod util;
pub mod wk;

pub use error::{Error, Result};
pub use series::{ring_new, Monomial, Rational, Ring, Series, Tag, TagSet, TruncationPolicy, Var};
