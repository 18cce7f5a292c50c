//! The g-algebra: formal sums of `G(x) = log g(x)` modulo the functional
//! equation `G(x/2) − G((x+1)/2) − G(x) = log(1+x)`, the parametric
//! families it yields, and the verified identity catalog.
//!
//! A ±1 Thue–Morse product of a balanced `R = Π (n+a_i)^{m_i}` over `n ≥ 1`
//! is `exp(Σ m_i G(a_i))`, so its value is known exactly whenever that sum
//! lies in the span of the relations.

mod catalog;
mod expression;
mod reduce;
mod verify;

pub use catalog::{catalog, family, find, Family, Identity};
pub use expression::{expr_from_spec, GExpression};
pub use reduce::{reduce, universe, Reduction, DEFAULT_DEPTH, MAX_DEPTH};
pub use verify::{verify, verify_all, SymbolicCheck, VerifyReport};
