//! Infinite products `∏ R(n)^{e(n)}` of rational functions raised to
//! Thue–Morse or Rudin–Shapiro exponents, evaluated to high precision and
//! checked against exact closed forms.

pub mod error;
pub mod evaluator;
pub mod numerics;
mod parse;
pub mod rational;
pub mod sequences;
pub mod symbolic;

pub use error::{Divergence, Error, Result};
pub use evaluator::{evaluate, EvalOptions, EvalResult, ProductSpec};
pub use numerics::{BigReal, ClosedForm, Constant, PowerProduct, Precision};
pub use parse::parse_rational;
pub use rational::{AffineFactor, ConvergenceClass, ConvergenceTag, FactoredRational, RawFactor};
pub use sequences::ExponentKind;
pub use symbolic::{GExpression, Identity, Reduction};
