//! Fixed workloads shared by the benchmarks.

use digitprod::{EvalOptions, ExponentKind, ProductSpec};

pub fn spec(rational: &str, kind: ExponentKind, start: u64) -> ProductSpec {
    ProductSpec::new(rational.parse().expect("valid rational"), kind, start).expect("convergent product")
}

/// Woods-Robbins, `∏ ((2n+1)/(2n+2))^{(−1)^{t_n}}` from 0.
pub fn woods_robbins() -> ProductSpec {
    spec("(2n+1)/(2n+2)", ExponentKind::PmThue, 0)
}

/// The signed Rudin-Shapiro product with value 1.
pub fn rudin_shapiro_unit() -> ProductSpec {
    spec("4(n+2)(2n+1)^3(2n+3)^3/((n+3)(n+1)^2(4n+3)^4)", ExponentKind::PmRudinShapiro, 0)
}

pub fn single_threaded(digits: u32) -> EvalOptions {
    EvalOptions { parallel: false, ..EvalOptions::with_digits(digits) }
}
