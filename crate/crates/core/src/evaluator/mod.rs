//! Numerical engines for every exponent kind, plus the `f`/`g` functions and
//! the analytic probes built on them.
//!
//! ±1 Thue–Morse products are accelerated by `L` dyadic splits, which
//! amounts to truncating the product at a block boundary `2^L (N+1)`.
//! Rudin–Shapiro products are summed directly after subtracting known-sum
//! correction products that cancel the slowest-decaying terms. 0/1 kinds
//! combine a Gamma-telescoped plain product with the ±1 product.

mod analysis;
mod kernel;
mod rudin_shapiro;
mod thue;

pub use analysis::{
    f_value, flajolet_martin, g_value, monotonicity_scan, remainder_sign_probe, FlajoletMartin, ProbeRow, ScanPoint,
    ScanReport,
};
pub use rudin_shapiro::{eval_pm_rs, eval_zero_one_rs, t_transform};
pub use thue::{eval_plain, eval_pm_thue, eval_zero_one_thue};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ten_pow_neg, BigReal, Precision};
use crate::rational::FactoredRational;
use crate::sequences::ExponentKind;

pub const DEFAULT_SPLIT_LEVELS: u32 = 8;
pub const DEFAULT_THUE_TERMS: u64 = 4096;
pub const DEFAULT_RS_TERMS: u64 = 1_000_000;
pub const MIN_TERMS: u64 = 16;
pub const MAX_SPLIT_LEVELS: u32 = 16;

/// A product `∏_{n ≥ start} R(n)^{e(n)}` known to converge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpec {
    rational: FactoredRational,
    kind: ExponentKind,
    start: u64,
}

impl ProductSpec {
    /// Checks the start index, convergence for `kind`, and that every factor
    /// is positive from `start` on.
    pub fn new(rational: FactoredRational, kind: ExponentKind, start: u64) -> Result<Self> {
        if start > 1 {
            return Err(Error::input(format!("start index must be 0 or 1, got {start}")));
        }
        rational.check_kind(kind)?;
        rational.check_domain(start)?;
        Ok(ProductSpec { rational, kind, start })
    }

    pub fn rational(&self) -> &FactoredRational {
        &self.rational
    }

    pub fn kind(&self) -> ExponentKind {
        self.kind
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// The same rational and start with another exponent kind.
    pub fn with_kind(&self, kind: ExponentKind) -> Result<Self> {
        ProductSpec::new(self.rational.clone(), kind, self.start)
    }

    fn expect_kind(&self, kinds: &[ExponentKind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::input(format!("this engine does not evaluate `{}` products", self.kind)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub precision: Precision,
    pub split_levels: u32,
    /// `None` picks [`DEFAULT_THUE_TERMS`] or [`DEFAULT_RS_TERMS`] by kind.
    pub terms: Option<u64>,
    /// Number of correction products subtracted from Rudin–Shapiro sums (0–2).
    pub rs_moment_order: u8,
    pub parallel: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            precision: Precision::DEFAULT,
            split_levels: DEFAULT_SPLIT_LEVELS,
            terms: None,
            rs_moment_order: 2,
            parallel: true,
        }
    }
}

impl EvalOptions {
    pub fn with_digits(digits: u32) -> Self {
        EvalOptions { precision: Precision::digits(digits), ..Self::default() }
    }

    pub fn terms_for(&self, kind: ExponentKind) -> u64 {
        self.terms.unwrap_or(match kind {
            ExponentKind::PmRudinShapiro | ExponentKind::ZeroOneRudinShapiro => DEFAULT_RS_TERMS,
            _ => DEFAULT_THUE_TERMS,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.split_levels > MAX_SPLIT_LEVELS {
            return Err(Error::input(format!(
                "split levels must be at most {MAX_SPLIT_LEVELS}, got {}",
                self.split_levels
            )));
        }
        if let Some(n) = self.terms {
            if n < MIN_TERMS {
                return Err(Error::input(format!("terms must be at least {MIN_TERMS}, got {n}")));
            }
        }
        if self.rs_moment_order > 2 {
            return Err(Error::input("rs moment order must be 0, 1 or 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: BigReal,
    /// Heuristic bound on `|value − exact|`.
    pub error_estimate: BigReal,
    pub terms_used: u64,
    pub split_levels: u32,
    pub precision: Precision,
}

impl EvalResult {
    /// Digits worth printing: the requested precision, or fewer when the
    /// error estimate is larger.
    pub fn significant_digits(&self) -> u32 {
        let err = self.error_estimate.to_f64();
        let mag = self.value.abs().to_f64();
        if err.is_nan() || mag.is_nan() || err <= 0.0 || mag <= 0.0 {
            return self.precision.decimal_digits();
        }
        let digits = (mag / err).log10().floor().max(1.0) as u32;
        digits.min(self.precision.decimal_digits())
    }
}

/// Arithmetic-noise floor `10^{5−P}·max(1, |v|)` added to every estimate.
pub(crate) fn noise_floor(value: &BigReal, p: Precision) -> BigReal {
    let scale = value.abs().to_f64().max(1.0);
    ten_pow_neg(p.decimal_digits() as i32 - 5, p) * BigReal::from_f64(scale, p)
}

/// Evaluates any product by dispatching on its kind.
pub fn evaluate(spec: &ProductSpec, opts: &EvalOptions) -> Result<EvalResult> {
    match spec.kind() {
        ExponentKind::PmThue => eval_pm_thue(spec, opts),
        ExponentKind::ZeroOneThue => eval_zero_one_thue(spec, opts),
        ExponentKind::PmRudinShapiro => eval_pm_rs(spec, opts),
        ExponentKind::ZeroOneRudinShapiro => eval_zero_one_rs(spec, opts),
        ExponentKind::Plain => eval_plain(spec, opts),
    }
}

/// `sqrt(plain / pm)`, from `2e = 1 − (−1)^e` for a 0/1 sequence `e`.
fn zero_one_from_parts(plain: EvalResult, pm: EvalResult, opts: &EvalOptions) -> EvalResult {
    let p = opts.precision;
    let work = p.guarded();
    let ratio = plain.value.with_precision(work) / pm.value.with_precision(work);
    let value = ratio.sqrt();
    let rel = plain.error_estimate.with_precision(work) / plain.value.abs().with_precision(work)
        + pm.error_estimate.with_precision(work) / pm.value.abs().with_precision(work);
    let half = BigReal::from_f64(0.5, work);
    let error = &value * rel * half + noise_floor(&value, p);
    EvalResult {
        value: value.with_precision(p),
        error_estimate: error.with_precision(p),
        terms_used: pm.terms_used,
        split_levels: pm.split_levels,
        precision: p,
    }
}
