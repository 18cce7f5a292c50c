use rayon::prelude::*;

use super::catalog::{catalog, Identity};
use super::expression::expr_from_spec;
use super::reduce::{reduce, Reduction, DEFAULT_DEPTH};
use crate::evaluator::{evaluate, noise_floor, EvalOptions, EvalResult};
use crate::numerics::BigReal;
use crate::sequences::ExponentKind;

/// Outcome of reducing a pm-t identity in the g-algebra.
#[derive(Debug, Clone)]
pub struct SymbolicCheck {
    pub reduction: Reduction,
    /// Whether the reduced constant equals the closed form exactly; `None`
    /// when the closed form is not a power product of rationals.
    pub matches: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub name: String,
    pub computed: Option<EvalResult>,
    pub expected: Option<BigReal>,
    pub abs_error: Option<BigReal>,
    /// `max(tolerance, combined error estimate)`.
    pub bound: Option<BigReal>,
    pub pass: bool,
    pub symbolic: Option<SymbolicCheck>,
    /// Why evaluation did not finish, when it did not.
    pub failure: Option<String>,
}

fn symbolic_check(identity: &Identity) -> Option<SymbolicCheck> {
    if identity.spec.kind() != ExponentKind::PmThue {
        return None;
    }
    let reduction = reduce(&expr_from_spec(&identity.spec).ok()?, DEFAULT_DEPTH).ok()?;
    let matches = identity.closed_form.as_power_product().map(|want| reduction.constant() == Some(&want));
    Some(SymbolicCheck { reduction, matches })
}

/// Evaluates both sides. Without an explicit `tolerance` the bound is ten
/// times the combined error estimate.
pub fn verify(identity: &Identity, opts: &EvalOptions, tolerance: Option<&BigReal>) -> VerifyReport {
    let symbolic = symbolic_check(identity);
    let failed = |message: String| VerifyReport {
        name: identity.name.clone(),
        computed: None,
        expected: None,
        abs_error: None,
        bound: None,
        pass: false,
        symbolic: symbolic.clone(),
        failure: Some(message),
    };
    let computed = match evaluate(&identity.spec, opts) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    let expected = match identity.closed_form.eval(opts.precision) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    let abs_error = (&computed.value - &expected).abs();
    let combined = &computed.error_estimate + &noise_floor(&expected, opts.precision);
    let bound = match tolerance {
        Some(t) if t > &combined => t.clone(),
        Some(_) => combined,
        None => combined * BigReal::from_u64(10, opts.precision),
    };
    VerifyReport {
        name: identity.name.clone(),
        pass: abs_error <= bound,
        computed: Some(computed),
        expected: Some(expected),
        abs_error: Some(abs_error),
        bound: Some(bound),
        symbolic,
        failure: None,
    }
}

/// [`verify`] over the whole catalog, concurrently, in catalog order.
pub fn verify_all(opts: &EvalOptions, tolerance: Option<&BigReal>) -> Vec<VerifyReport> {
    catalog().par_iter().map(|i| verify(i, opts, tolerance)).collect()
}
