use num_rational::BigRational;
use num_traits::One;

use super::kernel::{product_precision, signed_product, IntegerFactors};
use super::{noise_floor, zero_one_from_parts, EvalOptions, EvalResult, ProductSpec};
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, BigReal, Precision};
use crate::rational::{int, FactoredRational};
use crate::sequences::{thue_morse, ExponentKind};

fn thue_sign(m: u64) -> i8 {
    1 - 2 * thue_morse(m) as i8
}

fn exact_result(value: BigReal, opts: &EvalOptions, terms: u64) -> EvalResult {
    let p = opts.precision;
    EvalResult {
        error_estimate: noise_floor(&value, p),
        value,
        terms_used: terms,
        split_levels: opts.split_levels,
        precision: p,
    }
}

/// Exact `Π_{m=start}^{2^L−1} R(m)^{(−1)^{t_m}}`, accumulated through `L`
/// successive dyadic splits.
pub(crate) fn split_boundary(r: &FactoredRational, start: u64, levels: u32) -> Result<BigRational> {
    if levels == 0 {
        return Ok(if start == 0 {
            r.value_at(0).ok_or_else(|| Error::eval("rational vanishes at n = 0"))?
        } else {
            BigRational::one()
        });
    }
    let mut current = r.clone();
    let mut boundary = BigRational::one();
    let mut s = start;
    for level in 0..levels {
        let (next, b) = current.dyadic_split(s)?;
        boundary *= b;
        s = 1;
        if level + 1 < levels {
            current = next;
        }
    }
    Ok(boundary)
}

pub(crate) fn pm_thue(r: &FactoredRational, start: u64, opts: &EvalOptions) -> Result<EvalResult> {
    opts.validate()?;
    let p = opts.precision;
    let n = opts.terms_for(ExponentKind::PmThue);
    let levels = opts.split_levels;
    if r.is_one() {
        return Ok(exact_result(BigReal::one(p), opts, 0));
    }
    let block = 1u64
        .checked_shl(levels)
        .filter(|b| b.checked_mul(n + 1).is_some())
        .ok_or_else(|| Error::input("split levels and terms are too large together"))?;
    let boundary = split_boundary(r, start, levels)?;

    // Π_{n=1}^{N} R_L(n)^{ε_n} = Π_{m=2^L}^{2^L(N+1)−1} R(m)^{ε_m}
    let ints = IntegerFactors::new(r)?;
    let hi = block * (n + 1);
    let work = product_precision(p, hi * r.factors().len() as u64);
    let main = signed_product(&ints, block, hi, thue_sign, work, opts.parallel)?;
    let value = BigReal::from_rational(&boundary, work) * main;

    // last block is R_L(N)^{±1}; tail ≈ |log R_L(N)|·N/L
    let last = signed_product(&ints, block * n, hi, thue_sign, work, false)?;
    let tail = last.ln().abs() * BigReal::from_u64(n, work) / BigReal::from_u64(levels.max(1) as u64, work);
    let error = value.abs() * tail + noise_floor(&value, p);
    Ok(EvalResult {
        value: value.with_precision(p),
        error_estimate: error.with_precision(p),
        terms_used: n,
        split_levels: levels,
        precision: p,
    })
}

/// `∏_{n≥start} R(n)^{(−1)^{t_n}}` by `L`-fold dyadic splitting.
pub fn eval_pm_thue(spec: &ProductSpec, opts: &EvalOptions) -> Result<EvalResult> {
    spec.expect_kind(&[ExponentKind::PmThue])?;
    pm_thue(spec.rational(), spec.start(), opts)
}

/// `Σ m_i ln Γ(a_i + start)` with the sign flipped: the log of the plain
/// product by telescoping.
pub(crate) fn plain_log(r: &FactoredRational, start: u64, p: Precision) -> Result<BigReal> {
    let s = int(start as i64);
    let mut acc = BigReal::zero(p);
    for f in r.factors() {
        let lg = ln_gamma(&(&f.offset + &s), p)?;
        acc = acc - lg * BigReal::from_i64(f.multiplicity, p);
    }
    Ok(acc)
}

/// `∏_{n≥start} R(n)` as `Π Γ(a_i + start)^{−m_i}`.
pub fn eval_plain(spec: &ProductSpec, opts: &EvalOptions) -> Result<EvalResult> {
    spec.expect_kind(&[ExponentKind::Plain])?;
    plain_product(spec.rational(), spec.start(), opts)
}

pub(crate) fn plain_product(r: &FactoredRational, start: u64, opts: &EvalOptions) -> Result<EvalResult> {
    opts.validate()?;
    r.check_kind(ExponentKind::Plain)?;
    r.check_domain(start)?;
    let p = opts.precision;
    let work = p.guarded();
    let log = plain_log(r, start, work)?;
    let value = if log.is_zero() { BigReal::one(work) } else { log.exp() };
    let mut result = exact_result(value.with_precision(p), opts, 0);
    result.split_levels = 0;
    Ok(result)
}

/// `∏_{n≥start} R(n)^{t_n}` as `sqrt(plain / pm)`.
pub fn eval_zero_one_thue(spec: &ProductSpec, opts: &EvalOptions) -> Result<EvalResult> {
    spec.expect_kind(&[ExponentKind::ZeroOneThue])?;
    let plain = plain_product(spec.rational(), spec.start(), opts)?;
    let pm = pm_thue(spec.rational(), spec.start(), opts)?;
    Ok(zero_one_from_parts(plain, pm, opts))
}
