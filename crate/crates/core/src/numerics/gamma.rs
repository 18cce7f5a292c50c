//! Gamma at positive rational arguments via Stirling's series.
//!
//! `ln Γ(z) = (z − ½) ln z − z + ½ ln 2π + Σ_k B_{2k} / (2k(2k−1) z^{2k−1})`
//! is applied at `z = x + m` with `m ≈ 1.2·P`, and the exact rational
//! Pochhammer symbol `x(x+1)…(x+m−1)` is divided back out.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ten_pow_neg, BigReal, Precision};
use crate::error::{Error, Result};

/// Even-index Bernoulli numbers `B_0, B_2, B_4, …`, grown on demand.
static EVEN_BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

fn extend_even_bernoulli(table: &mut Vec<BigRational>, count: usize) {
    // Σ_{j=0}^{n} C(n+1, j) B_j = 0 for n ≥ 1, with B_1 = −1/2 the only
    // nonzero odd term.
    if table.is_empty() {
        table.push(BigRational::one());
    }
    while table.len() < count {
        let n = 2 * table.len();
        let row = binomial_row(n + 1);
        let mut acc = BigRational::from(row[1].clone()) * BigRational::new((-1).into(), 2.into());
        for (i, b) in table.iter().enumerate() {
            acc += BigRational::from(row[2 * i].clone()) * b;
        }
        table.push(-acc / BigRational::from(BigInt::from(n + 1)));
    }
}

/// The Bernoulli number `B_n` (with `B_1 = −1/2`).
pub fn bernoulli(n: usize) -> BigRational {
    if n == 1 {
        return BigRational::new((-1).into(), 2.into());
    }
    if n % 2 == 1 {
        return BigRational::zero();
    }
    let mut table = EVEN_BERNOULLI.lock().expect("bernoulli cache poisoned");
    extend_even_bernoulli(&mut table, n / 2 + 1);
    table[n / 2].clone()
}

fn even_bernoulli_prefix(count: usize) -> Vec<BigRational> {
    let mut table = EVEN_BERNOULLI.lock().expect("bernoulli cache poisoned");
    extend_even_bernoulli(&mut table, count);
    table[..count].to_vec()
}

/// `ln Γ(z)` from the asymptotic series; `z` must already be large.
fn stirling_ln_gamma(z: &BigRational, p: Precision) -> Result<BigReal> {
    let zr = BigReal::from_rational(z, p);
    let half = BigReal::from_rational(&BigRational::new(1.into(), 2.into()), p);
    let two_pi = BigReal::pi(p) * BigReal::from_u64(2, p);
    let mut acc = (&zr - &half) * zr.ln() - &zr + two_pi.ln() * &half;

    let threshold = ten_pow_neg(p.decimal_digits() as i32 + 2, p);
    let inv = zr.recip();
    let inv_sq = &inv * &inv;
    let mut power = inv; // z^{-(2k-1)}
    let max_terms = 4 * p.decimal_digits() as usize + 16;
    let mut cached = even_bernoulli_prefix(32.min(max_terms + 1));
    let mut previous: Option<BigReal> = None;
    for k in 1..=max_terms {
        if k >= cached.len() {
            cached = even_bernoulli_prefix((2 * cached.len()).min(max_terms + 1).max(k + 1));
        }
        let denom = BigInt::from(2 * k) * BigInt::from(2 * k - 1);
        let coeff = &cached[k] / BigRational::from(denom);
        let term = BigReal::from_rational(&coeff, p) * &power;
        let size = term.abs();
        if size < threshold {
            return Ok(acc + term);
        }
        if let Some(prev) = &previous {
            if &size > prev {
                break;
            }
        }
        acc = acc + term;
        previous = Some(size);
        power = power * &inv_sq;
    }
    Err(Error::eval(format!("Stirling series did not reach 1e-{} at z = {z}", p.decimal_digits())))
}

/// Shift `m` such that Stirling's series is accurate at `x + m`.
fn shift_for(x: &BigRational, p: Precision) -> u64 {
    let target = (1.2 * f64::from(p.decimal_digits())).ceil() as u64;
    let floor = x.floor().to_integer().to_u64().unwrap_or(u64::MAX);
    target.saturating_sub(floor)
}

fn check_positive(x: &BigRational) -> Result<()> {
    if !x.is_positive() {
        return Err(Error::input(format!("Gamma needs a positive argument, got {x}")));
    }
    Ok(())
}

fn pochhammer(x: &BigRational, m: u64) -> BigRational {
    // x(x+1)…(x+m−1) over the common denominator d: Π (p + j d) / d^m
    let p = x.numer();
    let d = x.denom();
    let mut num = BigInt::one();
    let mut term = p.clone();
    for _ in 0..m {
        num *= &term;
        term += d;
    }
    BigRational::new(num, d.pow(m as u32))
}

/// `ln Γ(x)` for rational `x > 0`.
pub fn ln_gamma(x: &BigRational, p: Precision) -> Result<BigReal> {
    check_positive(x)?;
    let work = p.guarded();
    let m = shift_for(x, work);
    let shifted = x + BigRational::from(BigInt::from(m));
    let mut value = stirling_ln_gamma(&shifted, work)?;
    if m > 0 {
        value = value - BigReal::from_rational(&pochhammer(x, m), work).ln();
    }
    Ok(value.with_precision(p))
}

/// `Γ(x)` for rational `x > 0`.
pub fn gamma(x: &BigRational, p: Precision) -> Result<BigReal> {
    check_positive(x)?;
    if x.is_integer() && *x <= BigRational::from(BigInt::from(1000)) {
        let n = x.to_integer().to_u64().expect("bounded");
        let mut acc = BigInt::one();
        for k in 2..n {
            acc *= k;
        }
        return Ok(BigReal::from_bigint(&acc, p));
    }
    let work = p.guarded();
    let m = shift_for(x, work);
    let shifted = x + BigRational::from(BigInt::from(m));
    let lg = stirling_ln_gamma(&shifted, work)?;
    let mut value = lg.exp();
    if m > 0 {
        value = value / BigReal::from_rational(&pochhammer(x, m), work);
    }
    Ok(value.with_precision(p))
}
