//! Signed products `Π_{m∈[lo,hi)} R(m)^{σ(m)}` with every factor kept as an
//! exact integer until a 128-bit buffer fills.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{BigReal, Precision};
use crate::rational::FactoredRational;

/// Terms per parallel chunk; fixed so that results do not depend on the
/// thread count.
const CHUNK: u64 = 1 << 14;

/// `R(m) = Π (D·m + p_i)^{m_i} / D^{Σm_i}` with integer `D` and `p_i`.
#[derive(Debug, Clone)]
pub(crate) struct IntegerFactors {
    denominator: u64,
    factors: Vec<(i64, i64)>,
}

impl IntegerFactors {
    /// Requires unit scale, zero net degree and offsets over a 64-bit common
    /// denominator; callers check positivity on the range.
    pub(crate) fn new(r: &FactoredRational) -> Result<Self> {
        debug_assert!(r.numerator_degree() == r.denominator_degree());
        let d = r.common_denominator();
        let too_large = || Error::eval(format!("offsets of {r} exceed 64-bit integers"));
        let denominator = d.to_u64().ok_or_else(too_large)?;
        let mut factors = Vec::with_capacity(r.factors().len());
        for f in r.factors() {
            let p: BigInt = f.offset.numer() * (&d / f.offset.denom());
            factors.push((p.to_i64().ok_or_else(too_large)?, f.multiplicity));
        }
        Ok(IntegerFactors { denominator, factors })
    }

    fn bound(&self, hi: u64) -> Result<()> {
        let max_p = self.factors.iter().map(|f| f.0.max(0)).max().unwrap_or(0);
        (self.denominator as u128)
            .checked_mul(hi as u128)
            .and_then(|v| v.checked_add(max_p as u128))
            .filter(|v| *v < 1u128 << 63)
            .map(|_| ())
            .ok_or_else(|| Error::eval("factor values exceed 64 bits; lower --terms"))
    }
}

/// Exact integer accumulator flushed into a [`BigReal`].
struct Accumulator {
    buffer: u128,
    value: BigReal,
}

impl Accumulator {
    fn new(p: Precision) -> Self {
        Accumulator { buffer: 1, value: BigReal::one(p) }
    }

    #[inline]
    fn push(&mut self, f: u64) {
        let used = 128 - self.buffer.leading_zeros();
        let extra = 64 - f.leading_zeros();
        if used + extra > 128 {
            self.flush();
        }
        self.buffer *= f as u128;
    }

    fn flush(&mut self) {
        if self.buffer != 1 {
            self.value.mul_u128(self.buffer);
            self.buffer = 1;
        }
    }

    fn finish(mut self) -> BigReal {
        self.flush();
        self.value
    }
}

fn chunk_ratio(
    r: &IntegerFactors,
    lo: u64,
    hi: u64,
    sign: &(impl Fn(u64) -> i8 + Sync),
    p: Precision,
) -> (BigReal, BigReal) {
    let mut num = Accumulator::new(p);
    let mut den = Accumulator::new(p);
    let d = r.denominator;
    for m in lo..hi {
        let s = sign(m);
        if s == 0 {
            continue;
        }
        for &(pi, mult) in &r.factors {
            let v = (d * m).wrapping_add_signed(pi);
            let upper = (mult > 0) == (s > 0);
            let acc = if upper { &mut num } else { &mut den };
            for _ in 0..mult.unsigned_abs() {
                acc.push(v);
            }
        }
    }
    (num.finish(), den.finish())
}

/// `Π_{m∈[lo,hi)} R(m)^{sign(m)}` at precision `p` (signs in {−1, 0, 1}).
pub(crate) fn signed_product(
    r: &IntegerFactors,
    lo: u64,
    hi: u64,
    sign: impl Fn(u64) -> i8 + Sync,
    p: Precision,
    parallel: bool,
) -> Result<BigReal> {
    if hi <= lo || r.factors.is_empty() {
        return Ok(BigReal::one(p));
    }
    r.bound(hi)?;
    let chunks: Vec<(u64, u64)> = (lo..hi).step_by(CHUNK as usize).map(|a| (a, (a + CHUNK).min(hi))).collect();
    let parts: Vec<(BigReal, BigReal)> = if parallel {
        chunks.par_iter().map(|&(a, b)| chunk_ratio(r, a, b, &sign, p)).collect()
    } else {
        chunks.iter().map(|&(a, b)| chunk_ratio(r, a, b, &sign, p)).collect()
    };
    let mut num = BigReal::one(p);
    let mut den = BigReal::one(p);
    for (n, d) in &parts {
        num.mul_assign_ref(n);
        den.mul_assign_ref(d);
    }
    num.div_assign_ref(&den);
    Ok(num)
}

/// Working precision for a product of `terms` factors: guard digits plus
/// room for the rounding error of every flush.
pub(crate) fn product_precision(p: Precision, terms: u64) -> Precision {
    let extra = (terms.max(1) as f64).log10().ceil() as u32;
    Precision::digits(p.guarded().decimal_digits() + extra)
}
