//! Extended-precision reals, Gamma at rational points, constants and
//! closed-form expression trees.
//!
//! [`BigReal`] is a thin value type over `astro_float::BigFloat` that carries
//! its working precision in bits, so arithmetic can be written with operators.
//! Transcendental functions share a per-thread constant cache.

mod closed_form;
mod constants;
mod gamma;

pub use closed_form::{ClosedForm, PowerProduct};
pub use constants::{constant, Constant, EULER_GAMMA_DIGITS};
pub use gamma::{bernoulli, gamma, ln_gamma};

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

/// Guard digits added to every requested precision.
pub const GUARD_DIGITS: u32 = 10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Requested accuracy in significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(60);

    pub fn digits(d: u32) -> Self {
        Precision(d.max(1))
    }

    pub fn decimal_digits(self) -> u32 {
        self.0
    }

    /// The same precision plus [`GUARD_DIGITS`].
    pub fn guarded(self) -> Self {
        Precision(self.0 + GUARD_DIGITS)
    }

    pub fn bits(self) -> usize {
        ((f64::from(self.0) * std::f64::consts::LOG2_10).ceil() as usize + 8).max(64)
    }

    /// `10^{-digits}` as an `f64`-friendly exponent.
    pub fn epsilon_exponent(self) -> i32 {
        -(self.0 as i32)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

#[derive(Clone, Debug)]
pub struct BigReal {
    v: BigFloat,
    bits: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, bits: usize) -> Self {
        debug_assert!(!v.is_nan(), "NaN from astro-float: {:?}", v.err());
        BigReal { v, bits }
    }

    pub fn zero(p: Precision) -> Self {
        Self::wrap(BigFloat::from_u8(0, p.bits()), p.bits())
    }

    pub fn one(p: Precision) -> Self {
        Self::from_u64(1, p)
    }

    pub fn from_u64(v: u64, p: Precision) -> Self {
        Self::wrap(BigFloat::from_u64(v, p.bits()), p.bits())
    }

    pub fn from_i64(v: i64, p: Precision) -> Self {
        Self::wrap(BigFloat::from_i64(v, p.bits()), p.bits())
    }

    pub(crate) fn from_u128_bits(v: u128, bits: usize) -> Self {
        let lo = BigFloat::from_u64(v as u64, bits);
        let hi = (v >> 64) as u64;
        if hi == 0 {
            return Self::wrap(lo, bits);
        }
        let mut hi = BigFloat::from_u64(hi, bits);
        hi.set_exponent(hi.exponent().expect("finite") + 64);
        Self::wrap(hi.add(&lo, bits, RM), bits)
    }

    pub fn from_f64(v: f64, p: Precision) -> Self {
        Self::wrap(BigFloat::from_f64(v, p.bits()), p.bits())
    }

    pub fn from_bigint(v: &BigInt, p: Precision) -> Self {
        Self::from_bigint_bits(v, p.bits())
    }

    fn from_bigint_bits(v: &BigInt, bits: usize) -> Self {
        let (sign, digits) = v.to_u64_digits();
        let mut acc = BigFloat::from_u8(0, bits);
        // most significant word first: acc = acc * 2^64 + word
        for &w in digits.iter().rev() {
            if !acc.is_zero() {
                acc.set_exponent(acc.exponent().expect("finite") + 64);
            }
            acc = acc.add(&BigFloat::from_u64(w, bits), bits, RM);
        }
        if sign == IntSign::Minus {
            acc.inv_sign();
        }
        Self::wrap(acc, bits)
    }

    pub fn from_rational(q: &BigRational, p: Precision) -> Self {
        Self::from_rational_bits(q, p.bits())
    }

    fn from_rational_bits(q: &BigRational, bits: usize) -> Self {
        let n = Self::from_bigint_bits(q.numer(), bits);
        if q.denom().is_one() {
            return n;
        }
        let d = Self::from_bigint_bits(q.denom(), bits);
        Self::wrap(n.v.div(&d.v, bits, RM), bits)
    }

    /// Parses a decimal literal such as `0.5772156649`.
    pub fn from_decimal(text: &str, p: Precision) -> Self {
        let bits = p.bits();
        let v = with_consts(|cc| BigFloat::parse(text, Radix::Dec, bits, RM, cc));
        Self::wrap(v, bits)
    }

    pub fn pi(p: Precision) -> Self {
        let bits = p.bits();
        Self::wrap(with_consts(|cc| cc.pi(bits, RM)), bits)
    }

    pub fn precision_bits(&self) -> usize {
        self.bits
    }

    /// Rounds to the bit length of `p`.
    pub fn with_precision(&self, p: Precision) -> Self {
        let bits = p.bits();
        let mut v = self.v.clone();
        v.set_precision(bits, RM).expect("valid precision");
        Self::wrap(v, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.bits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.bits, RM), self.bits)
    }

    /// Natural logarithm; panics on nonpositive input.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "logarithm of a nonpositive number");
        let bits = self.bits;
        Self::wrap(with_consts(|cc| self.v.ln(bits, RM, cc)), bits)
    }

    pub fn exp(&self) -> Self {
        let bits = self.bits;
        Self::wrap(with_consts(|cc| self.v.exp(bits, RM, cc)), bits)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        Self::wrap(self.v.sqrt(self.bits, RM), self.bits)
    }

    pub fn sin(&self) -> Self {
        let bits = self.bits;
        Self::wrap(with_consts(|cc| self.v.sin(bits, RM, cc)), bits)
    }

    pub fn powi(&self, e: i64) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        Self::wrap(base.v.powi(e.unsigned_abs() as usize, self.bits, RM), self.bits)
    }

    /// `self^e` for rational `e`; `None` for a negative base with a
    /// non-integer exponent.
    pub fn pow_rational(&self, e: &BigRational) -> Option<Self> {
        if e.is_integer() {
            if let Some(k) = e.to_integer().to_i64() {
                return Some(self.powi(k));
            }
        }
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if *e.denom() == BigInt::from(2) && e.numer().to_i64().is_some() {
            let k = e.numer().to_i64().expect("checked");
            return Some(self.sqrt().powi(k));
        }
        let exponent = BigReal::from_rational_bits(e, self.bits);
        Some((self.ln() * exponent).exp())
    }

    /// Nearest `f64` (saturating to 0 or ±inf outside the `f64` range).
    pub fn to_f64(&self) -> f64 {
        let Some((words, _, sign, exponent, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        if self.v.is_zero() || words.is_empty() {
            return 0.0;
        }
        // mantissa is normalised with its top bit in the top word: value = 0.m × 2^e
        let top = words[words.len() - 1] as f64;
        let next = if words.len() > 1 { words[words.len() - 2] as f64 } else { 0.0 };
        let frac = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
        let mag = frac * 2f64.powi(exponent.clamp(-1100, 1100));
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Decimal rendering with `digits` significant digits, fixed-point for
    /// moderate magnitudes and scientific otherwise.
    pub fn to_string_digits(&self, digits: u32) -> String {
        let digits = digits.max(1) as usize;
        if self.is_zero() {
            return "0".into();
        }
        let (negative, mantissa, exp10) = self.decimal_parts();
        let (mantissa, exp10) = round_digits(&mantissa, exp10, digits);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if (-7..21).contains(&exp10) {
            if exp10 >= 0 {
                let e = exp10 as usize;
                let int_len = e + 1;
                if mantissa.len() <= int_len {
                    out.push_str(&mantissa);
                    out.extend(std::iter::repeat('0').take(int_len - mantissa.len()));
                } else {
                    out.push_str(&mantissa[..int_len]);
                    out.push('.');
                    out.push_str(&mantissa[int_len..]);
                }
            } else {
                out.push_str("0.");
                out.extend(std::iter::repeat('0').take((-exp10 - 1) as usize));
                out.push_str(&mantissa);
            }
        } else {
            out.push_str(&mantissa[..1]);
            if mantissa.len() > 1 {
                out.push('.');
                out.push_str(&mantissa[1..]);
            }
            out.push_str(&format!("e{exp10}"));
        }
        out
    }

    /// `(negative, digit string without dot, decimal exponent of first digit)`.
    fn decimal_parts(&self) -> (bool, String, i64) {
        let text = with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).expect("finite value");
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.as_str()),
        };
        let (mant, exp) = body.split_once(['e', 'E']).unwrap_or((body, "0"));
        let exp: i64 = exp.trim_start_matches('+').parse().expect("decimal exponent");
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let mut all = String::with_capacity(int_part.len() + frac_part.len());
        all.push_str(int_part);
        all.push_str(frac_part);
        let lead = all.bytes().take_while(|&b| b == b'0').count();
        let exp10 = exp + int_part.len() as i64 - 1 - lead as i64;
        let digits = all[lead..].to_string();
        (negative, if digits.is_empty() { "0".into() } else { digits }, exp10)
    }
}

/// Rounds a digit string half-up to `digits` digits, padding with zeros.
fn round_digits(mantissa: &str, exp10: i64, digits: usize) -> (String, i64) {
    let mut bytes: Vec<u8> = mantissa.bytes().collect();
    let mut exp10 = exp10;
    if bytes.len() > digits {
        let round_up = bytes[digits] >= b'5';
        bytes.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    bytes.insert(0, b'1');
                    bytes.truncate(digits);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if bytes[i] == b'9' {
                    bytes[i] = b'0';
                } else {
                    bytes[i] += 1;
                    break;
                }
            }
        }
    }
    bytes.resize(digits, b'0');
    (String::from_utf8(bytes).expect("ascii"), exp10)
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits =
            f.precision().map(|d| d as u32).unwrap_or((self.bits as f64 / std::f64::consts::LOG2_10).floor() as u32);
        f.write_str(&self.to_string_digits(digits))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let bits = self.bits.max(rhs.bits);
                BigReal::wrap(self.v.$call(&rhs.v, bits, RM), bits)
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.v.neg(), self.bits)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.v.clone().neg(), self.bits)
    }
}

impl BigReal {
    /// Multiplies in place by an exact `u128`.
    pub(crate) fn mul_u128(&mut self, v: u128) {
        let f = BigReal::from_u128_bits(v, self.bits);
        self.v = self.v.mul(&f.v, self.bits, RM);
    }

    pub(crate) fn mul_assign_ref(&mut self, rhs: &BigReal) {
        self.v = self.v.mul(&rhs.v, self.bits.max(rhs.bits), RM);
    }

    pub(crate) fn div_assign_ref(&mut self, rhs: &BigReal) {
        self.v = self.v.div(&rhs.v, self.bits.max(rhs.bits), RM);
    }
}

/// `10^{-k}` at precision `p`.
pub fn ten_pow_neg(k: i32, p: Precision) -> BigReal {
    BigReal::from_u64(10, p).powi(-(k as i64))
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal::zero(Precision::DEFAULT)
    }
    fn is_zero(&self) -> bool {
        BigReal::is_zero(self)
    }
}
