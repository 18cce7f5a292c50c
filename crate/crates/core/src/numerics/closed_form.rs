use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{constant, BigReal, Constant, Precision};
use crate::error::{Error, Result};
use crate::rational::{int, pow_rational};

/// Exact expression tree for the right-hand side of an identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ClosedForm {
    Rational {
        #[serde(with = "rational_text")]
        value: BigRational,
    },
    Pi,
    GammaQuarter,
    ExpEulerGamma,
    Add {
        left: Box<ClosedForm>,
        right: Box<ClosedForm>,
    },
    Sub {
        left: Box<ClosedForm>,
        right: Box<ClosedForm>,
    },
    Mul {
        left: Box<ClosedForm>,
        right: Box<ClosedForm>,
    },
    Div {
        left: Box<ClosedForm>,
        right: Box<ClosedForm>,
    },
    Pow {
        base: Box<ClosedForm>,
        #[serde(with = "rational_text")]
        exponent: BigRational,
    },
}

pub(crate) mod rational_text {
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

impl ClosedForm {
    pub fn rational(q: BigRational) -> Self {
        ClosedForm::Rational { value: q }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn pow(self, exponent: BigRational) -> Self {
        ClosedForm::Pow { base: Box::new(self), exponent }
    }

    pub fn pow_ratio(self, n: i64, d: i64) -> Self {
        self.pow(BigRational::new(n.into(), d.into()))
    }

    pub fn sqrt(self) -> Self {
        self.pow_ratio(1, 2)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: ClosedForm) -> Self {
        ClosedForm::Add { left: Box::new(self), right: Box::new(rhs) }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: ClosedForm) -> Self {
        ClosedForm::Sub { left: Box::new(self), right: Box::new(rhs) }
    }

    /// Evaluates at `p` digits; internal work carries guard digits.
    pub fn eval(&self, p: Precision) -> Result<BigReal> {
        Ok(self.eval_at(p.guarded())?.with_precision(p))
    }

    fn eval_at(&self, p: Precision) -> Result<BigReal> {
        Ok(match self {
            ClosedForm::Rational { value } => BigReal::from_rational(value, p),
            ClosedForm::Pi => constant(Constant::Pi, p)?,
            ClosedForm::GammaQuarter => constant(Constant::GammaQuarter, p)?,
            ClosedForm::ExpEulerGamma => {
                let digits = p.decimal_digits().min(super::EULER_GAMMA_DIGITS);
                constant(Constant::EulerGamma, Precision::digits(digits))?.with_precision(p).exp()
            }
            ClosedForm::Add { left, right } => left.eval_at(p)? + right.eval_at(p)?,
            ClosedForm::Sub { left, right } => left.eval_at(p)? - right.eval_at(p)?,
            ClosedForm::Mul { left, right } => left.eval_at(p)? * right.eval_at(p)?,
            ClosedForm::Div { left, right } => {
                let d = right.eval_at(p)?;
                if d.is_zero() {
                    return Err(Error::eval(format!("division by zero in {self}")));
                }
                left.eval_at(p)? / d
            }
            ClosedForm::Pow { base, exponent } => {
                let b = base.eval_at(p)?;
                if b.is_zero() && exponent.is_negative() {
                    return Err(Error::eval(format!("division by zero in {self}")));
                }
                b.pow_rational(exponent)
                    .ok_or_else(|| Error::eval(format!("negative base raised to {exponent} in {self}")))?
            }
        })
    }

    /// Exact canonical form when the tree is a signed product of rational
    /// powers of rationals; `None` when a transcendental leaf occurs.
    pub fn as_power_product(&self) -> Option<PowerProduct> {
        match self {
            ClosedForm::Rational { value } => PowerProduct::from_rational(value),
            ClosedForm::Pi | ClosedForm::GammaQuarter | ClosedForm::ExpEulerGamma => None,
            ClosedForm::Mul { left, right } => Some(left.as_power_product()?.mul(&right.as_power_product()?)),
            ClosedForm::Div { left, right } => Some(left.as_power_product()?.mul(&right.as_power_product()?.recip())),
            ClosedForm::Pow { base, exponent } => base.as_power_product()?.pow(exponent),
            ClosedForm::Add { left, right } | ClosedForm::Sub { left, right } => {
                let l = left.as_power_product()?.as_rational()?;
                let r = right.as_power_product()?.as_rational()?;
                let sum = if matches!(self, ClosedForm::Add { .. }) { l + r } else { l - r };
                PowerProduct::from_rational(&sum)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ClosedForm::Add { .. } | ClosedForm::Sub { .. } => 1,
            ClosedForm::Mul { .. } | ClosedForm::Div { .. } => 2,
            ClosedForm::Rational { value } if !value.is_integer() || value.is_negative() => 2,
            ClosedForm::Pow { .. } => 3,
            _ => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl Mul for ClosedForm {
    type Output = ClosedForm;
    fn mul(self, rhs: ClosedForm) -> ClosedForm {
        ClosedForm::Mul { left: Box::new(self), right: Box::new(rhs) }
    }
}

impl Div for ClosedForm {
    type Output = ClosedForm;
    fn div(self, rhs: ClosedForm) -> ClosedForm {
        ClosedForm::Div { left: Box::new(self), right: Box::new(rhs) }
    }
}

fn fmt_exponent(e: &BigRational) -> String {
    if e.is_integer() && !e.is_negative() {
        e.to_string()
    } else {
        format!("({e})")
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Rational { value } => write!(f, "{value}"),
            ClosedForm::Pi => f.write_str("pi"),
            ClosedForm::GammaQuarter => f.write_str("Gamma(1/4)"),
            ClosedForm::ExpEulerGamma => f.write_str("exp(euler_gamma)"),
            ClosedForm::Add { left, right } => {
                left.fmt_child(f, 1)?;
                f.write_str(" + ")?;
                right.fmt_child(f, 2)
            }
            ClosedForm::Sub { left, right } => {
                left.fmt_child(f, 1)?;
                f.write_str(" - ")?;
                right.fmt_child(f, 2)
            }
            ClosedForm::Mul { left, right } => {
                left.fmt_child(f, 2)?;
                f.write_str("*")?;
                right.fmt_child(f, 3)
            }
            ClosedForm::Div { left, right } => {
                left.fmt_child(f, 2)?;
                f.write_str("/")?;
                right.fmt_child(f, 3)
            }
            ClosedForm::Pow { base, exponent } => {
                base.fmt_child(f, 4)?;
                write!(f, "^{}", fmt_exponent(exponent))
            }
        }
    }
}

/// Bases are factored by trial division below this bound; any cofactor
/// left over is kept as a base of its own.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// `±Π base^exponent` with rational exponents, bases > 1 and coprime when
/// fully factored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PowerProduct {
    negative: bool,
    factors: BTreeMap<BigInt, BigRational>,
}

fn factorize(n: &BigInt) -> Vec<(BigInt, i64)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut push = |p: BigInt, k: i64| {
        if k > 0 {
            out.push((p, k));
        }
    };
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut k = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            k += 1;
        }
        push(bp, k);
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        push(n, 1);
    }
    out
}

impl PowerProduct {
    pub fn one() -> Self {
        Self::default()
    }

    /// `None` for zero.
    pub fn from_rational(q: &BigRational) -> Option<Self> {
        if q.is_zero() {
            return None;
        }
        let mut out = PowerProduct { negative: q.is_negative(), factors: BTreeMap::new() };
        for (p, k) in factorize(q.numer()) {
            out.add_power(p, int(k));
        }
        for (p, k) in factorize(q.denom()) {
            out.add_power(p, int(-k));
        }
        Some(out)
    }

    fn add_power(&mut self, base: BigInt, e: BigRational) {
        let entry = self.factors.entry(base.clone()).or_insert_with(BigRational::zero);
        *entry += e;
        if entry.is_zero() {
            self.factors.remove(&base);
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn factors(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.factors.iter()
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.factors.is_empty()
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        let mut out = self.clone();
        out.negative ^= other.negative;
        for (b, e) in &other.factors {
            out.add_power(b.clone(), e.clone());
        }
        out
    }

    pub fn recip(&self) -> PowerProduct {
        PowerProduct { negative: self.negative, factors: self.factors.iter().map(|(b, e)| (b.clone(), -e)).collect() }
    }

    /// `None` when a negative value is raised to a power with even denominator.
    pub fn pow(&self, e: &BigRational) -> Option<PowerProduct> {
        let negative = if self.negative {
            if e.denom() % 2u32 == BigInt::zero() {
                return None;
            }
            e.numer() % 2u32 != BigInt::zero()
        } else {
            false
        };
        let mut out = PowerProduct { negative, factors: BTreeMap::new() };
        for (b, x) in &self.factors {
            out.add_power(b.clone(), x * e);
        }
        Some(out)
    }

    /// The exact rational value when every exponent is an integer.
    pub fn as_rational(&self) -> Option<BigRational> {
        let mut acc = BigRational::one();
        for (b, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            acc *= pow_rational(&BigRational::from(b.clone()), e.to_integer().to_i64()?);
        }
        Some(if self.negative { -acc } else { acc })
    }

    pub fn to_closed_form(&self) -> ClosedForm {
        if let Some(q) = self.as_rational() {
            return ClosedForm::rational(q);
        }
        let mut integer_part = BigRational::one();
        let mut powers: Vec<ClosedForm> = Vec::new();
        for (b, e) in &self.factors {
            let base = BigRational::from(b.clone());
            let whole = e.floor();
            let frac = e - &whole;
            integer_part *= pow_rational(&base, whole.to_integer().to_i64().unwrap_or(0));
            if !frac.is_zero() {
                powers.push(ClosedForm::rational(base).pow(frac));
            }
        }
        if self.negative {
            integer_part = -integer_part;
        }
        let mut iter = powers.into_iter();
        let mut tree = if integer_part.is_one() {
            iter.next().expect("non-rational product has a fractional power")
        } else {
            ClosedForm::rational(integer_part)
        };
        for p in iter {
            tree = tree * p;
        }
        tree
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        if self.negative {
            f.write_str("-")?;
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, e)| if e.is_one() { b.to_string() } else { format!("{b}^{}", fmt_exponent(e)) })
            .collect();
        f.write_str(&parts.join("*"))
    }
}
