use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::evaluator::ProductSpec;
use crate::numerics::PowerProduct;
use crate::parse::parse_rational;
use crate::rational::int;
use crate::sequences::ExponentKind;

/// `Σ c_x·G(x) + log q` with `G = log g`. The log part `q` is a positive
/// rational power product, so it is kept already factored over primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GExpression {
    terms: BTreeMap<BigRational, BigRational>,
    log_const: PowerProduct,
}

/// Points where `G` is defined on the real-log domain.
pub(crate) fn admissible_point(x: &BigRational) -> bool {
    x > &int(-1)
}

impl GExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c·G(x)`.
    pub fn g(x: BigRational, c: BigRational) -> Result<Self> {
        let mut e = Self::zero();
        e.add_term(x, c)?;
        Ok(e)
    }

    /// `c·log q` for positive `q`.
    pub fn log(q: &BigRational, c: &BigRational) -> Result<Self> {
        let mut e = Self::zero();
        e.add_log(q, c)?;
        Ok(e)
    }

    /// The zero-valued relation `G(x/2) − G((x+1)/2) − G(x) − log(1+x)`.
    pub fn relation(x: &BigRational) -> Result<Self> {
        if !admissible_point(x) {
            return Err(Error::input(format!("relation needs x > -1, got {x}")));
        }
        let one = BigRational::one();
        let half = BigRational::new(1.into(), 2.into());
        let mut e = Self::zero();
        e.add_term(x * &half, one.clone())?;
        e.add_term((x + &one) * &half, -one.clone())?;
        e.add_term(x.clone(), -one.clone())?;
        e.add_log(&(x + &one), &-one)?;
        Ok(e)
    }

    pub fn add_term(&mut self, x: BigRational, c: BigRational) -> Result<()> {
        if !admissible_point(&x) {
            return Err(Error::input(format!("G(x) needs x > -1, got {x}")));
        }
        let entry = self.terms.entry(x.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&x);
        }
        Ok(())
    }

    pub fn add_log(&mut self, q: &BigRational, c: &BigRational) -> Result<()> {
        if !q.is_positive() {
            return Err(Error::input(format!("log needs a positive argument, got {q}")));
        }
        let pp = PowerProduct::from_rational(q).expect("nonzero").pow(c).expect("positive base");
        self.log_const = self.log_const.mul(&pp);
        Ok(())
    }

    pub fn terms(&self) -> &BTreeMap<BigRational, BigRational> {
        &self.terms
    }

    /// `exp` of the log part.
    pub fn log_const(&self) -> &PowerProduct {
        &self.log_const
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GExpression {
            terms: self.terms.iter().map(|(x, v)| (x.clone(), v * c)).collect(),
            log_const: self.log_const.pow(c).expect("positive log part"),
        }
    }

    pub(crate) fn from_parts(terms: BTreeMap<BigRational, BigRational>, log_const: PowerProduct) -> Self {
        GExpression { terms, log_const }
    }
}

/// Exact log of a ±1 Thue–Morse product: `Σ m_i G(a_i)`, plus `log R(0)` when
/// the product starts at 0.
pub fn expr_from_spec(spec: &ProductSpec) -> Result<GExpression> {
    if spec.kind() != ExponentKind::PmThue {
        return Err(Error::input(format!("symbolic form exists only for pm-t products, got `{}`", spec.kind())));
    }
    let r = spec.rational();
    let mut e = GExpression::zero();
    for f in r.factors() {
        e.add_term(f.offset.clone(), int(f.multiplicity))?;
    }
    if spec.start() == 0 {
        let r0 = r.value_at(0).ok_or_else(|| Error::input("rational vanishes at n = 0"))?;
        e.add_log(&r0, &BigRational::one())?;
    }
    Ok(e)
}

impl Add for GExpression {
    type Output = GExpression;

    fn add(mut self, rhs: GExpression) -> GExpression {
        for (x, c) in rhs.terms {
            self.add_term(x, c).expect("points already admissible");
        }
        self.log_const = self.log_const.mul(&rhs.log_const);
        self
    }
}

impl Neg for GExpression {
    type Output = GExpression;

    fn neg(self) -> GExpression {
        self.scale(&-BigRational::one())
    }
}

impl Sub for GExpression {
    type Output = GExpression;

    fn sub(self, rhs: GExpression) -> GExpression {
        self + (-rhs)
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, first: bool, c: &BigRational, atom: &str) -> fmt::Result {
    let sign = if c.is_negative() { "-" } else { "+" };
    if first {
        if c.is_negative() {
            f.write_str("-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    let a = c.abs();
    if a.is_one() {
        f.write_str(atom)
    } else {
        write!(f, "{a}*{atom}")
    }
}

impl fmt::Display for GExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, c) in &self.terms {
            write_coefficient(f, first, c, &format!("G({x})"))?;
            first = false;
        }
        for (p, e) in self.log_const.factors() {
            write_coefficient(f, first, e, &format!("log({p})"))?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Parser for `[±] [coef [*]] (G(x) | log(q)) { ± ... }`, e.g.
/// `2G(1) - G(1/2) + 1/2*log(3)`.
struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat("+") {
            Some(false)
        } else if self.eat("-") || self.eat("−") {
            Some(true)
        } else {
            None
        }
    }

    fn number(&mut self) -> Result<Option<BigRational>> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest.find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/' || c == ' ')).unwrap_or(rest.len());
        let literal = rest[..len].trim_end();
        if literal.is_empty() {
            return Ok(None);
        }
        let value = parse_rational(literal).map_err(|_| self.error(format!("invalid number `{literal}`")))?;
        self.pos = start + literal.len();
        Ok(Some(value))
    }

    fn signed_number(&mut self) -> Result<BigRational> {
        let negative = self.sign().unwrap_or(false);
        let v = self.number()?.ok_or_else(|| self.error("expected a number"))?;
        Ok(if negative { -v } else { v })
    }

    fn term(&mut self, negative: bool, out: &mut GExpression) -> Result<()> {
        let mut c = self.number()?.unwrap_or_else(BigRational::one);
        if negative {
            c = -c;
        }
        self.eat("*");
        let at = self.pos;
        let is_log = if self.eat("G(") {
            false
        } else if self.eat("log(") {
            true
        } else {
            return Err(self.error("expected `G(` or `log(`"));
        };
        let x = self.signed_number()?;
        if !self.eat(")") {
            return Err(self.error("expected `)`"));
        }
        let res = if is_log { out.add_log(&x, &c) } else { out.add_term(x, c) };
        res.map_err(|e| Error::Parse { position: at, message: e.to_string() })
    }
}

impl FromStr for GExpression {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        if text.trim() == "0" {
            return Ok(GExpression::zero());
        }
        let mut s = Scanner { text, pos: 0 };
        let mut out = GExpression::zero();
        let mut negative = s.sign().unwrap_or(false);
        s.skip_ws();
        if s.peek().is_none() {
            return Err(s.error("empty expression"));
        }
        loop {
            s.term(negative, &mut out)?;
            s.skip_ws();
            if s.peek().is_none() {
                return Ok(out);
            }
            negative = s.sign().ok_or_else(|| s.error("expected `+` or `-`"))?;
        }
    }
}
