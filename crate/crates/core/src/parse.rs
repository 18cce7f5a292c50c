//! Factor-expression grammar.
//!
//! ```text
//! product  := term { term } [ "/" "(" term { term } ")" | "/" term ] ;
//! term     := [ integer ] "(" linear ")" [ "^" integer ] | integer ;
//! linear   := [ integer ] "n" [ ("+" | "-" | "−") rational ] | rational ;
//! rational := integer [ "/" integer ] ;
//! ```
//!
//! Whitespace is ignored and `*` may separate terms. A leading integer in a
//! term multiplies the scale once; the exponent applies to the parenthesised
//! factor only. [`FactoredRational`]'s `Display` emits the same grammar.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{pow_rational, FactoredRational, RawFactor};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    N,
    Plus,
    Minus,
    Slash,
    LParen,
    RParen,
    Caret,
    Star,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().enumerate().peekable();
    while let Some((pos, c)) = chars.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut digits = String::from(c);
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                Tok::Int(digits.parse().expect("ascii digits"))
            }
            'n' => Tok::N,
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '^' => Tok::Caret,
            '*' | '·' => Tok::Star,
            other => return Err(Error::Parse { position: pos, message: format!("unexpected character `{other}`") }),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

/// A parsed term: scale contribution and at most one affine factor.
struct Term {
    scale: BigRational,
    factor: Option<RawFactor>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.here(), message: message.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn rational(&mut self) -> Result<BigRational> {
        let num = self.integer()?;
        // a slash followed by an integer inside a factor is a fraction
        if self.peek() == Some(&Tok::Slash) && matches!(self.peek_at(1), Some(Tok::Int(_))) {
            self.pos += 1;
            let at = self.here();
            let den = self.integer()?;
            if den.is_zero() {
                return Err(Error::Parse { position: at, message: "zero denominator".into() });
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }

    fn signed_rational(&mut self) -> Result<BigRational> {
        let negative = self.eat(&Tok::Minus);
        if !negative {
            self.eat(&Tok::Plus);
        }
        let q = self.rational()?;
        Ok(if negative { -q } else { q })
    }

    /// Inside the parentheses: returns `(coeff, constant)`.
    fn linear(&mut self) -> Result<(BigRational, BigRational)> {
        let start = self.here();
        let negative = self.eat(&Tok::Minus);
        let coeff = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::N), _) => {
                self.pos += 1;
                Some(BigInt::one())
            }
            (Some(Tok::Int(_)), Some(Tok::N)) => {
                let c = self.integer()?;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        };
        match coeff {
            Some(c) => {
                if negative || c.is_zero() {
                    return Err(Error::Parse {
                        position: start,
                        message: "leading coefficient must be positive".into(),
                    });
                }
                let constant = match self.peek() {
                    Some(Tok::Plus) => {
                        self.pos += 1;
                        self.rational()?
                    }
                    Some(Tok::Minus) => {
                        self.pos += 1;
                        -self.rational()?
                    }
                    _ => BigRational::zero(),
                };
                Ok((BigRational::from_integer(c), constant))
            }
            None => {
                let q = self.rational()?;
                Ok((BigRational::zero(), if negative { -q } else { q }))
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if !self.eat(&Tok::Caret) {
            return Ok(1);
        }
        let at = self.here();
        let paren = self.eat(&Tok::LParen);
        let e = self.signed_rational()?;
        if paren {
            self.expect(&Tok::RParen, "`)` after exponent")?;
        }
        let e = match e.is_integer().then(|| e.to_integer().to_i64()).flatten() {
            Some(e) => e,
            None => {
                return Err(Error::Parse { position: at, message: "exponent must be a machine-size integer".into() })
            }
        };
        if e == 0 {
            return Err(Error::Parse { position: at, message: "exponent must be nonzero".into() });
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Term> {
        let mut scale = BigRational::one();
        if let Some(Tok::Int(_)) = self.peek() {
            let v = self.integer()?;
            scale = BigRational::from_integer(v);
            if self.peek() != Some(&Tok::LParen) {
                if scale.is_zero() {
                    return self.err("zero factor");
                }
                return Ok(Term { scale, factor: None });
            }
            if scale.is_zero() {
                return self.err("zero factor");
            }
        }
        let open = self.here();
        self.expect(&Tok::LParen, "`(` or an integer")?;
        let (coeff, constant) = self.linear()?;
        self.expect(&Tok::RParen, "`)`")?;
        let m = self.exponent()?;
        if coeff.is_zero() {
            if !constant.is_positive() {
                return Err(Error::Parse { position: open, message: "constant factors must be positive".into() });
            }
            return Ok(Term { scale: scale * pow_rational(&constant, m), factor: None });
        }
        Ok(Term { scale, factor: Some(RawFactor::new(coeff, constant, m)) })
    }

    fn starts_term(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::LParen))
    }

    fn terms(&mut self, out: &mut Vec<Term>) -> Result<()> {
        out.push(self.term()?);
        loop {
            self.eat(&Tok::Star);
            if !self.starts_term() {
                return Ok(());
            }
            out.push(self.term()?);
        }
    }

    fn group(&mut self) -> Result<Vec<Term>> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut terms = Vec::new();
        self.terms(&mut terms)?;
        self.expect(&Tok::RParen, "`)`")?;
        Ok(terms)
    }

    fn product(&mut self) -> Result<FactoredRational> {
        let mut num = Vec::new();
        self.terms(&mut num)?;
        let mut den = Vec::new();
        if self.eat(&Tok::Slash) {
            let save = self.pos;
            match self.group() {
                Ok(terms) if self.peek().is_none() => den = terms,
                _ => {
                    self.pos = save;
                    den.push(self.term()?);
                }
            }
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        let mut scale = BigRational::one();
        let mut raw = Vec::new();
        for t in num {
            scale *= t.scale;
            raw.extend(t.factor);
        }
        for t in den {
            scale /= t.scale;
            raw.extend(t.factor.map(|mut f| {
                f.multiplicity = -f.multiplicity;
                f
            }));
        }
        FactoredRational::normalize_scaled(scale, &raw)
    }
}

impl FromStr for FactoredRational {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let toks = tokenize(text)?;
        if toks.is_empty() {
            return Err(Error::Parse { position: 0, message: "empty expression".into() });
        }
        let mut p = Parser { toks, pos: 0, end: text.chars().count() };
        p.product()
    }
}

fn write_factor(out: &mut String, offset: &BigRational, m: i64) {
    let q = offset.denom();
    let p = offset.numer();
    out.push('(');
    if !q.is_one() {
        out.push_str(&q.to_string());
    }
    out.push('n');
    if p.is_positive() {
        out.push('+');
        out.push_str(&p.to_string());
    } else if p.is_negative() {
        out.push('-');
        out.push_str(&(-p).to_string());
    }
    out.push(')');
    if m != 1 {
        out.push('^');
        out.push_str(&m.to_string());
    }
}

impl fmt::Display for FactoredRational {
    /// Renders each factor with integer coefficients `(q·n + p)`; whatever is
    /// left of the scale becomes a leading integer in numerator or denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut scale = self.scale().clone();
        let mut num = String::new();
        let mut den = String::new();
        let mut den_terms = 0;
        for factor in self.factors() {
            let q = BigRational::from_integer(factor.offset.denom().clone());
            scale /= pow_rational(&q, factor.multiplicity);
            if factor.multiplicity > 0 {
                write_factor(&mut num, &factor.offset, factor.multiplicity);
            } else {
                write_factor(&mut den, &factor.offset, -factor.multiplicity);
                den_terms += 1;
            }
        }
        let (sn, sd) = (scale.numer().clone(), scale.denom().clone());
        if !sn.is_one() || num.is_empty() {
            num.insert_str(0, &sn.to_string());
        }
        f.write_str(&num)?;
        if !sd.is_one() {
            den.insert_str(0, &sd.to_string());
            den_terms += 1;
        }
        match den_terms {
            0 => Ok(()),
            1 if sd.is_one() || den.chars().all(|c| c.is_ascii_digit()) => write!(f, "/{den}"),
            _ => write!(f, "/({den})"),
        }
    }
}

impl Serialize for FactoredRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FactoredRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

/// Parses `-3/4`, `0.25` or `7` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |message: &str| Error::Parse { position: 0, message: format!("{message} in `{text}`") };
    let t = text.trim().replace('\u{2212}', "-");
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(&t)),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("invalid numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("invalid denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        BigRational::new(n, d)
    } else {
        let (int_part, frac) = body.split_once('.').unwrap_or((body, ""));
        let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if (int_part.is_empty() && frac.is_empty()) || !digits_ok(int_part) || !digits_ok(frac) {
            return Err(bad("invalid number"));
        }
        let all: BigInt = format!("{int_part}{frac}").parse().map_err(|_| bad("invalid number"))?;
        BigRational::new(all, num_traits::pow(BigInt::from(10), frac.len()))
    };
    Ok(if negative { -value } else { value })
}
