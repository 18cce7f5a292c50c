//! Exact rational functions in factored form.
//!
//! A [`FactoredRational`] denotes `R(n) = s · Π_i (n + a_i)^{m_i}` with a
//! positive rational scale `s`, pairwise distinct rational offsets `a_i`
//! (kept in ascending order) and nonzero integer multiplicities `m_i`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Divergence, Error, Result};
use crate::numerics::{BigReal, Precision};
use crate::sequences::ExponentKind;

/// Monic factor `(n + offset)^multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineFactor {
    pub offset: BigRational,
    pub multiplicity: i64,
}

/// A possibly non-monic input factor `(coeff·n + constant)^multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFactor {
    pub coeff: BigRational,
    pub constant: BigRational,
    pub multiplicity: i64,
}

impl RawFactor {
    pub fn new(coeff: impl Into<BigRational>, constant: impl Into<BigRational>, multiplicity: i64) -> Self {
        RawFactor { coeff: coeff.into(), constant: constant.into(), multiplicity }
    }

    pub fn from_ints(coeff: i64, constant: i64, multiplicity: i64) -> Self {
        RawFactor::new(int(coeff), int(constant), multiplicity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredRational {
    scale: BigRational,
    factors: Vec<AffineFactor>,
}

/// Which exponent sequences give a convergent product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvergenceClass {
    Divergent(Divergence),
    /// Balanced: converges with ±1 exponents.
    PmConvergent,
    /// Balanced with equal root sums: converges for every exponent kind.
    FullyConvergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceTag {
    Divergent,
    PmConvergent,
    FullyConvergent,
}

impl ConvergenceClass {
    pub fn tag(&self) -> ConvergenceTag {
        match self {
            ConvergenceClass::Divergent(_) => ConvergenceTag::Divergent,
            ConvergenceClass::PmConvergent => ConvergenceTag::PmConvergent,
            ConvergenceClass::FullyConvergent => ConvergenceTag::FullyConvergent,
        }
    }

    /// Whether a product with this rational and exponent kind converges.
    pub fn admits(&self, kind: ExponentKind) -> bool {
        match self {
            ConvergenceClass::Divergent(_) => false,
            ConvergenceClass::PmConvergent => !kind.needs_full_convergence(),
            ConvergenceClass::FullyConvergent => true,
        }
    }
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FactoredRational {
    /// `R ≡ 1`.
    pub fn one() -> Self {
        FactoredRational { scale: BigRational::one(), factors: Vec::new() }
    }

    /// Builds from a scale and monic `(offset, multiplicity)` pairs, merging
    /// repeated offsets.
    pub fn new<I>(scale: BigRational, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigRational, i64)>,
    {
        if !scale.is_positive() {
            return Err(Error::input(format!("scale must be positive, got {scale}")));
        }
        let mut merged: BTreeMap<BigRational, i64> = BTreeMap::new();
        for (offset, m) in factors {
            *merged.entry(offset).or_insert(0) += m;
        }
        Ok(FactoredRational {
            scale,
            factors: merged
                .into_iter()
                .filter(|(_, m)| *m != 0)
                .map(|(offset, multiplicity)| AffineFactor { offset, multiplicity })
                .collect(),
        })
    }

    /// Monic canonical form of `Π (c·n + d)^m`.
    pub fn normalize(raw: &[RawFactor]) -> Result<Self> {
        Self::normalize_scaled(BigRational::one(), raw)
    }

    /// Monic canonical form of `scale · Π (c·n + d)^m`; each factor contributes
    /// `c^m` to the scale and offset `d/c`.
    pub fn normalize_scaled(scale: BigRational, raw: &[RawFactor]) -> Result<Self> {
        let mut scale = scale;
        let mut monic = Vec::with_capacity(raw.len());
        for f in raw {
            if !f.coeff.is_positive() {
                return Err(Error::input(format!("leading coefficient must be positive, got {}", f.coeff)));
            }
            if f.multiplicity == 0 {
                return Err(Error::input("factor multiplicity must be nonzero"));
            }
            scale *= pow_rational(&f.coeff, f.multiplicity);
            monic.push((&f.constant / &f.coeff, f.multiplicity));
        }
        Self::new(scale, monic)
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn factors(&self) -> &[AffineFactor] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.scale.is_one()
    }

    pub fn numerator_degree(&self) -> i64 {
        self.factors.iter().map(|f| f.multiplicity.max(0)).sum()
    }

    pub fn denominator_degree(&self) -> i64 {
        self.factors.iter().map(|f| (-f.multiplicity).max(0)).sum()
    }

    /// `Σ m_i a_i^k`.
    pub fn moment(&self, k: u32) -> BigRational {
        self.factors
            .iter()
            .map(|f| pow_rational(&f.offset, k as i64) * int(f.multiplicity))
            .fold(BigRational::zero(), |acc, t| acc + t)
    }

    /// Sums of roots of numerator and denominator (roots are `-a_i`).
    fn root_sums(&self) -> (BigRational, BigRational) {
        let mut num = BigRational::zero();
        let mut den = BigRational::zero();
        for f in &self.factors {
            let term = -&f.offset * int(f.multiplicity.abs());
            if f.multiplicity > 0 {
                num += term;
            } else {
                den += term;
            }
        }
        (num, den)
    }

    /// Convergence class: equal degrees and unit scale make the ±1 products
    /// converge; equal root sums in addition make every kind converge.
    pub fn classify(&self) -> ConvergenceClass {
        let (num_deg, den_deg) = (self.numerator_degree(), self.denominator_degree());
        if num_deg != den_deg {
            return ConvergenceClass::Divergent(Divergence::Degree { numerator: num_deg, denominator: den_deg });
        }
        if !self.scale.is_one() {
            return ConvergenceClass::Divergent(Divergence::LeadingCoefficient { ratio: self.scale.to_string() });
        }
        let (num, den) = self.root_sums();
        if num == den {
            ConvergenceClass::FullyConvergent
        } else {
            ConvergenceClass::PmConvergent
        }
    }

    /// Like `classify().admits(kind)`, with the violated condition as error.
    pub fn check_kind(&self, kind: ExponentKind) -> Result<()> {
        match self.classify() {
            ConvergenceClass::Divergent(d) => Err(Error::Divergent(d)),
            ConvergenceClass::PmConvergent if kind.needs_full_convergence() => {
                let (num, den) = self.root_sums();
                Err(Error::Divergent(Divergence::RootSum { numerator: num.to_string(), denominator: den.to_string() }))
            }
            _ => Ok(()),
        }
    }

    /// Smallest `n >= start` at which some factor `n + a_i` vanishes.
    pub fn pole_check(&self, start: u64) -> Option<u64> {
        self.factors
            .iter()
            .filter(|f| f.offset.is_integer() && !f.offset.is_positive())
            .filter_map(|f| (-f.offset.to_integer()).to_u64())
            .filter(|&n| n >= start)
            .min()
    }

    /// Every factor must be positive for all `n >= start`. Offsets are real, so
    /// positivity at `start` suffices.
    pub fn check_domain(&self, start: u64) -> Result<()> {
        if let Some(n) = self.pole_check(start) {
            return Err(Error::eval(format!("factor vanishes at n = {n}")));
        }
        let s = int(start as i64);
        if let Some(f) = self.factors.iter().find(|f| !(&s + &f.offset).is_positive()) {
            return Err(Error::eval(format!("factor (n + {}) is not positive at n = {start}", f.offset)));
        }
        Ok(())
    }

    /// Exact `R(n)`, or `None` at a zero or pole.
    pub fn value_at(&self, n: u64) -> Option<BigRational> {
        let n = int(n as i64);
        let mut v = self.scale.clone();
        for f in &self.factors {
            let base = &n + &f.offset;
            if base.is_zero() {
                return None;
            }
            v *= pow_rational(&base, f.multiplicity);
        }
        Some(v)
    }

    /// `log R(n)` at the requested precision, restricted to positive factors.
    pub fn log_term(&self, n: u64, precision: Precision) -> Result<BigReal> {
        let nn = int(n as i64);
        if let Some(f) = self.factors.iter().find(|f| !(&nn + &f.offset).is_positive()) {
            return Err(Error::eval(format!("factor (n + {}) is not positive at n = {n}", f.offset)));
        }
        let value = self.value_at(n).expect("positive factors cannot vanish");
        Ok(BigReal::from_rational(&value, precision).ln())
    }

    /// Rewrites `∏_{n≥start} R(n)^{(-1)^{t_n}}` as
    /// `boundary · ∏_{n≥1} R_split(n)^{(-1)^{t_n}}` with
    /// `R_split(n) = R(2n) / R(2n+1)`.
    pub fn dyadic_split(&self, start: u64) -> Result<(FactoredRational, BigRational)> {
        if start > 1 {
            return Err(Error::input(format!("start index must be 0 or 1, got {start}")));
        }
        if let ConvergenceClass::Divergent(d) = self.classify() {
            return Err(Error::Divergent(d));
        }
        if let Some(n) = self.pole_check(start) {
            return Err(Error::eval(format!("factor vanishes at n = {n}")));
        }
        let two = int(2);
        let half = ratio(1, 2);
        let mut pieces = Vec::with_capacity(2 * self.factors.len());
        for f in &self.factors {
            pieces.push((&f.offset / &two, f.multiplicity));
            pieces.push(((&f.offset + BigRational::one()) * &half, -f.multiplicity));
        }
        let split = FactoredRational::new(BigRational::one(), pieces)?;
        if let Some(n) = split.pole_check(1) {
            return Err(Error::eval(format!("split rational vanishes at n = {n}")));
        }
        let r1 = self.value_at(1).ok_or_else(|| Error::eval("rational vanishes at n = 1"))?;
        let mut boundary = r1.recip();
        if start == 0 {
            let r0 = self.value_at(0).ok_or_else(|| Error::eval("rational vanishes at n = 0"))?;
            boundary *= r0;
        }
        Ok((split, boundary))
    }

    pub fn mul(&self, other: &FactoredRational) -> FactoredRational {
        let pieces = self.factors.iter().chain(&other.factors).map(|f| (f.offset.clone(), f.multiplicity));
        FactoredRational::new(&self.scale * &other.scale, pieces).expect("positive scales")
    }

    pub fn pow(&self, e: i64) -> FactoredRational {
        let pieces = self.factors.iter().map(|f| (f.offset.clone(), f.multiplicity * e));
        FactoredRational::new(pow_rational(&self.scale, e), pieces).expect("positive scale")
    }

    pub fn recip(&self) -> FactoredRational {
        self.pow(-1)
    }

    /// `n ↦ R(c·n + d)` for `c > 0`.
    pub fn compose_affine(&self, c: &BigRational, d: &BigRational) -> Result<FactoredRational> {
        if !c.is_positive() {
            return Err(Error::input("composition coefficient must be positive"));
        }
        let mut scale = self.scale.clone();
        let mut pieces = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            scale *= pow_rational(c, f.multiplicity);
            pieces.push(((d + &f.offset) / c, f.multiplicity));
        }
        FactoredRational::new(scale, pieces)
    }

    /// Least common denominator of the offsets.
    pub fn common_denominator(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, f| acc.lcm(f.offset.denom()))
    }
}

/// `q^e` for a rational `q` and integer `e` (`q ≠ 0` when `e < 0`).
pub(crate) fn pow_rational(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), e.unsigned_abs() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offsets(r: &FactoredRational) -> Vec<(BigRational, i64)> {
        r.factors().iter().map(|f| (f.offset.clone(), f.multiplicity)).collect()
    }

    fn wr() -> FactoredRational {
        FactoredRational::normalize(&[RawFactor::from_ints(2, 1, 1), RawFactor::from_ints(2, 2, -1)]).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let r = FactoredRational::normalize(&[RawFactor::from_ints(4, 3, 1)]).unwrap();
        assert_eq!(r.scale(), &int(4));
        assert_eq!(offsets(&r), vec![(ratio(3, 4), 1)]);

        let r = FactoredRational::normalize(&[RawFactor::from_ints(2, 1, 1), RawFactor::from_ints(2, 1, -1)]).unwrap();
        assert!(r.is_one());

        let r = FactoredRational::normalize(&[
            RawFactor::from_ints(1, 1, 1),
            RawFactor::from_ints(4, 5, 1),
            RawFactor::from_ints(1, 2, -1),
            RawFactor::from_ints(4, 1, -1),
        ])
        .unwrap();
        assert!(r.scale().is_one());
        assert_eq!(offsets(&r), vec![(ratio(1, 4), -1), (int(1), 1), (ratio(5, 4), 1), (int(2), -1)]);
    }

    #[test]
    fn normalize_rejects_nonpositive_coefficients() {
        assert!(FactoredRational::normalize(&[RawFactor::from_ints(0, 1, 1)]).is_err());
        assert!(FactoredRational::normalize(&[RawFactor::from_ints(-2, 1, 1)]).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(wr().classify(), ConvergenceClass::PmConvergent);
        let t5b = FactoredRational::normalize(&[
            RawFactor::from_ints(1, 1, 1),
            RawFactor::from_ints(4, 5, 1),
            RawFactor::from_ints(1, 2, -1),
            RawFactor::from_ints(4, 1, -1),
        ])
        .unwrap();
        assert_eq!(t5b.classify(), ConvergenceClass::FullyConvergent);
        let bad =
            FactoredRational::normalize(&[RawFactor::from_ints(2, 1, 1), RawFactor::from_ints(3, 2, -1)]).unwrap();
        assert!(matches!(bad.classify(), ConvergenceClass::Divergent(Divergence::LeadingCoefficient { .. })));
        let deg = FactoredRational::normalize(&[RawFactor::from_ints(1, 1, 1)]).unwrap();
        assert!(matches!(deg.classify(), ConvergenceClass::Divergent(Divergence::Degree { .. })));
        assert!(matches!(
            wr().check_kind(ExponentKind::ZeroOneThue),
            Err(Error::Divergent(Divergence::RootSum { .. }))
        ));
    }

    #[test]
    fn pole_check_examples() {
        let c3c = FactoredRational::normalize(&[
            RawFactor::from_ints(2, -1, 1),
            RawFactor::from_ints(4, 1, 1),
            RawFactor::from_ints(2, 1, -1),
            RawFactor::from_ints(4, -1, -1),
        ])
        .unwrap();
        assert_eq!(c3c.pole_check(1), None);
        assert_eq!(c3c.pole_check(0), None);
        assert!(c3c.check_domain(1).is_ok());
        assert!(c3c.check_domain(0).is_err());
        let shifted = FactoredRational::normalize(&[RawFactor::from_ints(1, -1, 1)]).unwrap();
        assert_eq!(shifted.pole_check(0), Some(1));
        let plain =
            FactoredRational::normalize(&[RawFactor::from_ints(1, 1, 1), RawFactor::from_ints(1, 2, -1)]).unwrap();
        assert_eq!(plain.pole_check(0), None);
    }

    #[test]
    fn log_term_examples() {
        let p = Precision::digits(40);
        let v = wr().log_term(0, p).unwrap();
        let expected = BigReal::from_rational(&ratio(1, 2), p).ln();
        assert!((v - expected).abs().to_f64() < 1e-38);
        assert!(FactoredRational::one().log_term(17, p).unwrap().is_zero());
        let t5b = FactoredRational::normalize(&[
            RawFactor::from_ints(1, 1, 1),
            RawFactor::from_ints(4, 5, 1),
            RawFactor::from_ints(1, 2, -1),
            RawFactor::from_ints(4, 1, -1),
        ])
        .unwrap();
        let v = t5b.log_term(1, p).unwrap();
        let expected = BigReal::from_rational(&ratio(6, 5), p).ln();
        assert!((v - expected).abs().to_f64() < 1e-38);
    }

    #[test]
    fn dyadic_split_of_a_single_ratio() {
        // (n+a)/(n+b) from n = 1
        let (a, b) = (ratio(1, 3), ratio(5, 7));
        let r = FactoredRational::new(BigRational::one(), [(a.clone(), 1), (b.clone(), -1)]).unwrap();
        let (split, boundary) = r.dyadic_split(1).unwrap();
        let half = ratio(1, 2);
        let expected = FactoredRational::new(
            BigRational::one(),
            [(&a * &half, 1), ((&b + int(1)) * &half, 1), ((&a + int(1)) * &half, -1), (&b * &half, -1)],
        )
        .unwrap();
        assert_eq!(split, expected);
        assert_eq!(boundary, (&b + int(1)) / (&a + int(1)));
    }

    #[test]
    fn dyadic_split_identity_and_woods_robbins() {
        let (split, boundary) = FactoredRational::one().dyadic_split(0).unwrap();
        assert!(split.is_one());
        assert!(boundary.is_one());

        // one split of (2n+1)/(2n+2) from n = 0 gives the n >= 1 tail of
        // (4n+1)(4n+4)/((4n+2)(4n+3)), whose n = 0 value 2/3 is the boundary
        let (split, boundary) = wr().dyadic_split(0).unwrap();
        let quad = FactoredRational::normalize(&[
            RawFactor::from_ints(4, 1, 1),
            RawFactor::from_ints(4, 4, 1),
            RawFactor::from_ints(4, 2, -1),
            RawFactor::from_ints(4, 3, -1),
        ])
        .unwrap();
        assert_eq!(split, quad);
        assert_eq!(boundary, ratio(2, 3));
        assert_eq!(quad.value_at(0).unwrap(), ratio(2, 3));
    }

    #[test]
    fn dyadic_split_rejects_divergent() {
        let r = FactoredRational::normalize(&[RawFactor::from_ints(1, 1, 1)]).unwrap();
        assert!(matches!(r.dyadic_split(1), Err(Error::Divergent(_))));
    }

    #[test]
    fn compose_and_arithmetic() {
        // (n+1)/n composed with 2n+1 is (2n+2)/(2n+1) = (n+1)/(n+1/2)
        let q = FactoredRational::new(BigRational::one(), [(int(1), 1), (int(0), -1)]).unwrap();
        let c = q.compose_affine(&int(2), &int(1)).unwrap();
        let expected = FactoredRational::new(BigRational::one(), [(int(1), 1), (ratio(1, 2), -1)]).unwrap();
        assert_eq!(c, expected);
        assert!(q.mul(&q.recip()).is_one());
        assert_eq!(q.pow(2).moment(1), int(2));
        assert_eq!(wr().common_denominator(), BigInt::from(2));
    }
}
