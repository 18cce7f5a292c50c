//! Exact reduction modulo `G(x/2) − G((x+1)/2) − G(x) = log(1+x)`.
//!
//! Relation rows are kept in echelon form: each row's pivot is its largest
//! point under [`Point`]'s order, and reducing a target by its largest point
//! only ever introduces smaller ones, so reduction terminates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expression::{admissible_point, GExpression};
use crate::error::{Error, Result};
use crate::numerics::{ClosedForm, PowerProduct};
use crate::rational::{int, ratio};

pub const DEFAULT_DEPTH: u32 = 6;
pub const MAX_DEPTH: u32 = 12;

/// Points ordered by denominator first, so that halved points sit above
/// their parents.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Point(BigRational);

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.denom().cmp(other.0.denom()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Σ terms·G = log constant`.
#[derive(Debug, Clone)]
struct Row {
    terms: BTreeMap<Point, BigRational>,
    constant: PowerProduct,
}

impl Row {
    fn relation(x: &BigRational) -> Row {
        let mut terms = BTreeMap::new();
        let half = ratio(1, 2);
        for (p, c) in [(x * &half, 1), ((x + BigRational::one()) * &half, -1), (x.clone(), -1)] {
            add_to(&mut terms, Point(p), &int(c));
        }
        let constant = PowerProduct::from_rational(&(x + BigRational::one())).expect("x > -1");
        Row { terms, constant }
    }

    /// `self −= c·other`.
    fn subtract(&mut self, c: &BigRational, other: &Row) {
        for (p, v) in &other.terms {
            add_to(&mut self.terms, p.clone(), &-(v * c));
        }
        self.constant = self.constant.mul(&other.constant.pow(&-c).expect("positive constant"));
    }

    fn scale(&mut self, c: &BigRational) {
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self.constant = self.constant.pow(c).expect("positive constant");
    }
}

fn add_to(terms: &mut BTreeMap<Point, BigRational>, p: Point, c: &BigRational) {
    let entry = terms.entry(p.clone()).or_insert_with(BigRational::zero);
    *entry += c;
    if entry.is_zero() {
        terms.remove(&p);
    }
}

/// Rows keyed by pivot.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<Point, Row>,
}

impl Echelon {
    /// Reduces `row` by its largest points until the largest one is not a
    /// pivot (or the row vanishes).
    fn reduce(&self, row: &mut Row) {
        let mut bound: Option<Point> = None;
        loop {
            let next = match &bound {
                None => row.terms.keys().next_back().cloned(),
                Some(b) => row.terms.range(..b.clone()).next_back().map(|(p, _)| p.clone()),
            };
            let Some(p) = next else { return };
            if let Some(pivot) = self.rows.get(&p) {
                let c = row.terms[&p].clone();
                row.subtract(&c, pivot);
            }
            bound = Some(p);
        }
    }

    fn insert(&mut self, mut row: Row) {
        self.reduce_top(&mut row);
        if let Some((p, c)) = row.terms.iter().next_back().map(|(p, c)| (p.clone(), c.clone())) {
            row.scale(&c.recip());
            self.rows.insert(p, row);
        }
    }

    /// Only eliminates the leading point repeatedly; enough for a new pivot.
    fn reduce_top(&self, row: &mut Row) {
        while let Some((p, c)) = row.terms.iter().next_back().map(|(p, c)| (p.clone(), c.clone())) {
            match self.rows.get(&p) {
                Some(pivot) => row.subtract(&c, pivot),
                None => return,
            }
        }
    }
}

/// Points reachable from `seeds` by `x ↦ 2x, 2x−1, x/2, (x+1)/2` within
/// `depth` steps, restricted to `x > −1`.
pub fn universe(seeds: impl IntoIterator<Item = BigRational>, depth: u32) -> BTreeSet<BigRational> {
    let half = ratio(1, 2);
    let two = int(2);
    let one = BigRational::one();
    let mut seen: BTreeSet<BigRational> = BTreeSet::new();
    let mut frontier: Vec<BigRational> = seeds.into_iter().filter(admissible_point).collect();
    seen.extend(frontier.iter().cloned());
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for y in [x * &two, x * &two - &one, x * &half, (x + &one) * &half] {
                if admissible_point(&y) && seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// `exp(expr)` as a power product of positive rationals.
    Constant(PowerProduct),
    /// No combination of relations over the depth-`depth` universe removes
    /// every `G` term; `residual` is an equivalent expression.
    Irreducible { depth: u32, residual: GExpression },
}

impl Reduction {
    pub fn constant(&self) -> Option<&PowerProduct> {
        match self {
            Reduction::Constant(c) => Some(c),
            Reduction::Irreducible { .. } => None,
        }
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.constant().map(PowerProduct::to_closed_form)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reduction::Constant(c) => write!(f, "{c}"),
            Reduction::Irreducible { depth, .. } => write!(f, "irreducible at depth {depth}"),
        }
    }
}

/// Reduces `expr` to a constant using the relations at every point of its
/// depth-`depth` universe.
pub fn reduce(expr: &GExpression, depth: u32) -> Result<Reduction> {
    if depth > MAX_DEPTH {
        return Err(Error::input(format!("depth must be at most {MAX_DEPTH}, got {depth}")));
    }
    let mut target = Row {
        terms: expr.terms().iter().map(|(x, c)| (Point(x.clone()), c.clone())).collect(),
        constant: expr.log_const().clone(),
    };
    if target.terms.is_empty() {
        return Ok(Reduction::Constant(target.constant));
    }
    let mut echelon = Echelon::default();
    for x in universe(expr.terms().keys().cloned(), depth) {
        echelon.insert(Row::relation(&x));
    }
    // target = Σ μ·row + residual; subtracting rows accumulates Π constant^{−μ}
    let mut certificate = Row { terms: BTreeMap::new(), constant: PowerProduct::one() };
    std::mem::swap(&mut certificate.terms, &mut target.terms);
    echelon.reduce(&mut certificate);
    let value = target.constant.mul(&certificate.constant.recip());
    if certificate.terms.is_empty() {
        Ok(Reduction::Constant(value))
    } else {
        let residual = certificate.terms.into_iter().map(|(p, c)| (p.0, c)).collect();
        Ok(Reduction::Irreducible { depth, residual: GExpression::from_parts(residual, value) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduce_text(text: &str) -> Reduction {
        reduce(&text.parse().unwrap(), DEFAULT_DEPTH).unwrap()
    }

    fn pp(q: BigRational) -> PowerProduct {
        PowerProduct::from_rational(&q).unwrap()
    }

    #[test]
    fn special_values() {
        assert_eq!(reduce_text("2G(1)"), Reduction::Constant(pp(ratio(1, 2))));
        assert_eq!(reduce_text("G(1/2)"), Reduction::Constant(PowerProduct::one()));
        let root = pp(int(2)).pow(&ratio(-1, 2)).unwrap();
        assert_eq!(reduce_text("G(1)"), Reduction::Constant(root));
    }

    #[test]
    fn relation_rows_pin_the_constant() {
        // G(x/2) − G((x+1)/2) − G(x) = log(1+x)
        let out = reduce_text("G(3/2) - G(2) - G(3)");
        assert_eq!(out, Reduction::Constant(pp(int(4))));
    }

    #[test]
    fn a_lone_point_is_irreducible() {
        let out = reduce(&"G(0)".parse().unwrap(), 3).unwrap();
        match out {
            Reduction::Irreducible { depth, residual } => {
                assert_eq!(depth, 3);
                assert!(!residual.is_constant());
            }
            other => panic!("unexpected {other}"),
        }
        assert_eq!(reduce_text("G(0)").to_string(), "irreducible at depth 6");
    }

    #[test]
    fn universe_excludes_the_pole_side() {
        let u = universe([int(0)], 2);
        assert!(u.iter().all(|x| x > &int(-1)));
        assert!(u.contains(&ratio(1, 2)) && u.contains(&ratio(3, 4)));
    }
}
