use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::ProductSpec;
use crate::numerics::ClosedForm;
use crate::rational::{int, FactoredRational, RawFactor};
use crate::sequences::ExponentKind;

/// A product together with its exact value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identity {
    pub name: String,
    #[serde(flatten)]
    pub spec: ProductSpec,
    pub closed_form: ClosedForm,
    /// How the value follows from the families, the functional equation or
    /// Gamma telescoping.
    pub provenance: String,
}

impl Identity {
    fn new(
        name: &str,
        rational: &str,
        kind: ExponentKind,
        start: u64,
        closed_form: ClosedForm,
        provenance: &str,
    ) -> Self {
        let rational: FactoredRational = rational.parse().expect("catalog rational parses");
        Identity {
            name: name.to_owned(),
            spec: ProductSpec::new(rational, kind, start).expect("catalog spec converges"),
            closed_form,
            provenance: provenance.to_owned(),
        }
    }
}

/// The four one- and two-parameter families over `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    I,
    Ii,
    Iii,
    Iv,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::I, Family::Ii, Family::Iii, Family::Iv];

    pub fn name(self) -> &'static str {
        match self {
            Family::I => "i",
            Family::Ii => "ii",
            Family::Iii => "iii",
            Family::Iv => "iv",
        }
    }

    /// The value `b` takes for the one-parameter families.
    pub fn implied_b(self, a: &BigRational) -> Option<BigRational> {
        match self {
            Family::I => None,
            Family::Ii => Some(a + BigRational::one()),
            Family::Iii => Some(int(0)),
            Family::Iv => Some(a * int(2) - BigRational::one()),
        }
    }

    /// Whether every factor is positive for `n ≥ 1`.
    pub fn admits(self, a: &BigRational, b: Option<&BigRational>) -> bool {
        let above = |x: &BigRational, bound: i64| x > &int(bound);
        match self {
            Family::I => b.is_some_and(|b| above(a, -1) && above(b, -1)),
            Family::Ii | Family::Iii => above(a, -1),
            Family::Iv => above(a, 0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix("c2").unwrap_or(&t);
        Family::ALL
            .into_iter()
            .find(|f| f.name() == t)
            .ok_or_else(|| Error::input(format!("unknown family `{s}` (expected i, ii, iii or iv)")))
    }
}

/// Instantiates a family at rational parameters, starting at `n = 1`.
pub fn family(id: Family, a: &BigRational, b: Option<&BigRational>) -> Result<Identity> {
    let b = match (id.implied_b(a), b) {
        (None, None) => return Err(Error::input("family i needs both a and b")),
        (None, Some(b)) => b.clone(),
        (Some(implied), None) => implied,
        (Some(implied), Some(b)) if &implied == b => implied,
        (Some(implied), Some(b)) => {
            return Err(Error::input(format!("family {id} fixes b = {implied}, got {b}")));
        }
    };
    if !id.admits(a, Some(&b)) {
        let need = if id == Family::Iv { "a > 0" } else { "a, b > -1" };
        return Err(Error::input(format!("family {id} needs {need}, got a = {a}, b = {b}")));
    }
    let one = BigRational::one();
    let f = |c: i64, d: BigRational, m: i64| RawFactor::new(int(c), d, m);
    let (factors, value) = match id {
        Family::I => (
            vec![
                f(1, a.clone(), 1),
                f(2, a + &one, 1),
                f(2, b.clone(), 1),
                f(2, a.clone(), -1),
                f(1, b.clone(), -1),
                f(2, &b + &one, -1),
            ],
            (&b + &one) / (a + &one),
        ),
        Family::Ii => (
            vec![f(1, a.clone(), 1), f(2, a + &one, 2), f(2, a.clone(), -1), f(2, a + int(2), -1), f(1, a + &one, -1)],
            (a + int(2)) / (a + &one),
        ),
        Family::Iii => (
            vec![f(2, a * int(2), 1), f(2, a + &one, 1), f(2, a.clone(), -1), f(2, one.clone(), -1)],
            one.clone() / (a + &one),
        ),
        Family::Iv => (
            vec![f(2, a + &one, 1), f(2, a * int(2) - &one, 1), f(2, a.clone(), -1), f(2, a * int(4) - int(2), -1)],
            a * int(2) / (a + &one),
        ),
    };
    let rational = FactoredRational::normalize(&factors)?;
    let provenance = match id {
        Family::I => format!("family (i) at a = {a}, b = {b}"),
        _ => format!("family ({id}) at a = {a}"),
    };
    Ok(Identity {
        name: format!("C2{id}"),
        spec: ProductSpec::new(rational, ExponentKind::PmThue, 1)?,
        closed_form: ClosedForm::rational(value),
        provenance,
    })
}

fn root2() -> ClosedForm {
    ClosedForm::integer(2).sqrt()
}

/// Every identity, in a fixed order. `C3a` is the same product as `WR`, so
/// it is an alias accepted by [`find`] rather than a separate entry.
pub fn catalog() -> Vec<Identity> {
    use ExponentKind::{PmRudinShapiro, PmThue, ZeroOneRudinShapiro, ZeroOneThue};
    let q = ClosedForm::ratio;
    let c3 = |name: &str, rational: &str, start: u64, value: ClosedForm, provenance: &str| {
        Identity::new(name, rational, PmThue, start, value, provenance)
    };
    let t6 = "4(n+2)(2n+1)^3(2n+3)^3/((n+3)(n+1)^2(4n+3)^4)";
    vec![
        c3("WR", "(2n+1)/(2n+2)", 0, ClosedForm::integer(2).pow_ratio(-1, 2),
            "square root of family (ii) at a = 0, times the n = 0 factor 1/2"),
        c3("C3b", "(4n+1)/(4n+3)", 0, q(1, 2),
            "inverse of family (iii) at a = 1/2, times the n = 0 factor 1/3"),
        c3("C3c", "(2n-1)(4n+1)/((2n+1)(4n-1))", 1, q(2, 1),
            "family (iii) at a = -1/2"),
        c3("C3d", "(n+1)(2n+1)/((n+2)(2n+3))", 0, q(1, 2),
            "family (i) at a = 1, b = 2, times the n = 0 factor and the square of WR"),
        c3("C3e", "(2n+2)(4n+3)/((2n+3)(4n+5))", 0, root2() / ClosedForm::integer(2),
            "family (i) at a = 1, b = 3/2, times the n = 0 factor and WR"),
        c3("C3f", "(n+1)(4n+5)/((n+2)(4n+3))", 0, q(1, 1),
            "inverse of family (i) at a = 2, b = 3/2 with (2n+3) cancelled, times the n = 0 factor"),
        c3("C3g", "(n+1)(2n+2)/((n+2)(2n+3))", 0, root2() / ClosedForm::integer(2),
            "family (ii) at a = 1, times the n = 0 factor and WR; also C3e times C3f"),
        c3("C3h", "(n+1)(4n+5)/((n+2)(4n+1))", 0, q(2, 1), "C3f divided by C3b"),
        c3("C3i", "(2n+2)(4n+1)/((2n+3)(4n+5))", 0, root2() / ClosedForm::integer(4),
            "C3g divided by C3h"),
        c3("C3j", "(2n+1)(4n+1)/((2n+3)(4n+5))", 0, q(1, 4), "C3i times WR"),
        c3("C3k", "(4n+1)(8n+7)/((4n+2)(8n+3))", 0, q(1, 1),
            "family (iv) at a = 3/4, times the n = 0 factor 7/6"),
        c3("C3l", "(8n+1)(8n+7)/((8n+3)(8n+5))", 0, q(1, 2),
            "family (i) at a = 3/4, b = 1/4, times the n = 0 factor and C3b"),
        Identity::new(
            "T5a",
            "(4n+1)(4n+4)/((4n+2)(4n+3))",
            ZeroOneThue,
            0,
            ClosedForm::Pi.pow_ratio(3, 4) * root2() / ClosedForm::GammaQuarter,
            "square root of the plain product pi^(3/2)*2^(1/2)/Gamma(1/4)^2 over the pm-t product 2^(-1/2)",
        ),
        Identity::new(
            "T5b",
            "(n+1)(4n+5)/((n+2)(4n+1))",
            ZeroOneThue,
            0,
            root2(),
            "square root of the plain product 4 over the pm-t product 2 (C3h)",
        ),
        Identity::new(
            "T5c",
            "(8n+1)(8n+7)/((8n+3)(8n+5))",
            ZeroOneThue,
            0,
            (ClosedForm::integer(2) * root2()).sub(ClosedForm::integer(2)).sqrt(),
            "square root of the plain product 2^(1/2) - 1 over the pm-t product 1/2 (C3l)",
        ),
        Identity::new(
            "T6a",
            t6,
            PmRudinShapiro,
            0,
            q(1, 1),
            "Rudin-Shapiro transform of (n+2)^2/((n+1)(n+3)), whose signed product over n >= 1 is 9/8, times the n = 0 factor 8/9",
        ),
        Identity::new(
            "T6b",
            t6,
            ZeroOneRudinShapiro,
            0,
            ClosedForm::integer(8) * ClosedForm::Pi.sqrt() / ClosedForm::GammaQuarter.pow(int(2)),
            "square root of the plain product 16*Gamma(3/4)^4/pi^3 = 64*pi/Gamma(1/4)^4, since the pm-v product is 1 (T6a)",
        ),
        Identity::new(
            "GS",
            "(2n+1)^2/((n+1)(4n+1))",
            PmRudinShapiro,
            1,
            ClosedForm::integer(2).pow_ratio(-1, 2),
            "(n+1)^2(4n+1)^2/(2n+1)^4 is the Rudin-Shapiro transform of (n+1)/n with signed product 2; this is its inverse square root",
        ),
    ]
}

/// Looks an identity up by name, ignoring case; `C3a` resolves to `WR`.
pub fn find(name: &str) -> Option<Identity> {
    let key = name.trim();
    let key = if key.eq_ignore_ascii_case("C3a") { "WR" } else { key };
    catalog().into_iter().find(|i| i.name.eq_ignore_ascii_case(key))
}
