use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::{gamma, BigReal, Precision};
use crate::error::{Error, Result};
use crate::rational::ratio;

/// Number of decimal places of the embedded Euler–Mascheroni literal.
pub const EULER_GAMMA_DIGITS: u32 = 100;

const EULER_GAMMA: &str =
    "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constant {
    Pi,
    EulerGamma,
    GammaQuarter,
}

impl Constant {
    pub const ALL: [Constant; 3] = [Constant::Pi, Constant::EulerGamma, Constant::GammaQuarter];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::EulerGamma => "euler_gamma",
            Constant::GammaQuarter => "gamma_quarter",
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Constant::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::input(format!("unknown constant `{s}`")))
    }
}

type Cache = RwLock<HashMap<(Constant, u32), BigReal>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn compute(c: Constant, p: Precision) -> Result<BigReal> {
    match c {
        Constant::Pi => Ok(BigReal::pi(p)),
        Constant::EulerGamma => {
            if p.decimal_digits() > EULER_GAMMA_DIGITS {
                return Err(Error::Capability {
                    name: "euler_gamma digits",
                    requested: p.decimal_digits(),
                    available: EULER_GAMMA_DIGITS,
                });
            }
            Ok(BigReal::from_decimal(EULER_GAMMA, p))
        }
        Constant::GammaQuarter => gamma(&ratio(1, 4), p),
    }
}

/// The constant to `p` significant digits, memoised per precision.
pub fn constant(c: Constant, p: Precision) -> Result<BigReal> {
    let key = (c, p.decimal_digits());
    if let Some(v) = cache().read().expect("constant cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let value = compute(c, p)?;
    cache().write().expect("constant cache poisoned").entry(key).or_insert_with(|| value.clone());
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let pi = constant(Constant::Pi, Precision::digits(40)).unwrap();
        assert_eq!(pi.to_string_digits(30), "3.14159265358979323846264338328");
    }

    #[test]
    fn euler_gamma_agrees_with_harmonic_series() {
        // H_n − ln n − 1/(2n) + 1/(12n²) − 1/(120n⁴) at n = 10⁴ leaves ~1e-20
        let n = 10_000u32;
        let harmonic: f64 = (1..=n).rev().map(|k| 1.0 / f64::from(k)).sum();
        let n = f64::from(n);
        let approx = harmonic - n.ln() - 0.5 / n + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4));
        let gamma = constant(Constant::EulerGamma, Precision::digits(30)).unwrap();
        assert!((gamma.to_f64() - approx).abs() < 1e-13);
        assert_eq!(gamma.to_string_digits(10), "0.5772156649");
    }

    #[test]
    fn euler_gamma_cap() {
        assert!(constant(Constant::EulerGamma, Precision::digits(100)).is_ok());
        let err = constant(Constant::EulerGamma, Precision::digits(101)).unwrap_err();
        assert!(matches!(err, Error::Capability { requested: 101, available: 100, .. }));
    }

    #[test]
    fn gamma_quarter_duplication() {
        // Γ(1/8)Γ(5/8) = 2^{3/4} √π Γ(1/4)
        let p = Precision::digits(50);
        let lhs = gamma(&ratio(1, 8), p).unwrap() * gamma(&ratio(5, 8), p).unwrap();
        let rhs = BigReal::from_u64(2, p).pow_rational(&ratio(3, 4)).unwrap()
            * BigReal::pi(p).sqrt()
            * constant(Constant::GammaQuarter, p).unwrap();
        assert!(((lhs - &rhs) / rhs).abs().to_f64() < 1e-48);
    }

    #[test]
    fn names_round_trip() {
        for c in Constant::ALL {
            assert_eq!(c.name().parse::<Constant>().unwrap(), c);
        }
        assert!("e".parse::<Constant>().is_err());
    }
}
