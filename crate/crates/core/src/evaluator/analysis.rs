use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::thue::pm_thue;
use super::{noise_floor, EvalOptions, EvalResult};
use crate::error::{Error, Result};
use crate::numerics::{BigReal, ClosedForm, EULER_GAMMA_DIGITS};
use crate::rational::{int, ratio, FactoredRational};
use crate::sequences::thue_morse;

fn is_negative_integer(x: &BigRational) -> bool {
    x.is_integer() && x.is_negative()
}

/// `f(a, b) = ∏_{n≥1} ((n+a)/(n+b))^{(−1)^{t_n}}` for `a, b > −1`.
pub fn f_value(a: &BigRational, b: &BigRational, opts: &EvalOptions) -> Result<EvalResult> {
    for x in [a, b] {
        if is_negative_integer(x) || x <= &int(-1) {
            return Err(Error::input(format!("f(a, b) needs a, b > -1, got {x}")));
        }
    }
    let r = FactoredRational::new(BigRational::one(), [(a.clone(), 1), (b.clone(), -1)])?;
    pm_thue(&r, 1, opts)
}

/// `h(x) = f(x/2, (x+1)/2)`.
fn h_value(x: &BigRational, opts: &EvalOptions) -> Result<EvalResult> {
    if x.is_negative() {
        return Err(Error::input(format!("x must be nonnegative, got {x}")));
    }
    let half = ratio(1, 2);
    f_value(&(x * &half), &((x + BigRational::one()) * &half), opts)
}

/// `g(x) = f(x/2, (x+1)/2) / (x+1)` for `x ≥ 0`.
pub fn g_value(x: &BigRational, opts: &EvalOptions) -> Result<EvalResult> {
    let h = h_value(x, opts)?;
    let p = opts.precision;
    let d = BigReal::from_rational(&(x + BigRational::one()), p);
    Ok(EvalResult { value: &h.value / &d, error_estimate: &h.error_estimate / &d, ..h })
}

#[derive(Debug, Clone)]
pub struct FlajoletMartin {
    pub g0: EvalResult,
    /// `∏_{n≥1} ((4n+1)(4n+2)/(4n(4n+3)))^{(−1)^{t_n}}`
    pub r: EvalResult,
    /// `2^{−1/2} e^γ (2/3) R`
    pub phi: BigReal,
    /// `2^{−1/2} e^γ / g(0)`
    pub phi_from_g0: BigReal,
    /// `R·g(0)`, which should be `3/2`.
    pub r_times_g0: BigReal,
    /// Combined error estimate of `R·g(0)`.
    pub r_times_g0_error: BigReal,
}

/// The Flajolet–Martin constants and the `R·g(0) = 3/2` cross-check.
pub fn flajolet_martin(opts: &EvalOptions) -> Result<FlajoletMartin> {
    let p = opts.precision;
    if p.decimal_digits() > EULER_GAMMA_DIGITS {
        return Err(Error::Capability {
            name: "euler_gamma digits",
            requested: p.decimal_digits(),
            available: EULER_GAMMA_DIGITS,
        });
    }
    let g0 = g_value(&BigRational::zero(), opts)?;
    let rational: FactoredRational = "(4n+1)(4n+2)/((4n)(4n+3))".parse()?;
    let r = pm_thue(&rational, 1, opts)?;

    let prefactor = (ClosedForm::integer(2).pow_ratio(-1, 2) * ClosedForm::ExpEulerGamma).eval(p)?;
    let two_thirds = BigReal::from_rational(&ratio(2, 3), p);
    let phi = &prefactor * &two_thirds * &r.value;
    let phi_from_g0 = &prefactor / &g0.value;
    let r_times_g0 = &r.value * &g0.value;
    let r_times_g0_error = r.value.abs() * &g0.error_estimate + g0.value.abs() * &r.error_estimate;

    let three_halves = BigReal::from_rational(&ratio(3, 2), p);
    let gap = (&r_times_g0 - &three_halves).abs();
    let allowed = BigReal::from_u64(10, p) * &r_times_g0_error + noise_floor(&three_halves, p);
    if gap > allowed {
        return Err(Error::Consistency(format!(
            "R·g(0) = {} differs from 3/2 by {} (allowed {})",
            r_times_g0.to_string_digits(25),
            gap.to_string_digits(3),
            allowed.to_string_digits(3)
        )));
    }
    Ok(FlajoletMartin { g0, r, phi, phi_from_g0, r_times_g0, r_times_g0_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: u64,
    /// `Σ_{j=n}^{N_tail} (−1)^{t_j} 𝒯^k G(j)`
    pub remainder: f64,
    pub sign: i8,
    /// `(−1)^{t_n}`
    pub expected: i8,
}

impl ProbeRow {
    pub fn matches(&self) -> bool {
        self.sign == self.expected
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub const MAX_PROBE_ORDER: u32 = 12;

/// Signs of the truncated remainders of `Σ (−1)^{t_j} 𝒯^k G(j)` for
/// `G(x) = log((x+a)/(x+b))`, with `𝒯G(x) = G(2x) − G(2x+1)`.
pub fn remainder_sign_probe(
    a: &BigRational,
    b: &BigRational,
    k: u32,
    n_max: u64,
    n_tail: u64,
) -> Result<Vec<ProbeRow>> {
    if !(b.is_positive() && a > b) {
        return Err(Error::input(format!("the probe needs a > b > 0, got a = {a}, b = {b}")));
    }
    if k > MAX_PROBE_ORDER {
        return Err(Error::input(format!("k must be at most {MAX_PROBE_ORDER}")));
    }
    if n_tail <= n_max {
        return Err(Error::input("the tail index must exceed n_max"));
    }
    let width = 1u64 << k;
    if n_tail.checked_add(1).and_then(|t| t.checked_mul(width)).is_none() {
        return Err(Error::input("tail index too large for this k"));
    }
    let gap = (a - b).to_f64().expect("finite");
    let bf = b.to_f64().expect("finite");
    let g = |y: u64| (gap / (y as f64 + bf)).ln_1p();
    let tk = |j: u64| {
        let mut acc = CompensatedSum::default();
        for i in 0..width {
            let s = if thue_morse(i) == 0 { 1.0 } else { -1.0 };
            acc.add(s * g(width * j + i));
        }
        acc.value()
    };

    let mut rows = vec![ProbeRow { n: 0, remainder: 0.0, sign: 0, expected: 0 }; (n_max + 1) as usize];
    let mut suffix = CompensatedSum::default();
    for j in (0..=n_tail).rev() {
        let eps = if thue_morse(j) == 0 { 1.0 } else { -1.0 };
        suffix.add(eps * tk(j));
        if j <= n_max {
            let r = suffix.value();
            rows[j as usize] = ProbeRow {
                n: j,
                remainder: r,
                sign: if r > 0.0 {
                    1
                } else if r < 0.0 {
                    -1
                } else {
                    0
                },
                expected: eps as i8,
            };
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub x: BigRational,
    /// `h(x) = f(x/2, (x+1)/2)`
    pub value: EvalResult,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    /// Indices `i` where `h(x_i) − h(x_{i+1})` does not exceed the combined
    /// error estimates.
    pub violations: Vec<usize>,
}

impl ScanReport {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates `h(x) = f(x/2, (x+1)/2)` on `steps + 1` equally spaced points.
pub fn monotonicity_scan(lo: &BigRational, hi: &BigRational, steps: u32, opts: &EvalOptions) -> Result<ScanReport> {
    if lo.is_negative() || (steps > 0 && lo >= hi) {
        return Err(Error::input(format!("the scan needs 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let step = if steps == 0 { BigRational::zero() } else { (hi - lo) / int(i64::from(steps)) };
    let mut points = Vec::with_capacity(steps as usize + 1);
    for i in 0..=steps {
        let x = lo + &step * int(i64::from(i));
        let value = h_value(&x, opts)?;
        points.push(ScanPoint { x, value });
    }
    let violations = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            let drop = &w[0].value.value - &w[1].value.value;
            drop <= &w[0].value.error_estimate + &w[1].value.error_estimate
        })
        .map(|(i, _)| i)
        .collect();
    Ok(ScanReport { points, violations })
}
