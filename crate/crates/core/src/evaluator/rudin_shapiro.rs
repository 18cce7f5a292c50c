//! Direct Rudin–Shapiro products with correction products of known value.
//!
//! With `ε_n = (−1)^{v_n}` and the recursion for `v`, every decaying `F`
//! satisfies `Σ_{n≥1} ε_n [F(n) + F(2n+1) − F(2n) − 2F(4n+1)] = F(1)`. Taking
//! `F = log Q` for `Q(n) = (n+1)/n` and `Q(n) = (n+1)²/(n(n+2))` gives two
//! rationals `K = T(Q)` whose signed products equal `Q(1)`. Subtracting
//! rational multiples of `log K` that match the `1/n` and `1/n²` terms of
//! `log R(n)` leaves a sum whose terms decay like `1/n³`.

use num_rational::BigRational;
use num_traits::Zero;

use super::kernel::{product_precision, signed_product, IntegerFactors};
use super::thue::plain_product;
use super::{noise_floor, zero_one_from_parts, EvalOptions, EvalResult, ProductSpec};
use crate::error::{Error, Result};
use crate::numerics::{BigReal, Precision};
use crate::rational::{int, ratio, FactoredRational};
use crate::sequences::{rudin_shapiro, ExponentKind};

fn rs_sign(m: u64) -> i8 {
    1 - 2 * rudin_shapiro(m) as i8
}

/// `n ↦ Q(n)·Q(2n+1) / (Q(2n)·Q(4n+1)²)`; the signed product of this over
/// `n ≥ 1` equals `Q(1)` whenever `log Q(n) → 0`.
pub fn t_transform(q: &FactoredRational) -> FactoredRational {
    let at = |c: i64, d: i64| q.compose_affine(&int(c), &int(d)).expect("positive coefficient");
    q.mul(&at(2, 1)).mul(&at(2, 0).recip()).mul(&at(4, 1).pow(-2))
}

struct Correction {
    kernel: FactoredRational,
    /// `Q(1)`, the exact value of the signed product of `kernel`.
    value: BigRational,
}

fn corrections() -> [Correction; 2] {
    let q1 = FactoredRational::new(int(1), [(int(1), 1), (int(0), -1)]).expect("valid");
    let q2 = FactoredRational::new(int(1), [(int(1), 2), (int(0), -1), (int(2), -1)]).expect("valid");
    [
        Correction { kernel: t_transform(&q1), value: int(2) },
        Correction { kernel: t_transform(&q2), value: ratio(4, 3) },
    ]
}

/// Coefficients of `1/n` and `1/n²` in `log R(n)`.
fn leading_coefficients(r: &FactoredRational) -> [BigRational; 2] {
    [r.moment(1), -r.moment(2) / int(2)]
}

/// Weights `λ_j` with `log R − Σ λ_j log K_j = O(n^{−order−1})`.
fn correction_weights(r: &FactoredRational, order: u8, kernels: &[Correction; 2]) -> Vec<BigRational> {
    let c = leading_coefficients(r);
    let k1 = leading_coefficients(&kernels[0].kernel);
    let k2 = leading_coefficients(&kernels[1].kernel);
    debug_assert!(k2[0].is_zero());
    let mut weights = Vec::new();
    if order >= 1 {
        weights.push(&c[0] / &k1[0]);
    }
    if order >= 2 {
        weights.push((&c[1] - &weights[0] * &k1[1]) / &k2[1]);
    }
    weights
}

/// `log R(N) − Σ λ_j log K_j(N)` at a modest fixed precision.
fn residual_at(
    r: &FactoredRational,
    kernels: &[Correction; 2],
    weights: &[BigRational],
    n: u64,
    p: Precision,
) -> Result<BigReal> {
    let mut acc = r.log_term(n, p)?;
    for (w, k) in weights.iter().zip(kernels) {
        acc = acc - k.kernel.log_term(n, p)? * BigReal::from_rational(w, p);
    }
    Ok(acc)
}

pub(crate) fn pm_rs(r: &FactoredRational, start: u64, opts: &EvalOptions) -> Result<EvalResult> {
    opts.validate()?;
    let p = opts.precision;
    let n = opts.terms_for(ExponentKind::PmRudinShapiro);
    if r.is_one() {
        let one = BigReal::one(p);
        return Ok(EvalResult {
            error_estimate: noise_floor(&one, p),
            value: one,
            terms_used: 0,
            split_levels: 0,
            precision: p,
        });
    }
    let kernels = corrections();
    let weights = correction_weights(r, opts.rs_moment_order, &kernels);
    let work = product_precision(p, (n + 1) * 24);

    let mut value = signed_product(&IntegerFactors::new(r)?, 1, n + 1, rs_sign, work, opts.parallel)?;
    if start == 0 {
        let r0 = r.value_at(0).ok_or_else(|| Error::eval("rational vanishes at n = 0"))?;
        value = value * BigReal::from_rational(&r0, work);
    }
    for (w, k) in weights.iter().zip(&kernels) {
        if w.is_zero() {
            continue;
        }
        let partial = signed_product(&IntegerFactors::new(&k.kernel)?, 1, n + 1, rs_sign, work, opts.parallel)?;
        let full = BigReal::from_rational(&k.value, work);
        let ratio = full / partial;
        let factor = ratio.pow_rational(w).ok_or_else(|| Error::eval("correction product is not positive"))?;
        value = value * factor;
    }

    // Abel summation with |Σ_{k≤n} ε_k| ≤ 3√n and residual ~ C n^{−d}
    let decay = 1 + weights.len() as u32;
    let probe = Precision::digits(40);
    let r_n = residual_at(r, &kernels, &weights, n, probe)?.abs();
    let d = f64::from(decay);
    let factor = 3.0 * (n as f64).sqrt() * (1.0 + 2.0 * d / (2.0 * d - 1.0));
    let tail = r_n * BigReal::from_f64(factor, probe);
    let error = value.abs().with_precision(probe) * tail.with_precision(probe);
    let error = error.with_precision(p) + noise_floor(&value, p);
    Ok(EvalResult {
        value: value.with_precision(p),
        error_estimate: error,
        terms_used: n,
        split_levels: 0,
        precision: p,
    })
}

/// `∏_{n≥start} R(n)^{(−1)^{v_n}}`.
pub fn eval_pm_rs(spec: &ProductSpec, opts: &EvalOptions) -> Result<EvalResult> {
    spec.expect_kind(&[ExponentKind::PmRudinShapiro])?;
    pm_rs(spec.rational(), spec.start(), opts)
}

/// `∏_{n≥start} R(n)^{v_n}` as `sqrt(plain / pm)`.
pub fn eval_zero_one_rs(spec: &ProductSpec, opts: &EvalOptions) -> Result<EvalResult> {
    spec.expect_kind(&[ExponentKind::ZeroOneRudinShapiro])?;
    let plain = plain_product(spec.rational(), spec.start(), opts)?;
    let pm = pm_rs(spec.rational(), spec.start(), opts)?;
    Ok(zero_one_from_parts(plain, pm, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_kernel_closed_form() {
        let k = &corrections()[0].kernel;
        let want: FactoredRational = "(n+1)^2(4n+1)^2/(2n+1)^4".parse().unwrap();
        assert_eq!(k, &want);
    }

    #[test]
    fn kernels_sum_to_their_seed_value() {
        // truncation error ~ 3√N·|log K(N)|: about 1e-2 for the 1/n kernel,
        // 1e-7 for the 1/n² kernel at N = 2·10⁵
        let p = Precision::digits(30);
        for (k, tol) in corrections().into_iter().zip([1e-2, 1e-6]) {
            let ints = IntegerFactors::new(&k.kernel).unwrap();
            let v = signed_product(&ints, 1, 200_001, rs_sign, p, true).unwrap();
            let want = BigReal::from_rational(&k.value, p);
            let rel = ((v - &want) / want).abs().to_f64();
            assert!(rel < tol, "{rel}");
        }
    }

    #[test]
    fn weights_cancel_leading_terms() {
        let gs: FactoredRational = "(2n+1)^2/((n+1)(4n+1))".parse().unwrap();
        let kernels = corrections();
        assert_eq!(correction_weights(&gs, 2, &kernels), vec![ratio(-1, 2), ratio(0, 1)]);
        let r: FactoredRational = "(3n+1)(n+3)/((n+2)(3n+4))".parse().unwrap();
        let w = correction_weights(&r, 2, &kernels);
        let p = Precision::digits(40);
        let a = residual_at(&r, &kernels, &w, 1000, p).unwrap().abs().to_f64();
        let b = residual_at(&r, &kernels, &w, 2000, p).unwrap().abs().to_f64();
        assert!(a / b > 7.0, "residual should decay like n^-3: {a} {b}");
    }

    #[test]
    fn golay_shapiro_product() {
        let spec =
            ProductSpec::new("(2n+1)^2/((n+1)(4n+1))".parse().unwrap(), ExponentKind::PmRudinShapiro, 1).unwrap();
        let opts = EvalOptions { terms: Some(100_000), ..EvalOptions::default() };
        let out = eval_pm_rs(&spec, &opts).unwrap();
        let want = BigReal::from_u64(2, opts.precision).sqrt().recip();
        let err = (&out.value - &want).abs();
        assert!(err.to_f64() < 1e-9, "{err}");
        assert!(err <= out.error_estimate);
    }
}
