//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are evaluated exactly as stated and
//! reported as FAIL; they only break the run if they unexpectedly pass.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use digitprod::evaluator::{eval_pm_thue, flajolet_martin, g_value, monotonicity_scan, remainder_sign_probe};
use digitprod::sequences::{block_parity, rudin_shapiro, thue_morse};
use digitprod::symbolic::{
    catalog, expr_from_spec, family, find, reduce, verify_all, Family, GExpression, DEFAULT_DEPTH,
};
use digitprod::{
    evaluate, BigReal, ClosedForm, EvalOptions, EvalResult, ExponentKind, FactoredRational, ProductSpec, RawFactor,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that fail as stated, with the reason.
const KNOWN_RED: &[(u8, &str)] = &[
    (4, "the printed 0/1 constant 16Γ(3/4)⁴/π⁶ disagrees with its own Gamma ratio 8√π/Γ(1/4)²"),
    (8, "the naive product ends on an unpaired factor R(10^5)^{±1}, whose residual tops 1e-3 once the product exceeds about 10"),
];

type Criterion = (u8, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into(), notes: Vec::new() }
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn abs_error(result: &EvalResult, cf: &ClosedForm) -> f64 {
    let expected = cf.eval(result.precision).expect("closed form evaluates");
    (&result.value - &expected).abs().to_f64()
}

fn eval_named(name: &str, opts: &EvalOptions) -> (EvalResult, ClosedForm) {
    let id = find(name).unwrap_or_else(|| panic!("{name} is in the catalog"));
    (evaluate(&id.spec, opts).expect("catalog entry evaluates"), id.closed_form)
}

fn within_time(start: Instant, limit: Duration) -> (bool, String) {
    let took = start.elapsed();
    (took < limit, format!("{:.2}s of {}s", took.as_secs_f64(), limit.as_secs()))
}

fn woods_robbins() -> Outcome {
    let opts = EvalOptions { parallel: false, ..EvalOptions::default() };
    let start = Instant::now();
    let (r, cf) = eval_named("WR", &opts);
    let err = abs_error(&r, &cf);
    let (fast, took) = within_time(start, Duration::from_secs(5));
    Outcome::new(err <= 1e-30 && fast, format!("|err| {} <= 1e-30, {took} single-threaded", sci(err)))
}

fn g_algebra_identities() -> Outcome {
    let opts = EvalOptions::default();
    let start = Instant::now();
    let mut worst: (f64, String) = (0.0, String::new());
    let mut passed = 0;
    let names: Vec<String> = ('a'..='l').map(|c| format!("C3{c}")).collect();
    for name in &names {
        let (r, cf) = eval_named(name, &opts);
        let err = abs_error(&r, &cf);
        if err <= 1e-25 {
            passed += 1;
        }
        if err >= worst.0 {
            worst = (err, name.clone());
        }
    }
    let (fast, took) = within_time(start, Duration::from_secs(60));
    Outcome::new(
        passed == names.len() && fast,
        format!("{passed}/{} within 1e-25, worst {} ({}), {took}", names.len(), sci(worst.0), worst.1),
    )
}

fn zero_one_thue() -> Outcome {
    let opts = EvalOptions::default();
    let errs: Vec<(String, f64)> = ["T5a", "T5b", "T5c"]
        .iter()
        .map(|n| {
            let (r, cf) = eval_named(n, &opts);
            (n.to_string(), abs_error(&r, &cf))
        })
        .collect();
    let pass = errs.iter().all(|(_, e)| *e <= 1e-20);
    let detail = errs.iter().map(|(n, e)| format!("{n} {}", sci(*e))).collect::<Vec<_>>().join(", ");
    Outcome::new(pass, format!("{detail} (limit 1e-20)"))
}

fn rudin_shapiro_products() -> Outcome {
    let opts = EvalOptions::default();
    let p = opts.precision;
    let start = Instant::now();

    let (signed, _) = eval_named("T6a", &opts);
    let signed_err = (&signed.value - &BigReal::one(p)).abs().to_f64();

    let t6b = find("T6b").expect("catalog entry");
    let zero_one = evaluate(&t6b.spec, &opts).expect("evaluates");
    let gamma_three_quarters = ClosedForm::Pi * ClosedForm::integer(2).sqrt() / ClosedForm::GammaQuarter;
    let printed = ClosedForm::integer(16) * gamma_three_quarters.pow_ratio(4, 1) / ClosedForm::Pi.pow_ratio(6, 1);
    let printed_err = abs_error(&zero_one, &printed);
    let corrected_err = abs_error(&zero_one, &t6b.closed_form);

    let (gs, half_sqrt2) = eval_named("GS", &opts);
    let gs_err = abs_error(&gs, &half_sqrt2);
    let direct = evaluate(&find("GS").unwrap().spec, &EvalOptions { rs_moment_order: 0, ..opts }).unwrap();
    let direct_err = abs_error(&direct, &half_sqrt2);

    let (fast, took) = within_time(start, Duration::from_secs(120));
    let mut out = Outcome::new(
        signed_err <= 1e-8 && printed_err <= 1e-6 && gs_err <= 1e-6 && fast,
        format!(
            "pm-v {} <= 1e-8, 0/1-v vs 16Γ(3/4)⁴/π⁶ {} <= 1e-6, Golay-Shapiro {} <= 1e-6, {took}",
            sci(signed_err),
            sci(printed_err),
            sci(gs_err)
        ),
    );
    out.notes.push(format!(
        "0/1-v product = {} ; vs 8√π/Γ(1/4)² (= its Gamma ratio) {}",
        zero_one.value.to_string_digits(20),
        sci(corrected_err)
    ));
    out.notes.push(format!("Golay-Shapiro with plain direct summation at N = 10^6: {}", sci(direct_err)));
    out
}

fn g_values() -> Outcome {
    let opts = EvalOptions::default();
    let p = opts.precision;
    let half = g_value(&q(1, 2), &opts).expect("g(1/2)");
    let one = g_value(&q(1, 1), &opts).expect("g(1)");
    let e_half = (&half.value - &BigReal::one(p)).abs().to_f64();
    let e_one = abs_error(&one, &ClosedForm::integer(2).pow_ratio(-1, 2));
    Outcome::new(
        e_half <= 1e-30 && e_one <= 1e-30,
        format!("|g(1/2) − 1| {}, |g(1) − √2/2| {} (limit 1e-30)", sci(e_half), sci(e_one)),
    )
}

fn flajolet_martin_check() -> Outcome {
    let opts = EvalOptions::default();
    let p = opts.precision;
    match flajolet_martin(&opts) {
        Ok(fm) => {
            let gap = (&fm.r_times_g0 - &BigReal::from_rational(&q(3, 2), p)).abs().to_f64();
            let rel = ((&fm.phi - &fm.phi_from_g0).abs() / fm.phi.abs()).to_f64();
            let digits = if rel > 0.0 { -rel.log10() } else { f64::from(p.decimal_digits()) };
            Outcome::new(
                gap <= 1e-20 && digits >= 20.0,
                format!("|R·g(0) − 3/2| {} <= 1e-20, φ formulas agree to {digits:.1} digits", sci(gap)),
            )
        }
        Err(e) => Outcome::new(false, format!("error: {e}")),
    }
}

fn family_value(id: Family, a: &BigRational, b: Option<&BigRational>) -> BigRational {
    let one = q(1, 1);
    match id {
        Family::I => (b.unwrap() + &one) / (a + &one),
        Family::Ii => (a + q(2, 1)) / (a + &one),
        Family::Iii => one.clone() / (a + &one),
        Family::Iv => q(2, 1) * a / (a + &one),
    }
}

fn symbolic_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_9700);
    let mut exact = 0;
    let mut failures = Vec::new();
    let total = 50;
    for k in 0..total {
        let id = Family::ALL[k % 4];
        let (a, b) = loop {
            let mut draw = || q(rng.gen_range(-20..=20), rng.gen_range(1..=20));
            let a = draw();
            let b = (id == Family::I).then(&mut draw);
            if id.admits(&a, b.as_ref()) {
                break (a, b);
            }
        };
        let identity = family(id, &a, b.as_ref()).expect("admissible instance");
        let want = family_value(id, &a, b.as_ref());
        let got = expr_from_spec(&identity.spec)
            .and_then(|e| reduce(&e, DEFAULT_DEPTH))
            .ok()
            .and_then(|r| r.constant().and_then(|c| c.as_rational()));
        if got.as_ref() == Some(&want) {
            exact += 1;
        } else {
            failures.push(format!("{id}({a}, {b:?})"));
        }
    }
    let constant = |text: &str| {
        text.parse::<GExpression>()
            .ok()
            .and_then(|e| reduce(&e, DEFAULT_DEPTH).ok())
            .and_then(|r| r.constant().and_then(|c| c.as_rational()))
    };
    let two_g1 = constant("2G(1)") == Some(q(1, 2));
    let g_half = constant("G(1/2)") == Some(q(1, 1));
    let mut out = Outcome::new(
        exact == total && two_g1 && g_half,
        format!("{exact}/{total} family instances exact, 2G(1) → 1/2: {two_g1}, G(1/2) → 1: {g_half}"),
    );
    out.notes.extend(failures);
    out
}

/// Balanced monic rationals with offsets in `(0, 4]`.
fn random_pm_rational(rng: &mut ChaCha8Rng) -> FactoredRational {
    loop {
        let pairs = rng.gen_range(1..=3);
        let mut raw = Vec::new();
        for _ in 0..pairs {
            let m = rng.gen_range(1..=2);
            raw.push(RawFactor::new(q(1, 1), q(rng.gen_range(1..=16), 4), m));
            raw.push(RawFactor::new(q(1, 1), q(rng.gen_range(1..=16), 4), -m));
        }
        let r = FactoredRational::normalize(&raw).expect("positive coefficients");
        if !r.is_one() {
            return r;
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ac1_e008);
    let defaults = EvalOptions::default();
    let reference_opts = EvalOptions { split_levels: 10, terms: Some(1 << 13), ..EvalOptions::with_digits(60) };
    let cases = 25;
    let mut naive_ok = 0;
    let mut bounded = 0;
    let mut worst_naive = 0.0f64;
    let mut worst_paired = 0.0f64;
    let mut notes = Vec::new();
    for _ in 0..cases {
        let r = random_pm_rational(&mut rng);
        let spec = ProductSpec::new(r.clone(), ExponentKind::PmThue, 1).expect("balanced");
        let fast = eval_pm_thue(&spec, &defaults).expect("evaluates");
        let reference = eval_pm_thue(&spec, &reference_opts).expect("evaluates");
        let naive = common::naive_product(&r, 1, 100_000, common::pm_thue);
        let d = (fast.value.to_f64() - naive).abs();
        worst_naive = worst_naive.max(d);
        if d <= 1e-3 {
            naive_ok += 1;
        } else {
            notes.push(format!("{r}: accelerated {:.10}, naive off by {}", fast.value.to_f64(), sci(d)));
        }
        // same oracle ending on a complete Thue-Morse pair
        let paired = common::naive_product(&r, 1, 99_999, common::pm_thue);
        worst_paired = worst_paired.max((fast.value.to_f64() - paired).abs());
        if (&fast.value - &reference.value).abs() <= fast.error_estimate {
            bounded += 1;
        }
    }
    let share = f64::from(bounded) / f64::from(cases);
    notes.push(format!("naive product over n <= 99999 (complete pairs): worst {}", sci(worst_paired)));
    let mut out = Outcome::new(
        naive_ok == cases && share >= 0.95,
        format!(
            "{naive_ok}/{cases} within 1e-3 of the naive product (worst {}), estimate bounds the reference gap in {bounded}/{cases}",
            sci(worst_naive)
        ),
    );
    out.notes = notes;
    out
}

fn sequence_recurrences() -> Outcome {
    let t = common::thue_morse_table(1 << 20);
    let t_ok = t.iter().enumerate().all(|(n, &b)| thue_morse(n as u64) == b);
    let v = common::rudin_shapiro_table(1 << 18);
    let v_ok = v.iter().enumerate().all(|(n, &b)| rudin_shapiro(n as u64) == b);
    let block_ok = (0..1u64 << 12).all(|n| {
        block_parity(&[1], 2, n).ok() == Some(t[n as usize])
            && block_parity(&[1, 1], 2, n).ok() == Some(v[n as usize])
            && usize::from(block_parity(&[1, 1], 2, n).unwrap()) == common::block_count("11", 2, n) % 2
    });
    Outcome::new(
        t_ok && v_ok && block_ok,
        format!("t to 2^20: {t_ok}, v to 2^18: {v_ok}, block parity to 2^12: {block_ok}"),
    )
}

fn remainder_signs() -> Outcome {
    let mut checked = 0;
    let mut mismatched = Vec::new();
    for (a, b) in [(2, 1), (3, 1)] {
        for k in 0..=2 {
            match remainder_sign_probe(&q(a, 1), &q(b, 1), k, 64, 1 << 20) {
                Ok(rows) => {
                    for row in rows.iter().filter(|r| r.n <= 64) {
                        checked += 1;
                        if !row.matches() {
                            mismatched.push(format!("(a, b, k, n) = ({a}, {b}, {k}, {})", row.n));
                        }
                    }
                }
                Err(e) => mismatched.push(format!("({a}, {b}, {k}): {e}")),
            }
        }
    }
    let mut out = Outcome::new(
        mismatched.is_empty() && checked > 0,
        format!("{}/{checked} remainder signs equal (−1)^t_n", checked - mismatched.len().min(checked)),
    );
    out.notes.extend(mismatched);
    out
}

fn monotonicity() -> Outcome {
    match monotonicity_scan(&q(0, 1), &q(10, 1), 40, &EvalOptions::default()) {
        Ok(report) => {
            let first = report.points.first().map(|p| p.value.value.to_f64()).unwrap_or(f64::NAN);
            let last = report.points.last().map(|p| p.value.value.to_f64()).unwrap_or(f64::NAN);
            Outcome::new(
                report.is_strictly_decreasing() && report.points.len() == 41,
                format!(
                    "{} points, h(0) = {first:.6} down to h(10) = {last:.6}, {} gaps within error",
                    report.points.len(),
                    report.violations.len()
                ),
            )
        }
        Err(e) => Outcome::new(false, format!("error: {e}")),
    }
}

fn full_catalog() -> Outcome {
    let reports = verify_all(&EvalOptions::default(), None);
    let passed = reports.iter().filter(|r| r.pass).count();
    let symbolic: Vec<bool> = reports.iter().filter_map(|r| r.symbolic.as_ref()?.matches).collect();
    let exact = symbolic.iter().filter(|&&m| m).count();
    let expected_symbolic = catalog().iter().filter(|i| i.spec.kind() == ExponentKind::PmThue).count();
    let mut out = Outcome::new(
        passed == reports.len() && exact == expected_symbolic,
        format!(
            "{passed}/{} catalog identities verified, {exact}/{expected_symbolic} pm-t constants recovered exactly",
            reports.len()
        ),
    );
    out.notes.extend(reports.iter().filter(|r| !r.pass).map(|r| format!("{} failed", r.name)));
    out
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "Woods-Robbins product", woods_robbins),
        (2, "twelve g-algebra identities", g_algebra_identities),
        (3, "0/1 Thue-Morse products", zero_one_thue),
        (4, "Rudin-Shapiro products", rudin_shapiro_products),
        (5, "g(1/2) and g(1)", g_values),
        (6, "Flajolet-Martin constants", flajolet_martin_check),
        (7, "symbolic reduction", symbolic_soundness),
        (8, "accelerated vs naive products", oracle_equivalence),
        (9, "sequence recurrences", sequence_recurrences),
        (10, "remainder sign probe", remainder_signs),
        (11, "monotonicity of h", monotonicity),
        (12, "closed forms reproduced in full", full_catalog),
    ];
    let mut unexpected = Vec::new();
    let mut failed = 0;
    println!("acceptance criteria");
    for (id, title, run) in criteria {
        let started = Instant::now();
        let outcome = run();
        let known = KNOWN_RED.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
        let verdict = match (outcome.pass, known.is_some()) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as known red)",
        };
        println!(
            "criterion {id:>2} {verdict:<12} {title}: {} [{:.1}s]",
            outcome.detail,
            started.elapsed().as_secs_f64()
        );
        if let Some(why) = known {
            println!("              known red: {why}");
        }
        for note in &outcome.notes {
            println!("              {note}");
        }
        if !outcome.pass {
            failed += 1;
        }
        if outcome.pass == known.is_some() {
            unexpected.push(id);
        }
    }
    let known: Vec<u8> = KNOWN_RED.iter().map(|(id, _)| *id).collect();
    println!("{} passed, {failed} failed, known red {known:?}", 12 - failed);
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
