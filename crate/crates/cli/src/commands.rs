use std::fmt::Write as _;

use digitprod::evaluator::{self, flajolet_martin, g_value, monotonicity_scan, remainder_sign_probe};
use digitprod::sequences::exponent;
use digitprod::symbolic::{self, expr_from_spec, family, Family, GExpression, Reduction, VerifyReport};
use digitprod::{
    parse_rational, BigReal, Error, EvalOptions, EvalResult, ExponentKind, FactoredRational, ProductSpec, Result,
};
use serde::Serialize;

use crate::output::{Report, Table};
use crate::Global;

const ERR_DIGITS: u32 = 3;

fn options(g: &Global) -> EvalOptions {
    EvalOptions { split_levels: g.split_levels, terms: g.terms, ..EvalOptions::with_digits(g.digits) }
}

fn digits_str(v: &BigReal, digits: u32) -> String {
    v.to_string_digits(digits)
}

#[derive(Serialize)]
struct EvalJson {
    value: String,
    error_estimate: String,
    significant_digits: u32,
    terms_used: u64,
    split_levels: u32,
    digits: u32,
}

impl EvalJson {
    fn new(r: &EvalResult, digits: u32) -> Self {
        EvalJson {
            value: digits_str(&r.value, digits),
            error_estimate: digits_str(&r.error_estimate, ERR_DIGITS),
            significant_digits: r.significant_digits(),
            terms_used: r.terms_used,
            split_levels: r.split_levels,
            digits,
        }
    }
}

pub fn seq(kind: &str, count: u64) -> Result<Report> {
    let kind: ExponentKind = kind.parse()?;
    if count == 0 {
        return Err(Error::Input("count must be at least 1".into()));
    }
    let values: Vec<i8> = (0..count).map(|n| exponent(kind, n)).collect();
    let text = values.iter().map(i8::to_string).collect::<Vec<_>>().join(" ");
    let mut table = Table::new(&["n", "value"]);
    for (n, v) in values.iter().enumerate() {
        table.push(vec![n.to_string(), v.to_string()]);
    }
    #[derive(Serialize)]
    struct Json {
        kind: ExponentKind,
        values: Vec<i8>,
    }
    Ok(Report::new(text, Json { kind, values }, table))
}

pub fn eval(g: &Global, rational: &str, kind: &str, start: u64) -> Result<Report> {
    let r: FactoredRational = rational.parse()?;
    let kind: ExponentKind = kind.parse()?;
    let spec = ProductSpec::new(r, kind, start)?;
    let out = evaluator::evaluate(&spec, &options(g))?;
    let json = EvalJson::new(&out, g.digits);
    let mut text = String::new();
    let _ = writeln!(text, "{}", json.value);
    let _ = writeln!(text, "error estimate  {}", json.error_estimate);
    let _ = writeln!(text, "terms           {}", out.terms_used);
    let _ = writeln!(text, "split levels    {}", out.split_levels);
    let _ = write!(text, "digits          {}", g.digits);
    let mut table = Table::new(&["rational", "kind", "start", "value", "error_estimate", "terms_used", "split_levels"]);
    table.push(vec![
        spec.rational().to_string(),
        kind.to_string(),
        start.to_string(),
        json.value.clone(),
        json.error_estimate.clone(),
        out.terms_used.to_string(),
        out.split_levels.to_string(),
    ]);
    #[derive(Serialize)]
    struct Json {
        #[serde(flatten)]
        spec: ProductSpec,
        #[serde(flatten)]
        result: EvalJson,
    }
    Ok(Report::new(text, Json { spec, result: json }, table))
}

#[derive(Serialize)]
struct SymbolicJson {
    constant: Option<String>,
    matches: Option<bool>,
}

#[derive(Serialize)]
struct VerifyJson {
    name: String,
    computed: Option<String>,
    expected: Option<String>,
    abs_error: Option<String>,
    bound: Option<String>,
    pass: bool,
    symbolic: Option<SymbolicJson>,
    failure: Option<String>,
}

fn symbolic_label(r: &VerifyReport) -> &'static str {
    match &r.symbolic {
        None => "-",
        Some(s) => match (&s.reduction, s.matches) {
            (Reduction::Irreducible { .. }, _) => "irreducible",
            (_, Some(true)) => "exact",
            (_, Some(false)) => "mismatch",
            (_, None) => "reduced",
        },
    }
}

pub fn verify(g: &Global, name: Option<&str>, all: bool) -> Result<Report> {
    let opts = options(g);
    let tolerance = g.tolerance.map(|t| BigReal::from_f64(t, opts.precision));
    let reports = match (name, all) {
        (_, true) => symbolic::verify_all(&opts, tolerance.as_ref()),
        (Some(n), false) => {
            let id = symbolic::find(n).ok_or_else(|| Error::Input(format!("no catalog identity named `{n}`")))?;
            vec![symbolic::verify(&id, &opts, tolerance.as_ref())]
        }
        (None, false) => return Err(Error::Input("give an identity name or --all".into())),
    };
    let shown = 25.min(g.digits);
    let mut table = Table::new(&["name", "pass", "abs_error", "bound", "symbolic", "computed", "expected"]);
    let mut rows = Vec::new();
    for r in &reports {
        let s = |v: &Option<BigReal>, d: u32| v.as_ref().map(|v| digits_str(v, d));
        let computed = r.computed.as_ref().map(|c| c.value.clone());
        let json = VerifyJson {
            name: r.name.clone(),
            computed: s(&computed, g.digits),
            expected: s(&r.expected, g.digits),
            abs_error: s(&r.abs_error, ERR_DIGITS),
            bound: s(&r.bound, ERR_DIGITS),
            pass: r.pass,
            symbolic: r.symbolic.as_ref().map(|c| SymbolicJson {
                constant: c.reduction.constant().map(ToString::to_string),
                matches: c.matches,
            }),
            failure: r.failure.clone(),
        };
        let dash = || "-".to_string();
        table.push(vec![
            r.name.clone(),
            if r.pass { "pass" } else { "FAIL" }.into(),
            json.abs_error.clone().unwrap_or_else(dash),
            json.bound.clone().unwrap_or_else(dash),
            symbolic_label(r).into(),
            s(&computed, shown).or_else(|| r.failure.clone()).unwrap_or_else(dash),
            s(&r.expected, shown).unwrap_or_else(dash),
        ]);
        rows.push(json);
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let mut text = table.aligned();
    let _ = write!(text, "{passed}/{} passed", reports.len());
    let mut report = Report::new(text, rows, table);
    report.failed = passed != reports.len();
    Ok(report)
}

pub fn catalog() -> Report {
    let entries = symbolic::catalog();
    let mut table = Table::new(&["name", "kind", "start", "rational", "closed_form", "provenance"]);
    for i in &entries {
        table.push(vec![
            i.name.clone(),
            i.spec.kind().to_string(),
            i.spec.start().to_string(),
            i.spec.rational().to_string(),
            i.closed_form.to_string(),
            i.provenance.clone(),
        ]);
    }
    let mut text_table = Table::new(&["name", "kind", "start", "rational", "closed_form"]);
    text_table.rows = table.rows.iter().map(|r| r[..5].to_vec()).collect();
    Report::new(text_table.aligned(), &entries, table)
}

pub fn constants(g: &Global, name: &str) -> Result<Report> {
    let opts = options(g);
    let d = g.digits;
    let fm = flajolet_martin(&opts)?;
    let mut table = Table::new(&["name", "value", "error_estimate"]);
    #[derive(Serialize)]
    struct Json {
        name: String,
        value: String,
        error_estimate: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        r_times_g0: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        phi_from_g0: Option<String>,
    }
    let (value, err, extra_text, json) = match name {
        "g0" => {
            let v = digits_str(&fm.g0.value, d);
            let e = digits_str(&fm.g0.error_estimate, ERR_DIGITS);
            (
                v.clone(),
                Some(e.clone()),
                String::new(),
                Json { name: name.into(), value: v, error_estimate: Some(e), r_times_g0: None, phi_from_g0: None },
            )
        }
        "fm-R" => {
            let v = digits_str(&fm.r.value, d);
            let e = digits_str(&fm.r.error_estimate, ERR_DIGITS);
            let cross = digits_str(&fm.r_times_g0, d);
            let line = format!(
                "R·g(0) = {} ± {}",
                digits_str(&fm.r_times_g0, 25.min(d)),
                digits_str(&fm.r_times_g0_error, ERR_DIGITS)
            );
            (
                v.clone(),
                Some(e.clone()),
                line,
                Json {
                    name: name.into(),
                    value: v,
                    error_estimate: Some(e),
                    r_times_g0: Some(cross),
                    phi_from_g0: None,
                },
            )
        }
        _ => {
            let v = digits_str(&fm.phi, d);
            let other = digits_str(&fm.phi_from_g0, d);
            let gap = (&fm.phi - &fm.phi_from_g0).abs();
            let agree =
                if gap.is_zero() { d } else { (-(gap.to_f64() / fm.phi.to_f64()).log10()).floor().max(0.0) as u32 };
            let line = format!("via g(0): {other} (agrees to {} digits)", agree.min(d));
            (
                v.clone(),
                None,
                line,
                Json { name: name.into(), value: v, error_estimate: None, r_times_g0: None, phi_from_g0: Some(other) },
            )
        }
    };
    table.push(vec![name.into(), value.clone(), err.clone().unwrap_or_default()]);
    let mut text = value;
    if let Some(e) = err {
        let _ = write!(text, "\nerror estimate  {e}");
    }
    if !extra_text.is_empty() {
        let _ = write!(text, "\n{extra_text}");
    }
    Ok(Report::new(text, json, table))
}

pub fn g(g: &Global, x: &str) -> Result<Report> {
    let x = parse_rational(x)?;
    let out = g_value(&x, &options(g))?;
    let json = EvalJson::new(&out, g.digits);
    let text = format!("{}\nerror estimate  {}", json.value, json.error_estimate);
    let mut table = Table::new(&["x", "value", "error_estimate"]);
    table.push(vec![x.to_string(), json.value.clone(), json.error_estimate.clone()]);
    Ok(Report::new(text, json, table))
}

pub fn probe(a: &str, b: &str, k: u32, n_max: u64, n_tail: u64) -> Result<Report> {
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    let rows = remainder_sign_probe(&a, &b, k, n_max, n_tail)?;
    let mut table = Table::new(&["n", "remainder", "sign", "expected", "match"]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            format!("{:.6e}", r.remainder),
            r.sign.to_string(),
            r.expected.to_string(),
            r.matches().to_string(),
        ]);
    }
    let matching = rows.iter().filter(|r| r.matches()).count();
    let mut text = table.aligned();
    let _ = write!(text, "{matching}/{} signs match (-1)^t_n", rows.len());
    Ok(Report::new(text, &rows, table))
}

pub fn scan(g: &Global, lo: &str, hi: &str, steps: u32) -> Result<Report> {
    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
    let report = monotonicity_scan(&lo, &hi, steps, &options(g))?;
    let shown = 20.min(g.digits);
    let mut table = Table::new(&["x", "h", "error_estimate"]);
    #[derive(Serialize)]
    struct Point {
        x: String,
        h: String,
        error_estimate: String,
    }
    let mut points = Vec::new();
    for p in &report.points {
        let row = Point {
            x: p.x.to_string(),
            h: digits_str(&p.value.value, g.digits),
            error_estimate: digits_str(&p.value.error_estimate, ERR_DIGITS),
        };
        table.push(vec![row.x.clone(), digits_str(&p.value.value, shown), row.error_estimate.clone()]);
        points.push(row);
    }
    let mut text = table.aligned();
    if report.is_strictly_decreasing() {
        text.push_str("strictly decreasing beyond the error estimates");
    } else {
        let _ = write!(text, "not resolved as decreasing after indices {:?}", report.violations);
    }
    #[derive(Serialize)]
    struct Json {
        points: Vec<Point>,
        violations: Vec<usize>,
        strictly_decreasing: bool,
    }
    let json = Json { points, strictly_decreasing: report.is_strictly_decreasing(), violations: report.violations };
    Ok(Report::new(text, json, table))
}

pub fn reduce(
    expression: Option<&str>,
    family_id: Option<&str>,
    a: Option<&str>,
    b: Option<&str>,
    depth: u32,
) -> Result<Report> {
    let expr: GExpression = match (expression, family_id) {
        (Some(text), _) => text.parse()?,
        (None, Some(id)) => {
            let id: Family = id.parse()?;
            let a = parse_rational(a.ok_or_else(|| Error::Input("--family needs --a".into()))?)?;
            let b = b.map(parse_rational).transpose()?;
            expr_from_spec(&family(id, &a, b.as_ref())?.spec)?
        }
        (None, None) => return Err(Error::Input("give an expression or --family".into())),
    };
    let out = symbolic::reduce(&expr, depth)?;
    #[derive(Serialize)]
    struct Json {
        expression: String,
        depth: u32,
        constant: Option<String>,
        residual: Option<String>,
    }
    let residual = match &out {
        Reduction::Irreducible { residual, .. } => Some(residual.to_string()),
        Reduction::Constant(_) => None,
    };
    let json =
        Json { expression: expr.to_string(), depth, constant: out.constant().map(ToString::to_string), residual };
    let mut table = Table::new(&["expression", "depth", "result"]);
    table.push(vec![json.expression.clone(), depth.to_string(), out.to_string()]);
    Ok(Report::new(out.to_string(), json, table))
}
