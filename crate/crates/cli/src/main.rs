//! `bdk`: evaluate and dump Bernstein–Durrmeyer composition kernels, apply
//! operators to polynomials, emit plot tables and run the identity suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

mod expr;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bdk_core::combinat::set_factorial_cache_bound;
use bdk_core::durrmeyer::{compose_apply, composition_coefficients, OperatorSpec};
use bdk_core::error::BdkError;
use bdk_core::kernels::{
    eval_definition_twofold, kernel_closed_twofold, kernel_definition_twofold, kernel_legendre,
    univariate_twofold_closed,
};
use bdk_core::rational::parse_rational;
use bdk_core::verify::{run_suite, Mutation, SuiteConfig};
use bdk_core::{BarycentricPoint, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{ToPrimitive, Zero};

#[derive(Parser, Debug)]
#[command(name = "bdk", version, about = "Exact Bernstein-Durrmeyer composition kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate K_{m,n}(x, y) exactly.
    Eval(EvalArgs),
    /// Dump a kernel representation as JSON.
    Kernel(KernelArgs),
    /// Coefficients c_k with M_m M_n = sum_k c_k M_k.
    Coeffs(CoeffsArgs),
    /// Apply a composition of operators to a polynomial.
    Apply(ApplyArgs),
    /// Tabulate float kernel values on a grid as CSV.
    Table(TableArgs),
    /// Run the identity suite and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Form {
    /// Double sum from the operator definition.
    Definition,
    /// Diagonal closed form on S^d.
    Closed,
    /// Univariate closed form with p_{k,j} products (d = 1).
    #[value(alias = "theorem1")]
    Univariate,
    /// Legendre expansion (d = 1).
    Legendre,
}

#[derive(Args, Debug)]
struct KernelSelect {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "closed")]
    form: Form,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    kernel: KernelSelect,
    /// Comma-separated rationals "p/q", d entries.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// Also print a 17-significant-digit decimal.
    #[arg(long)]
    float: bool,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[command(flatten)]
    kernel: KernelSelect,
    /// Expand diagonal forms into the canonical bivariate polynomial.
    #[arg(long)]
    canonical: bool,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[arg(long)]
    d: usize,
    /// Operator degrees, outermost first: "2,3" is M_2(M_3 f).
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<u32>,
    /// Polynomial such as "1/2*x1^2*x2 - x2 + 3".
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    kernel: KernelSelect,
    /// Points per axis, at least 2.
    #[arg(long)]
    grid: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Dimensions to check.
    #[arg(long = "d", value_delimiter = ',', default_values_t = vec![1usize, 2, 3])]
    dims: Vec<usize>,
    /// Clamp every degree cap to this value.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Override the two-fold cap as d:cap, e.g. 2:4.
    #[arg(long = "cap", value_parser = parse_cap)]
    caps: Vec<(usize, u32)>,
    #[arg(long)]
    threefold_cap: Option<u32>,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Skip kernel jobs enumerating more multi-index pairs than this.
    #[arg(long)]
    max_pairs: Option<u64>,
    /// Report path.
    #[arg(long, default_value = "bdk-report.json")]
    report: PathBuf,
    /// Corrupt the two-fold prefactor to check that failures are detected.
    #[arg(long)]
    self_test_mutation: bool,
}

fn parse_cap(s: &str) -> Result<(usize, u32), String> {
    let (d, c) = s.split_once(':').ok_or("expected d:cap")?;
    Ok((
        d.trim().parse().map_err(|_| "bad dimension")?,
        c.trim().parse().map_err(|_| "bad cap")?,
    ))
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<BdkError> for Failure {
    fn from(e: BdkError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("BDK_MAX_FACTORIAL") {
        match v.trim().parse::<usize>() {
            Ok(bound) => {
                set_factorial_cache_bound(bound);
            }
            Err(_) => {
                eprintln!("error: BDK_MAX_FACTORIAL must be a nonnegative integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Table(a) => cmd_table(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_point(s: &str, d: usize) -> Result<BarycentricPoint, Failure> {
    let coords = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != d {
        return Err(usage(format!("expected {d} coordinates, got {} in {s:?}", coords.len())));
    }
    Ok(BarycentricPoint::new(coords)?)
}

fn check_univariate(sel: &KernelSelect) -> Result<(), Failure> {
    if matches!(sel.form, Form::Univariate | Form::Legendre) && sel.d != 1 {
        let name = sel.form.to_possible_value().map(|v| v.get_name().to_owned());
        return Err(usage(format!("form {} requires --d 1", name.unwrap_or_default())));
    }
    if sel.d == 0 {
        return Err(usage("--d must be >= 1"));
    }
    Ok(())
}

/// A kernel ready for pointwise evaluation.
enum Evaluator {
    Canonical(bdk_core::KernelPolynomial),
    Diagonal(bdk_core::DiagonalKernelForm),
}

impl Evaluator {
    fn build(sel: &KernelSelect) -> Result<Self, Failure> {
        check_univariate(sel)?;
        let (m, n, d) = (sel.m, sel.n, sel.d);
        Ok(match sel.form {
            Form::Definition => Evaluator::Canonical(kernel_definition_twofold(m, n, d)?),
            Form::Closed => Evaluator::Diagonal(kernel_closed_twofold(m, n, d)?),
            Form::Univariate => Evaluator::Diagonal(univariate_twofold_closed(m, n)?),
            Form::Legendre => Evaluator::Canonical(kernel_legendre(m, n)?),
        })
    }

    fn eval(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<Rational, Failure> {
        Ok(match self {
            Evaluator::Canonical(k) => k.evaluate(x, y)?,
            Evaluator::Diagonal(k) => k.evaluate(x, y)?,
        })
    }
}

/// Decimal with 17 significant digits.
fn decimal17(r: &Rational) -> String {
    let f = r.to_f64().unwrap_or(f64::NAN);
    if f == 0.0 || !f.is_finite() {
        return format!("{f}");
    }
    let exp = f.abs().log10().floor() as i32;
    if !(-5..=16).contains(&exp) {
        return format!("{f:.16e}");
    }
    let decimals = (16 - exp).max(0) as usize;
    format!("{f:.decimals$}")
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    let sel = &a.kernel;
    check_univariate(sel)?;
    let x = parse_point(&a.x, sel.d)?;
    let y = parse_point(&a.y, sel.d)?;
    let value = match sel.form {
        // pointwise double sum; no need to expand the whole kernel
        Form::Definition => eval_definition_twofold(sel.m, sel.n, &x, &y)?,
        _ => Evaluator::build(sel)?.eval(&x, &y)?,
    };
    let mut out = io::stdout().lock();
    writeln!(out, "{value}")?;
    if a.float {
        writeln!(out, "{}", decimal17(&value))?;
    }
    Ok(())
}

fn cmd_kernel(a: KernelArgs) -> Result<(), Failure> {
    let json = match Evaluator::build(&a.kernel)? {
        Evaluator::Canonical(k) => k.to_json(),
        Evaluator::Diagonal(k) if a.canonical => k.to_canonical().to_json(),
        Evaluator::Diagonal(k) => k.to_json(),
    };
    println!("{json}");
    Ok(())
}

fn cmd_coeffs(a: CoeffsArgs) -> Result<(), Failure> {
    let c = composition_coefficients(a.m, a.n, a.d)?;
    let sum: Rational = c.iter().sum();
    let doc = serde_json::json!({
        "d": a.d,
        "m": a.m,
        "n": a.n,
        "coefficients": c.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "sum": sum.to_string(),
    });
    println!("{doc}");
    Ok(())
}

fn cmd_apply(a: ApplyArgs) -> Result<(), Failure> {
    if a.d == 0 {
        return Err(usage("--d must be >= 1"));
    }
    let f = expr::parse_polynomial(&a.poly, a.d)?;
    let specs = a
        .degrees
        .iter()
        .map(|&n| OperatorSpec::new(n, a.d))
        .collect::<Result<Vec<_>, _>>()?;
    println!("{}", compose_apply(&specs, &f)?.to_json());
    Ok(())
}

/// Grid points of the unit interval (d = 1) or of the triangle (d = 2).
fn grid_points(d: usize, grid: usize) -> Vec<BarycentricPoint> {
    let last = (grid - 1) as i64;
    let coord = |i: usize| Rational::new((i as i64).into(), last.into());
    let mut pts = Vec::new();
    match d {
        1 => {
            for i in 0..grid {
                pts.push(BarycentricPoint::new(vec![coord(i)]).expect("d = 1"));
            }
        }
        _ => {
            for i in 0..grid {
                for j in 0..grid - i {
                    pts.push(BarycentricPoint::new(vec![coord(i), coord(j)]).expect("d = 2"));
                }
            }
        }
    }
    pts
}

fn cmd_table(a: TableArgs) -> Result<(), Failure> {
    let sel = &a.kernel;
    if !(1..=2).contains(&sel.d) {
        return Err(usage(format!("tables support d = 1 or d = 2, got {}", sel.d)));
    }
    if a.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let kernel = Evaluator::build(sel)?;
    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<String> = (1..=sel.d).map(|i| format!("x{i}")).collect();
    header.extend((1..=sel.d).map(|i| format!("y{i}")));
    header.push("K".into());
    w.write_record(&header)?;
    let pts = grid_points(sel.d, a.grid);
    for x in &pts {
        for y in &pts {
            let v = kernel.eval(x, y)?;
            let mut row: Vec<String> = x
                .coords()
                .iter()
                .chain(y.coords())
                .map(|c| c.to_f64().unwrap_or(f64::NAN).to_string())
                .collect();
            // shortest round-trip repr of the correctly rounded value
            let f = v.to_f64().unwrap_or(f64::NAN);
            row.push(if f.is_zero() { "0".into() } else { f.to_string() });
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let mut cfg = SuiteConfig {
        dims: a.dims,
        seed: a.seed,
        parallelism: a.threads,
        max_pairs: a.max_pairs,
        mutation: a.self_test_mutation.then_some(Mutation::DoubleTwofoldScale),
        ..SuiteConfig::default()
    };
    for (d, cap) in a.caps {
        cfg.set_degree_cap(d, cap);
    }
    if let Some(t) = a.threefold_cap {
        cfg.threefold_cap = t;
    }
    if let Some(max) = a.max_degree {
        cfg = cfg.with_max_degree(max);
    }
    let report = run_suite(&cfg)?;
    std::fs::write(&a.report, report.to_json())
        .map_err(|e| usage(format!("cannot write {}: {e}", a.report.display())))?;

    let s = &report.body.summary;
    println!(
        "{} checks: {} passed, {} failed, {} skipped ({:.1} s)",
        s.total,
        s.passed,
        s.failed,
        s.skipped,
        report.timing.total_millis / 1e3
    );
    println!("report: {} (body sha256 {})", a.report.display(), report.body_sha256);
    if !report.body.complete {
        eprintln!("warning: resource cap reached, report is incomplete");
    }
    for f in report.failures().take(10) {
        eprintln!(
            "FAIL {} {} {}",
            f.name,
            f.params,
            serde_json::to_string(&f.witness).unwrap_or_default()
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bdk_core::rational::ratio;

    #[test]
    fn decimal_has_17_significant_digits() {
        assert_eq!(decimal17(&ratio(4, 3)), "1.3333333333333333");
        assert_eq!(decimal17(&ratio(2, 3)), "0.66666666666666663");
        assert_eq!(decimal17(&ratio(2, 1)), "2.0000000000000000");
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(grid_points(1, 3).len(), 3);
        assert_eq!(grid_points(2, 3).len(), 6);
        assert!(grid_points(2, 5).iter().all(|p| p.in_simplex()));
    }

    #[test]
    fn caps_parse() {
        assert_eq!(parse_cap("2:4"), Ok((2, 4)));
        assert!(parse_cap("2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
