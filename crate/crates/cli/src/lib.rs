//! Command-line front end: `compute`, `verify`, `series` and `oracle`.
//!
//! Exit codes: 0 when everything passes, 1 when an identity fails or a
//! bracket misses its claimed limit, 2 on usage or parse errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_id::beta::{bell_expansion, beta_derivative, beta_integral};
use harmonic_id::harmonic::{
    bernoulli_table, harmonic_function, harmonic_number, zeta_even_coefficient,
};
use harmonic_id::identity::{
    verify, GridPoint, IdentityReport, Status, Summary, Sweep, VerifyTarget, Witness,
};
use harmonic_id::oracle::{cube_monte_carlo, log_moment_quadrature, OracleRecord};
use harmonic_id::rational::{format_float, parse_rational};
use harmonic_id::series::{evaluate_series, ExpandedOrder, Partial, SeriesEstimate, SeriesTarget};
use harmonic_id::{Error, Rational, Scalar};
use num_traits::Zero;
use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Caps the worker count of the global thread pool.
pub const THREADS_ENV: &str = "HARMONIC_ID_THREADS";

#[derive(Debug, Parser)]
#[command(name = "harmonic-id", version, about = "Exact harmonic-number identities and series brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; defaults to text for `compute` and json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a single quantity exactly.
    Compute(ComputeArgs),
    /// Verify a family of finite identities over a parameter sweep.
    Verify(VerifyArgs),
    /// Partial sum and tail bracket of an infinite series.
    Series(SeriesArgs),
    /// Floating-point cross-check against the exact engine.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    /// H_n^(alpha), or H_n(x, alpha) when --x is given.
    #[value(name = "H")]
    Harmonic,
    /// F_n(x) = B(x+1, n+1).
    #[value(name = "F")]
    Beta,
    /// The r-th x-derivative of F_n(x).
    #[value(name = "dF")]
    BetaDerivative,
    /// The Bell polynomial G_r in h1, h2, ...
    #[value(name = "bell")]
    Bell,
    /// B_0 .. B_N.
    #[value(name = "bernoulli")]
    Bernoulli,
    /// zeta(2n) as a rational multiple of pi^(2n).
    #[value(name = "zeta-even")]
    ZetaEven,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    quantity: Quantity,
    #[arg(long, default_value_t = 0)]
    n: u64,
    #[arg(long, value_parser = rational_arg)]
    x: Option<Rational>,
    #[arg(long, default_value_t = 1)]
    alpha: u32,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Largest index of the Bernoulli table.
    #[arg(long = "N")]
    big_n: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_parser = verify_target_arg)]
    target: VerifyTarget,
    #[arg(long, default_value_t = 50)]
    n_max: u64,
    #[arg(long, default_value_t = 6)]
    r_max: u32,
    /// Comma-separated rationals, e.g. 0,1/2,7/3.
    #[arg(long, value_parser = rational_arg, value_delimiter = ',')]
    x: Option<Vec<Rational>>,
    /// Report elapsed_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesName {
    #[value(name = "zeta")]
    Zeta,
    #[value(name = "lemma-c")]
    PowerSum,
    #[value(name = "cor2.4-r3")]
    CorR3,
    #[value(name = "cor2.4-r4")]
    CorR4,
    #[value(name = "cor2.4-r5")]
    CorR5,
    #[value(name = "eq31")]
    DoubleSum,
    #[value(name = "eq32")]
    LeibnizSeries,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    #[arg(value_enum)]
    target: SeriesName,
    #[arg(long = "N", default_value_t = 1000)]
    big_n: u64,
    #[arg(long, value_parser = rational_arg)]
    x: Option<Rational>,
    /// Exponent of the zeta series.
    #[arg(long, default_value_t = 2)]
    s: u32,
    /// Order for lemma-c (default 2), eq31 and eq32 (default 0).
    #[arg(long)]
    r: Option<u32>,
    /// Allow compensated floating accumulation above the exact limit.
    #[arg(long)]
    float: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Quad,
    Mc,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(value_enum)]
    kind: OracleKind,
    #[arg(long, default_value_t = 0)]
    n: u64,
    /// Power of log t (quadrature).
    #[arg(long, default_value_t = 0)]
    m: u32,
    /// Cube dimension (Monte Carlo).
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, value_parser = rational_arg)]
    x: Option<Rational>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn verify_target_arg(s: &str) -> Result<VerifyTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command produced: rendered output and an exit code.
struct Outcome {
    body: String,
    code: u8,
}

/// Parses `argv` (program name first), runs the command, writes output to
/// `out` (or `--output`) and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let written = match &cli.output {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(outcome.body.as_bytes())),
        None => out.write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::TermMismatch { .. } | Error::NoConvergence { .. } => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    // A second call in the same process finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> harmonic_id::Result<Outcome> {
    match &cli.command {
        Command::Compute(a) => compute(a, cli.format.unwrap_or(Format::Text)),
        Command::Verify(a) => run_verify(a, cli.format.unwrap_or(Format::Json)),
        Command::Series(a) => run_series(a, cli.format.unwrap_or(Format::Json)),
        Command::Oracle(a) => run_oracle(a, cli.format.unwrap_or(Format::Json)),
    }
}

fn ok(body: String) -> Outcome {
    Outcome { body, code: EXIT_OK }
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("report serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// compute

#[derive(Serialize)]
struct ValueRecord<'a> {
    quantity: &'a str,
    n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    value: String,
}

#[derive(Serialize)]
struct BellRecord {
    quantity: &'static str,
    r: usize,
    polynomial: String,
    terms: Vec<BellTerm>,
}

#[derive(Serialize)]
struct BellTerm {
    coeff: String,
    exponents: Vec<u32>,
}

#[derive(Serialize)]
struct BernoulliRecord {
    quantity: &'static str,
    values: Vec<String>,
}

#[derive(Serialize)]
struct ZetaRecord {
    quantity: &'static str,
    n: u32,
    coeff: String,
    pi_power: u32,
}

fn compute(a: &ComputeArgs, format: Format) -> harmonic_id::Result<Outcome> {
    let x = a.x.clone().unwrap_or_else(Rational::zero);
    let value_record = |quantity: &'static str, alpha, r, value: Rational, with_x: bool| {
        let rec = ValueRecord {
            quantity,
            n: a.n,
            x: with_x.then(|| x.to_string()),
            alpha,
            r,
            value: value.to_string(),
        };
        render_value(&rec, format)
    };
    let body = match a.quantity {
        Quantity::Harmonic => {
            let v = match &a.x {
                Some(x) => harmonic_function(a.n, x, a.alpha)?,
                None => harmonic_number(a.n, a.alpha)?,
            };
            value_record("H", Some(a.alpha), None, v, a.x.is_some())
        }
        Quantity::Beta => value_record("F", None, None, beta_integral(a.n, &x)?, true),
        Quantity::BetaDerivative => {
            value_record("dF", None, Some(a.r), beta_derivative(a.n, &x, a.r)?, true)
        }
        Quantity::Bell => {
            let g = bell_expansion(a.r);
            match format {
                Format::Text => format!("{g}\n"),
                Format::Json => json_line(&BellRecord {
                    quantity: "bell",
                    r: a.r,
                    polynomial: g.to_string(),
                    terms: g
                        .terms()
                        .map(|(m, c)| BellTerm {
                            coeff: c.to_string(),
                            exponents: m.exponents().to_vec(),
                        })
                        .collect(),
                }),
                Format::Csv => {
                    let mut s = String::from("coeff,monomial\n");
                    for (m, c) in g.terms() {
                        s.push_str(&format!("{c},{m}\n"));
                    }
                    s
                }
            }
        }
        Quantity::Bernoulli => {
            let max = a.big_n.unwrap_or(a.n as usize);
            let table = bernoulli_table(max);
            let values: Vec<String> = table.values().iter().map(|v| v.to_string()).collect();
            match format {
                Format::Text => values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| format!("B_{k} = {v}\n"))
                    .collect(),
                Format::Json => json_line(&BernoulliRecord {
                    quantity: "bernoulli",
                    values,
                }),
                Format::Csv => {
                    let mut s = String::from("k,value\n");
                    for (k, v) in values.iter().enumerate() {
                        s.push_str(&format!("{k},{v}\n"));
                    }
                    s
                }
            }
        }
        Quantity::ZetaEven => {
            let n = u32::try_from(a.n).map_err(|_| Error::InvalidArgument("n is too large".into()))?;
            let coeff = zeta_even_coefficient(n)?;
            match format {
                Format::Text => format!("{coeff} * pi^{}\n", 2 * n),
                Format::Json => json_line(&ZetaRecord {
                    quantity: "zeta-even",
                    n,
                    coeff: coeff.to_string(),
                    pi_power: 2 * n,
                }),
                Format::Csv => format!("n,coeff,pi_power\n{n},{coeff},{}\n", 2 * n),
            }
        }
    };
    Ok(ok(body))
}

fn render_value(rec: &ValueRecord<'_>, format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", rec.value),
        Format::Json => json_line(rec),
        Format::Csv => format!(
            "quantity,n,x,alpha,r,value\n{},{},{},{},{},{}\n",
            rec.quantity,
            rec.n,
            rec.x.as_deref().unwrap_or(""),
            rec.alpha.map(|v| v.to_string()).unwrap_or_default(),
            rec.r.map(|v| v.to_string()).unwrap_or_default(),
            rec.value
        ),
    }
}

// ---------------------------------------------------------------------------
// verify

fn run_verify(a: &VerifyArgs, format: Format) -> harmonic_id::Result<Outcome> {
    let sweep = Sweep {
        n_max: a.n_max,
        r_max: a.r_max,
        x_samples: a.x.clone().unwrap_or_else(Sweep::default_x_samples),
    };
    let mut reports = verify(a.target, &sweep)?;
    if a.no_timing {
        reports.iter_mut().for_each(|r| r.elapsed_ms = 0);
    }
    let summary = Summary::of(&reports);
    let body = render_reports(&reports, format, a.target.name());
    let code = if summary.all_pass() { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome { body, code })
}

/// Renders identity reports in the requested format. Text ends with a
/// one-line summary.
fn render_reports(reports: &[IdentityReport], format: Format, label: &str) -> String {
    let mut s = String::new();
    match format {
        Format::Json => reports.iter().for_each(|r| s.push_str(&json_line(r))),
        Format::Csv => {
            s.push_str("identity_id,n,x,r,status,lhs,rhs,elapsed_ms\n");
            for r in reports {
                let (lhs, rhs) = match &r.witness {
                    Some(Witness { lhs, rhs }) => (lhs.to_string(), rhs.to_string()),
                    None => (String::new(), String::new()),
                };
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    csv_field(&r.identity_id),
                    r.params.n,
                    r.params.x,
                    r.params.r.map(|v| v.to_string()).unwrap_or_default(),
                    r.status,
                    lhs,
                    rhs,
                    r.elapsed_ms
                ));
            }
        }
        Format::Text => {
            for r in reports.iter().filter(|r| r.status != Status::Pass) {
                s.push_str(&format!("{} {} {}", r.status, r.identity_id, describe(&r.params)));
                if let Some(w) = &r.witness {
                    s.push_str(&format!(": lhs = {}, rhs = {}", w.lhs, w.rhs));
                }
                if let Some(reason) = &r.reason {
                    s.push_str(&format!(": {reason}"));
                }
                s.push('\n');
            }
            let sum = Summary::of(reports);
            s.push_str(&format!(
                "{label}: {} pass, {} fail, {} skipped\n",
                sum.pass, sum.fail, sum.skipped
            ));
        }
    }
    s
}

fn describe(p: &GridPoint) -> String {
    match p.r {
        Some(r) => format!("n={} x={} r={r}", p.n, p.x),
        None => format!("n={} x={}", p.n, p.x),
    }
}

// ---------------------------------------------------------------------------
// series

fn run_series(a: &SeriesArgs, format: Format) -> harmonic_id::Result<Outcome> {
    let x = a.x.clone().unwrap_or_else(Rational::zero);
    let target = match a.target {
        SeriesName::Zeta => SeriesTarget::Zeta { x, s: a.s },
        SeriesName::PowerSum => SeriesTarget::PowerSum { r: a.r.unwrap_or(2) },
        SeriesName::CorR3 => SeriesTarget::ExpandedNumerator(ExpandedOrder::R3),
        SeriesName::CorR4 => SeriesTarget::ExpandedNumerator(ExpandedOrder::R4),
        SeriesName::CorR5 => SeriesTarget::ExpandedNumerator(ExpandedOrder::R5),
        SeriesName::DoubleSum => SeriesTarget::DoubleSum { r: a.r.unwrap_or(0), x },
        SeriesName::LeibnizSeries => SeriesTarget::LeibnizSeries { r: a.r.unwrap_or(0) },
    };
    let est = evaluate_series(&target, a.big_n, a.float)?;
    let contained = est.contains_limit();
    let body = match format {
        Format::Json => json_line(&est),
        Format::Csv => format!(
            "target_id,N,partial,exact,tail_low,tail_high,claimed_limit,contains\n{},{},{},{},{},{},{},{}\n",
            est.target_id,
            est.n_terms,
            partial_text(&est),
            est.exact,
            est.tail_low,
            est.tail_high,
            claimed_text(&est),
            contained.map(|c| c.to_string()).unwrap_or_default()
        ),
        Format::Text => series_text(&est, contained),
    };
    let code = if contained == Some(false) { EXIT_FAIL } else { EXIT_OK };
    Ok(Outcome { body, code })
}

fn partial_text(est: &SeriesEstimate) -> String {
    match &est.partial {
        Partial::Exact(p) => p.to_string(),
        Partial::Float(v) => format_float(*v),
    }
}

fn claimed_text(est: &SeriesEstimate) -> String {
    use harmonic_id::series::ClaimedLimit;
    match &est.claimed_limit {
        ClaimedLimit::Rational(q) => q.to_string(),
        ClaimedLimit::PiPower { coeff, pi_power } => format!("{coeff} * pi^{pi_power}"),
        ClaimedLimit::Unknown => String::new(),
    }
}

fn series_text(est: &SeriesEstimate, contained: Option<bool>) -> String {
    let p = est.partial.to_f64();
    let lo = p + est.tail_low.approx_f64();
    let hi = p + est.tail_high.approx_f64();
    let mode = if est.exact { "exact" } else { "float" };
    let claim = match contained {
        None => "no closed-form limit claimed".to_string(),
        Some(c) => format!(
            "claimed {} ({}) {}",
            claimed_text(est),
            format_float(est.claimed_limit.to_f64().unwrap_or(f64::NAN)),
            if c { "inside bracket" } else { "OUTSIDE bracket" }
        ),
    };
    format!(
        "{} N={} ({mode}): partial {}, bracket [{}, {}]; {claim}\n",
        est.target_id,
        est.n_terms,
        format_float(p),
        format_float(lo),
        format_float(hi)
    )
}

// ---------------------------------------------------------------------------
// oracle

/// Relative agreement required between quadrature and the exact derivative.
const QUADRATURE_AGREEMENT: f64 = 1e-9;

/// Monte Carlo estimates must land within this many standard errors.
const MC_SIGMAS: f64 = 4.0;

fn run_oracle(a: &OracleArgs, format: Format) -> harmonic_id::Result<Outcome> {
    let start = std::time::Instant::now();
    let (id, params, exact, approx, pass, record): (_, _, Rational, f64, bool, OracleRecord) = match a.kind {
        OracleKind::Quad => {
            let x = a.x.clone().unwrap_or_else(Rational::zero);
            let exact = beta_derivative(a.n, &x, a.m as usize)?;
            let quad = log_moment_quadrature(a.n, a.m, &x)?;
            let e = exact.approx_f64();
            let pass = ((quad.value - e) / e).abs() <= QUADRATURE_AGREEMENT;
            let params = GridPoint::with_order(a.n, x, a.m);
            ("oracle-quad", params, exact, quad.value, pass, quad.into())
        }
        OracleKind::Mc => {
            let exact = harmonic_id::series::multi_integral_exact(a.n, a.r)?;
            let mc = cube_monte_carlo(a.n, a.r, a.samples, a.seed)?;
            let e = exact.approx_f64();
            let pass = (mc.estimate - e).abs() <= MC_SIGMAS * mc.stderr;
            let params = GridPoint::with_order(a.n, Rational::zero(), a.r);
            ("oracle-mc", params, exact, mc.estimate, pass, mc.into())
        }
    };
    let witness = (!pass).then(|| Witness {
        lhs: exact,
        rhs: Rational::from_float(approx).unwrap_or_else(Rational::zero),
    });
    let report = IdentityReport {
        identity_id: id.to_string(),
        params,
        status: if pass { Status::Pass } else { Status::Fail },
        witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
        reason: None,
        oracle: Some(record),
    };
    let body = match format {
        Format::Text => {
            let value = match report.oracle.as_ref().expect("oracle set") {
                OracleRecord::Quadrature { value, err, evals } => format!(
                    "value {} (error estimate {}, {evals} evaluations)",
                    format_float(*value),
                    format_float(*err)
                ),
                OracleRecord::MonteCarlo { estimate, stderr, samples, .. } => format!(
                    "estimate {} (stderr {}, {samples} samples)",
                    format_float(*estimate),
                    format_float(*stderr)
                ),
            };
            format!("{} {} {}: {value}\n", report.status, id, describe(&report.params))
        }
        _ => render_reports(std::slice::from_ref(&report), format, id),
    };
    Ok(Outcome {
        body,
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    })
}

/// Entry point used by the binary.
pub fn main_with_stdio() -> u8 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
