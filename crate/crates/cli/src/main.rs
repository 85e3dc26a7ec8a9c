//! `pii-transitions`: evaluate Painlevé II transition asymptotics against numerical oracles.

mod output;
mod point;
mod row;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use pii_transitions::asymptotics::HmConstant;
use pii_transitions::oracles::{
    default_nodes, fredholm_det, gap_probs_from_eigs, kernel_spectrum, Thinning, MAX_NODES, MIN_NODES,
};
use pii_transitions::scaling::{stokes_coefficient, Branch, RegimeParams, SEPARATRIX_SLOPE};
use pii_transitions::verify::{self, Level, VerifyReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use output::{csv_document, emit, json_document, Format};
use point::{Parameter, Position};
use row::{eval_rows, sweep_row, ComparisonRow, EvalOptions, COLUMNS};

#[derive(Parser)]
#[command(name = "pii-transitions", version, about = "Painlevé II transition asymptotics and Airy-kernel determinants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every applicable formula at one point
    Eval(EvalArgs),
    /// Evaluate the dispatch formula over a grid
    Sweep(SweepArgs),
    /// Airy-kernel Fredholm determinant, spectrum head and counting probabilities
    Det(DetArgs),
    /// Run the acceptance criteria
    Verify(VerifyArgs),
    /// Curves of the regime diagram
    Plotdata(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    Regular,
    Singular,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Regular => Branch::Regular,
            BranchArg::Singular => Branch::Singular,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstantArg {
    StokesConsistent,
    #[value(name = "inverse-2pi")]
    InverseTwoPi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct RegimeArgs {
    /// Width of the strip below the separating line, in κ
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    f1: f64,
    /// Offset of the Hastings–McLeod strip below the separating line, in v
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    f2: f64,
    /// Stokes depth for the Stokes and determinant formulas [default: the point's own depth]
    #[arg(long, allow_negative_numbers = true)]
    f3: Option<f64>,
    /// Amplitude of the correction near the separating line
    #[arg(long, value_enum, default_value = "stokes-consistent")]
    hm_constant: ConstantArg,
}

impl RegimeArgs {
    fn options(&self, oracle: bool, nodes: usize) -> EvalOptions {
        EvalOptions {
            params: RegimeParams {
                delta: self.delta,
                f1: self.f1,
                f2: self.f2,
                f3: self.f3.unwrap_or(1.0),
            },
            constant: match self.hm_constant {
                ConstantArg::StokesConsistent => HmConstant::StokesConsistent,
                ConstantArg::InverseTwoPi => HmConstant::InverseTwoPi,
            },
            f3: self.f3,
            oracle,
            nodes,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("position").required(true).args(["x", "t"])))]
#[command(group(ArgGroup::new("parameter").required(true).args(["gamma", "v"])))]
struct EvalArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// (−x)^{3/2}
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// |s₁|²; γ < 1 is the regular branch, 1 < γ < 2 the singular one
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// −ln|1 − γ|
    #[arg(long, allow_negative_numbers = true)]
    v: Option<f64>,
    /// Branch for --v [default: regular]
    #[arg(long, value_enum)]
    branch: Option<BranchArg>,
    /// Compare with the ODE or Nyström oracle
    #[arg(long)]
    oracle: bool,
    /// Nyström node count [default: $PII_DEFAULT_NODES or 60]
    #[arg(long)]
    nodes: Option<usize>,
    #[command(flatten)]
    regime: RegimeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// A list of grid values, given as `A` or `A:B:N`.
#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    point::parse_range(s).map(Grid)
}

#[derive(Args)]
#[command(group(ArgGroup::new("position").required(true).args(["x", "t"])))]
#[command(group(ArgGroup::new("parameter").required(true).args(["gamma", "v"])))]
struct SweepArgs {
    /// x values, A or A:B:N
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    x: Option<Grid>,
    /// t values, A or A:B:N
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    t: Option<Grid>,
    /// γ values, A or A:B:N
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    gamma: Option<Grid>,
    /// v values, A or A:B:N
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    v: Option<Grid>,
    #[arg(long, value_enum)]
    branch: Option<BranchArg>,
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    nodes: Option<usize>,
    /// Worker threads [default: one per core]
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    regime: RegimeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DetArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Thinning γ [default: 1]
    #[arg(long, allow_negative_numbers = true, conflicts_with = "v")]
    gamma: Option<f64>,
    /// γ = 1 − e^{−v}, for γ close to 1
    #[arg(long, allow_negative_numbers = true)]
    v: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Include the eight largest eigenvalues
    #[arg(long)]
    spectrum: bool,
    /// Include E_0..E_3
    #[arg(long)]
    counts: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "fast")]
    level: LevelArg,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// t values, A or A:B:N
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "1:100:100")]
    t: Grid,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    f2: f64,
    /// Also draw v = (2√2/3)t − f3·ln t
    #[arg(long, allow_negative_numbers = true)]
    f3: Option<f64>,
    /// Number of Stokes lines v = (2√2/3)t − ((6j+1)/6)·ln t
    #[arg(long, default_value_t = 3)]
    stokes_lines: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<pii_transitions::Error> for Failure {
    fn from(e: pii_transitions::Error) -> Self {
        Self { code: e.exit_code() as u8, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 2, message: format!("i/o error: {e}") }
    }
}

fn domain(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

fn nodes(n: Option<usize>) -> Result<usize, Failure> {
    match n {
        None => Ok(default_nodes()),
        Some(n) if (MIN_NODES..=MAX_NODES).contains(&n) => Ok(n),
        Some(n) => Err(domain(format!("--nodes must lie in [{MIN_NODES}, {MAX_NODES}], got {n}"))),
    }
}

fn rows_document(rows: &[ComparisonRow], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => csv_document(&COLUMNS, rows.iter().map(ComparisonRow::csv_record)),
        Format::Json => json_document("rows", &rows),
    }
}

fn cmd_eval(a: EvalArgs) -> Result<u8, Failure> {
    let pos = match (a.x, a.t) {
        (Some(x), _) => Position::X(x),
        (_, Some(t)) => Position::T(t),
        _ => unreachable!("clap requires --x or --t"),
    };
    let param = match (a.gamma, a.v) {
        (Some(g), _) => Parameter::Gamma(g),
        (_, Some(v)) => Parameter::V(v),
        _ => unreachable!("clap requires --gamma or --v"),
    };
    let p = point::resolve(pos, param, a.branch.map(Into::into))?;
    let opts = a.regime.options(a.oracle, nodes(a.nodes)?);
    let (rows, oracle_err) = eval_rows(&p, &opts)?;
    emit(&rows_document(&rows, a.output.format), a.output.out.as_deref())?;
    match oracle_err {
        Some(e) => {
            eprintln!("pii-transitions: oracle failed: {e}");
            Ok(e.exit_code() as u8)
        }
        None => Ok(0),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<u8, Failure> {
    let positions: Vec<Position> = match (&a.x, &a.t) {
        (Some(g), _) => g.0.iter().map(|&x| Position::X(x)).collect(),
        (_, Some(g)) => g.0.iter().map(|&t| Position::T(t)).collect(),
        _ => unreachable!("clap requires --x or --t"),
    };
    let params: Vec<Parameter> = match (&a.gamma, &a.v) {
        (Some(g), _) => g.0.iter().map(|&v| Parameter::Gamma(v)).collect(),
        (_, Some(g)) => g.0.iter().map(|&v| Parameter::V(v)).collect(),
        _ => unreachable!("clap requires --gamma or --v"),
    };
    let opts = a.regime.options(a.oracle, nodes(a.nodes)?);
    opts.params.validate()?;
    if a.jobs == Some(0) {
        return Err(domain("--jobs must be positive"));
    }
    let cells: Vec<(Position, Parameter)> =
        positions.iter().flat_map(|&p| params.iter().map(move |&q| (p, q))).collect();
    let branch = a.branch.map(Branch::from);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| domain(format!("thread pool: {e}")))?;
    let rows: Vec<ComparisonRow> =
        pool.install(|| cells.par_iter().map(|&(p, q)| sweep_row(p, q, branch, &opts)).collect());
    emit(&rows_document(&rows, a.output.format), a.output.out.as_deref())?;
    Ok(0)
}

fn cmd_det(a: DetArgs) -> Result<u8, Failure> {
    let n = nodes(a.nodes)?;
    let thinning = match a.v {
        Some(v) => Thinning::V(v),
        None => Thinning::Gamma(a.gamma.unwrap_or(1.0)),
    };
    let d = fredholm_det(a.x, thinning, n)?;
    let det_ok = d.converged || d.delta_last_doubling <= d.roundoff_floor;
    let spec = if a.spectrum || a.counts { Some(kernel_spectrum(a.x, n)?) } else { None };
    let spectrum = spec.as_ref().filter(|_| a.spectrum).map(|s| {
        json!({
            "eigenvalues": &s.eigs[..s.eigs.len().min(8)],
            "n_reliable": s.n_reliable,
            "n_used": s.n_used,
        })
    });
    let mut counts_ok = true;
    let counts = spec.as_ref().filter(|_| a.counts).map(|s| {
        let e = gap_probs_from_eigs(&s.eigs, 3);
        counts_ok = s.n_reliable >= 6;
        json!({
            "e": e,
            "sum": e.iter().sum::<f64>(),
            "n_reliable": s.n_reliable,
            "reliable": counts_ok,
        })
    });
    let g = thinning.gamma();
    let body = json!({
        "x": a.x,
        "gamma": g,
        "v": match thinning { Thinning::V(v) => Some(v), Thinning::Gamma(_) => None },
        "nodes": n,
        "log_det": d.log_det,
        "det": d.log_det.exp(),
        "n_used": d.n_used,
        "converged": d.converged,
        "within_roundoff": d.delta_last_doubling <= d.roundoff_floor,
        "delta_last_doubling": d.delta_last_doubling,
        "roundoff_floor": d.roundoff_floor,
        "negative_anomaly": d.negative_anomaly,
        "spectrum": spectrum,
        "counts": counts,
    });
    emit(&json_document("det", &body), a.out.as_deref())?;
    if !det_ok {
        eprintln!(
            "pii-transitions: determinant moved by {:.3e} under doubling",
            d.delta_last_doubling
        );
        return Ok(3);
    }
    if !counts_ok {
        eprintln!("pii-transitions: fewer than 6 reliable eigenvalues for E_0..E_3");
        return Ok(3);
    }
    Ok(0)
}

fn report_json(report: &VerifyReport, nodes: usize) -> serde_json::Value {
    let criteria: Vec<_> = report
        .results
        .iter()
        .map(|r| {
            let checks: Vec<_> = r
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "value": c.value, "requirement": c.requirement, "passed": c.passed}))
                .collect();
            json!({
                "id": r.id,
                "title": r.title,
                "passed": r.passed(),
                "elapsed_seconds": r.elapsed.as_secs_f64(),
                "error": r.error,
                "checks": checks,
            })
        })
        .collect();
    let adjudication = report.adjudication.as_ref().map(|a| {
        json!({
            "t": a.t,
            "v": a.v,
            "x": a.x,
            "u_det": a.u_det,
            "u_det_error": a.u_det_error,
            "u_inverse_two_pi": a.u_inverse_two_pi,
            "u_stokes_consistent": a.u_stokes_consistent,
            "residual_inverse_two_pi": a.residual_inverse_two_pi,
            "residual_stokes_consistent": a.residual_stokes_consistent,
            "preferred": a.preferred.name(),
        })
    });
    json!({
        "level": match report.level { Level::Fast => "fast", Level::Full => "full" },
        "nodes": nodes,
        "passed": report.passed(),
        "failing": report.failing_ids(),
        "criteria": criteria,
        "adjudication": adjudication,
    })
}

const VERIFY_COLUMNS: [&str; 9] =
    ["id", "title", "status", "check", "value", "requirement", "check_passed", "elapsed_seconds", "error"];

fn report_csv(report: &VerifyReport) -> Vec<u8> {
    let mut records = Vec::new();
    for r in &report.results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let base = |check: &str, value: String, req: &str, ok: String| {
            vec![
                r.id.to_string(),
                r.title.to_string(),
                status.to_string(),
                check.to_string(),
                value,
                req.to_string(),
                ok,
                format!("{:.16e}", r.elapsed.as_secs_f64()),
                r.error.clone().unwrap_or_default(),
            ]
        };
        if r.checks.is_empty() {
            records.push(base("", String::new(), "", String::new()));
        }
        for c in &r.checks {
            records.push(base(&c.name, format!("{:.16e}", c.value), &c.requirement, c.passed.to_string()));
        }
    }
    if let Some(a) = &report.adjudication {
        for (name, value) in [
            ("u_det", a.u_det),
            ("u_det_error", a.u_det_error),
            ("u_inverse_two_pi", a.u_inverse_two_pi),
            ("u_stokes_consistent", a.u_stokes_consistent),
            ("residual_inverse_two_pi", a.residual_inverse_two_pi),
            ("residual_stokes_consistent", a.residual_stokes_consistent),
        ] {
            records.push(vec![
                "AC-9".into(),
                "amplitude adjudication".into(),
                "RECORD".into(),
                name.into(),
                format!("{value:.16e}"),
                format!("preferred {}", a.preferred.name()),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
    }
    csv_document(&VERIFY_COLUMNS, records)
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Failure> {
    let n = nodes(a.nodes)?;
    let level = match a.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let report = verify::run(level, n);
    for r in &report.results {
        eprintln!("{}", r.status_line());
    }
    let doc = match a.format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(&report_json(&report, n)).expect("serialisable");
            buf.push(b'\n');
            buf
        }
        Format::Csv => report_csv(&report),
    };
    emit(&doc, a.out.as_deref())?;
    if report.passed() {
        Ok(0)
    } else {
        eprintln!("pii-transitions: failing criteria: {}", report.failing_ids().join(", "));
        Ok(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CurvePoint {
    curve: String,
    t: f64,
    v: f64,
    kappa: f64,
}

fn diagram_curves(a: &PlotArgs) -> Vec<CurvePoint> {
    type Curve<'a> = (String, Box<dyn Fn(f64) -> f64 + 'a>);
    let mut curves: Vec<Curve> = vec![
        ("separating-line".into(), Box::new(|t| SEPARATRIX_SLOPE * t)),
        ("boutroux-boundary".into(), Box::new(|t| (SEPARATRIX_SLOPE - a.delta) * t)),
        ("hm-boundary".into(), Box::new(|t| SEPARATRIX_SLOPE * t - a.f2)),
    ];
    for j in 0..a.stokes_lines {
        let c = stokes_coefficient(j);
        curves.push((format!("stokes-line-{j}"), Box::new(move |t: f64| SEPARATRIX_SLOPE * t - c * t.ln())));
    }
    if let Some(f3) = a.f3 {
        curves.push(("f3-line".into(), Box::new(move |t: f64| SEPARATRIX_SLOPE * t - f3 * t.ln())));
    }
    let mut out = Vec::new();
    for (name, f) in &curves {
        for &t in a.t.0.iter().filter(|t| **t > 0.0) {
            let v = f(t);
            if v > 0.0 {
                out.push(CurvePoint { curve: name.clone(), t, v, kappa: v / t });
            }
        }
    }
    out
}

fn cmd_plotdata(a: PlotArgs) -> Result<u8, Failure> {
    if !(a.delta > 0.0 && a.delta < SEPARATRIX_SLOPE) {
        return Err(domain(format!("--delta must lie in (0, 2sqrt2/3), got {}", a.delta)));
    }
    let pts = diagram_curves(&a);
    let doc = match a.output.format {
        Format::Csv => {
            let f = |v: f64| format!("{v:.16e}");
            csv_document(
                &["curve", "t", "v", "kappa"],
                pts.iter().map(|p| vec![p.curve.clone(), f(p.t), f(p.v), f(p.kappa)]),
            )
        }
        Format::Json => json_document("points", &pts),
    };
    emit(&doc, a.output.out.as_deref())?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Det(a) => cmd_det(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Plotdata(a) => cmd_plotdata(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("pii-transitions: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
