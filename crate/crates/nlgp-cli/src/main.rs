//! Command-line driver: reproducible soliton solves, hypothesis checks,
//! nonlocal-to-local sweeps, thresholds, and oscillation scans with
//! deterministic CSV/JSON outputs.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 solver non-convergence
//! (reports are still written).

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nlgp::analysis::{
    self, black_local_limit_sweep, gray_local_limit_sweep, oscillation_scan, Profile,
    ThresholdReport,
};
use nlgp::black;
use nlgp::gray::{self, explicit_local_eta, GrayProfile};
use nlgp::kernel::{Family, Kernel, KernelSpec, SONIC_SPEED};
use nlgp::solver::{Method, SolveReport, SolverOptions};
use nlgp::spectral::{Field, Grid};

#[derive(Parser)]
#[command(
    name = "nlgp",
    version,
    about = "Gray and black dark solitons of the 1-D nonlocal Gross-Pitaevskii equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a gray soliton at subsonic speed 0 < c < sqrt(2)
    SolveGray(SolveArgs),
    /// Solve for a black soliton (c = 0) by odd energy minimization
    SolveBlack(SolveArgs),
    /// Hypothesis certificates, a-priori bounds and oscillation predicates
    Check(CheckArgs),
    /// Nonlocal-to-local sweep over a list of kernel scales
    Sweep(SweepArgs),
    /// Existence/oscillation thresholds for a kernel family
    Thresholds(CheckArgs),
    /// Oscillation scan of a stored profile CSV
    Oscillation(OscillationArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Contact,
    Gaussian,
    Nematic,
    Vanderwaals,
    Rectangular,
    #[value(alias = "three_delta")]
    ThreeDelta,
    Custom,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Contact => Family::Contact,
            FamilyArg::Gaussian => Family::Gaussian,
            FamilyArg::Nematic => Family::Nematic,
            FamilyArg::Vanderwaals => Family::Vanderwaals,
            FamilyArg::Rectangular => Family::Rectangular,
            FamilyArg::ThreeDelta => Family::ThreeDelta,
            FamilyArg::Custom => Family::Custom,
        }
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Kernel family
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Nonlocality scale λ (negative values allowed where the family admits them)
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Decay rate β (vanderwaals only)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Box half-length L (domain [-L, L])
    #[arg(long)]
    box_length: Option<f64>,
    /// Number of grid points (power of two, at least 64)
    #[arg(long)]
    points: Option<usize>,
    /// Output file stem
    #[arg(long)]
    output: Option<String>,
    /// JSON config file supplying any of the flags (explicit flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Traveling-wave speed c
    #[arg(long)]
    speed: Option<f64>,
    /// newton (with fixed-point fallback) or fixed-point
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Residual sup-norm target
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Fixed-point damping in (0, 1]
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Args, Clone)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    speed: Option<f64>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Speed c; 0 runs a black-soliton sweep
    #[arg(long)]
    speed: Option<f64>,
    /// Comma-separated kernel scales, e.g. 0.2,0.1,0.05
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Args, Clone)]
struct OscillationArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Profile CSV produced by solve-gray/solve-black
    #[arg(long)]
    profile_file: Option<PathBuf>,
    #[arg(long)]
    speed: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Newton,
    FixedPoint,
}

/// Config-file schema: every flag, all optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    family: Option<String>,
    lambda: Option<f64>,
    beta: Option<f64>,
    speed: Option<f64>,
    box_length: Option<f64>,
    points: Option<usize>,
    method: Option<String>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    damping: Option<f64>,
    lambdas: Option<Vec<f64>>,
    profile_file: Option<String>,
    output: Option<String>,
}

/// Fully resolved run configuration; echoed verbatim into the manifest.
#[derive(Clone, Debug, Serialize)]
struct ResolvedConfig {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed: Option<f64>,
    box_length: f64,
    points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    tol: f64,
    max_iter: usize,
    damping: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile_file: Option<String>,
    output: String,
}

enum CliError {
    Invalid(String),
    Solver(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(format!("i/o failure: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SolveGray(args) => solve_gray_cmd(args),
        Command::SolveBlack(args) => solve_black_cmd(args),
        Command::Check(args) => check_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Thresholds(args) => thresholds_cmd(args),
        Command::Oscillation(args) => oscillation_cmd(args),
    }
}

fn load_config(path: &Option<PathBuf>, command: &str) -> Result<FileConfig, CliError> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: FileConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", path.display())))?;
    if let Some(cmd) = &cfg.command {
        if cmd != command {
            return Err(CliError::Invalid(format!(
                "config file is for command '{cmd}', but '{command}' was invoked"
            )));
        }
    }
    Ok(cfg)
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    match name {
        "contact" => Ok(Family::Contact),
        "gaussian" => Ok(Family::Gaussian),
        "nematic" => Ok(Family::Nematic),
        "vanderwaals" => Ok(Family::Vanderwaals),
        "rectangular" => Ok(Family::Rectangular),
        "three_delta" | "three-delta" => Ok(Family::ThreeDelta),
        "custom" => Ok(Family::Custom),
        other => Err(CliError::Invalid(format!("unknown kernel family '{other}'"))),
    }
}

fn parse_method(name: &str) -> Result<Method, CliError> {
    match name {
        "newton" => Ok(Method::Newton),
        "fixed-point" | "fixed_point" => Ok(Method::FixedPoint),
        other => Err(CliError::Invalid(format!("unknown method '{other}'"))),
    }
}

struct Resolver {
    cfg: FileConfig,
}

impl Resolver {
    fn family(&self, flag: Option<FamilyArg>) -> Result<Option<Family>, CliError> {
        match (flag, &self.cfg.family) {
            (Some(f), _) => Ok(Some(f.into())),
            (None, Some(name)) => Ok(Some(parse_family(name)?)),
            (None, None) => Ok(None),
        }
    }

    fn method(&self, flag: Option<MethodArg>) -> Result<Option<Method>, CliError> {
        match (flag, &self.cfg.method) {
            (Some(MethodArg::Newton), _) => Ok(Some(Method::Newton)),
            (Some(MethodArg::FixedPoint), _) => Ok(Some(Method::FixedPoint)),
            (None, Some(name)) => Ok(Some(parse_method(name)?)),
            (None, None) => Ok(None),
        }
    }
}

fn kernel_spec(
    family: Option<Family>,
    lambda: Option<f64>,
    beta: Option<f64>,
) -> Result<KernelSpec, CliError> {
    let family = family.ok_or_else(|| CliError::Invalid("missing --family".into()))?;
    Ok(KernelSpec { family, lambda, beta })
}

fn build_kernel(spec: &KernelSpec) -> Result<Kernel, CliError> {
    spec.build().map_err(|e| CliError::Invalid(e.to_string()))
}

fn make_grid(box_length: f64, points: usize) -> Result<Grid, CliError> {
    Grid::new(box_length, points).map_err(|e| CliError::Invalid(e.to_string()))
}

fn validate_solver(tol: f64, max_iter: usize, damping: f64) -> Result<(), CliError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(CliError::Invalid(format!("tol must be positive (got {tol})")));
    }
    if max_iter == 0 {
        return Err(CliError::Invalid("max_iter must be at least 1".into()));
    }
    if !damping.is_finite() || damping <= 0.0 || damping > 1.0 {
        return Err(CliError::Invalid(format!("damping must lie in (0, 1] (got {damping})")));
    }
    Ok(())
}

fn write_text(path: &str, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Invalid(format!("serialization failure: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

fn write_manifest(stem: &str, config: &ResolvedConfig) -> Result<(), CliError> {
    write_json(&format!("{stem}.manifest.json"), config)
}

fn profile_csv(
    grid: Grid,
    eta: &Field,
    theta: &Field,
    u_re: &Field,
    u_im: &Field,
) -> String {
    let mut out = String::with_capacity(grid.n() * 80);
    out.push_str("x,eta,theta,u_re,u_im\n");
    for j in 0..grid.n() {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            grid.node(j),
            eta.values()[j],
            theta.values()[j],
            u_re.values()[j],
            u_im.values()[j]
        );
    }
    out
}

#[derive(Serialize)]
struct SolveOutput {
    report: SolveReport,
    diagnostics: analysis::DiagnosticsReport,
}

#[derive(Serialize)]
struct FailedSolveOutput {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<SolveReport>,
}

fn solve_gray_cmd(args: SolveArgs) -> Result<(), CliError> {
    let resolver = Resolver { cfg: load_config(&args.common.config, "solve-gray")? };
    let cfg = &resolver.cfg;
    let family = resolver.family(args.common.family)?;
    let lambda = args.common.lambda.or(cfg.lambda);
    let beta = args.common.beta.or(cfg.beta);
    let speed = args.speed.or(cfg.speed);
    let box_length = args.common.box_length.or(cfg.box_length).unwrap_or(40.0);
    let points = args.common.points.or(cfg.points).unwrap_or(4096);
    let method = resolver.method(args.method)?.unwrap_or(Method::Newton);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-9);
    let max_iter = args.max_iter.or(cfg.max_iter).unwrap_or(500);
    let damping = args.damping.or(cfg.damping).unwrap_or(0.5);
    let output = args
        .common
        .output
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "solve-gray".to_string());

    let c = speed.ok_or_else(|| CliError::Invalid("missing --speed".into()))?;
    if !(c > 0.0 && c < SONIC_SPEED) {
        return Err(CliError::Invalid(format!(
            "solve-gray needs 0 < speed < sqrt(2) ~ 1.41421 (got {c})"
        )));
    }
    validate_solver(tol, max_iter, damping)?;
    let spec = kernel_spec(family, lambda, beta)?;
    let kernel = build_kernel(&spec)?;
    let grid = make_grid(box_length, points)?;

    let resolved = ResolvedConfig {
        command: "solve-gray".into(),
        family,
        lambda,
        beta,
        speed,
        box_length,
        points,
        method: Some(method),
        tol,
        max_iter,
        damping,
        lambdas: None,
        profile_file: None,
        output: output.clone(),
    };
    write_manifest(&output, &resolved)?;

    if !kernel.atoms_on_grid(&grid) {
        eprintln!(
            "warning: kernel atom positions are not multiples of the grid spacing; \
             convolution shifts use linear interpolation"
        );
    }

    let opts = SolverOptions { method, damping, tol, max_iter };
    let init = explicit_local_eta(c, grid);
    let outcome = match method {
        Method::Newton => gray::solve_auto(&kernel, c, &init, &opts),
        Method::FixedPoint => gray::solve_fixed_point(&kernel, c, &init, &opts),
    };
    match outcome {
        Ok((profile, report)) => {
            finish_gray(&output, &kernel, &profile, report)?;
            println!(
                "solve-gray: converged in {} iterations, residual {:e}",
                report.iterations, report.residual_sup
            );
            Ok(())
        }
        Err(e) => {
            let failed = FailedSolveOutput { error: e.to_string(), report: e.report() };
            write_json(&format!("{output}.report.json"), &failed)?;
            Err(CliError::Solver(e.to_string()))
        }
    }
}

fn finish_gray(
    stem: &str,
    kernel: &Kernel,
    profile: &GrayProfile,
    report: SolveReport,
) -> Result<(), CliError> {
    let grid = profile.grid();
    let boundary = profile.eta().values()[0].abs();
    if boundary > 1e-8 {
        eprintln!(
            "warning: eta(-L) = {boundary:e} > 1e-8; consider a larger --box-length \
             (the profile has not decayed at the boundary)"
        );
    }
    let csv = profile_csv(grid, profile.eta(), profile.theta(), profile.u_re(), profile.u_im());
    write_text(&format!("{stem}.profile.csv"), &csv)?;
    let diagnostics = analysis::conserved_quantities(Profile::Gray(profile), kernel);
    write_json(&format!("{stem}.report.json"), &SolveOutput { report, diagnostics })?;
    Ok(())
}

fn solve_black_cmd(args: SolveArgs) -> Result<(), CliError> {
    let resolver = Resolver { cfg: load_config(&args.common.config, "solve-black")? };
    let cfg = &resolver.cfg;
    let family = resolver.family(args.common.family)?;
    let lambda = args.common.lambda.or(cfg.lambda);
    let beta = args.common.beta.or(cfg.beta);
    let speed = args.speed.or(cfg.speed).unwrap_or(0.0);
    let box_length = args.common.box_length.or(cfg.box_length).unwrap_or(40.0);
    let points = args.common.points.or(cfg.points).unwrap_or(4096);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-9);
    let max_iter = args.max_iter.or(cfg.max_iter).unwrap_or(8000);
    let damping = args.damping.or(cfg.damping).unwrap_or(0.5);
    let output = args
        .common
        .output
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "solve-black".to_string());

    if speed != 0.0 {
        return Err(CliError::Invalid(format!(
            "solve-black computes static (c = 0) solitons; got speed {speed}"
        )));
    }
    validate_solver(tol, max_iter, damping)?;
    let spec = kernel_spec(family, lambda, beta)?;
    let kernel = build_kernel(&spec)?;
    let grid = make_grid(box_length, points)?;

    let resolved = ResolvedConfig {
        command: "solve-black".into(),
        family,
        lambda,
        beta,
        speed: Some(0.0),
        box_length,
        points,
        method: None,
        tol,
        max_iter,
        damping,
        lambdas: None,
        profile_file: None,
        output: output.clone(),
    };
    write_manifest(&output, &resolved)?;

    let hyp = kernel.check_hypotheses(0.0);
    if !hyp.flags.h5 {
        eprintln!(
            "warning: the kernel violates the lower Fourier bound needed by the \
             minimization theory; the solver runs anyway and reports what it finds"
        );
    }

    let opts = SolverOptions { method: Method::Newton, damping, tol, max_iter };
    match black::solve_black(&kernel, grid, &opts) {
        Ok((profile, report)) => {
            let zeros = Field::zeros(grid);
            let csv = profile_csv(grid, profile.eta(), &zeros, profile.u(), &zeros);
            write_text(&format!("{output}.profile.csv"), &csv)?;
            let diagnostics = analysis::conserved_quantities(Profile::Black(&profile), &kernel);
            write_json(&format!("{output}.report.json"), &SolveOutput { report, diagnostics })?;
            println!(
                "solve-black: converged in {} iterations, residual {:e}",
                report.iterations, report.residual_sup
            );
            Ok(())
        }
        Err(e) => {
            let failed = FailedSolveOutput { error: e.to_string(), report: e.report() };
            write_json(&format!("{output}.report.json"), &failed)?;
            Err(CliError::Solver(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(flatten)]
    hypotheses: nlgp::HypothesisReport,
    apriori_m_mu: Option<f64>,
    apriori_m_tau_sigma: Option<f64>,
    oscillation_strict: Option<bool>,
    oscillation_strong: Option<bool>,
    thresholds: ThresholdReport,
}

fn check_cmd(args: CheckArgs) -> Result<(), CliError> {
    let resolver = Resolver { cfg: load_config(&args.common.config, "check")? };
    let cfg = &resolver.cfg;
    let family = resolver.family(args.common.family)?;
    let lambda = args.common.lambda.or(cfg.lambda);
    let beta = args.common.beta.or(cfg.beta);
    let speed = args.speed.or(cfg.speed).unwrap_or(0.0);
    let output = args
        .common
        .output
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "check".to_string());
    if !(0.0..SONIC_SPEED).contains(&speed) {
        return Err(CliError::Invalid(format!(
            "check needs 0 <= speed < sqrt(2) (got {speed})"
        )));
    }
    let spec = kernel_spec(family, lambda, beta)?;
    let kernel = build_kernel(&spec)?;

    let resolved = ResolvedConfig {
        command: "check".into(),
        family,
        lambda,
        beta,
        speed: Some(speed),
        box_length: 40.0,
        points: 4096,
        method: None,
        tol: 1e-9,
        max_iter: 500,
        damping: 0.5,
        lambdas: None,
        profile_file: None,
        output: output.clone(),
    };
    write_manifest(&output, &resolved)?;

    let hypotheses = kernel.check_hypotheses(speed);
    let (m_mu, m_ts) = analysis::apriori_bounds(&kernel, speed).unwrap_or_default();
    let (strict, strong) = match analysis::oscillation_predicate(&kernel, speed) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(_) => (None, None),
    };
    let report = CheckReport {
        hypotheses,
        apriori_m_mu: m_mu,
        apriori_m_tau_sigma: m_ts,
        oscillation_strict: strict,
        oscillation_strong: strong,
        thresholds: analysis::thresholds(&spec, speed),
    };
    write_json(&format!("{output}.report.json"), &report)?;
    println!("check: report written to {output}.report.json");
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    lambda: f64,
    converged: bool,
    iterations: usize,
    residual_sup: f64,
    distance_eta: f64,
    distance_u: f64,
    energy: f64,
}

fn sweep_cmd(args: SweepArgs) -> Result<(), CliError> {
    let resolver = Resolver { cfg: load_config(&args.common.config, "sweep")? };
    let cfg = &resolver.cfg;
    let family = resolver.family(args.common.family)?;
    let lambda = args.common.lambda.or(cfg.lambda);
    let beta = args.common.beta.or(cfg.beta);
    let speed = args.speed.or(cfg.speed).unwrap_or(0.5);
    let box_length = args.common.box_length.or(cfg.box_length).unwrap_or(40.0);
    let points = args.common.points.or(cfg.points).unwrap_or(4096);
    let method = resolver.method(args.method)?.unwrap_or(Method::Newton);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-9);
    let max_iter = args.max_iter.or(cfg.max_iter).unwrap_or(5000);
    let damping = args.damping.or(cfg.damping).unwrap_or(0.5);
    let lambdas = args
        .lambdas
        .or_else(|| cfg.lambdas.clone())
        .ok_or_else(|| CliError::Invalid("missing --lambdas".into()))?;
    let output = args
        .common
        .output
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "sweep".to_string());

    if lambdas.is_empty() {
        return Err(CliError::Invalid("empty --lambdas list".into()));
    }
    if !(0.0..SONIC_SPEED).contains(&speed) {
        return Err(CliError::Invalid(format!(
            "sweep needs 0 <= speed < sqrt(2) (got {speed}); 0 runs a black sweep"
        )));
    }
    validate_solver(tol, max_iter, damping)?;
    let spec = kernel_spec(family, lambda.or(Some(1.0)), beta)?;
    for &l in &lambdas {
        build_kernel(&spec.with_lambda(l))?;
    }
    let grid = make_grid(box_length, points)?;

    let resolved = ResolvedConfig {
        command: "sweep".into(),
        family,
        lambda,
        beta,
        speed: Some(speed),
        box_length,
        points,
        method: Some(method),
        tol,
        max_iter,
        damping,
        lambdas: Some(lambdas.clone()),
        profile_file: None,
        output: output.clone(),
    };
    write_manifest(&output, &resolved)?;

    let opts = SolverOptions { method, damping, tol, max_iter };
    let rows: Vec<Result<SweepRow, String>> = if speed > 0.0 {
        // independent gray solves fan out across the worker pool
        lambdas
            .par_iter()
            .map(|&l| {
                let kernel = spec.with_lambda(l).build().map_err(|e| e.to_string())?;
                let init = explicit_local_eta(speed, grid);
                let (profile, report) = match method {
                    Method::Newton => gray::solve_auto(&kernel, speed, &init, &opts),
                    Method::FixedPoint => gray::solve_fixed_point(&kernel, speed, &init, &opts),
                }
                .map_err(|e| e.to_string())?;
                let entry = gray_local_limit_sweep(speed, &[l], &[&profile])
                    .map_err(|e| e.to_string())?
                    .remove(0);
                let diag = analysis::conserved_quantities(Profile::Gray(&profile), &kernel);
                Ok(SweepRow {
                    lambda: l,
                    converged: report.converged,
                    iterations: report.iterations,
                    residual_sup: report.residual_sup,
                    distance_eta: entry.distance_eta,
                    distance_u: entry.distance_u,
                    energy: diag.energy,
                })
            })
            .collect()
    } else {
        lambdas
            .par_iter()
            .map(|&l| {
                let kernel = spec.with_lambda(l).build().map_err(|e| e.to_string())?;
                let (profile, report) =
                    black::solve_black(&kernel, grid, &opts).map_err(|e| e.to_string())?;
                let entry = black_local_limit_sweep(&[l], &[&profile])
                    .map_err(|e| e.to_string())?
                    .remove(0);
                let diag = analysis::conserved_quantities(Profile::Black(&profile), &kernel);
                Ok(SweepRow {
                    lambda: l,
                    converged: report.converged,
                    iterations: report.iterations,
                    residual_sup: report.residual_sup,
                    distance_eta: entry.distance_eta,
                    distance_u: entry.distance_u,
                    energy: diag.energy,
                })
            })
            .collect()
    };

    let mut csv = String::from("lambda,distance_eta,distance_u,energy,residual\n");
    let mut report_rows = Vec::new();
    let mut failures = Vec::new();
    for (l, row) in lambdas.iter().zip(rows) {
        match row {
            Ok(r) => {
                let _ = writeln!(
                    csv,
                    "{:e},{:e},{:e},{:e},{:e}",
                    r.lambda, r.distance_eta, r.distance_u, r.energy, r.residual_sup
                );
                report_rows.push(r);
            }
            Err(e) => failures.push(format!("lambda = {l}: {e}")),
        }
    }
    write_text(&format!("{output}.sweep.csv"), &csv)?;
    write_json(&format!("{output}.report.json"), &report_rows)?;
    if failures.is_empty() {
        println!("sweep: {} scales written to {output}.sweep.csv", report_rows.len());
        Ok(())
    } else {
        Err(CliError::Solver(failures.join("; ")))
    }
}

fn thresholds_cmd(args: CheckArgs) -> Result<(), CliError> {
    let resolver = Resolver { cfg: load_config(&args.common.config, "thresholds")? };
    let cfg = &resolver.cfg;
    let family = resolver.family(args.common.family)?;
    let lambda = args.common.lambda.or(cfg.lambda);
    let beta = args.common.beta.or(cfg.beta);
    let speed = args.speed.or(cfg.speed).unwrap_or(0.0);
    let output = args
        .common
        .output
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "thresholds".to_string());
    if !(0.0..SONIC_SPEED).contains(&speed) {
        return Err(CliError::Invalid(format!(
            "thresholds needs 0 <= speed < sqrt(2) (got {speed})"
        )));
    }
    let spec = kernel_spec(family, lambda, beta)?;

    let resolved = ResolvedConfig {
        command: "thresholds".into(),
        family,
        lambda,
        beta,
        speed: Some(speed),
        box_length: 40.0,
        points: 4096,
        method: None,
        tol: 1e-9,
        max_iter: 500,
        damping: 0.5,
        lambdas: None,
        profile_file: None,
        output: output.clone(),
    };
    write_manifest(&output, &resolved)?;

    let report = analysis::thresholds(&spec, speed);
    write_json(&format!("{output}.report.json"), &report)?;
    println!("thresholds: report written to {output}.report.json");
    Ok(())
}

fn oscillation_cmd(args: OscillationArgs) -> Result<(), CliError> {
    let resolver = Resolver { cfg: load_config(&args.common.config, "oscillation")? };
    let cfg = &resolver.cfg;
    let family = resolver.family(args.common.family)?;
    let lambda = args.common.lambda.or(cfg.lambda);
    let beta = args.common.beta.or(cfg.beta);
    let speed = args.speed.or(cfg.speed).unwrap_or(0.0);
    let profile_file = args
        .profile_file
        .or_else(|| cfg.profile_file.clone().map(PathBuf::from))
        .ok_or_else(|| CliError::Invalid("missing --profile-file".into()))?;
    let output = args
        .common
        .output
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "oscillation".to_string());

    let eta = read_profile_eta(&profile_file)?;
    let spec = family.map(|f| KernelSpec { family: f, lambda, beta });

    let resolved = ResolvedConfig {
        command: "oscillation".into(),
        family,
        lambda,
        beta,
        speed: Some(speed),
        box_length: eta.grid().half_length(),
        points: eta.grid().n(),
        method: None,
        tol: 1e-9,
        max_iter: 500,
        damping: 0.5,
        lambdas: None,
        profile_file: Some(profile_file.display().to_string()),
        output: output.clone(),
    };
    write_manifest(&output, &resolved)?;

    let report = oscillation_scan(&eta, spec.as_ref().map(|s| (s, speed)));
    write_json(&format!("{output}.report.json"), &report)?;
    println!(
        "oscillation: {} sign changes, {} triples; report written to {output}.report.json",
        report.sign_changes_of_eta_prime,
        report.oscillation_triples.len()
    );
    Ok(())
}

fn read_profile_eta(path: &PathBuf) -> Result<Field, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut etas = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if !line.starts_with("x,eta") {
                return Err(CliError::Invalid(format!(
                    "{}: expected a profile CSV with header 'x,eta,...'",
                    path.display()
                )));
            }
            continue;
        }
        let mut cols = line.split(',');
        let x: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Invalid(format!("{}: bad row {i}", path.display())))?;
        let eta: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Invalid(format!("{}: bad row {i}", path.display())))?;
        xs.push(x);
        etas.push(eta);
    }
    let n = xs.len();
    if n < 64 || !n.is_power_of_two() {
        return Err(CliError::Invalid(format!(
            "{}: profile needs a power-of-two number of rows, at least 64 (got {n})",
            path.display()
        )));
    }
    let half_length = -xs[0];
    let grid = make_grid(half_length, n)?;
    for (j, &x) in xs.iter().enumerate() {
        if (x - grid.node(j)).abs() > 1e-9 * half_length.max(1.0) {
            return Err(CliError::Invalid(format!(
                "{}: x column is not a uniform grid on [-L, L)",
                path.display()
            )));
        }
    }
    Field::new(grid, etas).map_err(|e| CliError::Invalid(e.to_string()))
}
