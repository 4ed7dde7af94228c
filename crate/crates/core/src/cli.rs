//! Command-line front end.
//!
//! Exit codes: 0 success or pass, 1 failing verdict, 2 usage or input error,
//! 3 numerical error. Errors are printed to stderr as a one-line JSON object.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::band_solver::{
    compute_bands, eta_grid, h_convergence_study, read_band_csv, ConvergenceRow,
};
use crate::conformal::{polynomial_isometry_ratios, spectral_equivalence_check, ConformalMap};
use crate::disc_spectrum::DiscSpectrum;
use crate::error::{Error, Result};
use crate::floquet::parseval_check;
use crate::geometry::{build_cell_quadrature, build_disc_quadrature, CellGeometry};
use crate::io;
use crate::par::{self, Execution};
use crate::pipeline::{analyze_table, run_prescribed_spectrum, ReportDocument, RunConfig};
use crate::symbols::{synthesize_profile, MomentConvention, ProfileDocument, RadialProfile, TargetSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Floquet band spectra of periodic Bergman-Toeplitz operators.
#[derive(Debug, Parser)]
#[command(name = "bergman-bands", version)]
pub struct Cli {
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true, env = "BERGMAN_BAND_THREADS")]
    pub threads: Option<usize>,

    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a radial profile whose modes 1..K carry the targets.
    Synth(SynthArgs),
    /// Disc eigenvalues of a profile, as `n,lambda` CSV.
    DiscSpec(DiscSpecArgs),
    /// Band functions over the eta grid, as `eta,n,lambda` CSV.
    Bands(BandsArgs),
    /// Components, gaps and verdict from a band CSV.
    Report(ReportArgs),
    /// Parseval and round-trip residuals of the Floquet transform.
    FloquetCheck(FloquetCheckArgs),
    /// Fiber eigenvalues against the disc oracle along a list of widths.
    StudyH(StudyHArgs),
    /// Isometry and spectral invariance under disc automorphisms.
    ConformalCheck(ConformalCheckArgs),
    /// Full prescribed-spectrum run from a config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct ProfileSource {
    /// Comma-separated targets for modes 1..K.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "profile")]
    pub targets: Option<Vec<f64>>,
    /// Profile JSON written by `synth`.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = MomentConvention::Corrected)]
    pub convention: MomentConvention,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub targets: Vec<f64>,
    #[arg(long = "R0", alias = "r0", default_value_t = 0.3)]
    pub r0: f64,
    #[arg(long, default_value_t = MomentConvention::Corrected)]
    pub convention: MomentConvention,
    /// Output path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscSpecArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Number of modes listed, n = 0..N-1.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    /// Run config JSON; supplies targets, R0 and solver settings.
    #[arg(long)]
    pub config: PathBuf,
    /// Profile JSON overriding the targets of the config.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Ligament width; defaults to `h_initial` of the config.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, short, default_value = "bands.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub bands: PathBuf,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "")]
    pub targets: Vec<f64>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FloquetCheckArgs {
    /// Cells m = -M..M.
    #[arg(long = "M", default_value_t = 16)]
    pub m_half: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "R0", alias = "r0", default_value_t = 0.3)]
    pub r0: f64,
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct StudyHArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.02")]
    pub h_list: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
    /// Disc modes to track; defaults to 1..K.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<usize>>,
    #[arg(long = "R0", alias = "r0", default_value_t = 0.3)]
    pub r0: f64,
    #[arg(long = "K-modes", alias = "k-modes", default_value_t = crate::quasi_bergman::DEFAULT_MODES)]
    pub k_modes: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConformalCheckArgs {
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    #[arg(long, default_value_t = 10)]
    pub polys: usize,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override of `outputs.bands`.
    #[arg(long)]
    pub bands: Option<PathBuf>,
    /// Override of `outputs.report`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Override of `outputs.diagnostics`.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

/// Whether a library error is a bad input (exit 2) or a numerical failure
/// (exit 3).
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parameter(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Parameter(_) => "parameter",
        Error::IllConditioned { .. } => "ill_conditioned",
        Error::DegenerateBasis { .. } => "degenerate_basis",
        Error::Misaligned { .. } => "misaligned",
        Error::Mismatch => "mismatch",
        Error::NotHermitian(_) => "not_hermitian",
        Error::OffGrid(_) => "off_grid",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("--threads must be positive");
            return EXIT_USAGE;
        }
        par::init_threads(t);
    }
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match execute(&cli.command, exec) {
        Ok(code) => code,
        Err(err) => {
            eprintln!(
                "{}",
                json!({ "error": error_kind(&err), "message": err.to_string() })
            );
            exit_code_for(&err)
        }
    }
}

fn execute(cmd: &Command, exec: Execution) -> Result<i32> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::DiscSpec(a) => disc_spec(a),
        Command::Bands(a) => bands(a, exec),
        Command::Report(a) => report(a),
        Command::FloquetCheck(a) => floquet_check(a, exec),
        Command::StudyH(a) => study_h(a, exec),
        Command::ConformalCheck(a) => conformal_check(a),
        Command::Run(a) => run(a, exec),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let out = std::io::stdout();
    let mut lock = out.lock();
    serde_json::to_writer_pretty(&mut lock, value)?;
    writeln!(lock)?;
    Ok(())
}

fn load_profile(src: &ProfileSource) -> Result<(RadialProfile, MomentConvention)> {
    match (&src.targets, &src.profile) {
        (Some(t), None) => Ok((synthesize_profile(t, src.convention)?, src.convention)),
        (None, Some(p)) => {
            let doc: ProfileDocument = io::read_json(p)?;
            Ok((doc.profile(), doc.convention))
        }
        _ => Err(crate::error::param("give exactly one of --targets and --profile")),
    }
}

fn synth(a: &SynthArgs) -> Result<i32> {
    CellGeometry::new(a.r0, 0.1)?;
    let profile = synthesize_profile(&a.targets, a.convention)?;
    let mut doc = ProfileDocument::new(a.r0, &profile, a.convention);
    doc.targets = Some(a.targets.clone());
    match &a.out {
        Some(p) => io::write_json(p, &doc)?,
        None => print_json(&doc)?,
    }
    Ok(EXIT_PASS)
}

fn disc_spec(a: &DiscSpecArgs) -> Result<i32> {
    if a.n == 0 {
        return Err(crate::error::param("--n must be positive"));
    }
    let (profile, convention) = load_profile(&a.source)?;
    let spec = DiscSpectrum::from_profile(&profile, a.n, convention);
    io::with_output(a.out.as_deref(), |w| spec.write_csv(w))?;
    Ok(EXIT_PASS)
}

fn bands(a: &BandsArgs, exec: Execution) -> Result<i32> {
    let cfg = RunConfig::load(&a.config)?;
    let profile = match &a.profile {
        Some(p) => io::read_json::<ProfileDocument>(p)?.profile(),
        None => synthesize_profile(&cfg.targets, cfg.convention)?,
    };
    let cell = CellGeometry::new(cfg.r0, a.h.unwrap_or(cfg.h_initial))?;
    let etas = eta_grid(cfg.eta_points)?;
    let b = compute_bands(&cell, &profile, &etas, &cfg.band_config(exec))?;
    let mut w = io::create(&a.out)?;
    b.write_csv(&mut w)?;
    w.flush()?;
    Ok(EXIT_PASS)
}

fn report(a: &ReportArgs) -> Result<i32> {
    let table = read_band_csv(io::open(&a.bands)?)?;
    let spec = TargetSpec::new(a.targets.clone(), a.epsilon, a.delta)?;
    let (_, rep) = analyze_table(&table, &spec);
    let doc = ReportDocument {
        config: json!({
            "bands": a.bands,
            "targets": a.targets,
            "epsilon": a.epsilon,
            "delta": a.delta,
        }),
        chosen_h: None,
        report: rep,
    };
    match &a.out {
        Some(p) => io::write_json(p, &doc)?,
        None => print_json(&doc)?,
    }
    Ok(if doc.report.verdict.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn floquet_check(a: &FloquetCheckArgs, exec: Execution) -> Result<i32> {
    let cell = CellGeometry::new(a.r0, a.h)?;
    let quad = build_cell_quadrature(&cell, 8, 16, 6)?;
    let r = parseval_check(a.m_half, a.trials, a.seed, &quad, exec)?;
    let pass = r.parseval <= a.tolerance && r.round_trip <= a.tolerance;
    print_json(&json!({
        "config": { "M": a.m_half, "trials": a.trials, "seed": a.seed, "R0": a.r0, "h": a.h, "tolerance": a.tolerance },
        "parseval_residual": r.parseval,
        "round_trip_residual": r.round_trip,
        "verdict": if pass { "pass" } else { "fail" },
    }))?;
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn study_h(a: &StudyHArgs, exec: Execution) -> Result<i32> {
    let (profile, convention) = load_profile(&a.source)?;
    let modes: Vec<usize> = a
        .modes
        .clone()
        .unwrap_or_else(|| (1..=profile.modes()).collect());
    let cfg = crate::band_solver::BandConfig {
        k_modes: a.k_modes,
        execution: exec,
        ..Default::default()
    };
    let rows = h_convergence_study(&profile, a.r0, &a.h_list, a.eta, &modes, &cfg, convention)?;
    io::with_output(a.out.as_deref(), |w| write_study_csv(&rows, w))?;
    Ok(EXIT_PASS)
}

/// CSV with header `h,n,disc,band,error`.
pub fn write_study_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "n", "disc", "band", "error"])?;
    for r in rows {
        for i in 0..r.modes.len() {
            w.write_record([
                r.h.to_string(),
                r.modes[i].to_string(),
                r.disc[i].to_string(),
                r.band[i].to_string(),
                r.error[i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn conformal_check(a: &ConformalCheckArgs) -> Result<i32> {
    let map = ConformalMap::moebius(Complex64::new(a.alpha, a.alpha_im))?;
    let quad = Arc::new(build_disc_quadrature(1.0, 48, 96)?);
    let ratios = polynomial_isometry_ratios(map, a.polys, a.degree, a.seed, &quad)?;
    let worst = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let spectral = spectral_equivalence_check(map, |z| 1.0 - z.norm_sqr(), 40, 6, &quad)?;
    let pass = worst <= a.tolerance && spectral.hausdorff <= a.tolerance;
    print_json(&json!({
        "config": { "alpha": [a.alpha, a.alpha_im], "polys": a.polys, "degree": a.degree, "seed": a.seed, "tolerance": a.tolerance },
        "ratios": ratios,
        "max_ratio_defect": worst,
        "spectral": spectral,
        "verdict": if pass { "pass" } else { "fail" },
    }))?;
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn run(a: &RunArgs, exec: Execution) -> Result<i32> {
    let cfg = RunConfig::load(&a.config)?;
    let mut outputs = cfg.outputs.clone();
    let base = a.config.parent().unwrap_or(Path::new(""));
    let resolve = |p: &Option<PathBuf>, over: &Option<PathBuf>| {
        over.clone().or_else(|| p.as_ref().map(|p| base.join(p)))
    };
    outputs.bands = resolve(&outputs.bands, &a.bands);
    outputs.report = resolve(&outputs.report, &a.report);
    outputs.diagnostics = resolve(&outputs.diagnostics, &a.diagnostics);
    let result = run_prescribed_spectrum(&cfg, exec)?;
    result.write_outputs(&outputs)?;
    print_json(&json!({
        "verdict": result.verdict,
        "chosen_h": result.chosen_h,
        "targets": result.spectrum_report.targets,
        "delta": result.spectrum_report.delta,
        "delta_achieved": result.spectrum_report.delta_achieved,
    }))?;
    Ok(if result.verdict.passed() { EXIT_PASS } else { EXIT_FAIL })
}
