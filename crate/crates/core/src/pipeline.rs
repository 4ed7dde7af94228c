//! End-to-end prescribed-spectrum runs: targets, profile, gap parameters,
//! then an `h`-halving loop of band computations until the report passes.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::band_solver::{
    compute_bands, default_merge_tol, essential_spectrum, eta_grid, fiber_quadrature, gap_report,
    solve_fiber, BandConfig, BandStructure, BandTable, SpectrumOptions, SpectrumReport, Verdict,
    DEFAULT_ETA_POINTS, DEFAULT_KEEP,
};
use crate::disc_spectrum::{spectral_gap, DiscSpectrum, DEFAULT_KEPT};
use crate::error::{param, Result};
use crate::geometry::{CellGeometry, QuadOrders};
use crate::io;
use crate::par::Execution;
use crate::quasi_bergman::{DEFAULT_CUTOFF, DEFAULT_MODES};
use crate::symbols::{gram_condition, synthesize_profile, MomentConvention, RadialProfile, TargetSpec};

/// Zero-cluster threshold used when the separation radius is zero.
const MIN_ZERO_THRESHOLD: f64 = 1e-10;

/// Output locations; a missing entry means the file is not written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<PathBuf>,
}

/// Run configuration; the JSON keys are the field names below, with `R0`,
/// `K_modes` and `N_keep` capitalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub targets: Vec<f64>,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_override: Option<f64>,
    #[serde(rename = "R0", default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_eta_points")]
    pub eta_points: usize,
    #[serde(rename = "K_modes", default = "default_modes")]
    pub k_modes: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_h_initial")]
    pub h_initial: f64,
    #[serde(default = "default_h_min")]
    pub h_min: f64,
    #[serde(rename = "N_keep", default = "default_keep")]
    pub n_keep: usize,
    #[serde(default)]
    pub convention: MomentConvention,
    #[serde(default)]
    pub orders: QuadOrders,
    #[serde(default)]
    pub outputs: OutputPaths,
}

fn default_r0() -> f64 {
    0.3
}
fn default_eta_points() -> usize {
    DEFAULT_ETA_POINTS
}
fn default_modes() -> usize {
    DEFAULT_MODES
}
fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}
fn default_h_initial() -> f64 {
    0.1
}
fn default_h_min() -> f64 {
    1e-3
}
fn default_keep() -> usize {
    DEFAULT_KEEP
}

impl RunConfig {
    /// Defaults for everything but the targets and `epsilon`.
    pub fn new(targets: Vec<f64>, epsilon: f64) -> Self {
        Self {
            targets,
            epsilon,
            delta_override: None,
            r0: default_r0(),
            eta_points: default_eta_points(),
            k_modes: default_modes(),
            cutoff: default_cutoff(),
            h_initial: default_h_initial(),
            h_min: default_h_min(),
            n_keep: default_keep(),
            convention: MomentConvention::default(),
            orders: QuadOrders::default(),
            outputs: OutputPaths::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = io::read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(param(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if let Some(d) = self.delta_override {
            if !(d >= 0.0) {
                return Err(param(format!("delta_override = {d} must be non-negative")));
            }
        }
        if !(self.r0 > 0.25 && self.r0 < 0.5) {
            return Err(param(format!("R0 = {} must lie in (1/4, 1/2)", self.r0)));
        }
        if self.eta_points < 3 || self.eta_points % 2 == 0 {
            return Err(param(format!(
                "eta_points = {} must be odd and at least 3",
                self.eta_points
            )));
        }
        if !(self.h_initial > 0.0 && self.h_initial <= 0.1) {
            return Err(param(format!("h_initial = {} must lie in (0, 0.1]", self.h_initial)));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_initial) {
            return Err(param(format!(
                "h_min = {} must lie in (0, h_initial]",
                self.h_min
            )));
        }
        if self.k_modes == 0 || self.n_keep == 0 {
            return Err(param("K_modes and N_keep must be positive"));
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return Err(param(format!("cutoff = {} must lie in (0, 1)", self.cutoff)));
        }
        Ok(())
    }

    pub fn band_config(&self, execution: Execution) -> BandConfig {
        BandConfig {
            k_modes: self.k_modes,
            cutoff: self.cutoff,
            n_keep: self.n_keep,
            orders: self.orders,
            execution,
        }
    }
}

/// Gap parameters derived from the disc spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapParameters {
    /// Number of leading eigenvalues (by modulus) covering all target modes.
    #[serde(rename = "N")]
    pub n: usize,
    /// `|lambda_N| - |lambda_{N+1}|`.
    pub gap: f64,
    pub delta: f64,
    pub delta_overridden: bool,
}

/// `N` as the largest modulus rank among the target modes `1..=K`, and
/// `delta = gap / 4` unless overridden.
pub fn gap_parameters(
    disc: &DiscSpectrum,
    modes: usize,
    delta_override: Option<f64>,
) -> Result<GapParameters> {
    if modes == 0 {
        return Ok(GapParameters {
            n: 0,
            gap: 0.0,
            delta: delta_override.unwrap_or(0.0),
            delta_overridden: delta_override.is_some(),
        });
    }
    let n = (1..=modes)
        .map(|m| disc.rank_of_mode(m).ok_or_else(|| param(format!("mode {m} not in the disc spectrum"))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let gap = spectral_gap(disc, n)?;
    Ok(GapParameters {
        n,
        gap,
        delta: delta_override.unwrap_or(gap.max(0.0) / 4.0),
        delta_overridden: delta_override.is_some(),
    })
}

/// One pass of the `h` loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HIteration {
    pub h: f64,
    pub verdict: Verdict,
    /// Achieved distance per target, in target order.
    pub target_distances: Vec<f64>,
    pub delta_achieved: Option<f64>,
    pub components: usize,
    pub merge_tol: f64,
    pub min_dim_eff: usize,
    pub max_dim_eff: usize,
    pub max_hermiticity: f64,
    pub max_spectral_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub gram_condition: f64,
    pub profile_sup_norm: f64,
    pub gap: GapParameters,
    pub zero_threshold: f64,
    pub history: Vec<HIteration>,
    /// `dim_eff` per grid point at the final `h`.
    pub dim_eff: Vec<usize>,
    /// Largest change of the kept eigenvalues at `eta = 0` when `K_modes`
    /// grows by 2, at the final `h`.
    pub k_refinement_delta: f64,
    /// Largest modulus of the last kept band; a bound on what truncation hides.
    pub tail_modulus: f64,
    /// Whether per-target distances did not increase over the last two
    /// iterations (`None` with fewer than two iterations).
    pub monotone_tail: Option<bool>,
    pub hermiticity_ok: bool,
    pub spectral_radius_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: RunConfig,
    pub profile: RadialProfile,
    pub disc_spectrum: DiscSpectrum,
    /// `h` of the last iteration; the passing one when the verdict is pass.
    pub chosen_h: f64,
    pub band_structure: BandStructure,
    pub spectrum_report: SpectrumReport,
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

/// Components and report for a band table at a given separation radius.
pub fn analyze_table(table: &BandTable, spec: &TargetSpec) -> (SpectrumOptions, SpectrumReport) {
    let zero_threshold = if spec.delta > 0.0 {
        spec.delta / 2.0
    } else {
        MIN_ZERO_THRESHOLD
    };
    let opts = SpectrumOptions {
        merge_tol: default_merge_tol(table, zero_threshold),
        zero_threshold,
    };
    let components = essential_spectrum(table, &opts);
    (opts, gap_report(&components, spec))
}

/// Runs the whole prescribed-spectrum procedure.
pub fn run_prescribed_spectrum(config: &RunConfig, execution: Execution) -> Result<RunResult> {
    config.validate()?;
    let profile = synthesize_profile(&config.targets, config.convention)?;
    let kept = DEFAULT_KEPT.max(config.targets.len() + 2);
    let disc = DiscSpectrum::from_profile(&profile, kept, config.convention);
    let gap = gap_parameters(&disc, config.targets.len(), config.delta_override)?;
    let spec = TargetSpec::new(config.targets.clone(), config.epsilon, gap.delta)?;
    let cfg = config.band_config(execution);
    let etas = eta_grid(config.eta_points)?;

    let mut history = Vec::new();
    let mut h = config.h_initial;
    let (bands, report, zero_threshold) = loop {
        let cell = CellGeometry::new(config.r0, h)?;
        let bands = compute_bands(&cell, &profile, &etas, &cfg)?;
        let (opts, report) = analyze_table(&BandTable::from(&bands), &spec);
        let dims = bands.fibers.iter().map(|f| f.dim_eff);
        history.push(HIteration {
            h,
            verdict: report.verdict,
            target_distances: report.targets.iter().map(|t| t.distance).collect(),
            delta_achieved: report.delta_achieved,
            components: report.components.len(),
            merge_tol: opts.merge_tol,
            min_dim_eff: dims.clone().min().unwrap_or(0),
            max_dim_eff: dims.max().unwrap_or(0),
            max_hermiticity: bands.max_hermiticity(),
            max_spectral_radius: bands.max_spectral_radius(),
        });
        if report.verdict.passed() || h / 2.0 < config.h_min {
            break (bands, report, opts.zero_threshold);
        }
        h /= 2.0;
    };

    let k_refinement_delta = k_refinement(&bands, &cfg)?;
    let monotone_tail = match history.as_slice() {
        [.., a, b] => Some(
            a.target_distances
                .iter()
                .zip(&b.target_distances)
                .all(|(x, y)| y <= x),
        ),
        _ => None,
    };
    let sup = profile.sup_norm();
    let diagnostics = Diagnostics {
        gram_condition: gram_condition(config.targets.len()),
        profile_sup_norm: sup,
        gap,
        zero_threshold,
        dim_eff: bands.fibers.iter().map(|f| f.dim_eff).collect(),
        k_refinement_delta,
        tail_modulus: bands.tail_modulus(),
        monotone_tail,
        hermiticity_ok: history.iter().all(|it| it.max_hermiticity <= 1e-12),
        spectral_radius_ok: history.iter().all(|it| it.max_spectral_radius <= sup + 1e-8),
        history,
    };
    Ok(RunResult {
        config: config.clone(),
        profile,
        disc_spectrum: disc,
        chosen_h: h,
        verdict: report.verdict,
        band_structure: bands,
        spectrum_report: report,
        diagnostics,
    })
}

/// Largest change of the kept eigenvalues at `eta = 0` when `K_modes` grows
/// by two.
fn k_refinement(bands: &BandStructure, cfg: &BandConfig) -> Result<f64> {
    let quad = Arc::new(fiber_quadrature(&bands.cell, &bands.profile, cfg.orders)?);
    let solve = |k_modes| {
        let c = BandConfig { k_modes, ..*cfg };
        solve_fiber(&bands.cell, &bands.profile, 0.0, &quad, &c).map(|s| s.values)
    };
    let a = solve(cfg.k_modes)?;
    let b = solve(cfg.k_modes + 2)?;
    Ok(a.iter()
        .zip(&b)
        .take(cfg.n_keep)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Report file layout: the report fields plus the run context.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_h: Option<f64>,
    #[serde(flatten)]
    pub report: SpectrumReport,
}

/// Diagnostics file layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsDocument {
    pub config: RunConfig,
    pub chosen_h: f64,
    pub verdict: Verdict,
    pub profile: RadialProfile,
    pub disc_spectrum: DiscSpectrum,
    pub fibers: Vec<crate::band_solver::FiberDiagnostics>,
    #[serde(flatten)]
    pub diagnostics: Diagnostics,
}

impl RunResult {
    pub fn report_document(&self) -> Result<ReportDocument> {
        Ok(ReportDocument {
            config: serde_json::to_value(&self.config)?,
            chosen_h: Some(self.chosen_h),
            report: self.spectrum_report.clone(),
        })
    }

    pub fn diagnostics_document(&self) -> DiagnosticsDocument {
        DiagnosticsDocument {
            config: self.config.clone(),
            chosen_h: self.chosen_h,
            verdict: self.verdict,
            profile: self.profile.clone(),
            disc_spectrum: self.disc_spectrum.clone(),
            fibers: self.band_structure.fibers.clone(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// Writes every file named in `outputs`.
    pub fn write_outputs(&self, outputs: &OutputPaths) -> Result<()> {
        if let Some(p) = &outputs.bands {
            let mut w = io::create(p)?;
            self.band_structure.write_csv(&mut w)?;
        }
        if let Some(p) = &outputs.report {
            io::write_json(p, &self.report_document()?)?;
        }
        if let Some(p) = &outputs.diagnostics {
            io::write_json(p, &self.diagnostics_document())?;
        }
        Ok(())
    }
}
