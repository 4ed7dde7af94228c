//! Fiber Toeplitz matrices, band functions and essential-spectrum reports.
//!
//! The essential spectrum of the periodic Toeplitz operator is the union over
//! `eta` of the spectra of the fiber operators `P_eta (b f)` on the cell. Each
//! fiber is compact and self-adjoint, so its spectrum is a sequence of real
//! eigenvalues accumulating only at 0. Sampling `eta` on a grid and merging
//! the band values gives interval hulls of finitely many samples; whether the
//! true components are continua is not decided here.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use crate::disc_spectrum::moment_eigenvalue;
use crate::error::{param, Error, Result};
use crate::geometry::{build_cell_quadrature_with_breaks, CellGeometry, QuadOrders, QuadratureRule};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, hermiticity_residual, modulus_order, CMatrix};
use crate::par::{self, Execution};
use crate::quasi_bergman::{build_basis, TwistedBasis, DEFAULT_CUTOFF, DEFAULT_MODES};
use crate::symbols::{eval_cell_symbol, MomentConvention, RadialProfile, TargetSpec};

/// Default number of grid points in `[-pi, pi]`.
pub const DEFAULT_ETA_POINTS: usize = 65;
/// Default number of bands kept per fiber.
pub const DEFAULT_KEEP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    pub k_modes: usize,
    pub cutoff: f64,
    pub n_keep: usize,
    pub orders: QuadOrders,
    #[serde(default)]
    pub execution: Execution,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            k_modes: DEFAULT_MODES,
            cutoff: DEFAULT_CUTOFF,
            n_keep: DEFAULT_KEEP,
            orders: QuadOrders::default(),
            execution: Execution::default(),
        }
    }
}

/// Uniform grid on `[-pi, pi]` including both endpoints.
pub fn eta_grid(points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(param("eta grid needs at least one point")),
        1 => Ok(vec![0.0]),
        _ => Ok((0..points)
            .map(|j| {
                if j + 1 == points {
                    PI
                } else {
                    -PI + 2.0 * PI * j as f64 / (points - 1) as f64
                }
            })
            .collect()),
    }
}

/// Cell rule with a radial panel break at the edge of the symbol support.
pub fn fiber_quadrature(
    cell: &CellGeometry,
    profile: &RadialProfile,
    orders: QuadOrders,
) -> Result<QuadratureRule> {
    let breaks: Vec<f64> = if profile.support > 0.0 && profile.support < 1.0 {
        vec![profile.support]
    } else {
        Vec::new()
    };
    build_cell_quadrature_with_breaks(cell, orders, &breaks)
}

/// `A_jk = sum_nodes w b conj(q_j) q_k`; only disc nodes carry the symbol.
pub fn toeplitz_matrix(
    cell: &CellGeometry,
    profile: &RadialProfile,
    basis: &TwistedBasis,
) -> Result<CMatrix> {
    if basis.cell() != cell {
        return Err(Error::Mismatch);
    }
    let quad = basis.quad();
    let q = basis.values();
    let m = basis.dim_eff();
    let mut a = CMatrix::zeros(m, m);
    for r in 0..quad.disc_nodes() {
        let s = eval_cell_symbol(profile, cell, quad.nodes[r]) * quad.weights[r];
        if s == 0.0 {
            continue;
        }
        for j in 0..m {
            let qj = q[(r, j)].conj() * s;
            for k in 0..m {
                a[(j, k)] += qj * q[(r, k)];
            }
        }
    }
    Ok(a)
}

/// Per-fiber numerical health.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberDiagnostics {
    pub eta: f64,
    pub dim_eff: usize,
    pub gram_residual: f64,
    pub hermiticity: f64,
    pub spectral_radius: f64,
}

/// Full solution of one fiber problem.
#[derive(Debug, Clone)]
pub struct FiberSolution {
    pub basis: TwistedBasis,
    pub matrix: CMatrix,
    /// Eigenvalues by decreasing modulus.
    pub values: Vec<f64>,
    /// Eigenvector coefficients in the basis, aligned with `values`.
    pub vectors: CMatrix,
    pub diagnostics: FiberDiagnostics,
}

pub fn solve_fiber(
    cell: &CellGeometry,
    profile: &RadialProfile,
    eta: f64,
    quad: &Arc<QuadratureRule>,
    cfg: &BandConfig,
) -> Result<FiberSolution> {
    let basis = build_basis(cell, eta, cfg.k_modes, quad, cfg.cutoff)?;
    let matrix = toeplitz_matrix(cell, profile, &basis)?;
    let (vals, vecs) = hermitian_eigen(&matrix);
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| modulus_order(vals[i], vals[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vectors = CMatrix::from_fn(vecs.nrows(), order.len(), |r, c| vecs[(r, order[c])]);
    let diagnostics = FiberDiagnostics {
        eta,
        dim_eff: basis.dim_eff(),
        gram_residual: basis.gram_residual(),
        hermiticity: hermiticity_residual(&matrix),
        spectral_radius: values.first().map_or(0.0, |v| v.abs()),
    };
    Ok(FiberSolution {
        basis,
        matrix,
        values,
        vectors,
        diagnostics,
    })
}

/// Band functions `eta -> lambda^n`, `n = 1..n_keep`, by decreasing modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub etas: Vec<f64>,
    /// `lambdas[j][n]` is band `n + 1` at `etas[j]`.
    pub lambdas: Vec<Vec<f64>>,
    pub cell: CellGeometry,
    pub profile: RadialProfile,
    pub k_modes: usize,
    pub cutoff: f64,
    pub n_keep: usize,
    pub fibers: Vec<FiberDiagnostics>,
}

pub fn compute_bands(
    cell: &CellGeometry,
    profile: &RadialProfile,
    etas: &[f64],
    cfg: &BandConfig,
) -> Result<BandStructure> {
    if etas.is_empty() {
        return Err(param("eta grid is empty"));
    }
    if let Some(bad) = etas.iter().find(|e| !(e.abs() <= PI + 1e-12)) {
        return Err(param(format!("eta = {bad} lies outside [-pi, pi]")));
    }
    if cfg.n_keep == 0 {
        return Err(param("n_keep must be positive"));
    }
    let quad = Arc::new(fiber_quadrature(cell, profile, cfg.orders)?);
    let fibers = par::try_map(cfg.execution, etas, |&eta| {
        let sol = solve_fiber(cell, profile, eta, &quad, cfg)?;
        let mut vals = sol.values;
        vals.truncate(cfg.n_keep);
        Ok::<_, Error>((vals, sol.diagnostics))
    })?;
    let (lambdas, fibers): (Vec<_>, Vec<_>) = fibers.into_iter().unzip();
    Ok(BandStructure {
        etas: etas.to_vec(),
        lambdas,
        cell: *cell,
        profile: profile.clone(),
        k_modes: cfg.k_modes,
        cutoff: cfg.cutoff,
        n_keep: cfg.n_keep,
        fibers,
    })
}

impl BandStructure {
    /// Band `n` (0-based) across the grid; fibers with fewer bands are skipped.
    pub fn band(&self, n: usize) -> Vec<f64> {
        self.lambdas.iter().filter_map(|l| l.get(n).copied()).collect()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.lambdas.iter().flatten().copied()
    }

    pub fn max_hermiticity(&self) -> f64 {
        self.fibers.iter().map(|f| f.hermiticity).fold(0.0, f64::max)
    }

    pub fn max_spectral_radius(&self) -> f64 {
        self.fibers.iter().map(|f| f.spectral_radius).fold(0.0, f64::max)
    }

    /// Largest modulus of the last kept band.
    pub fn tail_modulus(&self) -> f64 {
        self.lambdas
            .iter()
            .filter_map(|l| l.last())
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `eta,n,lambda`, `n` 1-based.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_band_csv(&self.etas, &self.lambdas, out)
    }
}

pub fn write_band_csv<W: Write>(etas: &[f64], lambdas: &[Vec<f64>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eta", "n", "lambda"])?;
    for (eta, row) in etas.iter().zip(lambdas) {
        for (n, l) in row.iter().enumerate() {
            w.write_record([eta.to_string(), (n + 1).to_string(), l.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Band values read back from CSV, grouped by `eta` in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    pub etas: Vec<f64>,
    pub lambdas: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct BandRow {
    eta: f64,
    n: usize,
    lambda: f64,
}

pub fn read_band_csv<R: Read>(input: R) -> Result<BandTable> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut etas: Vec<f64> = Vec::new();
    let mut lambdas: Vec<Vec<f64>> = Vec::new();
    for row in rdr.deserialize() {
        let row: BandRow = row?;
        if etas.last() != Some(&row.eta) {
            etas.push(row.eta);
            lambdas.push(Vec::new());
        }
        let cur = lambdas.last_mut().unwrap();
        if row.n != cur.len() + 1 {
            return Err(param(format!(
                "band CSV out of order at eta = {}: expected n = {}, found {}",
                row.eta,
                cur.len() + 1,
                row.n
            )));
        }
        cur.push(row.lambda);
    }
    Ok(BandTable { etas, lambdas })
}

impl From<&BandStructure> for BandTable {
    fn from(b: &BandStructure) -> Self {
        Self {
            etas: b.etas.clone(),
            lambdas: b.lambdas.clone(),
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        (self.lo - x).max(x - self.hi).max(0.0)
    }

    pub fn distance(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Sorted values closer than this belong to the same component.
    pub merge_tol: f64,
    /// Values with modulus below this join the component of 0.
    pub zero_threshold: f64,
}

/// Largest step of any band between adjacent grid points, ignoring steps
/// where both ends already sit inside the zero cluster.
pub fn default_merge_tol(table: &BandTable, zero_threshold: f64) -> f64 {
    let bands = table.lambdas.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut tol = 0.0_f64;
    for n in 0..bands {
        let series: Vec<f64> = table.lambdas.iter().filter_map(|l| l.get(n).copied()).collect();
        for w in series.windows(2) {
            if w[0].abs() < zero_threshold && w[1].abs() < zero_threshold {
                continue;
            }
            tol = tol.max((w[1] - w[0]).abs());
        }
    }
    tol
}

/// Components of the sampled essential spectrum, sorted and disjoint. The
/// component containing 0 is always present.
pub fn essential_spectrum(table: &BandTable, opts: &SpectrumOptions) -> Vec<Interval> {
    spectrum_components(table.lambdas.iter().flatten().copied(), opts)
}

pub fn spectrum_components<I: IntoIterator<Item = f64>>(values: I, opts: &SpectrumOptions) -> Vec<Interval> {
    let mut zero = Interval::point(0.0);
    let mut rest = Vec::new();
    for v in values {
        if v.abs() < opts.zero_threshold {
            zero.lo = zero.lo.min(v);
            zero.hi = zero.hi.max(v);
        } else {
            rest.push(v);
        }
    }
    // The zero cluster enters as a single interval so merging cannot split it.
    let mut pieces: Vec<Interval> = rest.into_iter().map(Interval::point).collect();
    pieces.push(zero);
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));

    let mut out: Vec<Interval> = Vec::new();
    for p in pieces {
        match out.last_mut() {
            Some(last) if p.lo - last.hi <= opts.merge_tol => last.hi = last.hi.max(p.hi),
            _ => out.push(p),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetHit {
    pub target: f64,
    pub distance: f64,
    pub hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub components: Vec<Interval>,
    /// Open intervals between consecutive components.
    pub gaps: Vec<Interval>,
    pub targets: Vec<TargetHit>,
    pub epsilon: f64,
    pub delta: f64,
    /// Distance between the part of the spectrum inside the target balls and
    /// the part outside; `None` when either part is empty.
    pub delta_achieved: Option<f64>,
    pub epsilon_below_delta: bool,
    pub verdict: Verdict,
}

/// Proximity of every target and separation of the near-target part of the
/// spectrum from the rest.
pub fn gap_report(components: &[Interval], spec: &TargetSpec) -> SpectrumReport {
    let eps = spec.epsilon;
    let targets: Vec<TargetHit> = spec
        .targets
        .iter()
        .map(|&t| {
            let d = components
                .iter()
                .map(|c| c.distance_to(t))
                .fold(f64::INFINITY, f64::min);
            TargetHit {
                target: t,
                distance: d,
                hit: d < eps,
            }
        })
        .collect();

    // Union of the open balls around the targets, as sorted disjoint intervals.
    let mut balls: Vec<Interval> = spec
        .targets
        .iter()
        .map(|&t| Interval { lo: t - eps, hi: t + eps })
        .collect();
    balls.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut union: Vec<Interval> = Vec::new();
    for b in balls {
        match union.last_mut() {
            Some(u) if b.lo <= u.hi => u.hi = u.hi.max(b.hi),
            _ => union.push(b),
        }
    }

    let mut near: Vec<Interval> = Vec::new();
    let mut far: Vec<Interval> = Vec::new();
    for c in components {
        // Walk the balls left to right; `covered` says whether the point
        // `cursor` lies strictly inside a ball.
        let mut cursor = c.lo;
        let mut covered = false;
        for u in &union {
            if !(u.lo < c.hi && c.lo < u.hi) {
                continue;
            }
            let lo = u.lo.max(c.lo);
            let hi = u.hi.min(c.hi);
            if !covered && u.lo >= cursor {
                far.push(Interval { lo: cursor, hi: lo });
            }
            near.push(Interval { lo, hi });
            cursor = hi;
            covered = hi < u.hi;
        }
        if !covered {
            far.push(Interval { lo: cursor, hi: c.hi });
        }
    }

    let delta_achieved = if near.is_empty() || far.is_empty() {
        None
    } else {
        let mut best = f64::INFINITY;
        for a in &near {
            for b in &far {
                best = best.min(a.distance(b));
            }
        }
        Some(best)
    };

    let gaps = components
        .windows(2)
        .map(|w| Interval { lo: w[0].hi, hi: w[1].lo })
        .collect();
    let all_hit = targets.iter().all(|t| t.hit);
    let separated = delta_achieved.is_none_or(|d| d >= spec.delta);
    SpectrumReport {
        components: components.to_vec(),
        gaps,
        targets,
        epsilon: eps,
        delta: spec.delta,
        delta_achieved,
        epsilon_below_delta: spec.epsilon_below_delta(),
        verdict: if all_hit && separated { Verdict::Pass } else { Verdict::Fail },
    }
}

/// One row of an `h`-refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub modes: Vec<usize>,
    pub disc: Vec<f64>,
    pub band: Vec<f64>,
    pub error: Vec<f64>,
}

/// Tracks the fiber eigenvalue nearest to each disc eigenvalue `lambda_n`,
/// `n` in `modes`, along a list of ligament widths.
pub fn h_convergence_study(
    profile: &RadialProfile,
    r0: f64,
    h_list: &[f64],
    eta: f64,
    modes: &[usize],
    cfg: &BandConfig,
    convention: MomentConvention,
) -> Result<Vec<ConvergenceRow>> {
    if h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(param("h_list must be strictly decreasing"));
    }
    let disc: Vec<f64> = modes
        .iter()
        .map(|&n| moment_eigenvalue(profile, n, convention))
        .collect();
    par::try_map(cfg.execution, h_list, |&h| {
        let cell = CellGeometry::new(r0, h)?;
        let quad = Arc::new(fiber_quadrature(&cell, profile, cfg.orders)?);
        let sol = solve_fiber(&cell, profile, eta, &quad, cfg)?;
        let band: Vec<f64> = disc
            .iter()
            .map(|&l| {
                sol.values
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - l).abs().total_cmp(&(b - l).abs()))
                    .unwrap_or(0.0)
            })
            .collect();
        let error = band.iter().zip(&disc).map(|(a, b)| (a - b).abs()).collect();
        Ok(ConvergenceRow {
            h,
            modes: modes.to_vec(),
            disc: disc.clone(),
            band,
            error,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlmostEigen {
    /// Distance from `mu` to the spectrum.
    pub distance: f64,
    /// `||A v - mu v|| / ||v||`.
    pub residual: f64,
    /// Rounding allowance for comparing the two computed quantities,
    /// `16 eps (||A||_F + |mu|)`.
    pub tolerance: f64,
}

impl AlmostEigen {
    /// `distance <= residual` up to rounding.
    pub fn holds(&self) -> bool {
        self.distance <= self.residual + self.tolerance
    }
}

/// For Hermitian `A` the spectrum meets `[mu - r, mu + r]` with
/// `r = ||A v - mu v||` for every unit `v`.
pub fn almost_eigen_check(a: &CMatrix, v: &DVector<Complex64>, mu: f64) -> Result<AlmostEigen> {
    if a.nrows() != a.ncols() || a.nrows() != v.len() {
        return Err(param("matrix and vector dimensions disagree"));
    }
    let scale = a.iter().map(|x| x.norm()).fold(1.0_f64, f64::max);
    let herm = hermiticity_residual(a);
    if herm > 1e-12 * scale {
        return Err(Error::NotHermitian(herm));
    }
    let vn = v.norm();
    if !(vn > 0.0) {
        return Err(param("vector must be nonzero"));
    }
    let r = a * v - v * Complex64::new(mu, 0.0);
    let distance = hermitian_eigenvalues(a)
        .into_iter()
        .map(|l| (l - mu).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(AlmostEigen {
        distance,
        residual: r.norm() / vn,
        tolerance: 16.0 * f64::EPSILON * (a.norm() + mu.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = eta_grid(5).unwrap();
        assert_eq!(g.first(), Some(&-PI));
        assert_eq!(g.last(), Some(&PI));
        assert!((g[2]).abs() < 1e-15);
        assert_eq!(eta_grid(1).unwrap(), vec![0.0]);
        assert!(eta_grid(0).is_err());
    }

    #[test]
    fn components_merge_and_keep_zero() {
        let opts = SpectrumOptions {
            merge_tol: 0.01,
            zero_threshold: 0.005,
        };
        let c = spectrum_components(vec![0.3, 0.305, 0.2, 0.001, -0.002], &opts);
        assert_eq!(c, vec![iv(-0.002, 0.001), iv(0.2, 0.2), iv(0.3, 0.305)]);
        let z = spectrum_components(vec![0.0; 10], &opts);
        assert_eq!(z, vec![iv(0.0, 0.0)]);
        let coarse = SpectrumOptions {
            merge_tol: 0.2,
            ..opts
        };
        assert_eq!(spectrum_components(vec![0.3, 0.2], &coarse).len(), 1);
        let fine = SpectrumOptions {
            merge_tol: 1e-6,
            ..opts
        };
        let c = spectrum_components(vec![0.0031, 0.0, 0.2], &fine);
        assert_eq!(c, vec![iv(0.0, 0.0031), iv(0.2, 0.2)]);
    }

    #[test]
    fn report_exact_targets() {
        let spec = TargetSpec::new(vec![0.3, 0.2, 0.1], 0.02, 0.05).unwrap();
        let comps = vec![iv(0.0, 0.0), iv(0.1, 0.1), iv(0.2, 0.2), iv(0.3, 0.3)];
        let r = gap_report(&comps, &spec);
        assert!(r.targets.iter().all(|t| t.hit && t.distance == 0.0));
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.delta_achieved.unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(r.gaps.len(), 3);
    }

    #[test]
    fn report_detects_straddling_component() {
        let spec = TargetSpec::new(vec![0.3], 0.02, 0.01).unwrap();
        let r = gap_report(&[iv(0.0, 0.0), iv(0.29, 0.35)], &spec);
        assert!(r.targets[0].hit);
        assert_eq!(r.delta_achieved, Some(0.0));
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn report_missed_target_fails() {
        let spec = TargetSpec::new(vec![0.3], 0.02, 0.01).unwrap();
        let r = gap_report(&[iv(0.0, 0.0), iv(0.25, 0.26)], &spec);
        assert!(!r.targets[0].hit);
        assert!((r.targets[0].distance - 0.04).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn report_without_targets_passes() {
        let spec = TargetSpec::new(vec![], 0.02, 0.0).unwrap();
        let r = gap_report(&[iv(0.0, 0.0)], &spec);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.delta_achieved, None);
    }

    #[test]
    fn almost_eigen_exact_vector() {
        let a = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let v = DVector::from_vec(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ]);
        let r = almost_eigen_check(&a, &v, 1.0).unwrap();
        assert!(r.distance < 1e-12 && r.residual < 1e-12);
        let mut bad = a.clone();
        bad[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(almost_eigen_check(&bad, &v, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let etas = vec![-PI, 0.1, PI];
        let lambdas = vec![vec![0.1 + 0.2, -1e-17], vec![1.0 / 3.0, 2.0], vec![5e-300, 0.0]];
        let mut buf = Vec::new();
        write_band_csv(&etas, &lambdas, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("eta,n,lambda\n"));
        let t = read_band_csv(buf.as_slice()).unwrap();
        assert_eq!(t.etas, etas);
        assert_eq!(t.lambdas, lambdas);
    }
}
