//! Toeplitz spectra of radial symbols on a disc.
//!
//! For a radial symbol the monomials diagonalize the Toeplitz operator on
//! `A^2(D)`, and the eigenvalue of `z^n` is a weighted radial moment. The same
//! numbers are the eigenvalues on any disc `D_R0` with the rescaled symbol
//! `b(|z|/R0)`, which is how they serve as the oracle for the band solver.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{param, Result};
use crate::geometry::QuadratureRule;
use crate::linalg::{modulus_order, CMatrix};
use crate::symbols::{MomentConvention, RadialProfile};

/// Default number of eigenvalues kept.
pub const DEFAULT_KEPT: usize = 32;
/// Magnitudes below this are reported as exact zeros.
pub const ZERO_CLUSTER: f64 = 1e-14;

/// Eigenvalue of `z^n` for the radial symbol `profile`.
pub fn moment_eigenvalue(profile: &RadialProfile, n: usize, convention: MomentConvention) -> f64 {
    convention.prefactor(n) * profile.moment(n)
}

/// One eigenvalue with the monomial that carries it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscEigenvalue {
    pub mode: usize,
    pub lambda: f64,
}

/// Leading eigenvalues ordered by decreasing modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscSpectrum {
    pub entries: Vec<DiscEigenvalue>,
}

impl DiscSpectrum {
    /// Modes `0..kept`, sorted by decreasing modulus, then decreasing value,
    /// then mode index.
    pub fn from_profile(profile: &RadialProfile, kept: usize, convention: MomentConvention) -> Self {
        let mut entries: Vec<DiscEigenvalue> = (0..kept)
            .map(|mode| {
                let l = moment_eigenvalue(profile, mode, convention);
                DiscEigenvalue {
                    mode,
                    lambda: if l.abs() < ZERO_CLUSTER { 0.0 } else { l },
                }
            })
            .collect();
        entries.sort_by(|a, b| modulus_order(a.lambda, b.lambda).then(a.mode.cmp(&b.mode)));
        Self { entries }
    }

    pub fn kept(&self) -> usize {
        self.entries.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// 1-based rank of a mode in the modulus ordering.
    pub fn rank_of_mode(&self, mode: usize) -> Option<usize> {
        self.entries.iter().position(|e| e.mode == mode).map(|p| p + 1)
    }

    /// Eigenvalues in mode order, as `(n, lambda)` CSV rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut by_mode = self.entries.clone();
        by_mode.sort_by_key(|e| e.mode);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "lambda"])?;
        for e in by_mode {
            w.write_record([e.mode.to_string(), e.lambda.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `|lambda_N| - |lambda_{N+1}|` with 1-based `n`.
pub fn spectral_gap(spec: &DiscSpectrum, n: usize) -> Result<f64> {
    if n == 0 || n >= spec.kept() {
        return Err(param(format!(
            "gap index N = {n} must satisfy 1 <= N < {}",
            spec.kept()
        )));
    }
    Ok(spec.entries[n - 1].lambda.abs() - spec.entries[n].lambda.abs())
}

/// Galerkin matrix `M_jk = int symbol e_k conj(e_j) dA` of a real symbol in
/// the orthonormal monomial basis `e_n = z^n / ||z^n||` of `A^2(D_r0)`,
/// `n < size`.
pub fn galerkin_matrix<F>(symbol: F, r0: f64, size: usize, quad: &QuadratureRule) -> Result<CMatrix>
where
    F: Fn(Complex64) -> f64,
{
    if quad.disc_nodes() != quad.len() || (quad.disc_radius() - r0).abs() > 1e-14 * r0 {
        return Err(param(format!(
            "quadrature must be a pure disc rule of radius {r0}"
        )));
    }
    if size + 2 > quad.radial_order() {
        return Err(param(format!(
            "quadrature too coarse: N = {size} needs a radial order of at least {}",
            size + 2
        )));
    }
    // Normalized monomials at the nodes: e_n(z) = sqrt((n+1)/pi) z^n / r0^(n+1).
    let basis: Vec<Vec<Complex64>> = quad
        .nodes
        .iter()
        .map(|&z| {
            let u = z / r0;
            let mut p = Complex64::new(1.0 / r0, 0.0);
            (0..size)
                .map(|n| {
                    let v = p * ((n as f64 + 1.0) / PI).sqrt();
                    p *= u;
                    v
                })
                .collect()
        })
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(size, size);
    for ((&z, &w), e) in quad.nodes.iter().zip(&quad.weights).zip(&basis) {
        let s = symbol(z) * w;
        if s == 0.0 {
            continue;
        }
        for j in 0..size {
            let ej = e[j].conj() * s;
            for k in 0..size {
                m[(j, k)] += ej * e[k];
            }
        }
    }
    Ok(m)
}

/// Galerkin matrix of the rescaled symbol `b(|z|/R0)` on `D_R0`.
pub fn disc_galerkin_matrix(
    profile: &RadialProfile,
    r0: f64,
    size: usize,
    quad: &QuadratureRule,
) -> Result<CMatrix> {
    galerkin_matrix(|z| profile.eval(z.norm() / r0), r0, size, quad)
}
