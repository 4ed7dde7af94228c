//! Conformal transplantation of Bergman functions and Toeplitz symbols.
//!
//! A conformal map `psi: U -> V` induces `f -> (f o psi) psi'`, an isometry
//! `A^2(V) -> A^2(U)` that intertwines `T_b` on `V` with `T_{b o psi}` on `U`.
//! Automorphisms of the unit disc therefore leave Toeplitz spectra unchanged.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::disc_spectrum::galerkin_matrix;
use crate::error::{param, Result};
use crate::geometry::QuadratureRule;
use crate::linalg::{hermitian_eigenvalues, sort_by_modulus};

/// Maps `psi` used for transplantation; each acts on the `w` variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConformalMap {
    Identity,
    /// `w -> exp(i theta) w`.
    Rotation { theta: f64 },
    /// `w -> (w + alpha) / (1 + conj(alpha) w)`, `|alpha| < 1`.
    Moebius { alpha: Complex64 },
    /// `w -> (ln w + 2 pi) / (2 pi i)`, the inverse of the strip-to-disc map
    /// `z -> exp(2 pi i z - 2 pi)`. Defined on the slit disc; not onto.
    RectExp,
}

impl ConformalMap {
    pub fn moebius(alpha: Complex64) -> Result<Self> {
        if !(alpha.norm() < 1.0) {
            return Err(param(format!("Moebius parameter |alpha| = {} must be < 1", alpha.norm())));
        }
        Ok(Self::Moebius { alpha })
    }

    /// `psi(w)`.
    pub fn apply(&self, w: Complex64) -> Complex64 {
        match *self {
            Self::Identity => w,
            Self::Rotation { theta } => Complex64::from_polar(1.0, theta) * w,
            Self::Moebius { alpha } => (w + alpha) / (1.0 + alpha.conj() * w),
            Self::RectExp => (w.ln() + 2.0 * PI) / Complex64::new(0.0, 2.0 * PI),
        }
    }

    /// `psi'(w)`.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        match *self {
            Self::Identity => Complex64::new(1.0, 0.0),
            Self::Rotation { theta } => Complex64::from_polar(1.0, theta),
            Self::Moebius { alpha } => {
                let d = 1.0 + alpha.conj() * w;
                (1.0 - alpha.norm_sqr()) / (d * d)
            }
            Self::RectExp => 1.0 / (Complex64::new(0.0, 2.0 * PI) * w),
        }
    }

    /// Inverse map when `psi` is an automorphism of the disc.
    pub fn inverse(&self) -> Option<Self> {
        match *self {
            Self::Identity => Some(Self::Identity),
            Self::Rotation { theta } => Some(Self::Rotation { theta: -theta }),
            Self::Moebius { alpha } => Some(Self::Moebius { alpha: -alpha }),
            Self::RectExp => None,
        }
    }

    /// Whether `psi` maps the unit disc onto itself.
    pub fn is_disc_automorphism(&self) -> bool {
        self.inverse().is_some()
    }
}

/// `(f o psi) psi'` as a function.
pub fn transplant<F>(map: ConformalMap, f: F) -> impl Fn(Complex64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    move |w| f(map.apply(w)) * map.derivative(w)
}

/// `(f o psi) psi'` sampled at `nodes`.
pub fn transplant_samples<F>(map: ConformalMap, f: F, nodes: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    nodes.iter().map(|&w| f(map.apply(w)) * map.derivative(w)).collect()
}

/// `b o psi`.
pub fn transplant_symbol<B>(map: ConformalMap, b: B) -> impl Fn(Complex64) -> f64
where
    B: Fn(Complex64) -> f64,
{
    move |w| b(map.apply(w))
}

/// `||(f o psi) psi'|| / ||f||` on the unit-disc rule `quad`, for a disc
/// automorphism `psi`.
pub fn isometry_ratio<F>(map: ConformalMap, f: F, quad: &QuadratureRule) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !map.is_disc_automorphism() {
        return Err(param("isometry ratio on the disc needs a disc automorphism"));
    }
    let direct: Vec<Complex64> = quad.nodes.iter().map(|&w| f(w)).collect();
    let moved = transplant_samples(map, &f, &quad.nodes);
    let n = quad.norm(&direct);
    if !(n > 0.0) {
        return Err(param("test function vanishes on the quadrature nodes"));
    }
    Ok(quad.norm(&moved) / n)
}

/// Norm ratios for `count` random complex polynomials of degree `< degree`
/// under `map`, on the unit-disc rule `quad`.
pub fn polynomial_isometry_ratios(
    map: ConformalMap,
    count: usize,
    degree: usize,
    seed: u64,
    quad: &QuadratureRule,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs: Vec<Complex64> = (0..degree.max(1))
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
            isometry_ratio(map, &f, quad)
        })
        .collect()
}

/// Result of comparing the leading spectra of `T_b` and `T_{b o psi}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralComparison {
    pub original: Vec<f64>,
    pub transplanted: Vec<f64>,
    pub hausdorff: f64,
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Leading `n_compare` eigenvalues of the compressions of `T_b` and
/// `T_{b o psi}` to the first `n_basis` monomials of `A^2(D)`, with the
/// Hausdorff distance between them. `quad` is a unit-disc rule.
pub fn spectral_equivalence_check<B>(
    map: ConformalMap,
    b: B,
    n_basis: usize,
    n_compare: usize,
    quad: &QuadratureRule,
) -> Result<SpectralComparison>
where
    B: Fn(Complex64) -> f64 + Copy,
{
    if !map.is_disc_automorphism() {
        return Err(param(
            "spectral equivalence on the disc needs a disc automorphism",
        ));
    }
    if n_compare == 0 || n_compare > n_basis {
        return Err(param(format!(
            "need 1 <= n_compare <= n_basis, got {n_compare} and {n_basis}"
        )));
    }
    let leading = |m| {
        let mut v = hermitian_eigenvalues(&m);
        sort_by_modulus(&mut v);
        v.truncate(n_compare);
        v
    };
    let original = leading(galerkin_matrix(b, 1.0, n_basis, quad)?);
    let transplanted = leading(galerkin_matrix(transplant_symbol(map, b), 1.0, n_basis, quad)?);
    let hausdorff = hausdorff(&original, &transplanted);
    Ok(SpectralComparison {
        original,
        transplanted,
        hausdorff,
    })
}
