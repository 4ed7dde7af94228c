//! Radial symbols, their synthesis from prescribed eigenvalues, and their
//! lifts to the cell and the periodic domain.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{param, Error, Result};
use crate::geometry::CellGeometry;

/// Largest number of controlled modes accepted by [`synthesize_profile`].
pub const MAX_MODES: usize = 8;
/// Gram matrices with a larger 2-norm condition number are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;
/// Support radius of synthesized profiles.
pub const SYNTH_SUPPORT: f64 = 0.5;

/// Normalization of the radial eigenvalue formula.
///
/// `Corrected` uses `lambda_n = 2(n+1) int_0^1 a(r) r^(2n+1) dr`, which maps
/// the constant symbol 1 to the identity. `Literal` keeps the prefactor
/// `(n+1)/pi`, which does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentConvention {
    #[default]
    Corrected,
    Literal,
}

impl MomentConvention {
    /// Factor `c_n` with `lambda_n = c_n * int_0^1 a(r) r^(2n+1) dr`.
    pub fn prefactor(self, n: usize) -> f64 {
        let n1 = n as f64 + 1.0;
        match self {
            MomentConvention::Corrected => 2.0 * n1,
            MomentConvention::Literal => n1 / std::f64::consts::PI,
        }
    }
}

impl FromStr for MomentConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Self::Corrected),
            "literal" => Ok(Self::Literal),
            other => Err(param(format!(
                "unknown moment convention {other:?} (expected corrected or literal)"
            ))),
        }
    }
}

impl fmt::Display for MomentConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Corrected => "corrected",
            Self::Literal => "literal",
        })
    }
}

/// `b(r) = constant + sum_{m=1..K} coeffs[m-1] * r^(2m+1)` for `r < support`,
/// zero beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    #[serde(default)]
    pub constant: f64,
    pub coeffs: Vec<f64>,
    #[serde(default = "default_support")]
    pub support: f64,
}

fn default_support() -> f64 {
    SYNTH_SUPPORT
}

impl RadialProfile {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self {
            constant: 0.0,
            coeffs,
            support: SYNTH_SUPPORT,
        }
    }

    /// The constant symbol 1 on the whole disc.
    pub fn unit() -> Self {
        Self {
            constant: 1.0,
            coeffs: Vec::new(),
            support: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    /// Number of controlled modes.
    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if !(r < self.support) || r < 0.0 {
            return 0.0;
        }
        let r2 = r * r;
        // Horner in r^2 for sum c_m r^(2m+1) = r^3 * sum c_m (r^2)^(m-1)
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r2 + c);
        self.constant + r2 * r * poly
    }

    /// `int_0^support b(r) r^(2n+1) dr` in closed form.
    pub fn moment(&self, n: usize) -> f64 {
        let s = self.support;
        let p = 2 * n + 2;
        let mut total = self.constant * s.powi(p as i32) / p as f64;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let q = p + 2 * (i + 1) + 1;
            total += c * s.powi(q as i32) / q as f64;
        }
        total
    }

    /// Sampled sup-norm over `[0, support]`; exact up to the sampling density
    /// since `b` is a polynomial there.
    pub fn sup_norm(&self) -> f64 {
        const SAMPLES: usize = 4096;
        let s = self.support;
        let mut best = self.constant.abs();
        for i in 0..=SAMPLES {
            // The open end is approached from inside.
            let r = s * (i as f64 / SAMPLES as f64) * (1.0 - 1e-15);
            best = best.max(self.eval(r).abs());
        }
        // Maxima between samples: refine around the best grid sample with a
        // golden section search on |b|.
        let h = s / SAMPLES as f64;
        let mut refined: f64 = best;
        for i in 0..SAMPLES {
            let (a, b) = (i as f64 * h, ((i + 1) as f64 * h).min(s * (1.0 - 1e-15)));
            let ends = self.eval(a).abs().max(self.eval(b).abs());
            let mid = self.eval(0.5 * (a + b)).abs();
            if mid >= ends {
                refined = refined.max(golden_max(|r| self.eval(r).abs(), a, b));
            }
        }
        refined
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..60 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(0.5 * (a + b))
}

/// Targets with proximity and separation radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub targets: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
}

impl TargetSpec {
    /// Targets are sorted into decreasing order; duplicates are rejected.
    ///
    /// `epsilon < delta` is not enforced: a larger proximity radius is allowed
    /// and reported through [`TargetSpec::epsilon_below_delta`].
    pub fn new(mut targets: Vec<f64>, epsilon: f64, delta: f64) -> Result<Self> {
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(param("targets must be finite"));
        }
        if !(epsilon > 0.0) {
            return Err(param(format!("epsilon = {epsilon} must be positive")));
        }
        if !(delta >= 0.0) {
            return Err(param(format!("delta = {delta} must be non-negative")));
        }
        targets.sort_by(|a, b| b.total_cmp(a));
        if targets.windows(2).any(|w| w[0] == w[1]) {
            return Err(param("targets must be pairwise distinct"));
        }
        Ok(Self {
            targets,
            epsilon,
            delta,
        })
    }

    pub fn epsilon_below_delta(&self) -> bool {
        self.epsilon < self.delta
    }
}

/// Gram matrix `G_nm = int_0^s r^(2n+1) r^(2m+1) dr` for `n, m = 1..K`.
pub fn moment_gram(modes: usize, support: f64) -> DMatrix<f64> {
    DMatrix::from_fn(modes, modes, |i, j| {
        let p = 2 * (i + 1) + 2 * (j + 1) + 3;
        support.powi(p as i32) / p as f64
    })
}

/// 2-norm condition number of the synthesis Gram matrix.
pub fn gram_condition(modes: usize) -> f64 {
    if modes == 0 {
        return 1.0;
    }
    let eig = moment_gram(modes, SYNTH_SUPPORT).symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Radial profile supported in `[0, 1/2]` whose modes `n = 1..K` carry the
/// given eigenvalues, `targets[n-1]`.
pub fn synthesize_profile(targets: &[f64], convention: MomentConvention) -> Result<RadialProfile> {
    let k = targets.len();
    if k > MAX_MODES {
        return Err(Error::IllConditioned {
            modes: k,
            condition: gram_condition(k),
        });
    }
    if k == 0 {
        return Ok(RadialProfile::zero());
    }
    let condition = gram_condition(k);
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::IllConditioned {
            modes: k,
            condition,
        });
    }
    let gram = moment_gram(k, SYNTH_SUPPORT);
    let rhs = DVector::from_fn(k, |i, _| targets[i] / convention.prefactor(i + 1));
    let chol = gram
        .clone()
        .cholesky()
        .ok_or(Error::IllConditioned { modes: k, condition })?;
    let mut c = chol.solve(&rhs);
    // One step of iterative refinement.
    let r = &rhs - &gram * &c;
    c += chol.solve(&r);
    Ok(RadialProfile::new(c.iter().copied().collect()))
}

/// `b(|z|)`; zero outside the support.
pub fn eval_disc_symbol(profile: &RadialProfile, z: Complex64) -> f64 {
    profile.eval(z.norm())
}

/// The symbol rescaled to the cell disc: `b(|z| / R0)` inside it, zero elsewhere.
pub fn eval_cell_symbol(profile: &RadialProfile, cell: &CellGeometry, z: Complex64) -> f64 {
    let r = z.norm();
    if r < cell.r0() {
        profile.eval(r / cell.r0())
    } else {
        0.0
    }
}

/// Integer translate that brings `z` into the centered cell.
pub fn cell_index(z: Complex64) -> f64 {
    z.re.round()
}

/// The 1-periodic lift: the cell symbol evaluated at `z - round(Re z)`.
pub fn eval_periodic_symbol(profile: &RadialProfile, cell: &CellGeometry, z: Complex64) -> f64 {
    let m = cell_index(z);
    eval_cell_symbol(profile, cell, z - m)
}

/// Profile file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    #[serde(rename = "R0")]
    pub r0: f64,
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub constant: f64,
    #[serde(default = "default_support")]
    pub support: f64,
    #[serde(default)]
    pub convention: MomentConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
}

impl ProfileDocument {
    pub fn new(r0: f64, profile: &RadialProfile, convention: MomentConvention) -> Self {
        Self {
            r0,
            coeffs: profile.coeffs.clone(),
            constant: profile.constant,
            support: profile.support,
            convention,
            sup_norm: Some(profile.sup_norm()),
            targets: None,
        }
    }

    pub fn profile(&self) -> RadialProfile {
        RadialProfile {
            constant: self.constant,
            coeffs: self.coeffs.clone(),
            support: self.support,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_mode_solve() {
        // (1/896) c = 0.1 / 4
        let p = synthesize_profile(&[0.1], MomentConvention::Corrected).unwrap();
        assert_relative_eq!(p.coeffs[0], 22.4, max_relative = 1e-13);
    }

    #[test]
    fn zero_targets_give_zero_coeffs() {
        let p = synthesize_profile(&[0.0, 0.0, 0.0], MomentConvention::Corrected).unwrap();
        assert!(p.coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn too_many_modes_is_ill_conditioned() {
        let t: Vec<f64> = (0..9).map(|i| 1.0 / (i + 1) as f64).collect();
        assert!(matches!(
            synthesize_profile(&t, MomentConvention::Corrected),
            Err(Error::IllConditioned { modes: 9, .. })
        ));
        // K = 6 already exceeds the condition guard.
        let t: Vec<f64> = (0..6).map(|i| 1.0 / (i + 1) as f64).collect();
        match synthesize_profile(&t, MomentConvention::Corrected) {
            Err(Error::IllConditioned { condition, .. }) => assert!(condition > MAX_GRAM_CONDITION),
            other => panic!("expected ill-conditioning, got {other:?}"),
        }
    }

    #[test]
    fn literal_convention_scales_coefficients() {
        let a = synthesize_profile(&[0.3, 0.2], MomentConvention::Corrected).unwrap();
        let b = synthesize_profile(&[0.3, 0.2], MomentConvention::Literal).unwrap();
        // Literal rhs is pi x_n / (n+1) against x_n / (2(n+1)): ratio 2 pi.
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert_relative_eq!(y / x, 2.0 * std::f64::consts::PI, max_relative = 1e-9);
        }
    }

    #[test]
    fn disc_symbol_values() {
        let p = RadialProfile::new(vec![22.4]);
        assert_eq!(eval_disc_symbol(&p, Complex64::new(0.0, 0.0)), 0.0);
        assert_eq!(eval_disc_symbol(&p, Complex64::new(0.0, 0.75)), 0.0);
        let near = eval_disc_symbol(&p, Complex64::new(0.5 - 1e-14, 0.0));
        assert!((near - 2.8).abs() < 1e-11);
        assert_eq!(eval_disc_symbol(&p, Complex64::new(0.5, 0.0)), 0.0);
    }

    #[test]
    fn cell_and_periodic_symbol_values() {
        let p = RadialProfile::new(vec![22.4]);
        let cell = CellGeometry::new(0.3, 0.05).unwrap();
        let b_quarter = p.eval(0.25);
        assert_eq!(eval_cell_symbol(&p, &cell, Complex64::new(0.0, 0.0)), 0.0);
        assert_relative_eq!(
            eval_cell_symbol(&p, &cell, Complex64::new(0.0, 0.25 * 0.3)),
            b_quarter,
            max_relative = 1e-13
        );
        assert_eq!(eval_cell_symbol(&p, &cell, Complex64::new(0.4, 0.0)), 0.0);
        for m in -3..=3 {
            assert_eq!(eval_periodic_symbol(&p, &cell, Complex64::new(m as f64, 0.0)), 0.0);
        }
        let z = Complex64::new(3.0 + 0.5 * 0.3 * 0.5, 0.0);
        assert_relative_eq!(
            eval_periodic_symbol(&p, &cell, z),
            p.eval(0.25),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sup_norm_of_simple_profiles() {
        let p = RadialProfile::new(vec![22.4]);
        assert_relative_eq!(p.sup_norm(), 2.8, max_relative = 1e-12);
        assert_eq!(RadialProfile::unit().sup_norm(), 1.0);
        assert_eq!(RadialProfile::zero().sup_norm(), 0.0);
    }

    #[test]
    fn target_spec_validation() {
        let t = TargetSpec::new(vec![0.1, 0.3, 0.2], 0.02, 0.01).unwrap();
        assert_eq!(t.targets, vec![0.3, 0.2, 0.1]);
        assert!(!t.epsilon_below_delta());
        assert!(TargetSpec::new(vec![0.1, 0.1], 0.02, 0.05).is_err());
        assert!(TargetSpec::new(vec![0.1], 0.0, 0.05).is_err());
    }

    #[test]
    fn profile_document_shape() {
        let p = RadialProfile::new(vec![1.0, 2.0]);
        let doc = ProfileDocument::new(0.3, &p, MomentConvention::Corrected);
        let v: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["R0"], 0.3);
        assert_eq!(v["coeffs"][1], 2.0);
        let back: ProfileDocument =
            serde_json::from_str(r#"{"R0": 0.3, "coeffs": [1.0, 2.0]}"#).unwrap();
        assert_eq!(back.profile(), p);
    }
}
