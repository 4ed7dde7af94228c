//! The periodic cell and quadrature rules over it.
//!
//! The cell is centered at the origin: a disc of radius `R0` unioned with the
//! horizontal strip `|Re z| < 1/2, |Im z| < h`. Its integer translates tile the
//! periodic domain.
//!
//! Quadrature rules are polar product rules on the disc (Gauss-Legendre in the
//! radius, trapezoidal in the angle) plus mapped tensor Gauss-Legendre rules on
//! the two pieces of the strip outside the disc. The curved inner edge of those
//! pieces is resolved exactly along every horizontal Gauss line, so the rules
//! converge spectrally without meshing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{param, Result};

/// The disc-plus-strip cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    r0: f64,
    h: f64,
}

impl CellGeometry {
    /// Largest admissible ligament half-width.
    pub const H_MAX: f64 = 0.1;

    pub fn new(r0: f64, h: f64) -> Result<Self> {
        if !(r0 > 0.25 && r0 < 0.5) {
            return Err(param(format!("R0 = {r0} must lie in (1/4, 1/2)")));
        }
        if !(h > 0.0 && h <= Self::H_MAX) {
            return Err(param(format!("h = {h} must lie in (0, 1/10]")));
        }
        // h <= 1/10 < 1/4 < R0 always holds, kept for clarity of the invariant.
        debug_assert!(h < r0);
        Ok(Self { r0, h })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < self.r0 || (z.re.abs() < 0.5 && z.im.abs() < self.h)
    }

    /// Exact area: disc plus strip minus their intersection.
    pub fn area(&self) -> f64 {
        let (r, h) = (self.r0, self.h);
        let lens = 2.0 * (h * (r * r - h * h).sqrt() + r * r * (h / r).asin());
        PI * r * r + 2.0 * h - lens
    }
}

/// Orders of the cell quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadOrders {
    /// Gauss points per radial panel of the disc.
    pub n_r: usize,
    /// Equispaced angles on the disc.
    pub n_t: usize,
    /// Gauss points per direction on each strip piece.
    pub n_strip: usize,
}

impl Default for QuadOrders {
    fn default() -> Self {
        Self {
            n_r: 24,
            n_t: 48,
            n_strip: 16,
        }
    }
}

/// Nodes and positive area weights.
///
/// For cell rules the first `disc_nodes` entries belong to the disc part.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    disc_nodes: usize,
    disc_radius: f64,
    radial_order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Number of leading nodes that lie in the disc part.
    pub fn disc_nodes(&self) -> usize {
        self.disc_nodes
    }

    pub fn disc_radius(&self) -> f64 {
        self.disc_radius
    }

    /// Gauss order of each radial panel.
    pub fn radial_order(&self) -> usize {
        self.radial_order
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| f(z) * w)
            .sum()
    }

    pub fn integrate_real<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| f(z) * w)
            .sum()
    }

    /// Weighted inner product `sum w conj(f) g` of sampled functions.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        debug_assert_eq!(f.len(), self.len());
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(&w, (a, b))| a.conj() * b * w)
            .sum()
    }

    pub fn norm(&self, f: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .map(|(&w, a)| w * a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Same nodes and weights, bit for bit.
    pub fn same_rule(&self, other: &QuadratureRule) -> bool {
        std::ptr::eq(self, other) || (self.nodes == other.nodes && self.weights == other.weights)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| half * v).collect(),
    )
}

/// Polar product rule on the disc `|z| < r0`.
pub fn build_disc_quadrature(r0: f64, n_r: usize, n_t: usize) -> Result<QuadratureRule> {
    build_disc_quadrature_with_breaks(r0, &[], n_r, n_t)
}

/// Polar product rule with additional radial panel breaks, given as fractions
/// of `r0` in `(0, 1)`. Breaks let piecewise radial integrands (a symbol with a
/// support edge) be integrated at full Gauss accuracy.
pub fn build_disc_quadrature_with_breaks(
    r0: f64,
    breaks: &[f64],
    n_r: usize,
    n_t: usize,
) -> Result<QuadratureRule> {
    if n_r == 0 || n_t == 0 {
        return Err(param(format!("quadrature orders must be positive (n_r = {n_r}, n_t = {n_t})")));
    }
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(param(format!("disc radius {r0} must be positive")));
    }
    let mut edges = vec![0.0];
    let mut fr: Vec<f64> = breaks.to_vec();
    fr.sort_by(f64::total_cmp);
    for f in fr {
        if !(f > 0.0 && f < 1.0) {
            return Err(param(format!("radial break {f} must lie in (0, 1)")));
        }
        if f * r0 > *edges.last().unwrap() {
            edges.push(f * r0);
        }
    }
    edges.push(r0);

    let dtheta = 2.0 * PI / n_t as f64;
    let mut nodes = Vec::with_capacity((edges.len() - 1) * n_r * n_t);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in edges.windows(2) {
        let (rs, ws) = gauss_legendre_on(n_r, pair[0], pair[1]);
        for (r, w) in rs.iter().zip(&ws) {
            for j in 0..n_t {
                nodes.push(Complex64::from_polar(*r, j as f64 * dtheta));
                weights.push(w * r * dtheta);
            }
        }
    }
    let n = nodes.len();
    Ok(QuadratureRule {
        nodes,
        weights,
        disc_nodes: n,
        disc_radius: r0,
        radial_order: n_r,
    })
}

/// Rule on the whole cell: the disc rule (with the given radial breaks) followed
/// by the two strip pieces `{z in S_h : |Re z| > sqrt(R0^2 - Im z^2)}`.
pub fn build_cell_quadrature_with_breaks(
    cell: &CellGeometry,
    orders: QuadOrders,
    breaks: &[f64],
) -> Result<QuadratureRule> {
    if orders.n_strip == 0 {
        return Err(param("n_strip must be positive"));
    }
    let mut rule = build_disc_quadrature_with_breaks(cell.r0, breaks, orders.n_r, orders.n_t)?;
    let (ys, wys) = gauss_legendre_on(orders.n_strip, -cell.h, cell.h);
    for sign in [1.0, -1.0] {
        for (&y, &wy) in ys.iter().zip(&wys) {
            let x0 = (cell.r0 * cell.r0 - y * y).sqrt();
            let (xs, wxs) = gauss_legendre_on(orders.n_strip, x0, 0.5);
            for (&x, &wx) in xs.iter().zip(&wxs) {
                rule.nodes.push(Complex64::new(sign * x, y));
                rule.weights.push(wx * wy);
            }
        }
    }
    Ok(rule)
}

pub fn build_cell_quadrature(
    cell: &CellGeometry,
    n_r: usize,
    n_t: usize,
    n_strip: usize,
) -> Result<QuadratureRule> {
    build_cell_quadrature_with_breaks(cell, QuadOrders { n_r, n_t, n_strip }, &[])
}
