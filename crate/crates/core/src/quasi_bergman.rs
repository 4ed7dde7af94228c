//! Discrete quasiperiodic Bergman spaces on the cell.
//!
//! For a Floquet parameter `eta` the generating family is the set of twisted
//! modes `exp(i (eta + 2 pi k) z)`, `k = -K..K`. Each of them is entire and
//! satisfies `f(1/2 + iy) = exp(i eta) f(-1/2 + iy)` identically.
//!
//! The modes span the same space as the Krylov-type sequence obtained by
//! repeatedly multiplying by `exp(+-2 pi i z)`, and that sequence is what gets
//! orthonormalized (classical Gram-Schmidt, applied twice) in the quadrature
//! inner product. Raw modes grow like `exp(2 pi |k| R0)` across the disc, so
//! orthonormalizing them directly would lose most of the digits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::geometry::{CellGeometry, QuadratureRule};
use crate::linalg::CMatrix;

/// Default singular-value cutoff relative to the largest one.
pub const DEFAULT_CUTOFF: f64 = 1e-12;
/// Default largest mode index.
pub const DEFAULT_MODES: usize = 10;

/// `exp(i (eta + 2 pi k) z)`.
pub fn raw_mode(eta: f64, k: i64, z: Complex64) -> Complex64 {
    (Complex64::i() * (eta + 2.0 * PI * k as f64) * z).exp()
}

/// Orthonormal basis of the discrete space `A^2_eta` at the quadrature nodes.
#[derive(Debug, Clone)]
pub struct TwistedBasis {
    eta: f64,
    k_modes: usize,
    cutoff: f64,
    cell: CellGeometry,
    quad: Arc<QuadratureRule>,
    /// Column `j` holds basis function `j` at every node.
    q: CMatrix,
    /// Coefficients over the raw modes, row `k + K`; `q = R coeffs`.
    coeffs: CMatrix,
}

impl TwistedBasis {
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn k_modes(&self) -> usize {
        self.k_modes
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn cell(&self) -> &CellGeometry {
        &self.cell
    }

    pub fn quad(&self) -> &Arc<QuadratureRule> {
        &self.quad
    }

    pub fn values(&self) -> &CMatrix {
        &self.q
    }

    pub fn dim_eff(&self) -> usize {
        self.q.ncols()
    }

    /// Basis function `j` evaluated anywhere through its raw-mode expansion.
    pub fn eval(&self, j: usize, z: Complex64) -> Complex64 {
        let k = self.k_modes as i64;
        (0..self.coeffs.nrows())
            .map(|r| self.coeffs[(r, j)] * raw_mode(self.eta, r as i64 - k, z))
            .sum()
    }

    /// `max |Q^H W Q - I|`.
    pub fn gram_residual(&self) -> f64 {
        let n = self.dim_eff();
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let g = column_inner(&self.quad.weights, &self.q, a, &self.q, b);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

fn column_inner(w: &[f64], a: &CMatrix, i: usize, b: &CMatrix, j: usize) -> Complex64 {
    a.column(i)
        .iter()
        .zip(b.column(j).iter())
        .zip(w)
        .map(|((x, y), &w)| x.conj() * y * w)
        .sum()
}

fn inner(w: &[f64], a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((x, y), &w)| x.conj() * y * w)
        .sum()
}

fn norm(w: &[f64], a: &[Complex64]) -> f64 {
    a.iter()
        .zip(w)
        .map(|(x, &w)| x.norm_sqr() * w)
        .sum::<f64>()
        .sqrt()
}

struct Krylov<'a> {
    w: &'a [f64],
    cols: Vec<Vec<Complex64>>,
    coefs: Vec<Vec<Complex64>>,
    cutoff: f64,
}

impl Krylov<'_> {
    /// Orthogonalizes `v` twice against the accepted columns. Returns the
    /// accepted normalized pair, or `None` (with the normalized raw input for
    /// continuing the chain) when the new direction falls below the cutoff.
    fn push(
        &mut self,
        mut v: Vec<Complex64>,
        mut c: Vec<Complex64>,
    ) -> std::result::Result<(Vec<Complex64>, Vec<Complex64>), (Vec<Complex64>, Vec<Complex64>)> {
        let before = norm(self.w, &v);
        let raw = (v.clone(), c.clone());
        for _ in 0..2 {
            for (q, qc) in self.cols.iter().zip(&self.coefs) {
                let h = inner(self.w, q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= h * y;
                }
                for (x, y) in c.iter_mut().zip(qc) {
                    *x -= h * y;
                }
            }
        }
        let after = norm(self.w, &v);
        if !(after > self.cutoff * before) || before == 0.0 {
            let s = if before > 0.0 { 1.0 / before } else { 0.0 };
            let (rv, rc) = raw;
            return Err((
                rv.into_iter().map(|x| x * s).collect(),
                rc.into_iter().map(|x| x * s).collect(),
            ));
        }
        let s = 1.0 / after;
        v.iter_mut().for_each(|x| *x *= s);
        c.iter_mut().for_each(|x| *x *= s);
        self.cols.push(v.clone());
        self.coefs.push(c.clone());
        Ok((v, c))
    }
}

/// Orthonormalizes the twisted family `k = -K..K` at the nodes of `quad`.
pub fn build_basis(
    cell: &CellGeometry,
    eta: f64,
    k_modes: usize,
    quad: &Arc<QuadratureRule>,
    cutoff: f64,
) -> Result<TwistedBasis> {
    if !(0.0..1.0).contains(&cutoff) {
        return Err(param(format!("cutoff {cutoff} must lie in [0, 1)")));
    }
    if !eta.is_finite() {
        return Err(param("eta must be finite"));
    }
    let w = &quad.weights;
    let kk = k_modes as i64;
    let width = 2 * k_modes + 1;
    let shift_up: Vec<Complex64> = quad
        .nodes
        .iter()
        .map(|&z| (Complex64::i() * 2.0 * PI * z).exp())
        .collect();
    let shift_down: Vec<Complex64> = shift_up.iter().map(|s| s.inv()).collect();

    let mut kr = Krylov {
        w,
        cols: Vec::with_capacity(width),
        coefs: Vec::with_capacity(width),
        cutoff,
    };
    let seed: Vec<Complex64> = quad.nodes.iter().map(|&z| raw_mode(eta, 0, z)).collect();
    let mut seed_c = vec![Complex64::new(0.0, 0.0); width];
    seed_c[k_modes] = Complex64::new(1.0, 0.0);
    let (mut up, mut up_c) = match kr.push(seed, seed_c) {
        Ok(p) => p,
        Err(_) => return Err(Error::DegenerateBasis { eta }),
    };
    let (mut down, mut down_c) = (up.clone(), up_c.clone());

    for _ in 1..=kk {
        let v: Vec<Complex64> = up.iter().zip(&shift_up).map(|(a, s)| a * s).collect();
        let c = shift_coeffs(&up_c, 1);
        (up, up_c) = kr.push(v, c).unwrap_or_else(|raw| raw);

        let v: Vec<Complex64> = down.iter().zip(&shift_down).map(|(a, s)| a * s).collect();
        let c = shift_coeffs(&down_c, -1);
        (down, down_c) = kr.push(v, c).unwrap_or_else(|raw| raw);
    }

    let n = quad.len();
    let m = kr.cols.len();
    let mut q = CMatrix::from_fn(n, m, |r, c| kr.cols[c][r]);
    let mut coeffs = CMatrix::from_fn(width, m, |r, c| kr.coefs[c][r]);

    // Final truncation in the weighted norm.
    let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let scaled = CMatrix::from_fn(n, m, |r, c| q[(r, c)] * sw[r]);
    let svd = scaled.svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m)
        .filter(|&i| svd.singular_values[i] > cutoff * smax)
        .collect();
    if keep.is_empty() {
        return Err(Error::DegenerateBasis { eta });
    }
    let smin = keep
        .iter()
        .map(|&i| svd.singular_values[i])
        .fold(f64::INFINITY, f64::min);
    if keep.len() < m || (1.0 - smin).abs() > 1e-8 || (1.0 - smax).abs() > 1e-8 {
        // Löwdin-style cleanup: q <- q V_keep S_keep^-1.
        let vt = svd.v_t.expect("requested V^T");
        let t = CMatrix::from_fn(m, keep.len(), |r, c| {
            vt[(keep[c], r)].conj() / svd.singular_values[keep[c]]
        });
        q = &q * &t;
        coeffs = &coeffs * &t;
    }

    Ok(TwistedBasis {
        eta,
        k_modes,
        cutoff,
        cell: *cell,
        quad: Arc::clone(quad),
        q,
        coeffs,
    })
}

fn shift_coeffs(c: &[Complex64], by: i64) -> Vec<Complex64> {
    let n = c.len() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
    for (i, &v) in c.iter().enumerate() {
        let j = i as i64 + by;
        if (0..n).contains(&j) {
            out[j as usize] = v;
        } else {
            debug_assert!(v.norm() < 1e-300, "mode shifted out of range");
        }
    }
    out
}

/// Coefficients `c = Q^H W f` of the discrete projection.
pub fn project(basis: &TwistedBasis, f: &[Complex64]) -> Result<DVector<Complex64>> {
    let n = basis.quad.len();
    if f.len() != n {
        return Err(Error::Misaligned {
            expected: n,
            got: f.len(),
        });
    }
    let w = &basis.quad.weights;
    Ok(DVector::from_fn(basis.dim_eff(), |j, _| {
        basis
            .q
            .column(j)
            .iter()
            .zip(f)
            .zip(w)
            .map(|((q, v), &w)| q.conj() * v * w)
            .sum()
    }))
}

/// Samples of `Q c`.
pub fn reconstruct(basis: &TwistedBasis, c: &DVector<Complex64>) -> Vec<Complex64> {
    (&basis.q * c).iter().copied().collect()
}

/// The discrete projection `P f`, sampled.
pub fn apply_projector(basis: &TwistedBasis, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = project(basis, f)?;
    Ok(reconstruct(basis, &c))
}

/// Pointwise multiplication by `exp(i (mu - eta) z)`.
pub fn twist(eta: f64, mu: f64, f: &[Complex64], nodes: &[Complex64]) -> Vec<Complex64> {
    let d = mu - eta;
    f.iter()
        .zip(nodes)
        .map(|(v, &z)| v * (Complex64::i() * d * z).exp())
        .collect()
}

/// Spectral norm of `P_a - P_b` as operators on the weighted sample space.
pub fn projector_distance(a: &TwistedBasis, b: &TwistedBasis) -> Result<f64> {
    if !a.quad.same_rule(&b.quad) {
        return Err(Error::Mismatch);
    }
    let sw: Vec<f64> = a.quad.weights.iter().map(|x| x.sqrt()).collect();
    let ua = CMatrix::from_fn(a.q.nrows(), a.q.ncols(), |r, c| a.q[(r, c)] * sw[r]);
    let ub = CMatrix::from_fn(b.q.nrows(), b.q.ncols(), |r, c| b.q[(r, c)] * sw[r]);
    Ok(leakage(&ua, &ub).max(leakage(&ub, &ua)))
}

/// `||(I - U_b U_b^H) U_a||_2` for orthonormal columns.
fn leakage(ua: &CMatrix, ub: &CMatrix) -> f64 {
    let r = ua - ub * (ub.adjoint() * ua);
    let g: DMatrix<Complex64> = r.adjoint() * &r;
    let top = g
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max);
    top.max(0.0).sqrt().min(1.0)
}

/// Discrete operator norm of `I - J_{eta,mu}` restricted to the span of
/// `basis`: the largest weighted norm of `(1 - exp(i (mu - eta) z)) f` over
/// unit `f` in the span.
pub fn twist_defect_norm(basis: &TwistedBasis, mu: f64) -> f64 {
    let d = mu - basis.eta;
    let w = &basis.quad.weights;
    let nodes = &basis.quad.nodes;
    let m = basis.dim_eff();
    let defect: Vec<f64> = nodes
        .iter()
        .map(|&z| (Complex64::new(1.0, 0.0) - (Complex64::i() * d * z).exp()).norm_sqr())
        .collect();
    let g = CMatrix::from_fn(m, m, |i, j| {
        basis
            .q
            .column(i)
            .iter()
            .zip(basis.q.column(j).iter())
            .enumerate()
            .map(|(r, (x, y))| x.conj() * y * (w[r] * defect[r]))
            .sum()
    });
    g.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max)
        .max(0.0)
        .sqrt()
}
