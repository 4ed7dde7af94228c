//! Floquet transform on a truncated periodic domain.
//!
//! A field on the cells `m = -M..M` is sampled at the shared cell quadrature
//! nodes. The forward transform is evaluated on the `2M + 1` point grid
//! `eta_j = -pi + 2 pi j / (2M + 1)`, the exact discrete dual of the cell
//! index, and every grid point carries the measure `2 pi / (2M + 1)`. With
//! that weighting the discrete Parseval identity holds exactly.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::geometry::QuadratureRule;
use crate::linalg::CMatrix;
use crate::par::{self, Execution};
use crate::quasi_bergman::TwistedBasis;

/// Field on the cells `m = -M..M`; `samples[m + M]` holds the values of
/// `f(z + m)` at the cell nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub m_half: usize,
    pub samples: Vec<Vec<Complex64>>,
}

/// Transformed field; `samples[j]` holds `F f(., eta_j)` at the cell nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetField {
    pub etas: Vec<f64>,
    pub samples: Vec<Vec<Complex64>>,
}

/// The grid dual to `2M + 1` cells.
pub fn floquet_grid(m_half: usize) -> Vec<f64> {
    let n = 2 * m_half + 1;
    (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
}

/// Measure carried by each grid point.
pub fn grid_measure(m_half: usize) -> f64 {
    2.0 * PI / (2 * m_half + 1) as f64
}

impl CellField {
    pub fn new(m_half: usize, samples: Vec<Vec<Complex64>>) -> Result<Self> {
        if samples.len() != 2 * m_half + 1 {
            return Err(param(format!(
                "expected {} cells for M = {m_half}, got {}",
                2 * m_half + 1,
                samples.len()
            )));
        }
        let n = samples[0].len();
        if samples.iter().any(|s| s.len() != n) {
            return Err(param("cells carry different numbers of samples"));
        }
        Ok(Self { m_half, samples })
    }

    pub fn zeros(m_half: usize, nodes: usize) -> Self {
        Self {
            m_half,
            samples: vec![vec![Complex64::new(0.0, 0.0); nodes]; 2 * m_half + 1],
        }
    }

    /// Independent standard complex Gaussian-like entries (uniform in the
    /// unit square, which is enough for norm tests).
    pub fn random<R: Rng>(m_half: usize, nodes: usize, rng: &mut R) -> Self {
        let samples = (0..2 * m_half + 1)
            .map(|_| {
                (0..nodes)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        Self { m_half, samples }
    }

    pub fn nodes(&self) -> usize {
        self.samples.first().map_or(0, |s| s.len())
    }

    pub fn cell(&self, m: i64) -> Option<&[Complex64]> {
        let idx = m + self.m_half as i64;
        if idx < 0 {
            return None;
        }
        self.samples.get(idx as usize).map(|v| v.as_slice())
    }

    /// `g(z + m) = f(z + m + shift)`, zero where the source cell is outside
    /// the truncation.
    pub fn translate(&self, shift: i64) -> Self {
        let mut out = Self::zeros(self.m_half, self.nodes());
        let m = self.m_half as i64;
        for (i, dst) in out.samples.iter_mut().enumerate() {
            let src = i as i64 - m + shift;
            if let Some(v) = self.cell(src) {
                dst.copy_from_slice(v);
            }
        }
        out
    }

    /// `sum_m (f_m | g_m)` in the weighted cell inner product.
    pub fn inner(&self, other: &CellField, quad: &QuadratureRule) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| quad.inner(a, b))
            .sum()
    }

    pub fn norm(&self, quad: &QuadratureRule) -> f64 {
        self.samples
            .iter()
            .map(|s| quad.norm(s).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl FloquetField {
    /// Norm in `L^2(-pi, pi; L^2(cell))` with the grid measure.
    pub fn norm(&self, quad: &QuadratureRule) -> f64 {
        let dm = 2.0 * PI / self.etas.len() as f64;
        (dm * self
            .samples
            .iter()
            .map(|s| quad.norm(s).powi(2))
            .sum::<f64>())
        .sqrt()
    }
}

fn phase_table(etas: &[f64], m_half: usize, sign: f64) -> CMatrix {
    let m = m_half as i64;
    CMatrix::from_fn(etas.len(), 2 * m_half + 1, |j, c| {
        Complex64::from_polar(1.0, sign * etas[j] * (c as i64 - m) as f64)
    })
}

/// `F f(z, eta_j) = (2 pi)^(-1/2) sum_m exp(-i eta_j m) f(z + m)`.
pub fn floquet_forward(field: &CellField, exec: Execution) -> FloquetField {
    let etas = floquet_grid(field.m_half);
    let phases = phase_table(&etas, field.m_half, -1.0);
    let scale = 1.0 / (2.0 * PI).sqrt();
    let nodes = field.nodes();
    let rows: Vec<usize> = (0..etas.len()).collect();
    let samples = par::map(exec, &rows, |&j| {
        let mut out = vec![Complex64::new(0.0, 0.0); nodes];
        for (c, cell) in field.samples.iter().enumerate() {
            let p = phases[(j, c)] * scale;
            for (o, v) in out.iter_mut().zip(cell) {
                *o += p * v;
            }
        }
        out
    });
    FloquetField { etas, samples }
}

/// `f(z + m) = (2 pi)^(-1/2) sum_j (2 pi / (2M+1)) exp(i eta_j m) g(z, eta_j)`.
pub fn floquet_inverse(ff: &FloquetField, exec: Execution) -> Result<CellField> {
    let n = ff.etas.len();
    if n % 2 == 0 || ff.samples.len() != n {
        return Err(param(format!(
            "Floquet grid of {n} points does not match an odd cell count"
        )));
    }
    let m_half = (n - 1) / 2;
    let grid = floquet_grid(m_half);
    if grid.iter().zip(&ff.etas).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(param("eta grid is not the dual grid of the cell range"));
    }
    let phases = phase_table(&ff.etas, m_half, 1.0);
    let scale = grid_measure(m_half) / (2.0 * PI).sqrt();
    let nodes = ff.samples.first().map_or(0, |s| s.len());
    let cells: Vec<usize> = (0..n).collect();
    let samples = par::map(exec, &cells, |&c| {
        let mut out = vec![Complex64::new(0.0, 0.0); nodes];
        for (j, g) in ff.samples.iter().enumerate() {
            let p = phases[(j, c)] * scale;
            for (o, v) in out.iter_mut().zip(g) {
                *o += p * v;
            }
        }
        out
    });
    Ok(CellField { m_half, samples })
}

/// Inverse transform of `g(z) X(eta)` where `X` is the indicator of
/// `|eta - mu| <= 1/(2 n_width)` on the grid, scaled to unit mass for an
/// unclipped window, and `g = Q v` is a fiber eigenfunction at `mu`.
///
/// `mu` must be a grid point of `floquet_grid(m_half)`.
pub fn quasimode_synthesize(
    band_eigvec: &[Complex64],
    basis: &TwistedBasis,
    mu: f64,
    n_width: usize,
    m_half: usize,
    exec: Execution,
) -> Result<CellField> {
    if n_width == 0 {
        return Err(param("n_width must be positive"));
    }
    if band_eigvec.len() != basis.dim_eff() {
        return Err(Error::Misaligned {
            expected: basis.dim_eff(),
            got: band_eigvec.len(),
        });
    }
    let etas = floquet_grid(m_half);
    let step = grid_measure(m_half);
    let center = etas
        .iter()
        .position(|e| (e - mu).abs() < 1e-12)
        .ok_or(Error::OffGrid(mu))?;

    let q = basis.values();
    let g: Vec<Complex64> = (0..q.nrows())
        .map(|r| {
            (0..q.ncols())
                .map(|c| q[(r, c)] * band_eigvec[c])
                .sum()
        })
        .collect();

    let half = 1.0 / (2.0 * n_width as f64);
    let reach = (half / step + 1e-9).floor() as i64;
    let window = (2 * reach + 1) as f64;
    let height = (1.0 / (window * step)).sqrt();
    let zero = vec![Complex64::new(0.0, 0.0); g.len()];
    let samples = (0..etas.len())
        .map(|j| {
            let off = j as i64 - center as i64;
            if off.abs() <= reach {
                g.iter().map(|v| v * height).collect()
            } else {
                zero.clone()
            }
        })
        .collect();
    floquet_inverse(&FloquetField { etas, samples }, exec)
}

/// Worst-case Parseval and round-trip residuals over random fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub m_half: usize,
    pub trials: usize,
    /// `max |‖Ff‖² - ‖f‖²| / ‖f‖²`.
    pub parseval: f64,
    /// `max ‖F⁻¹Ff - f‖ / ‖f‖`.
    pub round_trip: f64,
}

/// Runs `trials` random fields through the forward and inverse transforms.
pub fn parseval_check(
    m_half: usize,
    trials: usize,
    seed: u64,
    quad: &QuadratureRule,
    exec: Execution,
) -> Result<ParsevalReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parseval = 0.0_f64;
    let mut round_trip = 0.0_f64;
    for _ in 0..trials {
        let f = CellField::random(m_half, quad.len(), &mut rng);
        let ff = floquet_forward(&f, exec);
        let back = floquet_inverse(&ff, exec)?;
        let n = f.norm(quad);
        parseval = parseval.max((ff.norm(quad).powi(2) - n * n).abs() / (n * n));
        let diff = CellField {
            m_half,
            samples: back
                .samples
                .iter()
                .zip(&f.samples)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        };
        round_trip = round_trip.max(diff.norm(quad) / n);
    }
    Ok(ParsevalReport {
        m_half,
        trials,
        parseval,
        round_trip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disc_quadrature;

    fn quad() -> QuadratureRule {
        build_disc_quadrature(0.3, 4, 6).unwrap()
    }

    #[test]
    fn single_cell_is_flat_in_eta() {
        let q = quad();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = CellField::random(0, q.len(), &mut rng).samples.remove(0);
        let mut f = CellField::zeros(3, q.len());
        f.samples[3] = g.clone();
        let ff = floquet_forward(&f, Execution::Sequential);
        let s = 1.0 / (2.0 * PI).sqrt();
        for row in &ff.samples {
            for (a, b) in row.iter().zip(&g) {
                assert!((a - b * s).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn plane_wave_concentrates() {
        let q = quad();
        let m = 4;
        let grid = floquet_grid(m);
        let eta0 = grid[6];
        let g: Vec<Complex64> = q.nodes.iter().map(|z| z + 1.0).collect();
        let samples = (-(m as i64)..=m as i64)
            .map(|c| {
                let ph = Complex64::from_polar(1.0, eta0 * c as f64);
                g.iter().map(|v| v * ph).collect()
            })
            .collect();
        let ff = floquet_forward(&CellField::new(m, samples).unwrap(), Execution::Sequential);
        for (j, row) in ff.samples.iter().enumerate() {
            let n = q.norm(row);
            if j == 6 {
                assert!(n > 1.0);
            } else {
                assert!(n < 1e-12, "j={j}: {n}");
            }
        }
    }

    #[test]
    fn parseval_holds_on_small_grid() {
        let r = parseval_check(6, 3, 9, &quad(), Execution::Sequential).unwrap();
        assert!(r.parseval < 1e-12 && r.round_trip < 1e-12, "{r:?}");
    }

    #[test]
    fn inverse_rejects_even_grids() {
        let ff = FloquetField {
            etas: vec![0.0, 1.0],
            samples: vec![vec![], vec![]],
        };
        assert!(floquet_inverse(&ff, Execution::Sequential).is_err());
    }

    #[test]
    fn translation_covariance() {
        let q = quad();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 5;
        let mut f = CellField::random(m, q.len(), &mut rng);
        // Keep the support away from the truncation edges.
        for i in [0, 1, 2 * m - 1, 2 * m] {
            f.samples[i].iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        }
        let shifted = f.translate(1);
        let a = floquet_forward(&shifted, Execution::Sequential);
        let b = floquet_forward(&f, Execution::Sequential);
        for ((ra, rb), &eta) in a.samples.iter().zip(&b.samples).zip(&a.etas) {
            let ph = Complex64::from_polar(1.0, eta);
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - ph * y).norm() < 1e-13);
            }
        }
    }
}
