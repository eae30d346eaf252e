//! Time-sliced path integral on a grid: repeated application of the
//! short-time transfer matrix
//!
//! ```text
//! M_ij = e^{−iεα cos θ_i} · K_ε(θ_i − θ_j) · Δθ
//! ```
//!
//! where `K_ε` is the free short-time kernel on the circle. The winding sum
//! `Σ_N √(μ/2πiε) e^{iμ(Δθ + 2πN)²/2ε}` does not converge for real `ε`; it is
//! realized through its Poisson dual `(1/2π) Σ_L e^{−iL²ε/2μ} e^{iLΔθ}`,
//! band-limited to the momenta the grid resolves. [`image_sum_kernel`]
//! evaluates the winding form itself for complex times where it converges.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{band_limited_delta_bins, check_band, read_out_bins, AngleGrid};
use crate::kernel::{rotor_sum, KernelQuery, PendulumParams};
use crate::summation::CompensatedSum;
use crate::{Error, Result};

/// Dense `n × n` short-time transfer matrix (row-major).
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    grid: AngleGrid,
    entries: Vec<Complex64>,
}

impl TransferMatrix {
    pub fn new(p: &PendulumParams, grid: AngleGrid, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("slice length must be > 0, got {eps}")));
        }
        let n = grid.n_points;
        let h = grid.spacing();
        if (eps / p.mu).sqrt() < h {
            log::warn!(
                "short-time kernel under-resolved: sqrt(eps/mu) = {:.3e} < grid spacing {h:.3e}",
                (eps / p.mu).sqrt()
            );
        }
        let circulant: Vec<Complex64> = (0..n)
            .map(|m| rotor_sum(p.mu, eps, m as f64 * h, grid.max_momentum()) * h)
            .collect();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            let pot = Complex64::from_polar(1.0, -eps * p.alpha * grid.node(i).cos());
            for j in 0..n {
                entries.push(pot * circulant[(i + n - j) % n]);
            }
        }
        Ok(Self { grid, entries })
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n_points;
        (0..n)
            .map(|i| {
                let row = &self.entries[i * n..(i + 1) * n];
                let mut acc = CompensatedSum::new();
                for (m, x) in row.iter().zip(psi) {
                    acc.add(m * x);
                }
                acc.value()
            })
            .collect()
    }
}

/// Evolved band-limited delta after `n_slices` transfer steps, read out at
/// each `θb` from its grid Fourier coefficients.
pub fn time_sliced_row(
    p: &PendulumParams,
    grid: &AngleGrid,
    theta_a: f64,
    duration: f64,
    n_slices: usize,
    band: usize,
    thetas_b: &[f64],
) -> Result<Vec<Complex64>> {
    if n_slices < 1 {
        return Err(Error::InvalidParameter("n_slices must be >= 1".into()));
    }
    check_band(grid, band)?;
    let n = grid.n_points;
    let m = TransferMatrix::new(p, *grid, duration / n_slices as f64)?;
    let mut psi = band_limited_delta_bins(grid, theta_a, band);
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut psi);
    for _ in 0..n_slices {
        psi = m.apply(&psi);
    }
    planner.plan_fft_forward(n).process(&mut psi);
    let scale = 1.0 / n as f64;
    psi.iter_mut().for_each(|c| *c *= scale);
    Ok(thetas_b.iter().map(|&tb| read_out_bins(grid, &psi, tb)).collect())
}

/// Time-sliced reference propagator of the band-limited delta.
pub fn time_sliced_kernel(
    p: &PendulumParams,
    g: &AngleGrid,
    q: &KernelQuery,
    n_slices: usize,
    band: usize,
) -> Result<Complex64> {
    time_sliced_row(p, g, q.theta_a(), q.duration(), n_slices, band, &[q.theta_b()]).map(|v| v[0])
}

/// Winding (image) sum `√(μ/2πiτ) Σ_{|N| ≤ n_windings} e^{iμ(Δθ + 2πN)²/2τ}`
/// of the free short-time kernel, for complex `τ` with `Im τ < 0` where the
/// sum converges.
pub fn image_sum_kernel(mu: f64, tau: Complex64, dtheta: f64, n_windings: usize) -> Result<Complex64> {
    if !(tau.im < 0.0) {
        return Err(Error::Domain(format!(
            "the winding sum converges only for Im tau < 0, got tau = {tau}"
        )));
    }
    let prefactor = (mu / (2.0 * PI * Complex64::i() * tau)).sqrt();
    let mut acc = CompensatedSum::new();
    let n = n_windings as i64;
    for w in -n..=n {
        let x = dtheta + 2.0 * PI * w as f64;
        acc.add((Complex64::i() * mu * x * x / (2.0 * tau)).exp());
    }
    Ok(prefactor * acc.value())
}
