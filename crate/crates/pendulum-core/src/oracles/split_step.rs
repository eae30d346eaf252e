//! Symmetric split-operator evolution on a uniform angle grid.
//!
//! One step of length `δ` is `K(δ/2) · V(δ) · K(δ/2)` with the kinetic phase
//! `e^{−iL²δ/4μ}` applied to the discrete Fourier coefficients and the
//! potential phase `e^{−iαδ cos θ_j}` applied on the grid. Consecutive
//! half-kinetic steps are merged.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{band_limited_delta_bins, check_band, read_out_bins, AngleGrid};
use crate::kernel::{KernelQuery, PendulumParams};
use crate::{Error, Result};

pub struct SplitStepPropagator {
    params: PendulumParams,
    grid: AngleGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SplitStepPropagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplitStepPropagator")
            .field("params", &self.params)
            .field("grid", &self.grid)
            .finish()
    }
}

impl SplitStepPropagator {
    pub fn new(params: PendulumParams, grid: AngleGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            params,
            grid,
            forward: planner.plan_fft_forward(grid.n_points),
            inverse: planner.plan_fft_inverse(grid.n_points),
        }
    }

    pub fn grid(&self) -> AngleGrid {
        self.grid
    }

    fn kinetic(&self, dt: f64) -> Vec<Complex64> {
        (0..self.grid.n_points)
            .map(|j| {
                let l = self.grid.momentum(j);
                Complex64::from_polar(1.0, -self.params.level(l) * dt)
            })
            .collect()
    }

    fn potential(&self, dt: f64) -> Vec<Complex64> {
        self.grid
            .nodes()
            .into_iter()
            .map(|th| Complex64::from_polar(1.0, -self.params.alpha * dt * th.cos()))
            .collect()
    }

    /// Evolves Fourier coefficients (FFT bin order) over `duration` in
    /// `n_steps` symmetric steps.
    pub fn evolve(&self, coeffs: &[Complex64], duration: f64, n_steps: usize) -> Result<Vec<Complex64>> {
        let n = self.grid.n_points;
        if coeffs.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        if n_steps < 1 {
            return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
        }
        let dt = duration / n_steps as f64;
        let half = self.kinetic(dt / 2.0);
        let full = self.kinetic(dt);
        let pot = self.potential(dt);
        let scale = 1.0 / n as f64;
        let mut c: Vec<Complex64> = coeffs.iter().zip(&half).map(|(a, b)| a * b).collect();
        for step in 0..n_steps {
            self.inverse.process(&mut c);
            for (x, v) in c.iter_mut().zip(&pot) {
                *x *= v;
            }
            self.forward.process(&mut c);
            let kin = if step + 1 == n_steps { &half } else { &full };
            for (x, k) in c.iter_mut().zip(kin) {
                *x *= k * scale;
            }
        }
        Ok(c)
    }

    /// Evolved band-limited delta at `θa`, read out at each `θb`.
    pub fn kernel_row(
        &self,
        theta_a: f64,
        duration: f64,
        n_steps: usize,
        band: usize,
        thetas_b: &[f64],
    ) -> Result<Vec<Complex64>> {
        check_band(&self.grid, band)?;
        let c0 = band_limited_delta_bins(&self.grid, theta_a, band);
        let c = self.evolve(&c0, duration, n_steps)?;
        Ok(thetas_b.iter().map(|&tb| read_out_bins(&self.grid, &c, tb)).collect())
    }
}

/// Split-step reference propagator of the band-limited delta.
pub fn split_step_kernel(
    p: &PendulumParams,
    g: &AngleGrid,
    q: &KernelQuery,
    n_steps: usize,
    band: usize,
) -> Result<Complex64> {
    SplitStepPropagator::new(*p, *g)
        .kernel_row(q.theta_a(), q.duration(), n_steps, band, &[q.theta_b()])
        .map(|v| v[0])
}
