//! Independent reference propagators and the deviation report used to
//! compare any two kernel evaluators.
//!
//! All three oracles evolve a band-limited delta
//! `δ_Λ(θ − θa) = (1/2π) Σ_{|L| ≤ Λ} e^{iL(θ − θa)}`
//! rather than a point source, so that their pointwise values converge.

pub mod compare;
pub mod spectral;
pub mod split_step;
pub mod time_sliced;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use compare::{compare, DeviationPoint, DeviationReport, QueryGrid};
pub use spectral::{build_hamiltonian, diagonalize, spectral_kernel, SpectralSolution, TridiagonalMatrix};
pub use split_step::{split_step_kernel, SplitStepPropagator};
pub use time_sliced::{image_sum_kernel, time_sliced_kernel, TransferMatrix};

/// Where the momentum band limit of a regularized kernel is imposed.
///
/// `Source` limits the initial delta (the kernel then solves the
/// Schrödinger equation exactly in the final variables); `Target` limits the
/// read-out (exact in the initial variables). A band at or above the basis
/// cutoff makes both the same Galerkin kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BandSide {
    #[default]
    Source,
    Target,
}

impl std::str::FromStr for BandSide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(BandSide::Source),
            "target" => Ok(BandSide::Target),
            other => Err(Error::InvalidParameter(format!("unknown band side '{other}'"))),
        }
    }
}

/// Uniform grid `θ_j = j · 2π/n` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub n_points: usize,
}

impl AngleGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "angle grid needs an even number of points >= 8, got {n_points}"
            )));
        }
        Ok(Self { n_points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Largest momentum represented symmetrically on the grid (the Nyquist
    /// mode `n/2` is excluded).
    pub fn max_momentum(&self) -> usize {
        self.n_points / 2 - 1
    }

    /// Signed momentum of FFT bin `j`.
    pub fn momentum(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }
}

/// Fourier coefficients `e^{−iLθa}/2π` of the band-limited delta at `θa`,
/// laid out in FFT bin order.
pub(crate) fn band_limited_delta_bins(grid: &AngleGrid, theta_a: f64, band: usize) -> Vec<Complex64> {
    (0..grid.n_points)
        .map(|j| {
            let l = grid.momentum(j);
            if l.unsigned_abs() as usize <= band && l != -(grid.n_points as i64) / 2 {
                Complex64::from_polar(1.0 / (2.0 * PI), -(l as f64) * theta_a)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// `Σ_L c_L e^{iLθ}` over FFT bins, skipping the Nyquist bin.
pub(crate) fn read_out_bins(grid: &AngleGrid, coeffs: &[Complex64], theta: f64) -> Complex64 {
    let nyquist = grid.n_points / 2;
    let mut acc = crate::summation::CompensatedSum::new();
    for (j, c) in coeffs.iter().enumerate() {
        if j != nyquist {
            acc.add(c * Complex64::from_polar(1.0, grid.momentum(j) as f64 * theta));
        }
    }
    acc.value()
}

pub(crate) fn check_band(grid: &AngleGrid, band: usize) -> Result<()> {
    if band > grid.max_momentum() {
        return Err(Error::InvalidParameter(format!(
            "band {band} exceeds the grid's largest momentum {}",
            grid.max_momentum()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(AngleGrid::new(6).is_err());
        assert!(AngleGrid::new(9).is_err());
        let g = AngleGrid::new(8).unwrap();
        assert_eq!(g.max_momentum(), 3);
        assert_eq!(
            (0..8).map(|j| g.momentum(j)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -4, -3, -2, -1]
        );
    }

    #[test]
    fn band_limited_delta_reads_back_as_dirichlet_kernel() {
        let g = AngleGrid::new(16).unwrap();
        let c = band_limited_delta_bins(&g, 0.4, 3);
        let v = read_out_bins(&g, &c, 1.1);
        let x: f64 = 1.1 - 0.4;
        let dirichlet = (3.5 * x).sin() / (0.5 * x).sin() / (2.0 * PI);
        assert!((v.re - dirichlet).abs() < 1e-14 && v.im.abs() < 1e-14);
    }
}
