//! Momentum-basis diagonalization of `H = −(1/2μ)∂²_θ + α cos θ`.
//!
//! In the plane-wave basis `e^{iLθ}/√(2π)` the Hamiltonian is tridiagonal:
//! `L²/2μ` on the diagonal and `α/2` on the two neighbouring bands. Its
//! eigenvalues give the Mathieu characteristic values through `a = 2μE`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BandSide;
use crate::kernel::{KernelQuery, PendulumParams};
use crate::summation::CompensatedSum;
use crate::{Error, Result};

/// Default basis cutoff for `μ|α| ≤ 5`.
pub const DEFAULT_L_CUT: usize = 40;

const RESIDUAL_TOL: f64 = 1e-9;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal matrix needs n diagonal and n - 1 off-diagonal entries (got {} and {})",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &o) in self.off.iter().enumerate() {
            m[(i, i + 1)] = o;
            m[(i + 1, i)] = o;
        }
        m
    }

    fn is_reflection_symmetric(&self) -> bool {
        let n = self.dim();
        n % 2 == 1
            && (0..n).all(|i| self.diag[i] == self.diag[n - 1 - i])
            && (0..n - 1).all(|i| self.off[i] == self.off[n - 2 - i])
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Hamiltonian on `L = −l_cut..=l_cut`.
pub fn build_hamiltonian(p: &PendulumParams, l_cut: usize) -> Result<TridiagonalMatrix> {
    if l_cut < 1 {
        return Err(Error::InvalidParameter("l_cut must be >= 1".into()));
    }
    let l_cut = l_cut as i64;
    let diag = (-l_cut..=l_cut).map(|l| p.level(l)).collect();
    let off = vec![p.alpha / 2.0; 2 * l_cut as usize];
    TridiagonalMatrix::new(diag, off)
}

fn dense_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, 1e-15, 100_000)
        .ok_or_else(|| Error::Eigensolver(format!("no convergence for a {n}x{n} block")))?;
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Eigen-decomposition of a symmetric tridiagonal matrix.
///
/// A reflection-symmetric matrix of odd size (the pendulum Hamiltonian) is
/// split into its even and odd blocks first; otherwise the high `±L` pairs
/// are numerically degenerate and the eigenvectors lose their parity.
pub fn diagonalize(h: &TridiagonalMatrix) -> Result<SpectralSolution> {
    let n = h.dim();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);
    if n > 1 && h.is_reflection_symmetric() {
        let c = n / 2;
        let even = TridiagonalMatrix {
            diag: h.diag[c..].to_vec(),
            off: (0..c)
                .map(|j| if j == 0 { 2f64.sqrt() * h.off[c] } else { h.off[c + j] })
                .collect(),
        };
        let (vals, vecs) = dense_eigen(even.to_dense())?;
        for (m, &e) in vals.iter().enumerate() {
            let mut v = vec![0.0; n];
            v[c] = vecs[(0, m)];
            for j in 1..=c {
                v[c + j] = vecs[(j, m)] * FRAC_1_SQRT_2;
                v[c - j] = vecs[(j, m)] * FRAC_1_SQRT_2;
            }
            pairs.push((e, v));
        }
        let odd = TridiagonalMatrix {
            diag: h.diag[c + 1..].to_vec(),
            off: h.off[c + 1..].to_vec(),
        };
        let (vals, vecs) = dense_eigen(odd.to_dense())?;
        for (m, &e) in vals.iter().enumerate() {
            let mut v = vec![0.0; n];
            for j in 1..=c {
                v[c + j] = vecs[(j - 1, m)] * FRAC_1_SQRT_2;
                v[c - j] = -vecs[(j - 1, m)] * FRAC_1_SQRT_2;
            }
            pairs.push((e, v));
        }
    } else {
        let (vals, vecs) = dense_eigen(h.to_dense())?;
        for (m, &e) in vals.iter().enumerate() {
            pairs.push((e, vecs.column(m).iter().copied().collect()));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut e_vectors = DMatrix::zeros(n, n);
    let mut e_values = Vec::with_capacity(n);
    for (col, (e, mut v)) in pairs.into_iter().enumerate() {
        // Deterministic sign: the largest component (first on ties) is positive.
        let pivot = v
            .iter()
            .enumerate()
            .fold((0usize, 0.0f64), |best, (i, x)| {
                if x.abs() > best.1 + 1e-12 {
                    (i, x.abs())
                } else {
                    best
                }
            })
            .0;
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let hv = h.apply(&v);
        let residual = hv.iter().zip(&v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        if !(residual < RESIDUAL_TOL) {
            return Err(Error::Eigensolver(format!(
                "eigenpair {col} (E = {e}) has residual {residual:.3e}"
            )));
        }
        for (row, x) in v.into_iter().enumerate() {
            e_vectors[(row, col)] = x;
        }
        e_values.push(e);
    }
    Ok(SpectralSolution {
        e_values,
        e_vectors,
        l_cut: n / 2,
    })
}

/// Eigenvalues (ascending) and eigenvectors of the truncated Hamiltonian.
/// Row `r` of `e_vectors` holds the coefficient of momentum `L = r − l_cut`;
/// column `n` belongs to `e_values[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSolution {
    pub e_values: Vec<f64>,
    pub e_vectors: DMatrix<f64>,
    pub l_cut: usize,
}

/// Compact, serializable description of a spectral solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub l_cut: usize,
    pub e_ground: f64,
    pub e_top: f64,
}

impl SpectralSolution {
    pub fn new(p: &PendulumParams, l_cut: usize) -> Result<Self> {
        diagonalize(&build_hamiltonian(p, l_cut)?)
    }

    /// Starts at [`DEFAULT_L_CUT`] (scaled up for `μ|α| > 5`) and doubles
    /// the cutoff until the top eigenvalue exceeds `10 · e_max`.
    pub fn with_energy_scale(p: &PendulumParams, e_max: f64) -> Result<Self> {
        let q = p.mu * p.alpha.abs();
        let mut l_cut = DEFAULT_L_CUT * (q / 5.0).ceil().max(1.0) as usize;
        loop {
            let s = Self::new(p, l_cut)?;
            if s.e_top() > 10.0 * e_max.abs() {
                return Ok(s);
            }
            l_cut *= 2;
        }
    }

    pub fn dim(&self) -> usize {
        self.e_values.len()
    }

    pub fn e_top(&self) -> f64 {
        *self.e_values.last().unwrap()
    }

    /// Lowest Mathieu characteristic value `a_0 = 2μE_0`.
    pub fn ground_characteristic_value(&self, p: &PendulumParams) -> f64 {
        2.0 * p.mu * self.e_values[0]
    }

    pub fn summary(&self) -> SpectralSummary {
        SpectralSummary {
            l_cut: self.l_cut,
            e_ground: self.e_values[0],
            e_top: self.e_top(),
        }
    }

    /// Momentum of basis row `r`.
    pub fn momentum(&self, r: usize) -> i64 {
        r as i64 - self.l_cut as i64
    }

    /// `Σ_{|L| ≤ band} c_L^{(n)} e^{i·sign·Lθ}` for every eigenvector `n`.
    fn projections(&self, theta: f64, sign: f64, band: usize) -> Vec<Complex64> {
        let phases: Vec<Complex64> = (0..self.dim())
            .map(|r| {
                let l = self.momentum(r);
                if l.unsigned_abs() as usize <= band {
                    Complex64::from_polar(1.0, sign * l as f64 * theta)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        (0..self.dim())
            .map(|n| {
                let col = self.e_vectors.column(n);
                let mut acc = CompensatedSum::new();
                for (r, ph) in phases.iter().enumerate() {
                    if ph.re != 0.0 || ph.im != 0.0 {
                        acc.add(ph * col[r]);
                    }
                }
                acc.value()
            })
            .collect()
    }

    fn bands(&self, band: usize, side: BandSide) -> (usize, usize) {
        match side {
            BandSide::Source => (band, self.l_cut),
            BandSide::Target => (self.l_cut, band),
        }
    }

    /// `Σ_n w_n ψ_n(θb) ψ_n*(θa)` for each `θb`, with the band limit applied
    /// on the requested side.
    fn eigen_sum(
        &self,
        theta_a: f64,
        thetas_b: &[f64],
        band: usize,
        side: BandSide,
        weight: impl Fn(f64) -> Complex64,
    ) -> Vec<Complex64> {
        let (band_a, band_b) = self.bands(band, side);
        let pa = self.projections(theta_a, -1.0, band_a);
        let w: Vec<Complex64> = self.e_values.iter().zip(&pa).map(|(&e, p)| weight(e) * p).collect();
        thetas_b
            .iter()
            .map(|&tb| {
                let pb = self.projections(tb, 1.0, band_b);
                let mut acc = CompensatedSum::new();
                for (x, y) in w.iter().zip(&pb) {
                    acc.add(x * y);
                }
                acc.value() / (2.0 * PI)
            })
            .collect()
    }

    /// Regularized propagator along a row of final angles.
    pub fn kernel_row(
        &self,
        theta_a: f64,
        duration: f64,
        band: usize,
        side: BandSide,
        thetas_b: &[f64],
    ) -> Vec<Complex64> {
        self.eigen_sum(theta_a, thetas_b, band, side, |e| {
            Complex64::from_polar(1.0, -e * duration)
        })
    }

    pub fn kernel(&self, q: &KernelQuery, band: usize, side: BandSide) -> Complex64 {
        self.kernel_row(q.theta_a(), q.duration(), band, side, &[q.theta_b()])[0]
    }

    /// `Σ_n ψ_n(θb) ψ_n*(θa) · i/(E − E_n)`, the exact time transform of
    /// [`Self::kernel`] for `Im E > 0`.
    pub fn resolvent(&self, theta_a: f64, theta_b: f64, energy: Complex64, band: usize, side: BandSide) -> Complex64 {
        self.eigen_sum(theta_a, &[theta_b], band, side, |e| Complex64::i() / (energy - e))[0]
    }
}

/// Spectral reference propagator with the band limit on `side`.
pub fn spectral_kernel(s: &SpectralSolution, q: &KernelQuery, band: usize, side: BandSide) -> Complex64 {
    s.kernel(q, band, side)
}

/// Shared handle used by evaluators.
pub type SharedSpectral = Arc<SpectralSolution>;
