//! The plane-wave/Bessel series for the pendulum propagator.
//!
//! ```text
//! κ(θa, θb; T) = (1/2π) Σ_{L,k} e^{−iL²T/2μ} i^k J_k(−αT) e^{iL(θb−θa) + ikθb}
//! ```
//!
//! The double sum factorizes into a free-rotor sum over `L` and a
//! `θb`-dependent Bessel sum over `k`; both are evaluated from the outside
//! in with compensated accumulation. The separated-endpoint variant expands
//! `J_k(−αT)` with the addition theorem into `Σ_r J_{k−r}(−α t_b) J_r(α t_a)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::{i_pow, BesselTable};
use crate::summation::{sum_outside_in, CompensatedSum};
use crate::{ensure_finite, ComplexAmplitude, Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Scale factor `C` in the momentum cutoff heuristic
/// `l_max ≥ C · sqrt(2μ · 2π / T)` used by [`default_truncation`].
pub const L_MAX_SCALE: f64 = 4.0;

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Moment of inertia `μ` and potential amplitude `α` of `V = α cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    pub mu: f64,
    pub alpha: f64,
}

impl PendulumParams {
    pub fn new(mu: f64, alpha: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive and finite, got {mu}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { mu, alpha })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.mu, alpha)
    }

    /// Rotor level `L²/(2μ)`.
    #[inline]
    pub fn level(&self, l: i64) -> f64 {
        (l * l) as f64 / (2.0 * self.mu)
    }
}

/// Endpoints of a propagation: angles (reduced to `[0, 2π)`) and times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    theta_a: f64,
    theta_b: f64,
    t_a: f64,
    t_b: f64,
}

impl KernelQuery {
    pub fn new(theta_a: f64, theta_b: f64, t_a: f64, t_b: f64) -> Result<Self> {
        if !(theta_a.is_finite() && theta_b.is_finite() && t_a.is_finite() && t_b.is_finite()) {
            return Err(Error::InvalidParameter("non-finite kernel query".into()));
        }
        if !(t_b > t_a) {
            return Err(Error::InvalidParameter(format!(
                "need t_b > t_a, got t_a = {t_a}, t_b = {t_b}"
            )));
        }
        Ok(Self {
            theta_a: reduce_angle(theta_a),
            theta_b: reduce_angle(theta_b),
            t_a,
            t_b,
        })
    }

    /// Query starting at `t_a = 0` and lasting `duration`.
    pub fn elapsed(theta_a: f64, theta_b: f64, duration: f64) -> Result<Self> {
        Self::new(theta_a, theta_b, 0.0, duration)
    }

    pub fn theta_a(&self) -> f64 {
        self.theta_a
    }
    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }
    pub fn t_a(&self) -> f64 {
        self.t_a
    }
    pub fn t_b(&self) -> f64 {
        self.t_b
    }
    /// `T = t_b − t_a`.
    pub fn duration(&self) -> f64 {
        self.t_b - self.t_a
    }

    pub fn with_theta_b(&self, theta_b: f64) -> Self {
        Self {
            theta_b: reduce_angle(theta_b),
            ..*self
        }
    }
}

/// Cutoffs of the infinite sums: momentum `L`, Bessel order `k`, and the
/// inner `r` sum of the separated-endpoint form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub l_max: usize,
    pub k_max: usize,
    pub r_max: usize,
    /// Largest acceptable dropped Bessel term before a warning is logged.
    pub tail_tol: f64,
}

impl Truncation {
    pub fn new(l_max: usize, k_max: usize, r_max: usize, tail_tol: f64) -> Result<Self> {
        if l_max < 1 || k_max < 1 || r_max < 1 {
            return Err(Error::InvalidParameter(format!(
                "truncations must be >= 1 (l_max = {l_max}, k_max = {k_max}, r_max = {r_max})"
            )));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter("tail_tol must be > 0".into()));
        }
        Ok(Self {
            l_max,
            k_max,
            r_max,
            tail_tol,
        })
    }

    pub fn with_k_margin(self, extra: usize) -> Self {
        Self {
            k_max: self.k_max + extra,
            ..self
        }
    }
}

/// `(1/2π) Σ_{|L| ≤ l_max} e^{−iL²T/2μ} e^{iLΔθ}`.
pub(crate) fn rotor_sum(mu: f64, duration: f64, dtheta: f64, l_max: usize) -> Complex64 {
    let s = sum_outside_in(l_max, |l| {
        let lf = l as f64;
        Complex64::from_polar(1.0, -(lf * lf) * duration / (2.0 * mu) + lf * dtheta)
    });
    s / TWO_PI
}

/// `Σ_{|k| ≤ k_max} i^k c_k e^{ikθ}`.
pub(crate) fn bessel_factor<C>(coeff: C, k_max: usize, theta: f64) -> Complex64
where
    C: Fn(i64) -> f64,
{
    sum_outside_in(k_max, |k| {
        i_pow(k) * Complex64::from_polar(1.0, k as f64 * theta) * coeff(k)
    })
}

/// Free-rotor propagator truncated at `|L| ≤ l_max`.
pub fn free_rotor_kernel(p: &PendulumParams, q: &KernelQuery, l_max: usize) -> ComplexAmplitude {
    rotor_sum(p.mu, q.duration(), q.theta_b - q.theta_a, l_max)
}

fn warn_tail(what: &str, dropped: f64, tol: f64) {
    if dropped > tol {
        log::warn!("{what}: largest dropped Bessel term {dropped:.3e} exceeds tail tolerance {tol:.1e}");
    }
}

/// The factorized double series for the propagator.
pub fn kernel_eq16(p: &PendulumParams, q: &KernelQuery, tr: &Truncation) -> Result<ComplexAmplitude> {
    let duration = q.duration();
    let table = BesselTable::new(-p.alpha * duration, tr.k_max + 1);
    warn_tail("kernel_eq16", table.get(tr.k_max as i64 + 1).abs(), tr.tail_tol);
    let rotor = rotor_sum(p.mu, duration, q.theta_b - q.theta_a, tr.l_max);
    let bessel = bessel_factor(|k| table.get(k), tr.k_max, q.theta_b);
    ensure_finite(rotor * bessel, "kernel_eq16")
}

/// Separated-endpoint form: the Bessel coefficient `J_k(−αT)` is replaced by
/// `Σ_{|r| ≤ r_max} J_{k−r}(−α t_b) J_r(α t_a)`.
pub fn kernel_eq17(p: &PendulumParams, q: &KernelQuery, tr: &Truncation) -> Result<ComplexAmplitude> {
    let outer = BesselTable::new(-p.alpha * q.t_b, tr.k_max + tr.r_max + 2);
    let inner = BesselTable::new(p.alpha * q.t_a, tr.r_max + 1);
    let coefficient = |k: i64| -> f64 {
        let mut acc = CompensatedSum::new();
        for r in -(tr.r_max as i64)..=tr.r_max as i64 {
            acc.add(Complex64::new(outer.get(k - r) * inner.get(r), 0.0));
        }
        acc.value().re
    };
    let coeffs: Vec<f64> = (-(tr.k_max as i64)..=tr.k_max as i64).map(coefficient).collect();
    let dropped = coefficient(tr.k_max as i64 + 1)
        .abs()
        .max(inner.get(tr.r_max as i64 + 1).abs());
    warn_tail("kernel_eq17", dropped, tr.tail_tol);
    let rotor = rotor_sum(p.mu, q.duration(), q.theta_b - q.theta_a, tr.l_max);
    let bessel = bessel_factor(|k| coeffs[(k + tr.k_max as i64) as usize], tr.k_max, q.theta_b);
    ensure_finite(rotor * bessel, "kernel_eq17")
}

/// Smallest order `k ≥ ceil(|x|)` with `|J_k(x)| < tol`.
pub fn bessel_order_cutoff(x: f64, tol: f64) -> usize {
    let start = x.abs().ceil() as usize;
    let mut n_max = start + 64;
    loop {
        let table = BesselTable::new(x, n_max);
        for k in start..=n_max {
            if table.get(k as i64).abs() < tol {
                return k;
            }
        }
        n_max *= 2;
    }
}

/// Cutoffs for a requested tail tolerance.
///
/// * `k_max`: smallest order beyond `|αT|` with `|J_k(−αT)| < tol`, and at
///   least `ceil(|αT|) + 10`. For `α = 0` only `k = 0` contributes and
///   `k_max = 1` is returned.
/// * `r_max`: the same probe at `α · max(|t_a|, |t_b|)`.
/// * `l_max = max(⌈C·sqrt(2μ·2π/T)⌉, ⌈ln(1/tol)⌉)` with `C` =
///   [`L_MAX_SCALE`]. The first term covers the stationary-phase width of the
///   rotor sum; the second makes the dropped modes negligible against test
///   functions analytic in a unit strip (Fourier coefficients `≲ e^{−|L|}`).
pub fn default_truncation(p: &PendulumParams, q: &KernelQuery, tol: f64) -> Truncation {
    let tol = if tol > 0.0 { tol } else { 1e-10 };
    let duration = q.duration();
    let x = p.alpha * duration;
    let k_max = if p.alpha == 0.0 {
        1
    } else {
        bessel_order_cutoff(-x, tol).max(x.abs().ceil() as usize + 10)
    };
    let xr = p.alpha.abs() * q.t_a.abs().max(q.t_b.abs());
    let r_max = if p.alpha == 0.0 {
        1
    } else {
        bessel_order_cutoff(xr, tol).max(xr.ceil() as usize + 10)
    };
    let stationary = (L_MAX_SCALE * (2.0 * p.mu * TWO_PI / duration).sqrt()).ceil() as usize;
    let analytic = (1.0 / tol).ln().ceil().max(1.0) as usize;
    Truncation {
        l_max: stationary.max(analytic).max(1),
        k_max,
        r_max,
        tail_tol: tol,
    }
}
