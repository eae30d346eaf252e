//! Green function `G(θa, θb; E) = ∫_0^∞ e^{iET} κ(θa, θb; T) dT` for
//! `Im E > 0`: the direct time transform of a kernel evaluator and four
//! series/integral representations derived from the Bessel double series.
//!
//! With `Λ_L = E − L²/2μ` and `D_L = L²/2μ − E = −Λ_L`, the
//! representations are
//!
//! ```text
//! eq27: (φ/2π) Σ_{L,k} e^{iLΔθ + ikθb} Λ^{-1} Σ_l c_{k,l} (α/2Λ)^{|k|+2l}
//! eq28: (φ/2π) Σ_{L,k} e^{iLΔθ + ikθb} Λ^{-1} [i^k] J_k(z_L)
//! eq30: (φ/2π) Σ_{L,k} e^{iLΔθ + ikθb} [i^k] (1/2π)∫ e^{−ikϑ} / (Λ − α sin ϑ) dϑ
//! eq32: (φ'/2π) Σ_{L,k} e^{iLΔθ + ikθb} D^{-1} w^{|k|} ₂F₁((|k|+1)/2, |k|/2+1; |k|+1; ζ)
//! ```
//!
//! The phase `φ`, the coefficients `c_{k,l}`, the Bessel argument `z_L`,
//! the bracketed `i^k` factors and the pair `(w, ζ)` are fixed by
//! [`Conventions`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::evaluator::{KernelEvaluator, SeriesForm, SeriesKernel, TruncationChoice};
use crate::kernel::{default_truncation, reduce_angle, KernelQuery, PendulumParams, Truncation};
use crate::par::Execution;
use crate::specfun::quadrature::composite_gauss_legendre;
use crate::specfun::{bessel_j_sequence, gauss_2f1_complex, i_pow, SeriesControl};
use crate::summation::{sum_outside_in, sum_ratio_series, SeriesFailure};
use crate::{ensure_finite, Error, Result};

/// Smallest admissible `T_max · Im E` for the time transform.
pub const MIN_DAMPING: f64 = 30.0;
/// Refinement stops when two successive quadratures differ by less than this.
pub const TRANSFORM_TOL: f64 = 1e-8;
const GAUSS_ORDER: usize = 16;
const MAX_PANELS: usize = 1 << 16;
/// Minimum distance between the `ϑ` contour and a pole of the eq30 integrand.
pub const POLE_CLEARANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub e_re: f64,
    pub e_im: f64,
}

impl EnergyPoint {
    pub fn new(e_re: f64, e_im: f64) -> Result<Self> {
        if !(e_re.is_finite() && e_im.is_finite()) {
            return Err(Error::InvalidParameter("energy must be finite".into()));
        }
        if !(e_im > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Im E must be > 0 for the damped transform, got {e_im}"
            )));
        }
        Ok(Self { e_re, e_im })
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.e_re, self.e_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenQuery {
    theta_a: f64,
    theta_b: f64,
    pub energy: EnergyPoint,
}

impl GreenQuery {
    pub fn new(theta_a: f64, theta_b: f64, energy: EnergyPoint) -> Result<Self> {
        if !(theta_a.is_finite() && theta_b.is_finite()) {
            return Err(Error::InvalidParameter("angles must be finite".into()));
        }
        Ok(Self {
            theta_a: reduce_angle(theta_a),
            theta_b: reduce_angle(theta_b),
            energy,
        })
    }

    pub fn theta_a(&self) -> f64 {
        self.theta_a
    }

    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }

    /// `Λ_L = E − L²/2μ`.
    pub fn lambda(&self, p: &PendulumParams, l: i64) -> Complex64 {
        self.energy.value() - p.level(l)
    }

    fn plane_wave(&self, l: i64, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, l as f64 * (self.theta_b - self.theta_a) + k as f64 * self.theta_b)
    }
}

/// Coefficients of the `l`-sum in eq27.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentIntegral {
    /// `(−1)^l / (l! (|k|+l)!)`: the moments `∫Tⁿ e^{iΛT}dT` taken as `Λ^{−n−1}`.
    AsPrinted,
    /// `C(|k|+2l, l)`: the moments carry their `Γ(n+1) iⁿ` factor.
    Exact,
}

/// Bessel argument `z_L` in eq28.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselArgument {
    /// `α / (2Λ)`.
    AsPrinted,
    /// `α / Λ`.
    Doubled,
}

/// Transform variable and hypergeometric argument in eq32.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplaceVariable {
    /// `w = −iα/(2D)`, `ζ = −α²/D²`: the Laplace variable taken as `D`.
    AsPrinted,
    /// `w = −α/(2D)`, `ζ = α²/D²`: the Laplace variable `iD` of `e^{iΛT}`.
    Rotated,
}

/// Every bookkeeping factor that the printed representations leave
/// ambiguous, in one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub moment_integral: MomentIntegral,
    pub bessel_argument: BesselArgument,
    /// Overall `φ = i` (and `φ' = −i` in eq32) from `∫_0^∞ e^{iΛT} dT = i/Λ`.
    pub time_phase: bool,
    /// `i^k` in eq28.
    pub eq28_bessel_phase: bool,
    /// `i^k` in eq30.
    pub eq30_bessel_phase: bool,
    pub laplace_variable: LaplaceVariable,
}

impl Conventions {
    /// The formulas exactly as printed.
    pub const AS_PRINTED: Conventions = Conventions {
        moment_integral: MomentIntegral::AsPrinted,
        bessel_argument: BesselArgument::AsPrinted,
        time_phase: false,
        eq28_bessel_phase: false,
        eq30_bessel_phase: false,
        laplace_variable: LaplaceVariable::AsPrinted,
    };

    /// The outcome of [`adjudicate`], frozen.
    pub const ADJUDICATED: Conventions = Conventions {
        moment_integral: MomentIntegral::Exact,
        bessel_argument: BesselArgument::Doubled,
        time_phase: true,
        eq28_bessel_phase: false,
        eq30_bessel_phase: true,
        laplace_variable: LaplaceVariable::Rotated,
    };

    fn phase(&self) -> Complex64 {
        if self.time_phase {
            Complex64::i()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }
}

impl Default for Conventions {
    fn default() -> Self {
        Self::ADJUDICATED
    }
}

/// Result of the time transform with its refinement diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformResult {
    pub value: Complex64,
    pub panels: usize,
    pub nodes: usize,
    /// Change between the last two refinements.
    pub change: f64,
    /// Bound `e^{−T_max Im E}/Im E` on the neglected tail per unit `|κ|`.
    pub tail_bound: f64,
}

/// `∫_0^{T_max} e^{iET} κ(θa, θb; T) dT` by composite 16-point
/// Gauss–Legendre, doubling the panel count (starting from about
/// `n_nodes` nodes) until two results differ by less than
/// [`TRANSFORM_TOL`].
pub fn green_transform(
    gq: &GreenQuery,
    kernel: &dyn KernelEvaluator,
    t_max: f64,
    n_nodes: usize,
    exec: Execution,
) -> Result<TransformResult> {
    let e = gq.energy.value();
    let damping = t_max * gq.energy.e_im;
    let tail_bound = (-damping).exp() / gq.energy.e_im;
    if !(damping >= MIN_DAMPING) {
        return Err(Error::TailNotDecayed { bound: tail_bound });
    }
    let integrate = |panels: usize| -> Result<Complex64> {
        let (nodes, weights) = composite_gauss_legendre(0.0, t_max, panels, GAUSS_ORDER);
        let values = exec.try_map(&nodes, |&t| {
            kernel.kernel(&KernelQuery::elapsed(gq.theta_a, gq.theta_b, t)?)
        })?;
        let terms: crate::summation::CompensatedSum = values
            .iter()
            .zip(nodes.iter().zip(&weights))
            .map(|(k, (&t, &w))| k * (Complex64::i() * e * t).exp() * w)
            .collect();
        Ok(terms.value())
    };
    let mut panels = n_nodes.div_ceil(GAUSS_ORDER).max(1);
    let mut prev = integrate(panels)?;
    loop {
        if panels * 2 > MAX_PANELS {
            return Err(Error::NonConvergence {
                terms: panels * GAUSS_ORDER,
                tail: f64::NAN,
            });
        }
        panels *= 2;
        let next = integrate(panels)?;
        let change = (next - prev).norm();
        if change < TRANSFORM_TOL {
            return Ok(TransformResult {
                value: ensure_finite(next, "green_transform")?,
                panels,
                nodes: panels * GAUSS_ORDER,
                change,
                tail_bound,
            });
        }
        prev = next;
    }
}

/// Series kernel with a fixed truncation adequate for every `T ≤ t_max`:
/// `k_max` from the Bessel probe at `T = t_max`, momentum cutoff `l_max`.
pub fn transform_kernel(p: &PendulumParams, l_max: usize, t_max: f64, tol: f64) -> Result<SeriesKernel> {
    let q = KernelQuery::elapsed(0.0, 0.0, t_max)?;
    let tr = Truncation {
        l_max,
        ..default_truncation(p, &q, tol)
    };
    Ok(SeriesKernel {
        params: *p,
        form: SeriesForm::Eq16,
        truncation: TruncationChoice::Fixed(tr),
    })
}

fn series_error(e: SeriesFailure, l: i64) -> Error {
    match e {
        SeriesFailure::Diverges { ratio } => Error::Divergence { l, ratio },
        SeriesFailure::NoConvergence { terms, tail } => Error::NonConvergence { terms, tail },
    }
}

/// Triple series obtained by integrating the Bessel power series term by
/// term. Uses `|k| ≤ tr.k_max`, `|L| ≤ tr.l_max`, and at most
/// `l_series_max` terms of each `l`-sum.
///
/// The `l`-sum behaves like a power series in `(α/Λ)²`; at `|α/Λ| = 1`
/// it is summed with Wynn's epsilon acceleration, beyond that it is
/// reported as divergent for the offending `L`.
pub fn green_eq27(
    p: &PendulumParams,
    gq: &GreenQuery,
    tr: &Truncation,
    l_series_max: usize,
    conv: &Conventions,
) -> Result<Complex64> {
    if l_series_max < 1 {
        return Err(Error::InvalidParameter("l_series_max must be >= 1".into()));
    }
    let ctl = SeriesControl::default();
    let mut per_l = Vec::with_capacity(2 * tr.l_max + 1);
    for l in -(tr.l_max as i64)..=tr.l_max as i64 {
        let lam = gq.lambda(p, l);
        let x = p.alpha / (2.0 * lam);
        let coeffs = (0..=tr.k_max)
            .map(|k| -> Result<Complex64> {
                let kf = k as f64;
                let first = x.powu(k as u32)
                    / match conv.moment_integral {
                        MomentIntegral::AsPrinted => (1..=k).map(|j| j as f64).product::<f64>(),
                        MomentIntegral::Exact => 1.0,
                    };
                if first.norm() == 0.0 {
                    return Ok(first);
                }
                let (ratio_limit, x2) = match conv.moment_integral {
                    MomentIntegral::AsPrinted => (0.0, -(x * x)),
                    MomentIntegral::Exact => (4.0 * x.norm_sqr(), x * x),
                };
                let ratio = |j: usize| {
                    let j = j as f64;
                    match conv.moment_integral {
                        MomentIntegral::AsPrinted => x2 / ((j + 1.0) * (kf + j + 1.0)),
                        MomentIntegral::Exact => {
                            x2 * ((kf + 2.0 * j + 2.0) * (kf + 2.0 * j + 1.0) / ((j + 1.0) * (kf + j + 1.0)))
                        }
                    }
                };
                let tol = ctl.tail_tol.max(1e-16 * first.norm());
                sum_ratio_series(first, ratio, ratio_limit, l_series_max, tol)
                    .map(|s| s.value)
                    .map_err(|e| series_error(e, l))
            })
            .collect::<Result<Vec<_>>>()?;
        let reflect = |k: i64| -> Complex64 {
            let c = coeffs[k.unsigned_abs() as usize];
            match conv.moment_integral {
                MomentIntegral::AsPrinted if k < 0 && k % 2 != 0 => -c,
                _ => c,
            }
        };
        let inner = sum_outside_in(tr.k_max, |k| reflect(k) * gq.plane_wave(0, k));
        per_l.push(inner / lam * gq.plane_wave(l, 0));
    }
    let total = sum_outside_in(tr.l_max, |l| per_l[(l + tr.l_max as i64) as usize]);
    ensure_finite(conv.phase() * total / (2.0 * PI), "green_eq27")
}

/// Resummed Bessel form: `Σ_k J_k(z_L) e^{ikθb}` per momentum.
pub fn green_eq28(p: &PendulumParams, gq: &GreenQuery, tr: &Truncation, conv: &Conventions) -> Result<Complex64> {
    let total = sum_outside_in(tr.l_max, |l| {
        let lam = gq.lambda(p, l);
        let z = match conv.bessel_argument {
            BesselArgument::AsPrinted => p.alpha / (2.0 * lam),
            BesselArgument::Doubled => p.alpha / lam,
        };
        let js = bessel_j_sequence(tr.k_max, z);
        let inner = sum_outside_in(tr.k_max, |k| {
            let m = k.unsigned_abs() as usize;
            let j = if k < 0 && m % 2 == 1 { -js[m] } else { js[m] };
            let ph = if conv.eq28_bessel_phase {
                i_pow(k)
            } else {
                Complex64::new(1.0, 0.0)
            };
            ph * j * gq.plane_wave(0, k)
        });
        inner / lam * gq.plane_wave(l, 0)
    });
    ensure_finite(conv.phase() * total / (2.0 * PI), "green_eq28")
}

/// Distance between the real contour `ϑ ∈ [−π, π]` and the zero set of
/// `Λ − α sin ϑ`.
fn contour_distance(lam: Complex64, alpha: f64) -> f64 {
    let excess = (lam.re.abs() - alpha.abs()).max(0.0);
    (excess * excess + lam.im * lam.im).sqrt()
}

/// Integral representation: the `ϑ`-integrals (Fourier coefficients of
/// `1/(Λ − α sin ϑ)`) by the `n_nodes`-point trapezoid rule, summed over
/// `|k| ≤ k_max < n_nodes/2`.
pub fn green_eq30(
    p: &PendulumParams,
    gq: &GreenQuery,
    l_max: usize,
    k_max: usize,
    n_nodes: usize,
    conv: &Conventions,
) -> Result<Complex64> {
    if n_nodes < 8 || 2 * k_max >= n_nodes {
        return Err(Error::InvalidParameter(format!(
            "eq30 needs n_nodes >= 8 and k_max < n_nodes/2 (k_max = {k_max}, n_nodes = {n_nodes})"
        )));
    }
    let h = 2.0 * PI / n_nodes as f64;
    let nodes: Vec<f64> = (0..n_nodes).map(|j| -PI + h * j as f64).collect();
    let mut per_l = Vec::with_capacity(2 * l_max + 1);
    for l in -(l_max as i64)..=l_max as i64 {
        let lam = gq.lambda(p, l);
        let distance = contour_distance(lam, p.alpha);
        if distance < POLE_CLEARANCE {
            return Err(Error::PoleNearContour {
                l,
                e_re: gq.energy.e_re,
                distance,
            });
        }
        let f: Vec<Complex64> = nodes.iter().map(|&t| (lam - p.alpha * t.sin()).inv()).collect();
        let coefficient = |k: i64| -> Complex64 {
            let acc: crate::summation::CompensatedSum = f
                .iter()
                .zip(&nodes)
                .map(|(v, &t)| v * Complex64::from_polar(1.0, -(k as f64) * t))
                .collect();
            acc.value() / n_nodes as f64
        };
        let inner = sum_outside_in(k_max, |k| {
            let ph = if conv.eq30_bessel_phase {
                i_pow(k)
            } else {
                Complex64::new(1.0, 0.0)
            };
            ph * coefficient(k) * gq.plane_wave(0, k)
        });
        per_l.push(inner * gq.plane_wave(l, 0));
    }
    let total = sum_outside_in(l_max, |l| per_l[(l + l_max as i64) as usize]);
    ensure_finite(conv.phase() * total / (2.0 * PI), "green_eq30")
}

/// Hypergeometric form. The series is defined for `k ≥ 0`; the `k < 0`
/// sector is taken as the mirror image `k → |k|` of the `k ≥ 0` terms.
pub fn green_eq32(
    p: &PendulumParams,
    gq: &GreenQuery,
    tr: &Truncation,
    ctl: &SeriesControl,
    conv: &Conventions,
) -> Result<Complex64> {
    let mut per_l = Vec::with_capacity(2 * tr.l_max + 1);
    for l in -(tr.l_max as i64)..=tr.l_max as i64 {
        let d = -gq.lambda(p, l);
        let (w, zeta) = match conv.laplace_variable {
            LaplaceVariable::AsPrinted => (-Complex64::i() * p.alpha / (2.0 * d), -(p.alpha * p.alpha) / (d * d)),
            LaplaceVariable::Rotated => (-p.alpha / (2.0 * d), p.alpha * p.alpha / (d * d)),
        };
        let terms = (0..=tr.k_max)
            .map(|k| -> Result<Complex64> {
                let kf = k as f64;
                let f =
                    gauss_2f1_complex((kf + 1.0) / 2.0, kf / 2.0 + 1.0, kf + 1.0, zeta, ctl).map_err(|e| match e {
                        Error::Domain(_) => Error::HypergeometricDomain {
                            l,
                            z_re: zeta.re,
                            z_im: zeta.im,
                        },
                        other => other,
                    })?;
                Ok(w.powu(k as u32) * f)
            })
            .collect::<Result<Vec<_>>>()?;
        let inner = sum_outside_in(tr.k_max, |k| terms[k.unsigned_abs() as usize] * gq.plane_wave(0, k));
        per_l.push(inner / d * gq.plane_wave(l, 0));
    }
    let total = sum_outside_in(tr.l_max, |l| per_l[(l + tr.l_max as i64) as usize]);
    let phase = if conv.time_phase {
        -Complex64::i()
    } else {
        Complex64::new(1.0, 0.0)
    };
    ensure_finite(phase * total / (2.0 * PI), "green_eq32")
}

/// Settings of the adjudication experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjudicationProbe {
    pub mu: f64,
    pub alpha: f64,
    pub e_re: f64,
    pub e_im: f64,
    pub theta_a: f64,
    pub theta_b: f64,
    pub l_max: usize,
    pub k_max: usize,
    pub t_max: f64,
}

impl Default for AdjudicationProbe {
    fn default() -> Self {
        Self {
            mu: 1.0,
            alpha: 0.2,
            e_re: 2.0,
            e_im: 1.0,
            theta_a: 0.4,
            theta_b: 1.4,
            l_max: 4,
            k_max: 24,
            t_max: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub probe: AdjudicationProbe,
    pub conventions: Conventions,
    /// Deviation of every candidate from its judge, keyed by
    /// `"<choice>:<candidate>"`.
    pub evidence: BTreeMap<String, f64>,
}

fn pick<T: Copy>(evidence: &mut BTreeMap<String, f64>, choice: &str, candidates: &[(&str, T, f64)]) -> T {
    let mut best = candidates[0];
    for c in candidates {
        evidence.insert(format!("{choice}:{}", c.0), c.2);
        if c.2 < best.2 {
            best = *c;
        }
    }
    best.1
}

/// Fixes each convention by the representation it must reproduce:
///
/// * time phase: the `α = 0` value of eq27 against the time transform;
/// * moment integral: eq27 against the time transform;
/// * Bessel argument and eq28's `i^k`: eq28 against the eq27 series with
///   the moments as printed (whose `l`-sum it resums);
/// * eq30's `i^k`: eq30 against the time transform;
/// * Laplace variable: eq32 against the time transform.
///
/// A candidate that fails to evaluate counts as infinitely far.
pub fn adjudicate(probe: &AdjudicationProbe, exec: Execution) -> Result<Adjudication> {
    let p = PendulumParams::new(probe.mu, probe.alpha)?;
    let p0 = PendulumParams::new(probe.mu, 0.0)?;
    let gq = GreenQuery::new(probe.theta_a, probe.theta_b, EnergyPoint::new(probe.e_re, probe.e_im)?)?;
    let tr = Truncation {
        l_max: probe.l_max,
        k_max: probe.k_max,
        r_max: 1,
        tail_tol: 1e-14,
    };
    let reference = green_transform(
        &gq,
        &transform_kernel(&p, probe.l_max, probe.t_max, 1e-14)?,
        probe.t_max,
        512,
        exec,
    )?
    .value;
    let reference0 = green_transform(
        &gq,
        &transform_kernel(&p0, probe.l_max, probe.t_max, 1e-14)?,
        probe.t_max,
        512,
        exec,
    )?
    .value;
    let dev = |v: Result<Complex64>, judge: Complex64| v.map(|x| (x - judge).norm()).unwrap_or(f64::INFINITY);
    let series_max = 100_000;
    let mut evidence = BTreeMap::new();
    let mut conv = Conventions::AS_PRINTED;

    conv.time_phase = pick(
        &mut evidence,
        "time_phase",
        &[
            (
                "absent",
                false,
                dev(
                    green_eq27(
                        &p0,
                        &gq,
                        &tr,
                        series_max,
                        &Conventions {
                            time_phase: false,
                            ..conv
                        },
                    ),
                    reference0,
                ),
            ),
            (
                "present",
                true,
                dev(
                    green_eq27(
                        &p0,
                        &gq,
                        &tr,
                        series_max,
                        &Conventions {
                            time_phase: true,
                            ..conv
                        },
                    ),
                    reference0,
                ),
            ),
        ],
    );
    conv.moment_integral = pick(
        &mut evidence,
        "moment_integral",
        &[
            (
                "as-printed",
                MomentIntegral::AsPrinted,
                dev(
                    green_eq27(
                        &p,
                        &gq,
                        &tr,
                        series_max,
                        &Conventions {
                            moment_integral: MomentIntegral::AsPrinted,
                            ..conv
                        },
                    ),
                    reference,
                ),
            ),
            (
                "exact",
                MomentIntegral::Exact,
                dev(
                    green_eq27(
                        &p,
                        &gq,
                        &tr,
                        series_max,
                        &Conventions {
                            moment_integral: MomentIntegral::Exact,
                            ..conv
                        },
                    ),
                    reference,
                ),
            ),
        ],
    );
    let printed27 = green_eq27(
        &p,
        &gq,
        &tr,
        series_max,
        &Conventions {
            moment_integral: MomentIntegral::AsPrinted,
            ..conv
        },
    )?;
    let mut candidates = Vec::new();
    for (arg_name, arg) in [
        ("as-printed", BesselArgument::AsPrinted),
        ("doubled", BesselArgument::Doubled),
    ] {
        for (ph_name, ph) in [("no-ik", false), ("ik", true)] {
            let c = Conventions {
                bessel_argument: arg,
                eq28_bessel_phase: ph,
                ..conv
            };
            candidates.push((
                format!("{arg_name}/{ph_name}"),
                (arg, ph),
                dev(green_eq28(&p, &gq, &tr, &c), printed27),
            ));
        }
    }
    let named: Vec<(&str, (BesselArgument, bool), f64)> =
        candidates.iter().map(|(n, v, d)| (n.as_str(), *v, *d)).collect();
    let (arg, ph) = pick(&mut evidence, "eq28", &named);
    conv.bessel_argument = arg;
    conv.eq28_bessel_phase = ph;
    for (name, (arg, ph), _) in &named {
        let c = Conventions {
            bessel_argument: *arg,
            eq28_bessel_phase: *ph,
            ..conv
        };
        evidence.insert(
            format!("eq28_vs_transform:{name}"),
            dev(green_eq28(&p, &gq, &tr, &c), reference),
        );
    }
    conv.eq30_bessel_phase = pick(
        &mut evidence,
        "eq30_bessel_phase",
        &[
            (
                "absent",
                false,
                dev(
                    green_eq30(
                        &p,
                        &gq,
                        tr.l_max,
                        tr.k_max,
                        256,
                        &Conventions {
                            eq30_bessel_phase: false,
                            ..conv
                        },
                    ),
                    reference,
                ),
            ),
            (
                "present",
                true,
                dev(
                    green_eq30(
                        &p,
                        &gq,
                        tr.l_max,
                        tr.k_max,
                        256,
                        &Conventions {
                            eq30_bessel_phase: true,
                            ..conv
                        },
                    ),
                    reference,
                ),
            ),
        ],
    );
    let ctl = SeriesControl::default();
    conv.laplace_variable = pick(
        &mut evidence,
        "laplace_variable",
        &[
            (
                "as-printed",
                LaplaceVariable::AsPrinted,
                dev(
                    green_eq32(
                        &p,
                        &gq,
                        &tr,
                        &ctl,
                        &Conventions {
                            laplace_variable: LaplaceVariable::AsPrinted,
                            ..conv
                        },
                    ),
                    reference,
                ),
            ),
            (
                "rotated",
                LaplaceVariable::Rotated,
                dev(
                    green_eq32(
                        &p,
                        &gq,
                        &tr,
                        &ctl,
                        &Conventions {
                            laplace_variable: LaplaceVariable::Rotated,
                            ..conv
                        },
                    ),
                    reference,
                ),
            ),
        ],
    );
    Ok(Adjudication {
        probe: *probe,
        conventions: conv,
        evidence,
    })
}
