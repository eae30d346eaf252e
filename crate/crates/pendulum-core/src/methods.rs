//! Named kernel methods and a factory that turns them into evaluators with
//! fully resolved settings.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::evaluator::{
    FreeRotor, KernelEvaluator, SeriesForm, SeriesKernel, SpectralKernel, SplitStep, TimeSliced, TruncationChoice,
};
use crate::kernel::{default_truncation, KernelQuery, PendulumParams, Truncation};
use crate::oracles::{AngleGrid, BandSide, SpectralSolution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Eq16,
    Eq17,
    Free,
    Spectral,
    SplitStep,
    Sliced,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Eq16,
        Method::Eq17,
        Method::Free,
        Method::Spectral,
        Method::SplitStep,
        Method::Sliced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Eq16 => "eq16",
            Method::Eq17 => "eq17",
            Method::Free => "free",
            Method::Spectral => "spectral",
            Method::SplitStep => "splitstep",
            Method::Sliced => "sliced",
        }
    }

    /// Methods whose momentum sum is cut at a truncation `l_max`.
    pub fn is_series(self) -> bool {
        matches!(self, Method::Eq16 | Method::Eq17 | Method::Free)
    }

    /// Methods that evolve a band-limited delta.
    pub fn is_banded(self) -> bool {
        matches!(self, Method::Spectral | Method::SplitStep | Method::Sliced)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method '{s}' (expected one of eq16, eq17, free, spectral, splitstep, sliced)"
                ))
            })
    }
}

/// User-facing settings; `None` fields are resolved by [`EvaluatorSettings::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorSettings {
    pub tol: f64,
    pub l_max: Option<usize>,
    pub k_max: Option<usize>,
    pub r_max: Option<usize>,
    pub l_cut: Option<usize>,
    pub band: Option<usize>,
    pub band_side: BandSide,
    pub n_points: usize,
    pub n_steps: usize,
    pub n_slices: usize,
}

impl Default for EvaluatorSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            l_max: None,
            k_max: None,
            r_max: None,
            l_cut: None,
            band: None,
            band_side: BandSide::Source,
            n_points: 128,
            n_steps: 4096,
            n_slices: 256,
        }
    }
}

/// Range of times the evaluator will be asked about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub min_duration: f64,
    pub max_duration: f64,
    /// Largest `|t_a|` or `|t_b|`.
    pub max_abs_time: f64,
}

impl Workload {
    pub fn new(t_a: f64, durations: &[f64]) -> Result<Self> {
        if durations.is_empty() || durations.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter(
                "durations must be positive and non-empty".into(),
            ));
        }
        let min_duration = durations.iter().copied().fold(f64::INFINITY, f64::min);
        let max_duration = durations.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            min_duration,
            max_duration,
            max_abs_time: t_a.abs().max((t_a + max_duration).abs()),
        })
    }
}

/// Settings with every choice made, echoed into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSettings {
    pub truncation: Truncation,
    pub l_cut: Option<usize>,
    pub band: usize,
    pub band_side: BandSide,
    pub n_points: usize,
    pub n_steps: usize,
    pub n_slices: usize,
}

impl EvaluatorSettings {
    /// One fixed truncation for the whole workload: `l_max` from the
    /// shortest time (the stationary-phase width grows as `T` shrinks),
    /// `k_max` from the longest, `r_max` from the largest absolute time.
    /// The band defaults to `l_max` when any series method takes part, so
    /// that banded oracles and truncated series describe the same
    /// regularized delta, and to 2 otherwise.
    pub fn resolve(&self, p: &PendulumParams, w: &Workload, methods: &[Method]) -> Result<ResolvedSettings> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        let short = default_truncation(p, &KernelQuery::elapsed(0.0, 0.0, w.min_duration)?, self.tol);
        let long = default_truncation(
            p,
            &KernelQuery::new(0.0, 0.0, w.max_abs_time - w.max_duration, w.max_abs_time)?,
            self.tol,
        );
        let truncation = Truncation::new(
            self.l_max.unwrap_or(short.l_max),
            self.k_max.unwrap_or(long.k_max),
            self.r_max.unwrap_or(long.r_max),
            self.tol,
        )
        .or_else(|_| {
            // `l_max = 0` is legal for the free rotor only.
            if self.l_max == Some(0) {
                Ok(Truncation {
                    l_max: 0,
                    k_max: self.k_max.unwrap_or(long.k_max).max(1),
                    r_max: self.r_max.unwrap_or(long.r_max).max(1),
                    tail_tol: self.tol,
                })
            } else {
                Err(Error::InvalidParameter("truncations must be >= 1".into()))
            }
        })?;
        let band = match self.band {
            Some(b) => b,
            None if methods.iter().any(|m| m.is_series()) => truncation.l_max,
            None => 2,
        };
        let l_cut = methods.contains(&Method::Spectral).then_some(self.l_cut).flatten();
        Ok(ResolvedSettings {
            truncation,
            l_cut,
            band,
            band_side: self.band_side,
            n_points: self.n_points,
            n_steps: self.n_steps,
            n_slices: self.n_slices,
        })
    }
}

/// Builds the evaluator for `method` with resolved settings.
pub fn build(method: Method, p: &PendulumParams, s: &ResolvedSettings) -> Result<Box<dyn KernelEvaluator>> {
    Ok(match method {
        Method::Free => Box::new(FreeRotor {
            params: *p,
            l_max: s.truncation.l_max,
        }),
        Method::Eq16 | Method::Eq17 => {
            if s.truncation.l_max == 0 {
                return Err(Error::InvalidParameter(format!("{method} needs l_max >= 1")));
            }
            Box::new(SeriesKernel {
                params: *p,
                form: if method == Method::Eq16 {
                    SeriesForm::Eq16
                } else {
                    SeriesForm::Eq17
                },
                truncation: TruncationChoice::Fixed(s.truncation),
            })
        }
        Method::Spectral => Box::new(spectral(p, s, s.band)?),
        Method::SplitStep => Box::new(SplitStep::new(*p, AngleGrid::new(s.n_points)?, s.n_steps, s.band)),
        Method::Sliced => Box::new(TimeSliced {
            params: *p,
            grid: AngleGrid::new(s.n_points)?,
            n_slices: s.n_slices,
            band: s.band,
        }),
    })
}

fn spectral(p: &PendulumParams, s: &ResolvedSettings, band: usize) -> Result<SpectralKernel> {
    let solution = match s.l_cut {
        Some(l_cut) => SpectralSolution::new(p, l_cut)?,
        None => SpectralSolution::with_energy_scale(p, p.level(band as i64))?,
    };
    if band > solution.l_cut {
        return Err(Error::InvalidParameter(format!(
            "band {band} exceeds the spectral cutoff {}",
            solution.l_cut
        )));
    }
    Ok(SpectralKernel {
        params: *p,
        solution: Arc::new(solution),
        band,
        side: s.band_side,
    })
}

/// Evaluator used for the composition (semigroup) check. Banded oracles
/// need the full Galerkin kernel of their basis; the spectral oracle
/// provides it with the band set to its cutoff. Other methods are used as
/// they are.
pub fn build_semigroup(method: Method, p: &PendulumParams, s: &ResolvedSettings) -> Result<Box<dyn KernelEvaluator>> {
    match method {
        Method::Spectral => {
            let base = spectral(p, s, s.band)?;
            let l_cut = base.solution.l_cut;
            Ok(Box::new(SpectralKernel { band: l_cut, ..base }))
        }
        _ => build(method, p, s),
    }
}
