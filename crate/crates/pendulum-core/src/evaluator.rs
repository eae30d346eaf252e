//! A common interface over every way of computing the propagator.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::kernel::{
    default_truncation, free_rotor_kernel, kernel_eq16, kernel_eq17, KernelQuery, PendulumParams, Truncation,
};
use crate::oracles::split_step::SplitStepPropagator;
use crate::oracles::time_sliced::time_sliced_row;
use crate::oracles::{AngleGrid, BandSide, SpectralSolution};
use crate::Result;

pub trait KernelEvaluator: Sync {
    /// Short method identifier used in reports.
    fn label(&self) -> String;

    fn params(&self) -> PendulumParams;

    fn kernel(&self, q: &KernelQuery) -> Result<Complex64>;

    /// Settings echoed into reports.
    fn settings(&self) -> Value {
        Value::Null
    }

    /// Values at several final angles for one source point and time window.
    fn kernel_row(&self, theta_a: f64, t_a: f64, t_b: f64, thetas_b: &[f64]) -> Result<Vec<Complex64>> {
        thetas_b
            .iter()
            .map(|&tb| self.kernel(&KernelQuery::new(theta_a, tb, t_a, t_b)?))
            .collect()
    }

    /// Whether the evaluator solves its (truncated) problem exactly, so that
    /// verification identities are expected to hold rather than measured.
    fn is_reference(&self) -> bool {
        false
    }

    /// Variant regularized on the read-out side, for identities in the
    /// initial variables. `None` means `self` serves both roles.
    fn adjoint(&self) -> Option<Box<dyn KernelEvaluator + '_>> {
        None
    }

    /// Largest momentum the kernel carries, if bounded.
    fn max_momentum(&self) -> Option<usize> {
        None
    }
}

/// Free rotor with momentum cutoff `l_max`.
#[derive(Debug, Clone, Copy)]
pub struct FreeRotor {
    pub params: PendulumParams,
    pub l_max: usize,
}

impl KernelEvaluator for FreeRotor {
    fn label(&self) -> String {
        "free".into()
    }
    fn params(&self) -> PendulumParams {
        self.params
    }
    fn kernel(&self, q: &KernelQuery) -> Result<Complex64> {
        Ok(free_rotor_kernel(&self.params, q, self.l_max))
    }
    fn settings(&self) -> Value {
        json!({ "l_max": self.l_max })
    }
    fn is_reference(&self) -> bool {
        true
    }
    fn max_momentum(&self) -> Option<usize> {
        Some(self.l_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesForm {
    Eq16,
    Eq17,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationChoice {
    /// [`default_truncation`] per query at this tolerance.
    Auto {
        tol: f64,
    },
    Fixed(Truncation),
}

/// The Bessel double series (or its separated-endpoint form).
#[derive(Debug, Clone, Copy)]
pub struct SeriesKernel {
    pub params: PendulumParams,
    pub form: SeriesForm,
    pub truncation: TruncationChoice,
}

impl SeriesKernel {
    pub fn truncation_for(&self, q: &KernelQuery) -> Truncation {
        match self.truncation {
            TruncationChoice::Auto { tol } => default_truncation(&self.params, q, tol),
            TruncationChoice::Fixed(tr) => tr,
        }
    }
}

impl KernelEvaluator for SeriesKernel {
    fn label(&self) -> String {
        match self.form {
            SeriesForm::Eq16 => "eq16".into(),
            SeriesForm::Eq17 => "eq17".into(),
        }
    }
    fn params(&self) -> PendulumParams {
        self.params
    }
    fn kernel(&self, q: &KernelQuery) -> Result<Complex64> {
        let tr = self.truncation_for(q);
        match self.form {
            SeriesForm::Eq16 => kernel_eq16(&self.params, q, &tr),
            SeriesForm::Eq17 => kernel_eq17(&self.params, q, &tr),
        }
        .map_err(|e| e.in_method(self.label()))
    }
    fn settings(&self) -> Value {
        json!({ "truncation": self.truncation })
    }
    fn max_momentum(&self) -> Option<usize> {
        match self.truncation {
            TruncationChoice::Fixed(tr) => Some(tr.l_max),
            TruncationChoice::Auto { .. } => None,
        }
    }
}

/// Spectral oracle with a band-limited source or read-out.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    pub params: PendulumParams,
    pub solution: Arc<SpectralSolution>,
    pub band: usize,
    pub side: BandSide,
}

impl KernelEvaluator for SpectralKernel {
    fn label(&self) -> String {
        "spectral".into()
    }
    fn params(&self) -> PendulumParams {
        self.params
    }
    fn kernel(&self, q: &KernelQuery) -> Result<Complex64> {
        Ok(self.solution.kernel(q, self.band, self.side))
    }
    fn kernel_row(&self, theta_a: f64, t_a: f64, t_b: f64, thetas_b: &[f64]) -> Result<Vec<Complex64>> {
        KernelQuery::new(theta_a, 0.0, t_a, t_b)?;
        Ok(self
            .solution
            .kernel_row(theta_a, t_b - t_a, self.band, self.side, thetas_b))
    }
    fn settings(&self) -> Value {
        json!({ "l_cut": self.solution.l_cut, "band": self.band, "band_side": self.side })
    }
    fn is_reference(&self) -> bool {
        true
    }
    fn adjoint(&self) -> Option<Box<dyn KernelEvaluator + '_>> {
        let side = match self.side {
            BandSide::Source => BandSide::Target,
            BandSide::Target => BandSide::Source,
        };
        Some(Box::new(SpectralKernel { side, ..self.clone() }))
    }
    fn max_momentum(&self) -> Option<usize> {
        Some(self.band)
    }
}

/// Split-step grid evolution.
#[derive(Debug)]
pub struct SplitStep {
    pub propagator: SplitStepPropagator,
    pub params: PendulumParams,
    pub n_steps: usize,
    pub band: usize,
}

impl SplitStep {
    pub fn new(params: PendulumParams, grid: AngleGrid, n_steps: usize, band: usize) -> Self {
        Self {
            propagator: SplitStepPropagator::new(params, grid),
            params,
            n_steps,
            band,
        }
    }
}

impl KernelEvaluator for SplitStep {
    fn label(&self) -> String {
        "splitstep".into()
    }
    fn params(&self) -> PendulumParams {
        self.params
    }
    fn kernel(&self, q: &KernelQuery) -> Result<Complex64> {
        self.kernel_row(q.theta_a(), q.t_a(), q.t_b(), &[q.theta_b()])
            .map(|v| v[0])
    }
    fn kernel_row(&self, theta_a: f64, t_a: f64, t_b: f64, thetas_b: &[f64]) -> Result<Vec<Complex64>> {
        KernelQuery::new(theta_a, 0.0, t_a, t_b)?;
        self.propagator
            .kernel_row(theta_a, t_b - t_a, self.n_steps, self.band, thetas_b)
            .map_err(|e| e.in_method("splitstep"))
    }
    fn settings(&self) -> Value {
        json!({ "n_points": self.propagator.grid().n_points, "n_steps": self.n_steps, "band": self.band })
    }
    fn max_momentum(&self) -> Option<usize> {
        Some(self.band)
    }
}

/// Time-sliced transfer-matrix evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TimeSliced {
    pub params: PendulumParams,
    pub grid: AngleGrid,
    pub n_slices: usize,
    pub band: usize,
}

impl KernelEvaluator for TimeSliced {
    fn label(&self) -> String {
        "sliced".into()
    }
    fn params(&self) -> PendulumParams {
        self.params
    }
    fn kernel(&self, q: &KernelQuery) -> Result<Complex64> {
        self.kernel_row(q.theta_a(), q.t_a(), q.t_b(), &[q.theta_b()])
            .map(|v| v[0])
    }
    fn kernel_row(&self, theta_a: f64, t_a: f64, t_b: f64, thetas_b: &[f64]) -> Result<Vec<Complex64>> {
        KernelQuery::new(theta_a, 0.0, t_a, t_b)?;
        time_sliced_row(
            &self.params,
            &self.grid,
            theta_a,
            t_b - t_a,
            self.n_slices,
            self.band,
            thetas_b,
        )
        .map_err(|e| e.in_method("sliced"))
    }
    fn settings(&self) -> Value {
        json!({ "n_points": self.grid.n_points, "n_slices": self.n_slices, "band": self.band })
    }
    fn max_momentum(&self) -> Option<usize> {
        Some(self.band)
    }
}

/// Wraps a closure as an evaluator.
pub struct FnKernel<F> {
    pub label: String,
    pub params: PendulumParams,
    pub f: F,
}

impl<F> KernelEvaluator for FnKernel<F>
where
    F: Fn(&KernelQuery) -> Result<Complex64> + Sync,
{
    fn label(&self) -> String {
        self.label.clone()
    }
    fn params(&self) -> PendulumParams {
        self.params
    }
    fn kernel(&self, q: &KernelQuery) -> Result<Complex64> {
        (self.f)(q)
    }
}
