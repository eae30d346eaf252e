//! Point-by-point comparison of two kernel evaluators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::evaluator::KernelEvaluator;
use crate::kernel::PendulumParams;
use crate::par::Execution;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "theta_a,theta_b,T,a_re,a_im,b_re,b_im,abs_dev";

/// Cartesian product of source angles, final angles and durations, all
/// starting at `t_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryGrid {
    pub theta_a: Vec<f64>,
    pub theta_b: Vec<f64>,
    pub durations: Vec<f64>,
    pub t_a: f64,
}

impl QueryGrid {
    /// `n_a` and `n_b` equally spaced angles on `[0, 2π)`.
    pub fn uniform(n_a: usize, n_b: usize, durations: Vec<f64>) -> Result<Self> {
        if n_a == 0 || n_b == 0 || durations.is_empty() {
            return Err(Error::InvalidParameter("query grid must not be empty".into()));
        }
        if durations.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter("durations must be positive".into()));
        }
        let angles = |n: usize| (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        Ok(Self {
            theta_a: angles(n_a),
            theta_b: angles(n_b),
            durations,
            t_a: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.theta_a.len() * self.theta_b.len() * self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θa, T)` pairs in report order (durations outermost).
    fn rows(&self) -> Vec<(f64, f64)> {
        self.durations
            .iter()
            .flat_map(|&t| self.theta_a.iter().map(move |&a| (a, t)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationPoint {
    pub theta_a: f64,
    pub theta_b: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub value_a: Complex64,
    pub value_b: Complex64,
    pub abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub params: PendulumParams,
    pub grid: QueryGrid,
    pub method_a: String,
    pub method_b: String,
    pub settings_a: Value,
    pub settings_b: Value,
    pub max_abs_dev: f64,
    pub mean_abs_dev: f64,
    pub points: Vec<DeviationPoint>,
    /// Additional measured quantities attached by the caller.
    #[serde(default)]
    pub annotations: BTreeMap<String, Value>,
}

impl DeviationReport {
    pub fn from_points(
        params: PendulumParams,
        grid: QueryGrid,
        a: &dyn KernelEvaluator,
        b: &dyn KernelEvaluator,
        points: Vec<DeviationPoint>,
    ) -> Self {
        let max_abs_dev = points.iter().map(|p| p.abs_dev).fold(0.0, f64::max);
        let mean_abs_dev = if points.is_empty() {
            0.0
        } else {
            let total: crate::summation::CompensatedSum =
                points.iter().map(|p| Complex64::new(p.abs_dev, 0.0)).collect();
            (total.value().re / points.len() as f64).min(max_abs_dev)
        };
        Self {
            params,
            grid,
            method_a: a.label(),
            method_b: b.label(),
            settings_a: a.settings(),
            settings_b: b.settings(),
            max_abs_dev,
            mean_abs_dev,
            points,
            annotations: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.points.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                p.theta_a, p.theta_b, p.duration, p.value_a.re, p.value_a.im, p.value_b.re, p.value_b.im, p.abs_dev
            );
        }
        out
    }
}

/// Evaluates both methods on every grid point. Rows `(θa, T)` are computed
/// in parallel under `exec`; the points keep the grid order.
pub fn compare(
    a: &dyn KernelEvaluator,
    b: &dyn KernelEvaluator,
    grid: &QueryGrid,
    exec: Execution,
) -> Result<DeviationReport> {
    let params = a.params();
    if params != b.params() {
        return Err(Error::InvalidParameter(format!(
            "methods disagree on parameters: {:?} vs {:?}",
            params,
            b.params()
        )));
    }
    let rows = grid.rows();
    let t_a = grid.t_a;
    let blocks = exec.try_map(&rows, |&(theta_a, duration)| -> Result<Vec<DeviationPoint>> {
        let va = a.kernel_row(theta_a, t_a, t_a + duration, &grid.theta_b)?;
        let vb = b.kernel_row(theta_a, t_a, t_a + duration, &grid.theta_b)?;
        Ok(grid
            .theta_b
            .iter()
            .zip(va.into_iter().zip(vb))
            .map(|(&theta_b, (x, y))| DeviationPoint {
                theta_a,
                theta_b,
                duration,
                value_a: x,
                value_b: y,
                abs_dev: (x - y).norm(),
            })
            .collect())
    })?;
    let points = blocks.into_iter().flatten().collect();
    Ok(DeviationReport::from_points(params, grid.clone(), a, b, points))
}
