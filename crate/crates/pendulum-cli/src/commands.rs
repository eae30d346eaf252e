use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use pendulum_core::evaluator::{FreeRotor, SpectralKernel};
use pendulum_core::green::{
    green_eq27, green_eq28, green_eq30, green_eq32, green_transform, transform_kernel, Conventions, EnergyPoint,
    GreenQuery,
};
use pendulum_core::methods::{build, build_semigroup, Workload};
use pendulum_core::oracles::{self, BandSide, QueryGrid, SpectralSolution};
use pendulum_core::specfun::SeriesControl;
use pendulum_core::verify::{run_suite, Check, VerifyConfig};
use pendulum_core::{KernelEvaluator, KernelQuery, PendulumParams, Truncation};

use crate::args::{
    CompareArgs, ConventionChoice, GreenArgs, GreenMethod, KernelArgs, PhysicsArgs, TransformKernel, VerifyArgs,
};

fn params(a: &PhysicsArgs) -> Result<PendulumParams> {
    Ok(PendulumParams::new(a.mu, a.alpha)?)
}

fn write_report(path: Option<&Path>, report: &Value) -> Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(report)? + "\n";
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn kernel(a: &KernelArgs) -> Result<ExitCode> {
    let p = params(&a.physics)?;
    let w = Workload::new(a.t_a, &[a.duration])?;
    let resolved = a.eval.settings().resolve(&p, &w, &[a.method])?;
    let k = build(a.method, &p, &resolved)?;
    let thetas_b: Vec<f64> = match a.grid_n {
        Some(0) => bail!("--grid-n must be >= 1"),
        Some(n) => (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect(),
        None => vec![a.theta_b],
    };
    KernelQuery::new(a.theta_a, thetas_b[0], a.t_a, a.t_a + a.duration)?;
    let t_b = a.t_a + a.duration;
    let values = if a.method.is_banded() {
        k.kernel_row(a.theta_a, a.t_a, t_b, &thetas_b)
    } else {
        a.eval
            .execution()
            .try_map(&thetas_b, |&tb| k.kernel(&KernelQuery::new(a.theta_a, tb, a.t_a, t_b)?))
    }
    .map_err(|e| e.in_method(a.method.name()))?;

    let mut csv = String::from("theta_b,re,im\n");
    for (tb, v) in thetas_b.iter().zip(&values) {
        writeln!(csv, "{tb:.14e},{:.14e},{:.14e}", v.re, v.im)?;
    }
    print!("{csv}");
    let report = json!({
        "command": "kernel",
        "method": a.method.name(),
        "params": p,
        "query": { "theta_a": a.theta_a, "t_a": a.t_a, "T": a.duration, "grid_n": a.grid_n },
        "settings": { "resolved": resolved, "evaluator": k.settings() },
        "values": thetas_b.iter().zip(&values).map(|(tb, v)| json!({ "theta_b": tb, "re": v.re, "im": v.im })).collect::<Vec<_>>(),
    });
    write_report(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

pub fn green(a: &GreenArgs) -> Result<ExitCode> {
    let p = params(&a.physics)?;
    let gq = GreenQuery::new(a.theta_a, a.theta_b, EnergyPoint::new(a.e_re, a.e_im)?)?;
    let conv = match a.conventions {
        ConventionChoice::Adjudicated => Conventions::ADJUDICATED,
        ConventionChoice::AsPrinted => Conventions::AS_PRINTED,
    };
    if a.k_max < 1 {
        bail!("--kmax must be >= 1");
    }
    let tr = Truncation {
        l_max: a.l_max,
        k_max: a.k_max,
        r_max: 1,
        tail_tol: 1e-14,
    };
    let exec = if a.sequential {
        pendulum_core::par::Execution::Sequential
    } else {
        Default::default()
    };
    let name = format!("{:?}", a.method).to_lowercase();
    let (value, diagnostics) = match a.method {
        GreenMethod::Transform => {
            let t_max = a.t_max.unwrap_or((40.0 / a.e_im).max(40.0));
            let n_nodes = a.n_nodes.unwrap_or(1024);
            let kernel: Box<dyn KernelEvaluator> = match a.kernel {
                TransformKernel::Eq16 => Box::new(transform_kernel(&p, a.l_max, t_max, a.tol)?),
                TransformKernel::Free => Box::new(FreeRotor {
                    params: p,
                    l_max: a.l_max,
                }),
                TransformKernel::Spectral => Box::new(SpectralKernel {
                    params: p,
                    solution: Arc::new(SpectralSolution::new(&p, a.l_cut)?),
                    band: a.l_max,
                    side: BandSide::Source,
                }),
            };
            let r = green_transform(&gq, kernel.as_ref(), t_max, n_nodes, exec).map_err(|e| e.in_method(&name))?;
            (
                r.value,
                json!({
                    "kernel": kernel.label(), "kernel_settings": kernel.settings(), "t_max": t_max,
                    "start_nodes": n_nodes, "panels": r.panels, "nodes": r.nodes, "change": r.change, "tail_bound": r.tail_bound,
                }),
            )
        }
        GreenMethod::Eq27 => (
            green_eq27(&p, &gq, &tr, a.series_terms, &conv).map_err(|e| e.in_method(&name))?,
            json!({ "l_max": a.l_max, "k_max": a.k_max, "series_terms": a.series_terms }),
        ),
        GreenMethod::Eq28 => (
            green_eq28(&p, &gq, &tr, &conv).map_err(|e| e.in_method(&name))?,
            json!({ "l_max": a.l_max, "k_max": a.k_max }),
        ),
        GreenMethod::Eq30 => {
            let n_nodes = a
                .n_nodes
                .unwrap_or_else(|| (4 * a.k_max + 64).next_power_of_two().max(1024));
            (
                green_eq30(&p, &gq, a.l_max, a.k_max, n_nodes, &conv).map_err(|e| e.in_method(&name))?,
                json!({ "l_max": a.l_max, "k_max": a.k_max, "n_nodes": n_nodes }),
            )
        }
        GreenMethod::Eq32 => (
            green_eq32(&p, &gq, &tr, &SeriesControl::default(), &conv).map_err(|e| e.in_method(&name))?,
            json!({ "l_max": a.l_max, "k_max": a.k_max }),
        ),
    };
    println!("e_re,e_im,re,im");
    println!("{:.14e},{:.14e},{:.14e},{:.14e}", a.e_re, a.e_im, value.re, value.im);
    let report = json!({
        "command": "green",
        "method": name,
        "params": p,
        "query": { "theta_a": a.theta_a, "theta_b": a.theta_b, "e_re": a.e_re, "e_im": a.e_im },
        "conventions": conv,
        "value": complex_json(value),
        "diagnostics": diagnostics,
    });
    write_report(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_suite(s: &str) -> Result<Vec<Check>> {
    if s == "all" {
        return Ok(Check::ALL.to_vec());
    }
    let checks = s
        .split(',')
        .map(|c| c.trim().parse::<Check>())
        .collect::<pendulum_core::Result<Vec<_>>>()?;
    if checks.is_empty() {
        bail!("empty --suite");
    }
    Ok(checks)
}

pub fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let p = params(&a.physics)?;
    let checks = parse_suite(&a.suite)?;
    if a.levels < 2 {
        bail!("--levels must be >= 2");
    }
    let cfg = VerifyConfig {
        theta_a: a.theta_a,
        theta_b: a.theta_b,
        duration: a.duration,
        tol: a.eval.tol,
        k_margin: a.k_margin,
        cosine_tol: a.cosine_tol,
        h0: a.h0,
        levels: a.levels,
        order_range: (a.order_min, a.order_max),
        t_sequence: a.t_sequence.clone(),
        n_points: a.quad_points,
        t1: a.t1,
        t2: a.t2,
        semigroup_tol: a.semigroup_tol,
    };
    let mut durations = vec![cfg.duration, cfg.t1, cfg.t2, cfg.t1 + cfg.t2];
    durations.extend(&cfg.t_sequence);
    let w = Workload::new(0.0, &durations)?;
    let resolved = a.eval.settings().resolve(&p, &w, &[a.method])?;
    let k = build(a.method, &p, &resolved)?;
    let g = build_semigroup(a.method, &p, &resolved)?;
    let report = run_suite(k.as_ref(), g.as_ref(), &checks, &cfg, a.eval.execution())
        .map_err(|e| e.in_method(a.method.name()))?;

    println!("check,kind,passed");
    for c in &report.checks {
        let passed = match c.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "measured",
        };
        println!(
            "{},{},{passed}",
            serde_json::to_value(c.check)?.as_str().unwrap_or_default(),
            serde_json::to_value(c.kind)?.as_str().unwrap_or_default()
        );
    }
    write_report(
        a.out.as_deref(),
        &json!({ "command": "verify", "resolved": resolved, "report": report }),
    )?;
    let failures = report.failures();
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in failures {
            eprintln!(
                "exact identity failed: {}",
                serde_json::to_value(f.check)?.as_str().unwrap_or_default()
            );
        }
        Ok(ExitCode::from(1))
    }
}

pub fn compare(a: &CompareArgs) -> Result<ExitCode> {
    let p = params(&a.physics)?;
    let w = Workload::new(a.t_a, &a.durations)?;
    let resolved = a.eval.settings().resolve(&p, &w, &[a.a, a.b])?;
    let ka = build(a.a, &p, &resolved)?;
    let kb = build(a.b, &p, &resolved)?;
    let mut grid = QueryGrid::uniform(a.n_a, a.n_b, a.durations.clone())?;
    grid.t_a = a.t_a;
    let report = oracles::compare(ka.as_ref(), kb.as_ref(), &grid, a.eval.execution())
        .map_err(|e| e.in_method(format!("{} vs {}", a.a, a.b)))?;
    print!("{}", report.to_csv());
    eprintln!(
        "max_abs_dev = {:.14e}, mean_abs_dev = {:.14e}",
        report.max_abs_dev, report.mean_abs_dev
    );
    write_report(
        a.out.as_deref(),
        &json!({ "command": "compare", "resolved": resolved, "report": report }),
    )?;
    Ok(ExitCode::SUCCESS)
}
