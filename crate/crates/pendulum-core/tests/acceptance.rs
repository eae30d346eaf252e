//! Acceptance suite: one PASS/FAIL line per criterion, with timing against
//! its runtime budget. Reports are written under the cargo target tmpdir.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde_json::json;

use pendulum_core::evaluator::TruncationChoice;
use pendulum_core::green::{
    green_eq27, green_eq28, green_eq30, green_eq32, green_transform, transform_kernel, Conventions, EnergyPoint,
    GreenQuery,
};
use pendulum_core::kernel::{default_truncation, kernel_eq16, kernel_eq17};
use pendulum_core::methods::{build, EvaluatorSettings, Method, ResolvedSettings, Workload};
use pendulum_core::oracles::{compare, DeviationReport, QueryGrid, SpectralSolution};
use pendulum_core::par::Execution;
use pendulum_core::specfun::SeriesControl;
use pendulum_core::verify::{cosine_identity_residual, run_suite, Check, VerifyConfig};
use pendulum_core::{KernelQuery, PendulumParams};

const FREE_COLLAPSE_TOL: f64 = 1e-12;
const TERM_LEVEL_TOL: f64 = 1e-14;
const SEPARATED_TOL: f64 = 1e-8;
const COSINE_TOL: f64 = 1e-10;
const COSINE_NOISE: f64 = 1e-14;
const ORACLE_TOL: f64 = 1e-8;
const TROTTER_ORDER: (f64, f64) = (0.8, 1.2);
const MATHIEU_TOL: f64 = 1e-7;
const GREEN_TOL: f64 = 1e-6;
const GREEN_COLLAPSE_TOL: f64 = 1e-10;
const SCHRODINGER_ORDER: (f64, f64) = (1.8, 2.2);

type Outcome = Result<String, String>;

fn out_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("create report directory");
    dir
}

fn params(alpha: f64) -> PendulumParams {
    PendulumParams::new(1.0, alpha).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn free_rotor_collapse() -> Outcome {
    let p = params(0.0);
    let durations = vec![0.5, 1.0, 2.0];
    let grid = QueryGrid::uniform(16, 16, durations.clone()).map_err(err)?;
    let s = EvaluatorSettings::default()
        .resolve(
            &p,
            &Workload::new(0.0, &durations).map_err(err)?,
            &[Method::Eq16, Method::Free],
        )
        .map_err(err)?;
    let eq16 = build(Method::Eq16, &p, &s).map_err(err)?;
    let free = build(Method::Free, &p, &s).map_err(err)?;
    let r = compare(eq16.as_ref(), free.as_ref(), &grid, Execution::default()).map_err(err)?;
    check(
        r.max_abs_dev < FREE_COLLAPSE_TOL,
        format!(
            "max |eq16 - free| = {:.3e} over {} points (l_max {})",
            r.max_abs_dev,
            r.points.len(),
            s.truncation.l_max
        ),
    )
}

fn separated_form() -> Outcome {
    let mut worst_collapse = 0.0f64;
    for alpha in [0.5, 1.0, -2.0] {
        let p = params(alpha);
        for (ta, tb) in [(0.3, 1.4), (1.0, 5.0), (2.5, 0.1)] {
            let q = KernelQuery::new(ta, tb, 0.0, 1.3).map_err(err)?;
            let tr = default_truncation(&p, &q, 1e-12);
            let d = (kernel_eq17(&p, &q, &tr).map_err(err)? - kernel_eq16(&p, &q, &tr).map_err(err)?).norm();
            worst_collapse = worst_collapse.max(d);
        }
    }
    let p = params(0.5);
    let q = KernelQuery::new(1.0, 2.0, 0.3, 1.1).map_err(err)?;
    let q16 = KernelQuery::elapsed(1.0, 2.0, 0.8).map_err(err)?;
    let v17 = kernel_eq17(&p, &q, &default_truncation(&p, &q, 1e-10)).map_err(err)?;
    let v16 = kernel_eq16(&p, &q16, &default_truncation(&p, &q16, 1e-10)).map_err(err)?;
    let separated = (v17 - v16).norm();
    check(
        worst_collapse < TERM_LEVEL_TOL && separated < SEPARATED_TOL,
        format!("t_a = 0: {worst_collapse:.3e}; t_a = 0.3, t_b = 1.1: {separated:.3e}"),
    )
}

fn cosine_identity() -> Outcome {
    let p = params(1.0);
    let mut worst = 0.0f64;
    let mut monotone = true;
    for j in 0..8 {
        let theta_a = 0.3 + 0.7 * j as f64;
        let theta_b = 1.7 + 1.9 * j as f64;
        let q = KernelQuery::elapsed(theta_a, theta_b, 1.0).map_err(err)?;
        let base = default_truncation(&p, &q, 1e-10);
        let r: Vec<f64> = [5, 10, 20]
            .iter()
            .map(|&m| cosine_identity_residual(&p, &q, &base.with_k_margin(m)))
            .collect();
        worst = worst.max(r[1]);
        monotone &= r[1] <= r[0] + COSINE_NOISE && r[2] <= r[1] + COSINE_NOISE;
    }
    check(
        worst < COSINE_TOL && monotone,
        format!("max residual at margin +10 = {worst:.3e}; non-increasing under margin doubling: {monotone}"),
    )
}

fn oracle_triangle() -> Outcome {
    let p = params(1.0);
    let durations = [1.0];
    let base = EvaluatorSettings {
        l_cut: Some(40),
        n_points: 128,
        n_steps: 4096,
        ..Default::default()
    };
    let s = base
        .resolve(
            &p,
            &Workload::new(0.0, &durations).map_err(err)?,
            &[Method::Spectral, Method::SplitStep],
        )
        .map_err(err)?;
    let spectral = build(Method::Spectral, &p, &s).map_err(err)?;
    let split = build(Method::SplitStep, &p, &s).map_err(err)?;
    let grid = QueryGrid::uniform(4, 16, durations.to_vec()).map_err(err)?;
    let r = compare(spectral.as_ref(), split.as_ref(), &grid, Execution::default()).map_err(err)?;
    std::fs::write(out_dir().join("spectral_vs_splitstep.json"), r.to_json()).map_err(err)?;

    let sliced_grid = QueryGrid::uniform(2, 8, durations.to_vec()).map_err(err)?;
    let slices = [32usize, 64, 128, 256];
    let mut devs = Vec::new();
    for n in slices {
        let sliced = build(Method::Sliced, &p, &ResolvedSettings { n_slices: n, ..s }).map_err(err)?;
        devs.push(
            compare(spectral.as_ref(), sliced.as_ref(), &sliced_grid, Execution::default())
                .map_err(err)?
                .max_abs_dev,
        );
    }
    let orders = pendulum_core::verify::observed_orders(&devs, 2.0);
    let in_range = orders.iter().all(|&o| o >= TROTTER_ORDER.0 && o <= TROTTER_ORDER.1);
    check(
        r.max_abs_dev < ORACLE_TOL && in_range,
        format!(
            "spectral vs split-step {:.3e} (band {}); sliced deviations {:?} at {slices:?} slices, orders {:?}",
            r.max_abs_dev,
            s.band,
            devs.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>(),
            orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>()
        ),
    )
}

/// Lowest characteristic value of `y'' + (a + 2q cos θ) y = 0` for
/// `2π`-periodic even solutions, from the continued fraction
/// `a = 2q² / ((a − 1) − q² / ((a − 4) − q² / ((a − 9) − …)))`.
fn mathieu_a0_continued_fraction(q: f64) -> f64 {
    let depth = 60;
    let mut a = 0.0;
    for _ in 0..200 {
        let mut tail = 0.0;
        for n in (1..=depth).rev() {
            tail = q * q / ((a - (n * n) as f64) - tail);
        }
        let next = 2.0 * tail;
        if (next - a).abs() < 1e-16 {
            return next;
        }
        a = next;
    }
    a
}

fn mathieu_value() -> Outcome {
    let p = PendulumParams::new(1.0, -0.1).map_err(err)?;
    let q = -p.mu * p.alpha;
    let s = SpectralSolution::new(&p, 20).map_err(err)?;
    let a0 = s.ground_characteristic_value(&p);
    let oracle = mathieu_a0_continued_fraction(q);
    // Small-q series in the standard form y'' + (A − 2Q cos 2x) y = 0, with A = 4a, Q = 4q.
    let big_q = 4.0 * q;
    let series = (-big_q.powi(2) / 2.0 + 7.0 * big_q.powi(4) / 128.0 - 29.0 * big_q.powi(6) / 2304.0
        + 68687.0 * big_q.powi(8) / 18874368.0
        - 123707.0 * big_q.powi(10) / 104857600.0)
        / 4.0;
    let d = (a0 - oracle).abs();
    check(
        d < MATHIEU_TOL && (a0 - series).abs() < 1e-7,
        format!("a0 = {a0:.12} vs continued fraction {oracle:.12} (|diff| {d:.2e}); small-q series {series:.12}"),
    )
}

fn eq16_experiment() -> Outcome {
    let durations = vec![1.0];
    let grid = QueryGrid::uniform(8, 8, durations.clone()).map_err(err)?;
    let run = |alpha: f64, exec: Execution| -> Result<DeviationReport, String> {
        let p = params(alpha);
        let s = EvaluatorSettings::default()
            .resolve(
                &p,
                &Workload::new(0.0, &durations).map_err(err)?,
                &[Method::Eq16, Method::Spectral],
            )
            .map_err(err)?;
        let a = build(Method::Eq16, &p, &s).map_err(err)?;
        let b = build(Method::Spectral, &p, &s).map_err(err)?;
        compare(a.as_ref(), b.as_ref(), &grid, exec).map_err(err)
    };
    let small = run(0.01, Execution::default())?;
    let double = run(0.02, Execution::default())?;
    let exponent = (double.max_abs_dev / small.max_abs_dev).log2();
    let mut full = run(1.0, Execution::default())?;
    let repeat = run(1.0, Execution::Sequential)?;
    let deterministic = full.to_json() == repeat.to_json() && full.to_csv() == repeat.to_csv();
    full.annotations.insert(
        "alpha_scaling".into(),
        json!({ "alpha": [0.01, 0.02], "max_abs_dev": [small.max_abs_dev, double.max_abs_dev], "exponent": exponent }),
    );
    let dir = out_dir();
    std::fs::write(dir.join("eq16_vs_spectral.json"), full.to_json()).map_err(err)?;
    std::fs::write(dir.join("eq16_vs_spectral.csv"), full.to_csv()).map_err(err)?;
    let finite = full.points.iter().all(|p| p.abs_dev.is_finite()) && exponent.is_finite();
    check(
        deterministic && finite,
        format!(
            "finding: max dev {:.3e} (α=0.01), {:.3e} (α=0.02), exponent {exponent:.3}; α=1, T=1 max dev {:.3e}, mean {:.3e}; deterministic: {deterministic}",
            small.max_abs_dev, double.max_abs_dev, full.max_abs_dev, full.mean_abs_dev
        ),
    )
}

struct GreenRow {
    alpha: f64,
    e: (f64, f64),
    dtheta: f64,
    transform: Complex64,
    values: [(&'static str, Result<Complex64, String>); 4],
}

fn green_row(alpha: f64, e: (f64, f64), dtheta: f64) -> Result<GreenRow, String> {
    let p = params(alpha);
    let energy = EnergyPoint::new(e.0, e.1).map_err(err)?;
    let theta_a = 0.5;
    let gq = GreenQuery::new(theta_a, theta_a + dtheta, energy).map_err(err)?;
    let l_max = 8;
    let t_max = (40.0 / e.1).max(40.0);
    let kernel = transform_kernel(&p, l_max, t_max, 1e-14).map_err(err)?;
    let tr = match kernel.truncation {
        TruncationChoice::Fixed(tr) => tr,
        _ => unreachable!(),
    };
    let transform = green_transform(&gq, &kernel, t_max, 1024, Execution::default())
        .map_err(err)?
        .value;
    let c = Conventions::ADJUDICATED;
    let n_nodes = (4 * tr.k_max + 64).next_power_of_two().max(1024);
    let values = [
        ("eq27", green_eq27(&p, &gq, &tr, 200_000, &c).map_err(err)),
        ("eq28", green_eq28(&p, &gq, &tr, &c).map_err(err)),
        ("eq30", green_eq30(&p, &gq, l_max, tr.k_max, n_nodes, &c).map_err(err)),
        (
            "eq32",
            green_eq32(&p, &gq, &tr, &SeriesControl::default(), &c).map_err(err),
        ),
    ];
    Ok(GreenRow {
        alpha,
        e,
        dtheta,
        transform,
        values,
    })
}

fn green_consistency() -> Outcome {
    let probes = [(0.1, (1.0, 1.0)), (0.5, (2.0, 0.5)), (1.0, (3.0, 1.0))];
    let mut rows = Vec::new();
    for &(alpha, e) in &probes {
        for dtheta in [0.0, 1.0] {
            rows.push(green_row(alpha, e, dtheta)?);
            rows.push(green_row(0.0, e, dtheta)?);
        }
    }
    let mut failures = Vec::new();
    let mut worst = std::collections::BTreeMap::<&str, f64>::new();
    let mut collapse = 0.0f64;
    let mut table = Vec::new();
    for row in &rows {
        let tol = if row.alpha == 0.0 {
            GREEN_COLLAPSE_TOL
        } else {
            GREEN_TOL
        };
        let mut entry = json!({ "alpha": row.alpha, "e": [row.e.0, row.e.1], "dtheta": row.dtheta,
            "transform": [row.transform.re, row.transform.im] });
        for (name, v) in &row.values {
            match v {
                Ok(v) => {
                    let d = (v - row.transform).norm();
                    entry[name] = json!({ "value": [v.re, v.im], "abs_dev": d });
                    if row.alpha == 0.0 {
                        collapse = collapse.max(d);
                    } else {
                        let w = worst.entry(name).or_insert(0.0);
                        *w = w.max(d);
                    }
                    if d >= tol {
                        failures.push(format!(
                            "{name} at α={}, E={}+{}i, Δθ={}: {d:.2e}",
                            row.alpha, row.e.0, row.e.1, row.dtheta
                        ));
                    }
                }
                Err(e) => {
                    entry[name] = json!({ "error": e });
                    failures.push(format!(
                        "{name} at α={}, E={}+{}i, Δθ={}: {e}",
                        row.alpha, row.e.0, row.e.1, row.dtheta
                    ));
                }
            }
        }
        table.push(entry);
    }
    let report = json!({ "conventions": Conventions::ADJUDICATED, "probes": table, "max_abs_dev": worst, "alpha0_collapse": collapse });
    std::fs::write(
        out_dir().join("green_probes.json"),
        serde_json::to_string_pretty(&report).unwrap(),
    )
    .map_err(err)?;
    let summary = format!(
        "max |rep - transform|: {}; α=0 collapse {collapse:.2e}",
        worst
            .iter()
            .map(|(k, v)| format!("{k} {v:.2e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; {} failing evaluations, first: {}",
            failures.len(),
            failures[0]
        ))
    }
}

fn schrodinger_harness() -> Outcome {
    let cfg = VerifyConfig::default();
    let durations = [cfg.duration];
    let checks = [Check::Schrodinger];
    let mut lines = Vec::new();
    let mut ok = true;
    for (method, alpha) in [(Method::Free, 0.0), (Method::Spectral, 1.0), (Method::Eq16, 1.0)] {
        let p = params(alpha);
        let s = EvaluatorSettings::default()
            .resolve(&p, &Workload::new(0.0, &durations).map_err(err)?, &[method])
            .map_err(err)?;
        let k = build(method, &p, &s).map_err(err)?;
        let report = run_suite(k.as_ref(), k.as_ref(), &checks, &cfg, Execution::default()).map_err(err)?;
        std::fs::write(out_dir().join(format!("schrodinger_{method}.json")), report.to_json()).map_err(err)?;
        let v = &report.checks[0].values;
        let orders: Vec<f64> = ["final", "initial"]
            .iter()
            .flat_map(|s| v[s]["orders"].as_array().unwrap().iter().map(|o| o.as_f64().unwrap()))
            .collect();
        if k.is_reference() {
            let in_range = orders
                .iter()
                .all(|&o| o >= SCHRODINGER_ORDER.0 && o <= SCHRODINGER_ORDER.1);
            ok &= in_range;
        }
        let last = |s: &str| {
            v[s]["residuals"]
                .as_array()
                .unwrap()
                .last()
                .map(|r| Complex64::new(r[0].as_f64().unwrap(), r[1].as_f64().unwrap()).norm())
        };
        lines.push(format!(
            "{method}: orders {:?}, smallest-step residual {:.2e}/{:.2e}",
            orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>(),
            last("final").unwrap_or(f64::NAN),
            last("initial").unwrap_or(f64::NAN)
        ));
    }
    check(ok, lines.join("; "))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "free-rotor collapse", Duration::from_secs(1), free_rotor_collapse),
        (
            2,
            "separated-endpoint equivalence",
            Duration::from_secs(5),
            separated_form,
        ),
        (
            3,
            "cosine index-shift identity",
            Duration::from_secs(5),
            cosine_identity,
        ),
        (4, "oracle soundness triangle", Duration::from_secs(60), oracle_triangle),
        (5, "Mathieu characteristic value", Duration::from_secs(1), mathieu_value),
        (
            6,
            "series vs spectral experiment",
            Duration::from_secs(30),
            eq16_experiment,
        ),
        (
            7,
            "Green-function consistency",
            Duration::from_secs(30),
            green_consistency,
        ),
        (
            8,
            "Schrödinger residual harness",
            Duration::from_secs(30),
            schrodinger_harness,
        ),
    ];
    let mut failed = 0;
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let within = elapsed <= budget;
        let (status, detail) = match &outcome {
            Ok(d) if within => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over runtime budget")),
            Err(d) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {n}: {status} {name} [{:.2} s / {} s] {detail}",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!(
        "acceptance: {} of 8 criteria passed; reports in {}",
        8 - failed,
        out_dir().display()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
