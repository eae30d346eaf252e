use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use pendulum_core::evaluator::{FreeRotor, SpectralKernel, SplitStep, TimeSliced};
use pendulum_core::kernel::free_rotor_kernel;
use pendulum_core::oracles::{
    build_hamiltonian, compare, spectral_kernel, split_step_kernel, time_sliced_kernel, AngleGrid, BandSide, QueryGrid,
    SpectralSolution, SplitStepPropagator,
};
use pendulum_core::par::Execution;
use pendulum_core::verify::{poisson_test_function, semigroup_residual};
use pendulum_core::{KernelEvaluator, KernelQuery, PendulumParams};

fn params(alpha: f64) -> PendulumParams {
    PendulumParams::new(1.0, alpha).unwrap()
}

#[test]
fn hamiltonian_examples() {
    let h = build_hamiltonian(&params(1.0), 1).unwrap().to_dense();
    let expected = [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]];
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(h[(i, j)], expected[i][j]);
        }
    }
    let s = SpectralSolution::new(&params(0.0), 5).unwrap();
    let expected = [0.0, 0.5, 0.5, 2.0, 2.0, 4.5, 4.5];
    for (e, x) in s.e_values.iter().zip(expected) {
        assert!((e - x).abs() < 1e-14);
    }
}

#[test]
fn free_limit_of_spectral_oracle() {
    let p = params(0.0);
    let s = SpectralSolution::new(&p, 30).unwrap();
    for (ta, tb, t) in [(0.1, 0.2, 0.3), (2.0, 5.0, 1.0), (4.0, 1.0, 2.5)] {
        let q = KernelQuery::elapsed(ta, tb, t).unwrap();
        for side in [BandSide::Source, BandSide::Target] {
            assert!((spectral_kernel(&s, &q, 30, side) - free_rotor_kernel(&p, &q, 30)).norm() < 1e-12);
            assert!((spectral_kernel(&s, &q, 7, side) - free_rotor_kernel(&p, &q, 7)).norm() < 1e-12);
        }
    }
}

#[test]
fn spectral_self_convergence_at_fixed_band() {
    let p = params(1.0);
    let q = KernelQuery::elapsed(0.0, 1.0, 1.0).unwrap();
    let coarse = SpectralSolution::new(&p, 30).unwrap();
    let fine = SpectralSolution::new(&p, 60).unwrap();
    for band in [2, 8, 16] {
        let d = (spectral_kernel(&coarse, &q, band, BandSide::Source)
            - spectral_kernel(&fine, &q, band, BandSide::Source))
        .norm();
        assert!(d < 1e-10, "band {band}: {d:.3e}");
    }
}

#[test]
fn band_sides_are_mirror_images() {
    let p = params(0.8);
    let s = SpectralSolution::new(&p, 30).unwrap();
    for (ta, tb) in [(0.3, 1.9), (2.2, 5.1)] {
        let target = spectral_kernel(&s, &KernelQuery::elapsed(ta, tb, 0.9).unwrap(), 4, BandSide::Target);
        let source = spectral_kernel(&s, &KernelQuery::elapsed(-tb, -ta, 0.9).unwrap(), 4, BandSide::Source);
        assert!((target - source).norm() < 1e-13);
    }
}

#[test]
fn galerkin_kernel_is_complete_at_short_times() {
    // ∫ κ(θa, θ; T) f(θ) dθ → f(θa) as T → 0 for the full-basis kernel.
    let p = params(1.0);
    let s = SpectralSolution::new(&p, 40).unwrap();
    let f = poisson_test_function(0.5);
    let grid = AngleGrid::new(256).unwrap();
    let theta_a = 1.1;
    let row = s.kernel_row(theta_a, 1e-3, 40, BandSide::Source, &grid.nodes());
    let v: Complex64 = row
        .iter()
        .zip(grid.nodes())
        .map(|(k, th)| k * f(th) * grid.spacing())
        .sum();
    assert!((v - f(theta_a)).norm() < 5e-3, "{v}");
    let row = s.kernel_row(theta_a, 1e-4, 40, BandSide::Source, &grid.nodes());
    let w: Complex64 = row
        .iter()
        .zip(grid.nodes())
        .map(|(k, th)| k * f(th) * grid.spacing())
        .sum();
    assert!((w - f(theta_a)).norm() < (v - f(theta_a)).norm());
}

#[test]
fn spectral_semigroup_with_galerkin_kernel() {
    let p = params(1.0);
    let s = Arc::new(SpectralSolution::new(&p, 40).unwrap());
    let k = SpectralKernel {
        params: p,
        solution: s,
        band: 40,
        side: BandSide::Source,
    };
    let grid = AngleGrid::new(256).unwrap();
    let r = semigroup_residual(&k, 0.3, 1.7, 0.4, 0.6, &grid, Execution::default()).unwrap();
    assert!(r < 1e-8, "{r:.3e}");
}

#[test]
fn free_rotor_semigroup() {
    let k = FreeRotor {
        params: params(0.0),
        l_max: 40,
    };
    let grid = AngleGrid::new(256).unwrap();
    for (t1, t2) in [(0.1, 0.9), (0.5, 0.5), (1.3, 0.2)] {
        assert!(semigroup_residual(&k, 0.3, 1.7, t1, t2, &grid, Execution::default()).unwrap() < 1e-10);
    }
}

#[test]
fn split_step_is_second_order() {
    let p = params(1.0);
    let g = AngleGrid::new(64).unwrap();
    let s = SpectralSolution::new(&p, 40).unwrap();
    let q = KernelQuery::elapsed(0.4, 2.0, 1.0).unwrap();
    let exact = spectral_kernel(&s, &q, 2, BandSide::Source);
    let errs: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| (split_step_kernel(&p, &g, &q, n, 2).unwrap() - exact).norm())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }
}

#[test]
fn split_step_free_single_step_full_band() {
    let p = params(0.0);
    let g = AngleGrid::new(32).unwrap();
    let q = KernelQuery::elapsed(1.3, 0.2, 2.0).unwrap();
    let v = split_step_kernel(&p, &g, &q, 1, g.max_momentum()).unwrap();
    assert!((v - free_rotor_kernel(&p, &q, g.max_momentum())).norm() < 1e-12);
}

#[test]
fn time_slicing_refines_toward_spectral() {
    let p = params(1.0);
    let g = AngleGrid::new(64).unwrap();
    let s = SpectralSolution::new(&p, 40).unwrap();
    let q = KernelQuery::elapsed(0.4, 2.0, 1.0).unwrap();
    let exact = spectral_kernel(&s, &q, 2, BandSide::Source);
    let one = (time_sliced_kernel(&p, &g, &q, 1, 2).unwrap() - exact).norm();
    let two = (time_sliced_kernel(&p, &g, &q, 2, 2).unwrap() - exact).norm();
    assert!(two < one, "{one:.3e} -> {two:.3e}");
}

#[test]
fn time_sliced_free_limit() {
    let p = params(0.0);
    let g = AngleGrid::new(64).unwrap();
    let q = KernelQuery::elapsed(0.3, 2.9, 0.6).unwrap();
    let v = time_sliced_kernel(&p, &g, &q, 1, 10).unwrap();
    assert!((v - free_rotor_kernel(&p, &q, 10)).norm() < 1e-8);
}

#[test]
fn comparison_reports_are_deterministic() {
    let p = params(1.0);
    let s = Arc::new(SpectralSolution::new(&p, 30).unwrap());
    let a = SpectralKernel {
        params: p,
        solution: s,
        band: 3,
        side: BandSide::Source,
    };
    let b = SplitStep::new(p, AngleGrid::new(32).unwrap(), 64, 3);
    let c = TimeSliced {
        params: p,
        grid: AngleGrid::new(16).unwrap(),
        n_slices: 8,
        band: 3,
    };
    let grid = QueryGrid::uniform(3, 5, vec![0.5, 1.0]).unwrap();
    for other in [&b as &dyn KernelEvaluator, &c] {
        let seq = compare(&a, other, &grid, Execution::Sequential).unwrap();
        let par = compare(&a, other, &grid, Execution::default()).unwrap();
        assert_eq!(seq.to_json(), par.to_json());
        assert_eq!(seq.to_csv(), par.to_csv());
        assert!(seq.max_abs_dev >= seq.mean_abs_dev && seq.mean_abs_dev >= 0.0);
    }
    assert!(compare(
        &a,
        &FreeRotor {
            params: params(0.0),
            l_max: 3
        },
        &grid,
        Execution::default()
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_invariants(alpha in -4.0f64..4.0, mu in 0.3f64..3.0, l_cut in 4usize..30) {
        let p = PendulumParams::new(mu, alpha).unwrap();
        let s = SpectralSolution::new(&p, l_cut).unwrap();
        prop_assert!(s.e_values.windows(2).all(|w| w[0] <= w[1]));
        let v = &s.e_vectors;
        let gram = v.transpose() * v;
        let dim = s.dim();
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - target).abs() < 1e-10);
            }
        }
        for n in 0..dim {
            let col = v.column(n);
            let even = (0..dim).all(|r| (col[r] - col[dim - 1 - r]).abs() < 1e-9);
            let odd = (0..dim).all(|r| (col[r] + col[dim - 1 - r]).abs() < 1e-9);
            prop_assert!(even || odd, "eigenvector {n} has no parity");
        }
    }

    #[test]
    fn split_step_is_unitary(alpha in -3.0f64..3.0, dt in 0.001f64..0.5, seed in 0u64..1000) {
        let p = params(alpha);
        let g = AngleGrid::new(64).unwrap();
        let prop = SplitStepPropagator::new(p, g);
        let c0: Vec<Complex64> = (0..64)
            .map(|j| {
                let x = (seed as f64 + 1.0) * (j as f64 + 0.5);
                Complex64::new((x * 0.731).sin(), (x * 0.193).cos())
            })
            .collect();
        let n0: f64 = c0.iter().map(|c| c.norm_sqr()).sum();
        let n1: f64 = prop.evolve(&c0, dt, 1).unwrap().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((n1 - n0).abs() < 1e-12 * n0);
    }

    #[test]
    fn spectral_and_split_step_agree(alpha in -2.0f64..2.0, ta in 0.0f64..TAU, tb in 0.0f64..TAU) {
        let p = params(alpha);
        let s = SpectralSolution::new(&p, 40).unwrap();
        let g = AngleGrid::new(64).unwrap();
        let q = KernelQuery::elapsed(ta, tb, 0.5).unwrap();
        let a = spectral_kernel(&s, &q, 2, BandSide::Source);
        let b = split_step_kernel(&p, &g, &q, 1024, 2).unwrap();
        prop_assert!((a - b).norm() < 1e-7, "{:.3e}", (a - b).norm());
    }
}

#[test]
fn grid_nodes_cover_circle() {
    let g = AngleGrid::new(8).unwrap();
    assert_eq!(g.nodes().len(), 8);
    assert!((g.spacing() * 8.0 - 2.0 * PI).abs() < 1e-15);
    assert!(AngleGrid::new(7).is_err());
    assert!(AngleGrid::new(6).is_err());
}
