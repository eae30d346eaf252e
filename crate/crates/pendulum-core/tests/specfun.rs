use num_complex::Complex64;
use proptest::prelude::*;

use pendulum_core::specfun::{
    bessel_addition_check, bessel_j, bessel_j_quadrature, bessel_j_real, gauss_2f1, gauss_2f1_complex, jacobi_anger,
    SeriesControl,
};

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

/// Ascending series for `J_n(x)` and its term-wise derivative, `n ≥ 0`,
/// accumulated through term ratios.
fn series_and_derivative(n: u32, x: f64) -> (f64, f64) {
    let half = x / 2.0;
    let mut lead = 1.0;
    for j in 1..=n {
        lead *= half / j as f64;
    }
    let (mut value, mut deriv) = (0.0, 0.0);
    let mut term = lead;
    for l in 0..80u32 {
        let power = (n + 2 * l) as f64;
        value += term;
        if power > 0.0 {
            deriv += term * power / x;
        }
        term *= -half * half / (((l + 1) * (n + l + 1)) as f64);
    }
    (value, deriv)
}

fn derivative_oracle(k: i64, x: f64) -> f64 {
    let (_, d) = series_and_derivative(k.unsigned_abs() as u32, x);
    if k < 0 && k % 2 != 0 {
        -d
    } else {
        d
    }
}

#[test]
fn published_values() {
    assert_eq!(bessel_j_real(0, 0.0, &ctl()).unwrap(), 1.0);
    assert_eq!(bessel_j_real(1, 0.0, &ctl()).unwrap(), 0.0);
    assert!((bessel_j_real(0, 1.0, &ctl()).unwrap() - 0.765197686557967).abs() < 1e-15);
    assert_eq!(
        bessel_j_real(-2, 1.5, &ctl()).unwrap(),
        bessel_j_real(2, 1.5, &ctl()).unwrap()
    );
}

#[test]
fn recurrence_against_termwise_derivative() {
    for &z in &[0.1, 1.0, 5.0] {
        for k in -10..=10 {
            let lhs = bessel_j_real(k - 1, z, &ctl()).unwrap() - bessel_j_real(k + 1, z, &ctl()).unwrap();
            let d = derivative_oracle(k, z);
            assert!((lhs - 2.0 * d).abs() < 1e-10, "k = {k}, z = {z}: {lhs} vs {}", 2.0 * d);
        }
    }
}

#[test]
fn hypergeometric_closed_forms() {
    let c = ctl();
    assert_eq!(gauss_2f1(0.3, 0.7, 1.9, 0.0, &c).unwrap(), 1.0);
    let x: f64 = -0.5;
    assert!((gauss_2f1(1.0, 1.0, 2.0, x, &c).unwrap() - (-(1.0 - x).ln() / x)).abs() < 1e-14);
    let t: f64 = 0.5;
    assert!((gauss_2f1(0.5, 1.0, 1.5, -t * t, &c).unwrap() - t.atan() / t).abs() < 1e-14);
    // Beyond x = −1 the transformed branch is used.
    for x in [-1.0, -3.0, -20.0] {
        let v = gauss_2f1(1.0, 1.0, 2.0, x, &c).unwrap();
        assert!((v - (-(1.0 - x).ln() / x)).abs() < 1e-13, "x = {x}");
    }
    assert!(gauss_2f1(1.0, 1.0, -2.0, 0.1, &c).is_err());
    assert!(gauss_2f1(1.0, 1.0, 2.0, 1.0, &c).is_err());
}

#[test]
fn complex_hypergeometric_matches_logarithm() {
    let c = ctl();
    for z in [
        Complex64::new(0.3, 0.4),
        Complex64::new(-2.0, 1.5),
        Complex64::new(0.2, -0.9),
    ] {
        let v = gauss_2f1_complex(1.0, 1.0, 2.0, z, &c).unwrap();
        let exact = -(Complex64::new(1.0, 0.0) - z).ln() / z;
        assert!((v - exact).norm() < 1e-13, "z = {z}");
    }
}

#[test]
fn jacobi_anger_examples() {
    assert!((jacobi_anger(0.0, 1.234, 5) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let v = jacobi_anger(0.3, 0.7, 20);
    assert!((v - Complex64::from_polar(1.0, 0.3 * 0.7f64.cos())).norm() < 1e-12);
    let v = jacobi_anger(2.0, std::f64::consts::PI, 30);
    assert!((v - Complex64::from_polar(1.0, -2.0)).norm() < 1e-12);
}

#[test]
fn addition_examples() {
    assert_eq!(bessel_addition_check(0, 0.0, 0.7, 5), 0.0);
    assert!(bessel_addition_check(0, 0.5, 0.5, 20) < 1e-12);
    assert!(bessel_addition_check(3, 1.0, 2.0, 25) < 1e-12);
}

#[test]
fn quadrature_examples() {
    assert!((bessel_j_quadrature(0, 0.0, 16) - 1.0).abs() < 1e-15);
    assert!((bessel_j_quadrature(1, 1.0, 64) - bessel_j_real(1, 1.0, &ctl()).unwrap()).abs() < 1e-12);
    assert!((bessel_j_quadrature(5, 2.0, 128) - bessel_j_real(5, 2.0, &ctl()).unwrap()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn reflection(n in 0i64..40, z in -30.0f64..30.0) {
        let pos = bessel_j_real(n, z, &ctl()).unwrap();
        let neg_order = bessel_j_real(-n, z, &ctl()).unwrap();
        let neg_arg = bessel_j_real(n, -z, &ctl()).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((neg_order - sign * pos).abs() <= 1e-15 * pos.abs().max(1e-300));
        prop_assert!((neg_arg - sign * pos).abs() <= 1e-15 * pos.abs().max(1e-300));
    }

    #[test]
    fn normalization_sum_rule(z in -25.0f64..25.0) {
        let n = (z.abs() + 16.0).ceil() as i64;
        let sum: f64 = (-n..=n).map(|k| bessel_j_real(k, z, &ctl()).unwrap().powi(2)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-10, "sum = {sum}");
    }

    #[test]
    fn jacobi_anger_residual(z in 0.0f64..5.0, theta in 0.0f64..6.3) {
        let k_max = z.ceil() as usize + 25;
        let exact = Complex64::from_polar(1.0, z * theta.cos());
        prop_assert!((jacobi_anger(z, theta, k_max) - exact).norm() < 1e-10);
    }

    #[test]
    fn addition_theorem_both_regimes(l in -8i64..8, z in -6.0f64..6.0, s in -6.0f64..6.0) {
        let r_max = (z.abs() + s.abs()).ceil() as usize + 20;
        prop_assert!(bessel_addition_check(l, z, s, r_max) < 1e-10, "l = {l}, z = {z}, s = {s}");
    }

    #[test]
    fn series_and_quadrature_agree(order in -20i64..=20, z in -20.0f64..20.0) {
        let n_nodes = 8 * (order.unsigned_abs() as usize + z.abs().ceil() as usize + 1);
        let q = bessel_j_quadrature(order, z, n_nodes.max(64));
        let s = bessel_j_real(order, z, &ctl()).unwrap();
        prop_assert!((q - s).abs() < 1e-10, "J_{order}({z}): {q} vs {s}");
    }

    #[test]
    fn complex_argument_matches_real_axis(order in -15i64..15, x in -15.0f64..15.0) {
        let c = bessel_j(order, Complex64::new(x, 0.0), &ctl()).unwrap();
        let r = bessel_j_real(order, x, &ctl()).unwrap();
        prop_assert!((c.re - r).abs() < 1e-13 && c.im.abs() < 1e-13);
    }

    #[test]
    fn complex_recurrence(order in 1i64..20, re in -8.0f64..8.0, im in -3.0f64..3.0) {
        let z = Complex64::new(re, im);
        prop_assume!(z.norm() > 0.1);
        let lhs = bessel_j(order - 1, z, &ctl()).unwrap() + bessel_j(order + 1, z, &ctl()).unwrap();
        let rhs = 2.0 * order as f64 / z * bessel_j(order, z, &ctl()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }
}
