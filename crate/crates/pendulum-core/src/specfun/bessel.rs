//! Integer-order Bessel functions of the first kind.
//!
//! Small arguments use the ascending series, accumulated through term
//! ratios so that no factorial is ever formed explicitly. Large arguments
//! use Miller's backward recurrence normalized by the plane-wave sum
//! `e^{iσz} = J_0(z) + 2 Σ_{n≥1} (iσ)^n J_n(z)`, with `σ = ±1` chosen so the
//! normalizer does not cancel for complex `z`.

use num_complex::Complex64;

use super::{i_pow, SeriesControl};
use crate::summation::{sum_outside_in, sum_ratio_series, SeriesFailure};
use crate::{Error, Result};

/// `|z|` above which the ascending series hands over to backward recurrence,
/// for order `n`. Below it `|z/2|² ≤ n + 1`, so the series terms decrease
/// from the first one and cancellation costs at most a factor `e`.
pub fn series_threshold(n: u64) -> f64 {
    2.0 * ((n + 1) as f64).sqrt()
}

/// `J_order(z)` for integer order and complex argument.
pub fn bessel_j(order: i64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite Bessel argument {z}")));
    }
    let n = order.unsigned_abs();
    let odd = n % 2 == 1;
    let mut negate = order < 0 && odd;
    let mut z = z;
    if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        z = -z;
        if odd {
            negate = !negate;
        }
    }
    let value = if z.norm() == 0.0 {
        if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else if z.norm() <= series_threshold(n) {
        ascending_series(n, z, ctl)?
    } else {
        miller(n as usize, z)[n as usize]
    };
    Ok(if negate { -value } else { value })
}

/// Real-argument convenience wrapper.
pub fn bessel_j_real(order: i64, x: f64, ctl: &SeriesControl) -> Result<f64> {
    bessel_j(order, Complex64::new(x, 0.0), ctl).map(|v| v.re)
}

fn ascending_series(n: u64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    let half = z * 0.5;
    let mut first = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        first *= half / j as f64;
    }
    let q = -(half * half);
    let nf = n as f64;
    let ratio = |l: usize| {
        let l = l as f64;
        q / ((l + 1.0) * (nf + l + 1.0))
    };
    // Tiny leading terms (high order, small argument) need a relative stop.
    let tol = ctl.tail_tol * first.norm().min(1.0);
    match sum_ratio_series(first, ratio, 0.0, ctl.max_terms, tol) {
        Ok(s) => Ok(s.value),
        Err(SeriesFailure::NoConvergence { terms, tail }) => Err(Error::NonConvergence { terms, tail }),
        Err(SeriesFailure::Diverges { ratio }) => Err(Error::Divergence { l: 0, ratio }),
    }
}

/// `J_0(z) ..= J_{n_max}(z)` by normalized backward recurrence. `z != 0`.
///
/// The recurrence is run on the ratios `ρ_k = J_k / J_{k−1}`, which stay
/// bounded, and the values are rebuilt forward from `J_0`. This keeps the
/// tiny high-order values of small arguments representable.
fn miller(n_max: usize, z: Complex64) -> Vec<Complex64> {
    let a = z.norm();
    let m0 = n_max.max(a.ceil() as usize);
    let mut start = m0 + 30 + (160.0 * m0 as f64).sqrt().ceil() as usize;
    start += start % 2;
    let zinv = z.inv();
    let mut ratios = vec![Complex64::new(0.0, 0.0); start + 1];
    let mut next = Complex64::new(0.0, 0.0);
    for k in (1..=start).rev() {
        next = (zinv * (2.0 * k as f64) - next).inv();
        ratios[k] = next;
    }
    let sigma = if z.im > 0.0 { -1.0 } else { 1.0 };
    let w = Complex64::new(0.0, sigma);
    let mut rel = vec![Complex64::new(1.0, 0.0); start + 1];
    let mut norm = Complex64::new(1.0, 0.0);
    let mut wk = Complex64::new(1.0, 0.0);
    for k in 1..=start {
        rel[k] = rel[k - 1] * ratios[k];
        wk *= w;
        norm += 2.0 * wk * rel[k];
        if rel[k].norm() > 1e150 {
            for v in rel[..=k].iter_mut() {
                *v *= 1e-150;
            }
            norm *= 1e-150;
        }
    }
    let target = (Complex64::new(0.0, sigma) * z).exp();
    let scale = target * norm.inv();
    rel.truncate(n_max + 1);
    for v in rel.iter_mut() {
        *v *= scale;
    }
    rel
}

/// `J_0(z) ..= J_{n_max}(z)` for complex `z`, all orders from one recurrence.
pub fn bessel_j_sequence(n_max: usize, z: Complex64) -> Vec<Complex64> {
    if z.norm() == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    miller(n_max, z)
}

/// Table of `J_n(x)` for `|n| <= n_max` at a fixed real argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    x: f64,
    values: Vec<f64>,
}

impl BesselTable {
    pub fn new(x: f64, n_max: usize) -> Self {
        let mut values = if x == 0.0 {
            let mut v = vec![0.0; n_max + 1];
            v[0] = 1.0;
            v
        } else {
            miller(n_max, Complex64::new(x.abs(), 0.0))
                .into_iter()
                .map(|c| c.re)
                .collect()
        };
        if x < 0.0 {
            for (n, v) in values.iter_mut().enumerate() {
                if n % 2 == 1 {
                    *v = -*v;
                }
            }
        }
        Self { x, values }
    }

    pub fn argument(&self) -> f64 {
        self.x
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `J_n(x)`; orders beyond the table are treated as zero.
    #[inline]
    pub fn get(&self, n: i64) -> f64 {
        let m = n.unsigned_abs() as usize;
        if m >= self.values.len() {
            return 0.0;
        }
        let v = self.values[m];
        if n < 0 && m % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Truncated Jacobi-Anger sum `Σ_{|m| ≤ k_max} i^m e^{imθ} J_m(z)`, an
/// approximation of `e^{iz cos θ}`.
pub fn jacobi_anger(z: f64, theta: f64, k_max: usize) -> Complex64 {
    let table = BesselTable::new(z, k_max);
    sum_outside_in(k_max, |m| {
        i_pow(m) * Complex64::from_polar(1.0, m as f64 * theta) * table.get(m)
    })
}

/// Residual of the integer-order addition theorem
/// `|J_l(z+s) − Σ_{|r| ≤ r_max} J_{l−r}(s) J_r(z)|`.
pub fn bessel_addition_check(l: i64, z: f64, s: f64, r_max: usize) -> f64 {
    let lhs = BesselTable::new(z + s, l.unsigned_abs() as usize).get(l);
    let outer = BesselTable::new(s, l.unsigned_abs() as usize + r_max);
    let inner = BesselTable::new(z, r_max);
    let rhs = sum_outside_in(r_max, |r| Complex64::new(outer.get(l - r) * inner.get(r), 0.0));
    (lhs - rhs.re).abs()
}

/// `J_order(z)` from the periodic integral representation
/// `(1/2π) ∫_{-π}^{π} e^{i(z sin ϑ − order·ϑ)} dϑ` by the uniform trapezoid
/// rule on `n_nodes` points (spectrally accurate for this integrand).
pub fn bessel_j_quadrature(order: i64, z: f64, n_nodes: usize) -> f64 {
    let n_nodes = n_nodes.max(1);
    let h = 2.0 * std::f64::consts::PI / n_nodes as f64;
    let mut acc = 0.0;
    let mut carry = 0.0;
    for j in 0..n_nodes {
        let t = -std::f64::consts::PI + h * j as f64;
        let x = (z * t.sin() - order as f64 * t).cos();
        let y = acc + x;
        carry += if acc.abs() >= x.abs() {
            (acc - y) + x
        } else {
            (x - y) + acc
        };
        acc = y;
    }
    (acc + carry) / n_nodes as f64
}

/// Node-doubling version of [`bessel_j_quadrature`]: starts at `n_start`
/// nodes and doubles until two successive results differ by < `tol`.
pub fn bessel_j_quadrature_adaptive(order: i64, z: f64, n_start: usize, tol: f64) -> Result<f64> {
    let mut n = n_start.max(8);
    let mut prev = bessel_j_quadrature(order, z, n);
    for _ in 0..20 {
        n *= 2;
        let next = bessel_j_quadrature(order, z, n);
        if (next - prev).abs() < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        terms: n,
        tail: f64::NAN,
    })
}
