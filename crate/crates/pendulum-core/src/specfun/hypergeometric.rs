//! Gauss hypergeometric function `₂F₁(a, b; c; z)` for real parameters.

use num_complex::Complex64;

use super::SeriesControl;
use crate::summation::{sum_ratio_series, SeriesFailure};
use crate::{Error, Result};

fn check_c(c: f64) -> Result<()> {
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Domain(format!("2F1 with c = {c} (non-positive integer)")));
    }
    Ok(())
}

fn series(a: f64, b: f64, c: f64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    let ratio = |n: usize| {
        let n = n as f64;
        z * ((a + n) * (b + n) / ((c + n) * (n + 1.0)))
    };
    match sum_ratio_series(Complex64::new(1.0, 0.0), ratio, z.norm(), ctl.max_terms, ctl.tail_tol) {
        Ok(s) => Ok(s.value),
        Err(SeriesFailure::NoConvergence { terms, tail }) => Err(Error::NonConvergence { terms, tail }),
        Err(SeriesFailure::Diverges { ratio }) => Err(Error::Domain(format!(
            "2F1 series argument |z| = {ratio} outside the unit disc"
        ))),
    }
}

/// `₂F₁(a, b; c; x)` for real `x < 1`.
///
/// The ascending series is used for `-1 < x < 1`; for `x ≤ -1` the Pfaff
/// transformation `F(a,b;c;x) = (1−x)^{−a} F(a, c−b; c; x/(x−1))` maps the
/// argument into `[1/2, 1)`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64, ctl: &SeriesControl) -> Result<f64> {
    check_c(c)?;
    if !(x < 1.0) {
        return Err(Error::Domain(format!("2F1 argument x = {x} must be < 1")));
    }
    if x > -1.0 {
        series(a, b, c, Complex64::new(x, 0.0), ctl).map(|v| v.re)
    } else {
        let w = x / (x - 1.0);
        let inner = series(a, c - b, c, Complex64::new(w, 0.0), ctl)?;
        Ok((1.0 - x).powf(-a) * inner.re)
    }
}

/// `₂F₁(a, b; c; z)` for real parameters and complex `z`.
///
/// Picks whichever of `z` and its Pfaff image `z/(z−1)` is smaller in modulus;
/// fails with a domain error when both lie outside the unit disc (that
/// happens only near the cut `[1, ∞)`).
pub fn gauss_2f1_complex(a: f64, b: f64, c: f64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    check_c(c)?;
    let one = Complex64::new(1.0, 0.0);
    let w = z / (z - one);
    let direct = z.norm();
    let pfaff = w.norm();
    if direct < 1.0 && direct <= pfaff {
        series(a, b, c, z, ctl)
    } else if pfaff < 1.0 {
        let inner = series(a, c - b, c, w, ctl)?;
        Ok((one - z).powf(-a) * inner)
    } else {
        Err(Error::Domain(format!(
            "2F1 argument z = {z} outside the implemented domain"
        )))
    }
}
