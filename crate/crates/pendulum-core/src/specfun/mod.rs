//! Special functions: integer-order Bessel functions, the Gauss
//! hypergeometric function, and the quadrature rules used throughout.

pub mod bessel;
pub mod hypergeometric;
pub mod quadrature;

pub use bessel::{
    bessel_addition_check, bessel_j, bessel_j_quadrature, bessel_j_quadrature_adaptive, bessel_j_real,
    bessel_j_sequence, jacobi_anger, BesselTable,
};
pub use hypergeometric::{gauss_2f1, gauss_2f1_complex};

use num_complex::Complex64;

use crate::{Error, Result};

/// Truncation control for the power series evaluated here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    /// Absolute size of the last retained term.
    pub tail_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        if max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be >= 1".into()));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter("tail_tol must be > 0".into()));
        }
        Ok(Self { max_terms, tail_tol })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 20_000,
            tail_tol: 1e-17,
        }
    }
}

/// `i^m` without rounding.
#[inline]
pub fn i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
