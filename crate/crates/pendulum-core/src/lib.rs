//! Quantum pendulum (`V = α cos θ`, `ħ = 1`) propagator and Green function.
//!
//! The crate evaluates the plane-wave/Bessel double series for the Feynman
//! kernel, the Green-function representations derived from it, and three
//! independent reference propagators (momentum-basis diagonalization,
//! split-step evolution, time-sliced transfer matrices) used to judge the
//! series numerically.
//!
//! Pointwise real-time kernels on the circle are distributions: the momentum
//! sums do not converge absolutely. Every evaluator therefore works with an
//! explicit momentum cutoff, and the oracles evaluate the evolution of a
//! band-limited delta (see [`oracles::BandSide`]). With the same cutoff on
//! both sides of a comparison the deviations are well defined and converge.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluator;
pub mod green;
pub mod kernel;
pub mod methods;
pub mod oracles;
pub mod par;
pub mod specfun;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use evaluator::KernelEvaluator;
pub use kernel::{KernelQuery, PendulumParams, Truncation};

/// Complex value carried by every propagator and Green-function evaluation.
pub type ComplexAmplitude = num_complex::Complex64;

pub(crate) fn ensure_finite(value: ComplexAmplitude, what: &str) -> Result<ComplexAmplitude> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
