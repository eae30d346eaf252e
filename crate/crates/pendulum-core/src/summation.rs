//! Compensated accumulation and slowly-convergent series acceleration.

use num_complex::Complex64;

/// Neumaier-compensated accumulator for complex terms.
///
/// The propagator series add unit-modulus phases times Bessel factors, so
/// the running sum is routinely far smaller than the individual terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

#[inline]
fn two_sum(sum: f64, carry: &mut f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *carry += (sum - t) + x;
    } else {
        *carry += (x - t) + sum;
    }
    t
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, &mut self.carry.re, x.re);
        self.sum.im = two_sum(self.sum.im, &mut self.carry.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sum `f(n)` over `n = -n_max..=n_max` from the outside in.
///
/// Each symmetric pair `f(-n) + f(n)` is formed first and then accumulated,
/// working from the largest `|n|` down to `n = 0`. Forming the pair first
/// makes the result invariant under `n -> -n` relabelling of the terms.
pub fn sum_outside_in<F>(n_max: usize, mut f: F) -> Complex64
where
    F: FnMut(i64) -> Complex64,
{
    let mut acc = CompensatedSum::new();
    for n in (1..=n_max as i64).rev() {
        acc.add(f(-n) + f(n));
    }
    acc.add(f(0));
    acc.value()
}

/// Wynn's epsilon algorithm over a sequence of partial sums.
///
/// Returns the sequence of even-column estimates, the last one being the
/// best. Zero differences (an already converged tail) stop the recursion.
pub fn wynn_epsilon(partial_sums: &[Complex64]) -> Vec<Complex64> {
    let mut estimates = Vec::new();
    if partial_sums.is_empty() {
        return estimates;
    }
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); partial_sums.len() + 1];
    let mut cur: Vec<Complex64> = partial_sums.to_vec();
    let mut column = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 || !d.norm().is_finite() {
                return estimates;
            }
            next.push(prev[i + 1] + d.inv());
        }
        prev = cur;
        cur = next;
        column += 1;
        if column.is_multiple_of(2) {
            estimates.push(*cur.last().unwrap());
        }
    }
    estimates
}

/// Outcome of a controlled power-series summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
    /// Magnitude of the last retained term, or of the last accelerated
    /// correction when acceleration was used.
    pub tail: f64,
    pub accelerated: bool,
}

/// Sum a series given term-by-term through its ratio `t_{l+1} = t_l * r(l)`.
///
/// `limit_ratio` is the modulus of `lim r(l)`; it decides the strategy:
/// plain summation below 0.5, Wynn-epsilon acceleration on the boundary
/// region `[0.5, 1]`, and a divergence error (reported through `Err(ratio)`)
/// beyond 1.
pub fn sum_ratio_series<R>(
    first: Complex64,
    mut ratio: R,
    limit_ratio: f64,
    max_terms: usize,
    tail_tol: f64,
) -> std::result::Result<SeriesSum, SeriesFailure>
where
    R: FnMut(usize) -> Complex64,
{
    if limit_ratio > 1.0 + 1e-12 {
        return Err(SeriesFailure::Diverges { ratio: limit_ratio });
    }
    let mut term = first;
    let mut acc = CompensatedSum::new();
    acc.add(term);
    if limit_ratio < 0.5 {
        for l in 0..max_terms {
            let r = ratio(l);
            // Only stop once the terms are shrinking: ascending series can
            // start below the tolerance and grow towards their peak.
            if term.norm() <= tail_tol && r.norm() < 1.0 {
                return Ok(SeriesSum {
                    value: acc.value(),
                    terms: l + 1,
                    tail: term.norm(),
                    accelerated: false,
                });
            }
            term *= r;
            acc.add(term);
            if term.norm() == 0.0 {
                return Ok(SeriesSum {
                    value: acc.value(),
                    terms: l + 2,
                    tail: 0.0,
                    accelerated: false,
                });
            }
        }
        return Err(SeriesFailure::NoConvergence {
            terms: max_terms,
            tail: term.norm(),
        });
    }

    // Boundary region: accelerate the partial sums in growing batches.
    let mut partial = vec![acc.value()];
    let mut last_estimate: Option<Complex64> = None;
    let batch = 16usize;
    let mut l = 0usize;
    while l < max_terms {
        for _ in 0..batch {
            term *= ratio(l);
            acc.add(term);
            partial.push(acc.value());
            l += 1;
        }
        if term.norm() <= tail_tol {
            return Ok(SeriesSum {
                value: acc.value(),
                terms: l + 1,
                tail: term.norm(),
                accelerated: false,
            });
        }
        let estimates = wynn_epsilon(&partial);
        if let Some(&est) = estimates.last() {
            if let Some(prev) = last_estimate {
                let change = (est - prev).norm();
                if change <= tail_tol.max(1e-15 * est.norm()) {
                    return Ok(SeriesSum {
                        value: est,
                        terms: l + 1,
                        tail: change,
                        accelerated: true,
                    });
                }
            }
            last_estimate = Some(est);
        }
        // Wynn tables beyond ~120 entries only accumulate rounding.
        if partial.len() > 120 {
            let keep = partial.split_off(partial.len() - 64);
            partial = keep;
            last_estimate = None;
        }
    }
    Err(SeriesFailure::NoConvergence {
        terms: max_terms,
        tail: term.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesFailure {
    Diverges { ratio: f64 },
    NoConvergence { terms: usize, tail: f64 },
}
