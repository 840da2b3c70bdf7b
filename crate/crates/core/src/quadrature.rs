//! Composite Simpson quadrature on uniform grids.
//!
//! Integrals that must recombine exactly (the pieces of a functional
//! derivative) share one [`SimpsonRule`] so they are evaluated on the same
//! nodes with the same weights.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of composite Simpson's rule with an even number of
/// intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpsonRule {
    pub a: f64,
    pub b: f64,
    pub intervals: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SimpsonRule {
    pub fn new(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if intervals < 2 || intervals % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "Simpson's rule needs an even number of intervals >= 2, got {intervals}"
            )));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite integration bounds [{a}, {b}]")));
        }
        let h = (b - a) / intervals as f64;
        let nodes = (0..=intervals).map(|k| a + k as f64 * h).collect();
        let weights = (0..=intervals)
            .map(|k| {
                let w = if k == 0 || k == intervals {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect();
        Ok(Self { a, b, intervals, nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / self.intervals as f64
    }

    /// Weighted sum of precomputed node values.
    pub fn apply(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        self.weights.iter().zip(values).map(|(w, v)| v * w).sum()
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| f(*t) * w).sum()
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| f(*t) * w).sum()
    }

    /// Richardson error estimate `|S_N - S_{N/2}| / 15` from node values.
    /// Zero when the rule has fewer than four intervals.
    pub fn error_estimate(&self, values: &[Complex64]) -> f64 {
        let n = self.intervals;
        if n < 4 || n % 4 != 0 {
            return 0.0;
        }
        let h2 = 2.0 * self.spacing();
        let coarse: Complex64 = values
            .iter()
            .step_by(2)
            .enumerate()
            .map(|(k, v)| {
                let w = if k == 0 || k == n / 2 {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                v * (w * h2 / 3.0)
            })
            .sum();
        (self.apply(values) - coarse).norm() / 15.0
    }
}

/// Simpson integral of `f` over `[a, b]` (either orientation).
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, intervals: usize) -> Result<Complex64> {
    Ok(SimpsonRule::new(a, b, intervals)?.integrate(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let r = SimpsonRule::new(-1.0, 2.0, 16).unwrap();
        let v = r.integrate_real(|t| 4.0 * t * t * t - 3.0 * t * t + 1.0);
        // antiderivative t^4 - t^3 + t
        let exact = (16.0 - 8.0 + 2.0) - (1.0 + 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn reversed_orientation_flips_sign() {
        let f = |t: f64| Complex64::new(t.sin(), t.cos());
        let fwd = simpson(f, 0.0, 1.0, 64).unwrap();
        let rev = simpson(f, 1.0, 0.0, 64).unwrap();
        assert!((fwd + rev).norm() < 1e-15);
    }

    #[test]
    fn error_estimate_tracks_true_error() {
        let r = SimpsonRule::new(0.0, 1.0, 32).unwrap();
        let values: Vec<Complex64> = r.nodes().iter().map(|t| Complex64::new((5.0 * t).exp(), 0.0)).collect();
        let exact = ((5.0f64).exp() - 1.0) / 5.0;
        let err = (r.apply(&values).re - exact).abs();
        let est = r.error_estimate(&values);
        assert!(est > 0.5 * err && est < 2.0 * err, "err {err}, est {est}");
    }

    #[test]
    fn odd_interval_counts_are_rejected() {
        assert!(SimpsonRule::new(0.0, 1.0, 15).is_err());
        assert!(SimpsonRule::new(0.0, 1.0, 0).is_err());
    }
}
