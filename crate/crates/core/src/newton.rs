//! Damped complex Newton iteration with analytic derivatives.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop once `|f| < tol`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    pub root: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a zero of `f` starting from `seed`. `f` returns the value and its
/// derivative. A step that increases `|f|` is halved up to ten times, which
/// keeps the iteration inside the basin when the seed is rough.
pub fn newton<F>(f: F, seed: Complex64, options: NewtonOptions) -> Result<NewtonOutcome>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let mut z = seed;
    let (mut value, mut slope) = f(z);
    for iterations in 0..=options.max_iterations {
        let residual = value.norm();
        if !residual.is_finite() {
            break;
        }
        if residual < options.tol {
            return Ok(NewtonOutcome {
                root: z,
                residual,
                iterations,
            });
        }
        if iterations == options.max_iterations || slope.norm() == 0.0 {
            break;
        }
        let step = value / slope;
        let mut scale = 1.0;
        let mut candidate = z - step;
        let mut next = f(candidate);
        for _ in 0..10 {
            if next.0.is_finite() && next.0.norm() < residual {
                break;
            }
            scale *= 0.5;
            candidate = z - step * scale;
            next = f(candidate);
        }
        if candidate == z {
            break;
        }
        z = candidate;
        (value, slope) = next;
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        residual: value.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_quadratically_on_polynomial() {
        let f = |z: Complex64| (z * z + 1.0, 2.0 * z);
        let out = newton(f, Complex64::new(0.3, 0.8), NewtonOptions::default()).unwrap();
        assert!((out.root - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(out.iterations <= 8);
    }

    #[test]
    fn exact_seed_is_a_fixed_point() {
        let f = |z: Complex64| (z.exp() - 1.0, z.exp());
        let out = newton(f, Complex64::new(0.0, 0.0), NewtonOptions::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.root, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reports_failure_with_residual() {
        // real seeds never leave the real axis, where z^2 + 1 has no zero
        let f = |z: Complex64| (z * z + 1.0, 2.0 * z);
        let err = newton(f, Complex64::new(0.5, 0.0), NewtonOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }
}
