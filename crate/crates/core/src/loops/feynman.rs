//! Numerical checks of the Feynman-parameter formulas and of the symmetric
//! integration rule `l_tau l_lambda -> (1/4) g_{tau lambda} l^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::quadrature::{integrate, integrate_unit_square, QuadOptions};
use crate::error::{ensure_positive, Result};

/// Relative deviation of the parameter integral from `1/(AB)` or `1/(ABC)`.
///
/// Two denominators: `int_0^1 dx / (x A + (1-x) B)^2`.
/// Three: `2 int_0^1 x dx int_0^1 dy / (x y A + x (1-y) B + (1-x) C)^3`.
pub fn feynman_identity_check(a: f64, b: f64, c: Option<f64>) -> Result<f64> {
    ensure_positive("A", a)?;
    ensure_positive("B", b)?;
    let opts = QuadOptions::relative(1e-13);
    let (value, exact) = match c {
        None => {
            let r = integrate(
                |x| {
                    let d = x * a + (1.0 - x) * b;
                    1.0 / (d * d)
                },
                0.0,
                1.0,
                opts,
            )?;
            (r.value, 1.0 / (a * b))
        }
        Some(c) => {
            ensure_positive("C", c)?;
            let r = integrate_unit_square(
                |x, y| {
                    let d = x * y * a + x * (1.0 - y) * b + (1.0 - x) * c;
                    2.0 * x / (d * d * d)
                },
                opts,
            )?;
            (r.value, 1.0 / (a * b * c))
        }
    };
    Ok(((value - exact) / exact).abs())
}

/// Monte Carlo moments of `l_tau l_lambda g(l^2)` over the Euclidean 4-ball.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMoments {
    /// Estimated `int l_tau l_lambda g` (up to the common ball volume factor).
    pub tensor: [[f64; 4]; 4],
    /// One-sigma statistical errors of `tensor`.
    pub tensor_err: [[f64; 4]; 4],
    /// Estimated `int l^2 g`.
    pub scalar: f64,
    pub scalar_err: f64,
}

impl TensorMoments {
    /// Largest off-diagonal component in units of its standard error.
    pub fn max_off_diagonal_sigma(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    worst = worst.max(self.tensor[i][j].abs() / self.tensor_err[i][j]);
                }
            }
        }
        worst
    }

    /// Largest deviation of a diagonal component from `scalar / 4`, in standard errors.
    ///
    /// The diagonal entries and the trace are correlated; the error used is the
    /// one of `l_i^2 g - l^2 g / 4` per sample.
    pub fn max_diagonal_sigma(&self, diag_diff_err: &[f64; 4]) -> f64 {
        (0..4)
            .map(|i| (self.tensor[i][i] - 0.25 * self.scalar).abs() / diag_diff_err[i])
            .fold(0.0, f64::max)
    }
}

/// Uniform sampling of the 4-ball of radius `lambda`, deterministic for a given seed.
/// Returns the moments and the standard errors of `l_i^2 g - l^2 g / 4`.
pub fn symmetric_integration_moments<G>(g: G, lambda: f64, samples: usize, seed: u64) -> (TensorMoments, [f64; 4])
where
    G: Fn(f64) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = [[0.0; 4]; 4];
    let mut sum_sq = [[0.0; 4]; 4];
    let (mut s, mut s2) = (0.0, 0.0);
    let mut diff = [0.0; 4];
    let mut diff_sq = [0.0; 4];
    for _ in 0..samples {
        let mut v = [0.0f64; 4];
        for c in v.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = lambda * rng.random::<f64>().powf(0.25);
        for c in v.iter_mut() {
            *c *= r / norm;
        }
        let l2 = r * r;
        let w = g(l2);
        for i in 0..4 {
            for j in 0..4 {
                let t = v[i] * v[j] * w;
                sum[i][j] += t;
                sum_sq[i][j] += t * t;
            }
            let d = v[i] * v[i] * w - 0.25 * l2 * w;
            diff[i] += d;
            diff_sq[i] += d * d;
        }
        s += l2 * w;
        s2 += (l2 * w) * (l2 * w);
    }
    let n = samples as f64;
    let stderr = |sum: f64, sq: f64| ((sq / n - (sum / n).powi(2)).max(0.0) / n).sqrt();
    let mut tensor = [[0.0; 4]; 4];
    let mut tensor_err = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            tensor[i][j] = sum[i][j] / n;
            tensor_err[i][j] = stderr(sum[i][j], sum_sq[i][j]);
        }
    }
    let mut diag_err = [0.0; 4];
    for i in 0..4 {
        diag_err[i] = stderr(diff[i], diff_sq[i]);
    }
    (
        TensorMoments {
            tensor,
            tensor_err,
            scalar: s / n,
            scalar_err: stderr(s, s2),
        },
        diag_err,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_denominators() {
        assert!(feynman_identity_check(1.0, 1.0, None).unwrap() <= 1e-12);
        assert!(feynman_identity_check(1.0, 1e4, None).unwrap() <= 1e-8);
        assert!(feynman_identity_check(0.3, 7.0, None).unwrap() <= 1e-10);
    }

    #[test]
    fn three_denominators() {
        assert!(feynman_identity_check(1.0, 2.0, Some(3.0)).unwrap() <= 1e-10);
        assert!(feynman_identity_check(1.0, 1.0, Some(1.0)).unwrap() <= 1e-12);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(feynman_identity_check(0.0, 1.0, None).is_err());
        assert!(feynman_identity_check(1.0, 1.0, Some(-2.0)).is_err());
    }

    #[test]
    fn symmetric_integration_rule() {
        let a2 = 0.5;
        let (m, diag_err) = symmetric_integration_moments(|u| 1.0 / ((u + a2) * (u + a2)), 3.0, 200_000, 7);
        assert!(m.max_off_diagonal_sigma() < 4.0);
        assert!(m.max_diagonal_sigma(&diag_err) < 3.0);
        // trace of the tensor is the scalar moment, sample by sample
        let tr: f64 = (0..4).map(|i| m.tensor[i][i]).sum();
        assert!((tr - m.scalar).abs() < 1e-12 * m.scalar);
    }
}
