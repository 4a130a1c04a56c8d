//! Small dense complex linear algebra helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const MAX_TERMS: usize = 60;

/// Induced 1-norm (max column sum).
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by Taylor scaling and squaring.
///
/// The scaled matrix has 1-norm at most 1/2; the series is summed until the
/// last term is below `1e-17` of the partial sum in 1-norm.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidInput("expm needs a square matrix".into()));
    }
    let norm = norm1(a);
    if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput("expm of a non-finite matrix".into()));
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * Complex64::new(0.5f64.powi(squarings), 0.0);

    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    let mut converged = false;
    for k in 1..=MAX_TERMS {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if norm1(&term) <= 1e-17 * norm1(&sum) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ExponentialNotConverged { terms: MAX_TERMS });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `e^{i L} H e^{-i L}`.
pub fn conjugate(h: &CMatrix, generator: &CMatrix) -> Result<CMatrix> {
    let i = Complex64::new(0.0, 1.0);
    let u = expm(&(generator * i))?;
    let u_inv = expm(&(generator * -i))?;
    Ok(&u * h * &u_inv)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_and_diagonal() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), CMatrix::identity(3, 3));
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-2.0, 0.5),
            c(0.0, 3.0),
        ]));
        let e = expm(&d).unwrap();
        for k in 0..3 {
            assert!((e[(k, k)] - d[(k, k)].exp()).norm() < 1e-13 * d[(k, k)].exp().norm().max(1.0));
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(t [[0,1],[-1,0]]) is a rotation by angle t
        let t = 7.3;
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(t, 0.0), c(-t, 0.0), c(0.0, 0.0)]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(0, 1)] - c(t.sin(), 0.0)).norm() < 1e-13);
        assert!((e[(1, 0)] + c(t.sin(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn inverse_pair() {
        let a = CMatrix::from_fn(4, 4, |i, j| c((i as f64 - j as f64) * 0.3, (i * j) as f64 * 0.1));
        let p = expm(&a).unwrap() * expm(&(-&a)).unwrap();
        assert!(frobenius(&(p - CMatrix::identity(4, 4))) < 1e-13);
    }

    #[test]
    fn rejects_non_finite() {
        let a = CMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert!(expm(&a).is_err());
    }
}
