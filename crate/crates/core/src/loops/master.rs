//! Cutoff-regulated Euclidean master integrals.
//!
//! All of them have the form
//!
//! ```text
//! int_{|l| <= Lambda} d^4 l / (2 pi)^4  (l^2)^(k-1) / (l^2 + s)^n
//!     = 1/(16 pi^2) * s^(k+1-n) * R_{k,n}(Lambda^2 / s),
//! R_{k,n}(t) = int_0^t v^k / (1 + v)^n dv,
//! ```
//!
//! using `d^4 l = pi^2 u du` with `u = l^2`. `R` is evaluated in closed form,
//! or by its Taylor series when `t` is small and the closed form cancels.

use std::f64::consts::PI;

use super::quadrature::{integrate, QuadOptions};
use crate::error::{ensure_positive, Error, Result};

/// `1/(16 pi^2)`, the measure factor of the radial reduction.
pub const LOOP_FACTOR: f64 = 1.0 / (16.0 * PI * PI);

/// Regulator: hard Euclidean cutoff plus the quadrature tolerance used for
/// parameter integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegScheme {
    pub lambda: f64,
    pub quad_tol: f64,
}

impl RegScheme {
    pub fn new(lambda: f64) -> Result<Self> {
        ensure_positive("Lambda", lambda)?;
        Ok(Self {
            lambda,
            quad_tol: 1e-10,
        })
    }

    pub fn with_tol(lambda: f64, quad_tol: f64) -> Result<Self> {
        ensure_positive("Lambda", lambda)?;
        ensure_positive("quad_tol", quad_tol)?;
        Ok(Self { lambda, quad_tol })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::with_tol(lambda, self.quad_tol)
    }

    pub fn quad_options(&self) -> QuadOptions {
        QuadOptions::relative(self.quad_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MasterIntegralKind {
    /// `l^2 / (l^2 + a^2)^2`
    A,
    /// `1 / (l^2 + a^2)`
    B,
    /// `1 / (l^2 + b^2)^3`
    C,
    /// `l^2 / (l^2 + b^2)^3`
    D,
    /// `1 / (l^2 + a^2)^2`
    E,
}

impl MasterIntegralKind {
    pub const ALL: [MasterIntegralKind; 5] = [Self::A, Self::B, Self::C, Self::D, Self::E];

    pub fn name(self) -> &'static str {
        match self {
            Self::A => "I_A",
            Self::B => "I_B",
            Self::C => "I_C",
            Self::D => "I_D",
            Self::E => "I_E",
        }
    }

    /// `(k, n)` of the reduced integrand `v^k / (1+v)^n`.
    fn powers(self) -> (i32, i32) {
        match self {
            Self::A => (2, 2),
            Self::B => (1, 1),
            Self::C => (1, 3),
            Self::D => (2, 3),
            Self::E => (1, 2),
        }
    }

    /// Integrand as a function of `l^2`.
    pub fn integrand(self, l_sq: f64, scale_sq: f64) -> f64 {
        let d = l_sq + scale_sq;
        match self {
            Self::A => l_sq / (d * d),
            Self::B => 1.0 / d,
            Self::C => 1.0 / (d * d * d),
            Self::D => l_sq / (d * d * d),
            Self::E => 1.0 / (d * d),
        }
    }
}

const SERIES_THRESHOLD: f64 = 0.125;

fn reduced_series(k: i32, n: i32, t: f64) -> f64 {
    // sum_j (-1)^j C(n+j-1, j) t^(k+j+1) / (k+j+1)
    let mut coeff = 1.0;
    let mut power = t.powi(k + 1);
    let mut sum = 0.0;
    for j in 0..200 {
        let term = coeff * power / f64::from(k + j + 1);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        coeff *= -f64::from(n + j) / f64::from(j + 1);
        power *= t;
    }
    sum
}

/// `R_{k,n}(t)`.
fn reduced(kind: MasterIntegralKind, t: f64) -> f64 {
    let (k, n) = kind.powers();
    if t < SERIES_THRESHOLD {
        return reduced_series(k, n, t);
    }
    let w = 1.0 + t;
    let l = t.ln_1p();
    match kind {
        MasterIntegralKind::A => t - 2.0 * l + t / w,
        MasterIntegralKind::B => t - l,
        MasterIntegralKind::C => 0.5 * (t / w) * (t / w),
        MasterIntegralKind::D => l + 2.0 / w - 0.5 / (w * w) - 1.5,
        MasterIntegralKind::E => l - t / w,
    }
}

fn reduced_integrand(kind: MasterIntegralKind, t: f64) -> f64 {
    let (k, n) = kind.powers();
    t.powi(k) / (1.0 + t).powi(n)
}

fn check_scale(scale_sq: f64) -> Result<()> {
    if scale_sq.is_nan() || scale_sq <= 0.0 {
        return Err(Error::KinematicDomain(format!(
            "master integral needs a positive mass scale, got {scale_sq}"
        )));
    }
    Ok(())
}

/// Closed form of the regulated integral, all finite-Lambda terms kept.
pub fn master_integral(kind: MasterIntegralKind, scale_sq: f64, lambda: f64) -> Result<f64> {
    check_scale(scale_sq)?;
    ensure_positive("Lambda", lambda)?;
    let (k, n) = kind.powers();
    let t = lambda * lambda / scale_sq;
    Ok(LOOP_FACTOR * scale_sq.powi(k + 1 - n) * reduced(kind, t))
}

/// `p R(t) - t R'(t)` with `p = k + 1 - n`, simplified so that large `t`
/// does not cancel.
fn derivative_bracket(kind: MasterIntegralKind, t: f64) -> f64 {
    let (k, n) = kind.powers();
    if t < SERIES_THRESHOLD {
        return f64::from(k + 1 - n) * reduced_series(k, n, t) - t * reduced_integrand(kind, t);
    }
    let w = 1.0 + t;
    let r = t / w;
    match kind {
        MasterIntegralKind::A => r * (3.0 * t + 2.0) / w - 2.0 * t.ln_1p(),
        MasterIntegralKind::B => r - t.ln_1p(),
        MasterIntegralKind::C => -0.5 * r * r - r * r / w,
        MasterIntegralKind::D => -r * r * r,
        MasterIntegralKind::E => -r * r,
    }
}

/// `d/ds` of [`master_integral`] at fixed Lambda.
pub fn master_integral_derivative(kind: MasterIntegralKind, scale_sq: f64, lambda: f64) -> Result<f64> {
    check_scale(scale_sq)?;
    ensure_positive("Lambda", lambda)?;
    let (k, n) = kind.powers();
    let p = k + 1 - n;
    let t = lambda * lambda / scale_sq;
    // d/ds [s^p R(L^2/s)] = s^(p-1) [p R(t) - t R'(t)]
    Ok(LOOP_FACTOR * scale_sq.powi(p - 1) * derivative_bracket(kind, t))
}

/// `I(s0 + delta) - I(s0)` without the cancellation of the common
/// `Lambda^2` (kinds A, B) or `ln Lambda^2` (kind E) pieces. `delta` is passed
/// separately so that it keeps its own precision.
///
/// Kinds C and D are differenced directly.
pub fn master_integral_difference(kind: MasterIntegralKind, s0: f64, delta: f64, lambda: f64) -> Result<f64> {
    let s1 = s0 + delta;
    check_scale(s0)?;
    check_scale(s1)?;
    ensure_positive("Lambda", lambda)?;
    let l2 = lambda * lambda;
    // ln(1 + L^2/s1) - ln(1 + L^2/s0)
    let log_diff = (-delta / s1).ln_1p() + (delta / (s0 + l2)).ln_1p();
    let d0 = s0 + l2;
    let d1 = s1 + l2;
    let bracket = match kind {
        MasterIntegralKind::A => {
            // I_A / LOOP = L^2 - 2 s ln(1 + L^2/s) + s L^2 / (s + L^2)
            let s_log = delta * (l2 / s1).ln_1p() + s0 * log_diff;
            -2.0 * s_log + l2 * l2 * delta / (d1 * d0)
        }
        MasterIntegralKind::B => {
            // I_B / LOOP = L^2 - s ln(1 + L^2/s)
            -(delta * (l2 / s1).ln_1p() + s0 * log_diff)
        }
        MasterIntegralKind::E => {
            // I_E / LOOP = ln(1 + L^2/s) - L^2 / (s + L^2)
            log_diff + l2 * delta / (d1 * d0)
        }
        _ => return Ok(master_integral(kind, s1, lambda)? - master_integral(kind, s0, lambda)?),
    };
    Ok(LOOP_FACTOR * bracket)
}

/// Four-dimensional radial reduction of a rotation-invariant integrand:
/// `int_{|l|<=Lambda} d^4l/(2pi)^4 f(l^2) = (1/8pi^2) int_0^Lambda l^3 f(l^2) dl`.
pub fn radial_quadrature<F>(f: F, lambda: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if lambda == 0.0 {
        return Ok(0.0);
    }
    ensure_positive("Lambda", lambda)?;
    let r = integrate(
        |l| {
            let l2 = l * l;
            l2 * l * f(l2)
        },
        0.0,
        lambda,
        QuadOptions::relative(tol),
    )?;
    Ok(r.value * 2.0 * PI * PI / (2.0 * PI).powi(4))
}

/// Quadrature evaluation of a master integral, the oracle for [`master_integral`].
pub fn master_integral_by_quadrature(kind: MasterIntegralKind, scale_sq: f64, lambda: f64, tol: f64) -> Result<f64> {
    check_scale(scale_sq)?;
    radial_quadrature(|u| kind.integrand(u, scale_sq), lambda, tol)
}
