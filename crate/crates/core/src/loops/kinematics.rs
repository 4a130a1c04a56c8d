//! Feynman-parameter mass scales of the one-loop denominators.

/// Self-energy scale `a^2 = m^2 x + p^2 x (1 - x)`.
#[inline]
pub fn a_sq(x: f64, p_sq: f64, m_sq: f64) -> f64 {
    m_sq * x + p_sq * x * (1.0 - x)
}

/// Vertex scale `b^2 = x^2 m2^2 + delta x^2 (1 - y) + x^2 y (1 - y) q^2`.
#[inline]
pub fn b_sq(x: f64, y: f64, q_sq: f64, m2_sq: f64, delta: f64) -> f64 {
    let x2 = x * x;
    x2 * m2_sq + delta * x2 * (1.0 - y) + x2 * y * (1.0 - y) * q_sq
}

/// Polarization scale `M^2(x) = m1^2 (1 - x) + m2^2 x + q^2 x (1 - x)`.
#[inline]
pub fn polarization_sq(x: f64, q_sq: f64, m1_sq: f64, m2_sq: f64) -> f64 {
    m1_sq * (1.0 - x) + m2_sq * x + q_sq * x * (1.0 - x)
}

/// Smallest value of `c0 + c1 y + c2 y (1 - y)` on `[0, 1]`.
pub(crate) fn min_on_unit_interval(at0: f64, at1: f64, curvature: f64) -> f64 {
    // f(y) = at0 (1-y) + at1 y + curvature y (1-y)
    let mut m = at0.min(at1);
    if curvature >= 0.0 {
        // y (1 - y) is concave: minimum at an endpoint
        return m;
    }
    let y = 0.5 + (at1 - at0) / (2.0 * curvature);
    if (0.0..=1.0).contains(&y) {
        m = m.min(at0 * (1.0 - y) + at1 * y + curvature * y * (1.0 - y));
    }
    m
}
