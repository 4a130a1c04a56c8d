//! Photon polarization tensor and the tree-level photon-exchange kernel.
//!
//! `Pi^{mu nu}(q) = 4 v^mu v^nu int_0^1 dx I_E(M^2(x))` with
//! `v^mu = q_alpha gamma^{alpha mu}` and `M^2(x) = m1^2 (1 - x) + m2^2 x + q^2 x (1 - x)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::loops::kinematics::min_on_unit_interval;
use crate::loops::{master_integral, polarization_sq, radial_quadrature, try_integrate, MasterIntegralKind, RegScheme};
use crate::model::{AtomPair, DipoleTensor};

use super::self_energy::{require_four_dim, require_vector};

#[derive(Debug, Clone, PartialEq)]
pub struct Polarization {
    pub q_sq: f64,
    /// `v^mu = q_alpha gamma^{alpha mu}`.
    pub v: Vec<f64>,
    /// `int dx I_E(M^2(x))`.
    pub scalar_integral: f64,
    /// Contravariant components `Pi^{mu nu}`.
    pub tensor: DMatrix<f64>,
}

impl Polarization {
    /// `max_nu |q_mu Pi^{mu nu}|` over `|q|_E |Pi|_max`, with the Euclidean norm of the components.
    pub fn transversality_residual(&self, q: &[f64], metric: &crate::model::Metric) -> f64 {
        let q_low = metric.lower(q);
        let d = q.len();
        let mut worst: f64 = 0.0;
        for nu in 0..d {
            let s: f64 = (0..d).map(|mu| q_low[mu] * self.tensor[(mu, nu)]).sum();
            worst = worst.max(s.abs());
        }
        let scale = q.iter().map(|c| c * c).sum::<f64>().sqrt() * self.tensor.amax();
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

fn check_domain(q_sq: f64, atoms: &AtomPair) -> Result<()> {
    if !q_sq.is_finite() {
        return Err(Error::InvalidInput(format!("q^2 must be finite, got {q_sq}")));
    }
    let lo = min_on_unit_interval(atoms.m1() * atoms.m1(), atoms.m2() * atoms.m2(), q_sq);
    if !(lo > 0.0) {
        return Err(Error::KinematicDomain(format!(
            "M^2(x) <= 0 on [0, 1] at q^2 = {q_sq} (minimum {lo})"
        )));
    }
    Ok(())
}

/// `int_0^1 dx I_E(M^2(x))` in closed form.
pub fn polarization_integral(q_sq: f64, atoms: &AtomPair, reg: &RegScheme) -> Result<f64> {
    check_domain(q_sq, atoms)?;
    let (m1, m2) = (atoms.m1() * atoms.m1(), atoms.m2() * atoms.m2());
    try_integrate(
        |x| master_integral(MasterIntegralKind::E, polarization_sq(x, q_sq, m1, m2), reg.lambda),
        0.0,
        1.0,
        reg.quad_options(),
    )
    .map(|r| r.value)
}

/// The same integral by nested `x` and radial quadrature.
pub fn polarization_integral_by_quadrature(q_sq: f64, atoms: &AtomPair, reg: &RegScheme) -> Result<f64> {
    check_domain(q_sq, atoms)?;
    let (m1, m2) = (atoms.m1() * atoms.m1(), atoms.m2() * atoms.m2());
    let inner = reg.quad_tol * 1e-2;
    try_integrate(
        |x| {
            let s = polarization_sq(x, q_sq, m1, m2);
            radial_quadrature(|u| MasterIntegralKind::E.integrand(u, s), reg.lambda, inner)
        },
        0.0,
        1.0,
        reg.quad_options(),
    )
    .map(|r| r.value)
}

pub fn photon_polarization(q: &[f64], atoms: &AtomPair, gamma: &DipoleTensor, reg: &RegScheme) -> Result<Polarization> {
    require_four_dim(gamma)?;
    require_vector(q, "q")?;
    let q_sq = gamma.metric().dot(q, q);
    let scalar_integral = polarization_integral(q_sq, atoms, reg)?;
    let v = gamma.contract_lower_first(q);
    let d = v.len();
    let tensor = DMatrix::from_fn(d, d, |mu, nu| 4.0 * v[mu] * v[nu] * scalar_integral);
    Ok(Polarization {
        q_sq,
        v,
        scalar_integral,
        tensor,
    })
}

/// Index assignments `(a, b, c, d)` carried by the exchange kernel: `a != b` and `c != d`.
pub const EXCHANGE_INDICES: [[u8; 4]; 4] = [[1, 2, 1, 2], [1, 2, 2, 1], [2, 1, 1, 2], [2, 1, 2, 1]];

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeKernel {
    pub q_sq: f64,
    /// `gamma^{mu nu} gamma^{rho sigma} q_mu q_rho g_{nu sigma} / q^2`.
    pub value: f64,
    /// Every listed assignment carries `value`.
    pub indices: [[u8; 4]; 4],
}

/// Feynman-gauge photon exchange between two dipole vertices.
pub fn photon_exchange_kernel(q: &[f64], gamma: &DipoleTensor) -> Result<ExchangeKernel> {
    require_vector(q, "q")?;
    if q.len() != gamma.metric().dim() {
        return Err(Error::InvalidInput(
            "q and the dipole tensor differ in dimension".into(),
        ));
    }
    let metric = gamma.metric();
    let q_sq = metric.dot(q, q);
    if q_sq == 0.0 {
        return Err(Error::PhotonPole);
    }
    let v = gamma.contract_lower_first(q);
    Ok(ExchangeKernel {
        q_sq,
        value: metric.dot(&v, &v) / q_sq,
        indices: EXCHANGE_INDICES,
    })
}
