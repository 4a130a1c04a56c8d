//! One-loop correction to the dipole vertex with on-shell external scalars.
//!
//! After the shift `l = k - x (p y + p' (1 - y))` the correction is
//! `-16 gamma^2_{alpha beta} gamma^{mu' mu} q_mu' int x dx dy (l^a l^b + M^ab) / (l^2 + b^2)^3`
//! with `M = x^2 (p' - y q)(p' - y q)` and
//! `b^2 = x^2 [m2^2 + delta (1 - y) + y (1 - y) q^2]`.

use crate::error::{Error, Result};
use crate::loops::kinematics::min_on_unit_interval;
use crate::loops::{
    b_sq, master_integral, radial_quadrature, try_integrate, try_integrate_unit_square, MasterIntegralKind, RegScheme,
};
use crate::model::{AtomPair, DipoleTensor, Level};

use super::self_energy::{require_four_dim, require_vector};

/// Relative tolerance on the on-shell and `q = p' - p` preconditions.
const SHELL_TOL: f64 = 1e-9;

/// Parameter integrals of the vertex, per unit coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexIntegrals {
    /// `-4 int x I_D(b^2)`: coefficient of `gamma^2 gamma^{mu' mu} q_mu'`.
    pub gamma_i: f64,
    /// `-16 int x^3 I_C(b^2)`: multiplies `gamma^2_{ab} p'^a p'^b`.
    pub c_pp: f64,
    /// `16 int x^3 y I_C(b^2)`: multiplies `gamma^2_{ab} (p'^a q^b + q^a p'^b)`.
    pub c_sym: f64,
    /// `-16 int x^3 y^2 I_C(b^2)`: multiplies `gamma^2_{ab} q^a q^b`.
    pub c_qq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexResult {
    pub q_sq: f64,
    pub integrals: VertexIntegrals,
    pub gamma_sq: f64,
    /// `gamma^2 * integrals.gamma_i`.
    pub gamma_i: f64,
    /// `gamma^2_{ab}` contracted with the three tensor structures, `[p'p', p'q + qp', qq]`.
    pub tensor_contractions: [f64; 3],
    /// Sum of the tensor structures weighted by their coefficients.
    pub gamma_m: f64,
    /// `1 + gamma_i / 2`.
    pub z1_inv_scalar: f64,
    /// `gamma_m / 2`.
    pub z1_inv_tensor: f64,
    pub z1_inv: f64,
}

fn check_domain(q_sq: f64, atoms: &AtomPair) -> Result<()> {
    if !q_sq.is_finite() {
        return Err(Error::InvalidInput(format!("q^2 must be finite, got {q_sq}")));
    }
    let m1 = atoms.m1() * atoms.m1();
    let m2 = atoms.m2() * atoms.m2();
    // b^2 / x^2 = m1^2 (1 - y) + m2^2 y + q^2 y (1 - y)
    let lo = min_on_unit_interval(m1, m2, q_sq);
    if !(lo > 0.0) {
        return Err(Error::KinematicDomain(format!(
            "b^2(x, y) <= 0 on the unit square at q^2 = {q_sq} (minimum {lo} x^2)"
        )));
    }
    Ok(())
}

/// Closed-form `l` integrals under an adaptive `(x, y)` quadrature.
pub fn vertex_integrals(q_sq: f64, atoms: &AtomPair, reg: &RegScheme) -> Result<VertexIntegrals> {
    check_domain(q_sq, atoms)?;
    let m2 = atoms.m2() * atoms.m2();
    let delta = atoms.delta();
    let lam = reg.lambda;
    let opts = reg.quad_options();
    let run = |kind: MasterIntegralKind, w: fn(f64, f64) -> f64| {
        try_integrate_unit_square(
            |x, y| Ok(w(x, y) * master_integral(kind, b_sq(x, y, q_sq, m2, delta), lam)?),
            opts,
        )
        .map(|r| r.value)
    };
    Ok(VertexIntegrals {
        gamma_i: -4.0 * run(MasterIntegralKind::D, |x, _| x)?,
        c_pp: -16.0 * run(MasterIntegralKind::C, |x, _| x * x * x)?,
        c_sym: 16.0 * run(MasterIntegralKind::C, |x, y| x * x * x * y)?,
        c_qq: -16.0 * run(MasterIntegralKind::C, |x, y| x * x * x * y * y)?,
    })
}

/// The same integrals by nested quadrature over `x`, `y` and the radial loop momentum.
pub fn vertex_integrals_by_quadrature(q_sq: f64, atoms: &AtomPair, reg: &RegScheme) -> Result<VertexIntegrals> {
    check_domain(q_sq, atoms)?;
    let m2 = atoms.m2() * atoms.m2();
    let delta = atoms.delta();
    let lam = reg.lambda;
    let opts = reg.quad_options();
    let inner = opts.rel_tol * 1e-2;
    let run = |kind: MasterIntegralKind, w: fn(f64, f64) -> f64| {
        try_integrate(
            |x| {
                try_integrate(
                    |y| {
                        let s = b_sq(x, y, q_sq, m2, delta);
                        Ok(w(x, y) * radial_quadrature(|u| kind.integrand(u, s), lam, inner * 1e-2)?)
                    },
                    0.0,
                    1.0,
                    crate::loops::QuadOptions::relative(inner),
                )
                .map(|r| r.value)
            },
            0.0,
            1.0,
            opts,
        )
        .map(|r| r.value)
    };
    Ok(VertexIntegrals {
        gamma_i: -4.0 * run(MasterIntegralKind::D, |x, _| x)?,
        c_pp: -16.0 * run(MasterIntegralKind::C, |x, _| x * x * x)?,
        c_sym: 16.0 * run(MasterIntegralKind::C, |x, y| x * x * x * y)?,
        c_qq: -16.0 * run(MasterIntegralKind::C, |x, y| x * x * x * y * y)?,
    })
}

fn check_on_shell(v: &[f64], level: Level, atoms: &AtomPair, gamma: &DipoleTensor, what: &str) -> Result<()> {
    let m = atoms.mass(level);
    let v_sq = gamma.metric().dot(v, v);
    let scale = m * m + v.iter().map(|c| c * c).sum::<f64>();
    if (v_sq + m * m).abs() > SHELL_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "{what} is off shell: {what}^2 = {v_sq}, expected {}",
            -m * m
        )));
    }
    Ok(())
}

/// Vertex correction for incoming level-2 scalar `p`, outgoing level-1 scalar
/// `p'`, and photon momentum `q = p' - p`.
pub fn vertex_one_loop(
    p: &[f64],
    p_prime: &[f64],
    q: &[f64],
    atoms: &AtomPair,
    gamma: &DipoleTensor,
    reg: &RegScheme,
) -> Result<VertexResult> {
    require_four_dim(gamma)?;
    require_vector(p, "p")?;
    require_vector(p_prime, "p'")?;
    require_vector(q, "q")?;
    check_on_shell(p, Level::Two, atoms, gamma, "p")?;
    check_on_shell(p_prime, Level::One, atoms, gamma, "p'")?;
    let scale = p.iter().chain(p_prime).map(|c| c.abs()).fold(0.0, f64::max);
    for mu in 0..4 {
        if (q[mu] - (p_prime[mu] - p[mu])).abs() > SHELL_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidInput(format!("q must equal p' - p (component {mu})")));
        }
    }
    let q_sq = gamma.metric().dot(q, q);
    let integrals = vertex_integrals(q_sq, atoms, reg)?;
    let gamma_sq = gamma.gamma_sq();
    let tensor_contractions = [
        gamma.gamma_sq_pp(p_prime),
        2.0 * gamma.gamma_sq_uv(p_prime, q),
        gamma.gamma_sq_pp(q),
    ];
    let gamma_i = gamma_sq * integrals.gamma_i;
    let gamma_m = integrals.c_pp * tensor_contractions[0]
        + integrals.c_sym * tensor_contractions[1]
        + integrals.c_qq * tensor_contractions[2];
    let z1_inv_scalar = 1.0 + 0.5 * gamma_i;
    let z1_inv_tensor = 0.5 * gamma_m;
    Ok(VertexResult {
        q_sq,
        integrals,
        gamma_sq,
        gamma_i,
        tensor_contractions,
        gamma_m,
        z1_inv_scalar,
        z1_inv_tensor,
        z1_inv: z1_inv_scalar + z1_inv_tensor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::LOOP_FACTOR;
    use crate::model::{on_shell_momentum, Metric};

    fn gamma() -> DipoleTensor {
        DipoleTensor::from_independent(Metric::minkowski4(), &[0.2, 0.0, -0.1, 0.05, 0.3, 0.0]).unwrap()
    }

    #[test]
    fn zero_coupling() {
        let atoms = AtomPair::degenerate(1.0).unwrap();
        let p = on_shell_momentum(1.0, [0.1, 0.0, 0.0]);
        let r = vertex_one_loop(
            &p,
            &p,
            &[0.0; 4],
            &atoms,
            &DipoleTensor::zero(Metric::minkowski4()),
            &RegScheme::new(50.0).unwrap(),
        )
        .unwrap();
        assert_eq!(r.z1_inv, 1.0);
        assert_eq!(r.gamma_m, 0.0);
    }

    #[test]
    fn tensor_ratios_exact_at_equal_masses() {
        let atoms = AtomPair::degenerate(1.0).unwrap();
        for lam in [10.0, 1e3] {
            let v = vertex_integrals(0.0, &atoms, &RegScheme::new(lam).unwrap()).unwrap();
            assert!((v.c_sym / v.c_pp + 0.5).abs() < 1e-9);
            assert!((v.c_qq / v.c_pp - 1.0 / 3.0).abs() < 1e-9);
        }
        let v = vertex_integrals(0.0, &atoms, &RegScheme::new(1e4).unwrap()).unwrap();
        // I_C -> LOOP / (2 b^2): c_pp -> -4 LOOP / M^2
        assert!((v.c_pp / LOOP_FACTOR + 4.0).abs() < 1e-6);
    }

    #[test]
    fn log_structure_at_large_cutoff() {
        let atoms = AtomPair::degenerate(1.0).unwrap();
        let lam: f64 = 1e4;
        let v = vertex_integrals(0.0, &atoms, &RegScheme::new(lam).unwrap()).unwrap();
        let l = (lam * lam).ln();
        assert!((v.gamma_i / LOOP_FACTOR + 2.0 * (l - 0.5)).abs() < 1e-5);
    }

    #[test]
    fn closed_forms_match_nested_quadrature() {
        let atoms = AtomPair::new(1.1, 0.9).unwrap();
        let reg = RegScheme::with_tol(8.0, 1e-8).unwrap();
        for q_sq in [0.0, 0.3] {
            let a = vertex_integrals(q_sq, &atoms, &reg).unwrap();
            let b = vertex_integrals_by_quadrature(q_sq, &atoms, &reg).unwrap();
            for (x, y) in [
                (a.gamma_i, b.gamma_i),
                (a.c_pp, b.c_pp),
                (a.c_sym, b.c_sym),
                (a.c_qq, b.c_qq),
            ] {
                assert!((x / y - 1.0).abs() < 1e-6, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn domain_and_preconditions() {
        let atoms = AtomPair::degenerate(1.0).unwrap();
        let reg = RegScheme::new(10.0).unwrap();
        assert!(matches!(
            vertex_integrals(-5.0, &atoms, &reg),
            Err(Error::KinematicDomain(_))
        ));
        let p = on_shell_momentum(1.0, [0.0; 3]);
        let off = [1.2, 0.0, 0.0, 0.0];
        assert!(matches!(
            vertex_one_loop(&p, &off, &[0.2, 0.0, 0.0, 0.0], &atoms, &gamma(), &reg),
            Err(Error::InvalidInput(_))
        ));
        let pp = on_shell_momentum(1.0, [0.3, 0.0, 0.0]);
        assert!(matches!(
            vertex_one_loop(&p, &pp, &[0.0; 4], &atoms, &gamma(), &reg),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn z1_scales_with_gamma_squared() {
        let atoms = AtomPair::new(1.0, 0.98).unwrap();
        let p = on_shell_momentum(0.98, [0.0, 0.1, 0.0]);
        let pp = on_shell_momentum(1.0, [0.2, 0.0, 0.05]);
        let q: Vec<f64> = pp.iter().zip(&p).map(|(a, b)| a - b).collect();
        let reg = RegScheme::new(30.0).unwrap();
        let a = vertex_one_loop(&p, &pp, &q, &atoms, &gamma(), &reg).unwrap();
        let b = vertex_one_loop(&p, &pp, &q, &atoms, &gamma().scaled(3.0), &reg).unwrap();
        assert!(((b.z1_inv - 1.0) / (a.z1_inv - 1.0) - 9.0).abs() < 1e-12);
    }
}
