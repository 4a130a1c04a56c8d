//! One-loop scalar self-energy, mass shift and wavefunction factor.
//!
//! `Sigma_aa(p) = gamma^2 int dx I_A(a^2) + 4 gamma^2_{tau lambda} p^tau p^lambda int dx x^2 I_E(a^2)`
//! with `a^2 = m_other^2 x + p^2 x (1 - x)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::loops::{
    a_sq, master_integral, master_integral_derivative, master_integral_difference, radial_quadrature, try_integrate,
    MasterIntegralKind, RegScheme,
};
use crate::model::{on_shell_momentum, AtomPair, DipoleTensor, Level};

use super::fit::{slope_through_origin, SlopeFit};

/// How the mass splitting `b = delta / M^2` enters the Feynman-parameter scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionPath {
    /// `a^2 = m_other^2 x + p^2 x (1 - x)` as it stands.
    Exact,
    /// `b -> 0` at fixed `eps = p^2 + m_a^2`: `a^2 = M^2 x^2 + eps x (1 - x)`.
    Leading,
    /// Leading plus `b dI/ds * da^2/db`, with `da^2/db = -+ (M^2/2) x (2 - x)`
    /// (upper sign for level 1).
    FirstOrder,
}

impl ExpansionPath {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Leading => "leading",
            Self::FirstOrder => "first_order",
        }
    }
}

impl fmt::Display for ExpansionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExpansionPath {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "leading" => Ok(Self::Leading),
            "first_order" => Ok(Self::FirstOrder),
            other => Err(format!(
                "unknown expansion path '{other}' (expected exact, leading or first_order)"
            )),
        }
    }
}

pub(crate) fn require_four_dim(gamma: &DipoleTensor) -> Result<()> {
    let n = gamma.metric().spatial_dim();
    if n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(())
}

pub(crate) fn require_vector(p: &[f64], what: &str) -> Result<()> {
    if p.len() != 4 || p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} must be a finite four-vector")));
    }
    Ok(())
}

/// Self-energy kinematics for one level along one path.
#[derive(Debug, Clone, Copy)]
struct Kinematics {
    path: ExpansionPath,
    m_other_sq: f64,
    m_a_sq: f64,
    mean_sq: f64,
    b: f64,
    /// `+1` for level 1, `-1` for level 2.
    sign: f64,
}

impl Kinematics {
    fn new(level: Level, atoms: &AtomPair, path: ExpansionPath) -> Self {
        let m_a = atoms.mass(level);
        let m_o = atoms.mass(level.other());
        Self {
            path,
            m_other_sq: m_o * m_o,
            m_a_sq: m_a * m_a,
            mean_sq: atoms.mean_mass_sq(),
            b: atoms.b(),
            sign: if level == Level::One { 1.0 } else { -1.0 },
        }
    }

    /// Snaps rounding-level excursions below the threshold back onto it.
    fn clamp(&self, p_sq: f64) -> f64 {
        let threshold = match self.path {
            ExpansionPath::Exact => -self.m_other_sq,
            _ => -self.m_a_sq,
        };
        if p_sq < threshold && threshold - p_sq <= 1e-12 * threshold.abs() {
            threshold
        } else {
            p_sq
        }
    }

    fn check(&self, p_sq: f64) -> Result<()> {
        if !p_sq.is_finite() {
            return Err(Error::InvalidInput(format!("p^2 must be finite, got {p_sq}")));
        }
        match self.path {
            ExpansionPath::Exact if p_sq < -self.m_other_sq => Err(Error::KinematicDomain(format!(
                "a^2(x) < 0 near x = 0: p^2 = {p_sq} lies below -m_other^2 = {}",
                -self.m_other_sq
            ))),
            ExpansionPath::Leading | ExpansionPath::FirstOrder if p_sq < -self.m_a_sq => {
                Err(Error::KinematicDomain(format!(
                    "a^2(x) < 0 near x = 0: p^2 = {p_sq} lies below the mass shell -m_a^2 = {}",
                    -self.m_a_sq
                )))
            }
            _ => Ok(()),
        }
    }

    /// `(a^2, da^2/db)` at `x`.
    fn scale(&self, x: f64, p_sq: f64) -> (f64, f64) {
        match self.path {
            ExpansionPath::Exact => (a_sq(x, p_sq, self.m_other_sq), 0.0),
            ExpansionPath::Leading | ExpansionPath::FirstOrder => {
                let eps = p_sq + self.m_a_sq;
                let s0 = self.mean_sq * x * x + eps * x * (1.0 - x);
                let ds = if self.path == ExpansionPath::FirstOrder {
                    -self.sign * 0.5 * self.mean_sq * x * (2.0 - x)
                } else {
                    0.0
                };
                (s0, ds)
            }
        }
    }

    /// `int_0^1 dx w(x) I(a^2(x))` along the path.
    fn integral<W: Fn(f64) -> f64>(&self, kind: MasterIntegralKind, w: W, p_sq: f64, reg: &RegScheme) -> Result<f64> {
        let p_sq = self.clamp(p_sq);
        self.check(p_sq)?;
        let lam = reg.lambda;
        let r = try_integrate(
            |x| {
                let (s, ds) = self.scale(x, p_sq);
                let mut v = master_integral(kind, s, lam)?;
                if ds != 0.0 {
                    v += self.b * ds * master_integral_derivative(kind, s, lam)?;
                }
                Ok(w(x) * v)
            },
            0.0,
            1.0,
            reg.quad_options(),
        )?;
        Ok(r.value)
    }

    /// `int_0^1 dx w(x) [I(a^2(p1^2)) - I(a^2(p0^2))]`, differenced under the integral.
    fn difference<W: Fn(f64) -> f64>(
        &self,
        kind: MasterIntegralKind,
        w: W,
        p1_sq: f64,
        p0_sq: f64,
        reg: &RegScheme,
    ) -> Result<f64> {
        let (p1_sq, p0_sq) = (self.clamp(p1_sq), self.clamp(p0_sq));
        self.check(p1_sq)?;
        self.check(p0_sq)?;
        let lam = reg.lambda;
        let dp = p1_sq - p0_sq;
        let r = try_integrate(
            |x| {
                let (s0, ds) = self.scale(x, p0_sq);
                let delta = dp * x * (1.0 - x);
                let mut v = master_integral_difference(kind, s0, delta, lam)?;
                if ds != 0.0 {
                    let d1 = master_integral_derivative(kind, s0 + delta, lam)?;
                    let d0 = master_integral_derivative(kind, s0, lam)?;
                    v += self.b * ds * (d1 - d0);
                }
                Ok(w(x) * v)
            },
            0.0,
            1.0,
            reg.quad_options(),
        )?;
        Ok(r.value)
    }
}

fn unit(_: f64) -> f64 {
    1.0
}

fn x_squared(x: f64) -> f64 {
    x * x
}

/// Self-energy at one kinematic point.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergyResult {
    pub level: Level,
    pub path: ExpansionPath,
    pub p_sq: f64,
    pub gamma_sq: f64,
    pub gamma_sq_pp: f64,
    /// `int dx I_A(a^2)`: `Sigma^I` per unit `gamma^2`.
    pub scalar_integral: f64,
    /// `4 int dx x^2 I_E(a^2)`: `Sigma^II` per unit `gamma^2_{tau lambda} p^tau p^lambda`.
    pub tensor_integral: f64,
    pub sigma_i: f64,
    pub sigma_ii: f64,
    pub total: f64,
    /// `Sigma(-m_a^2)` with the same `p` in the tensor part; `None` when the
    /// mass shell lies outside the domain of the chosen path.
    pub on_shell_value: Option<f64>,
}

fn integrals(kin: &Kinematics, p_sq: f64, reg: &RegScheme) -> Result<(f64, f64)> {
    let scalar = kin.integral(MasterIntegralKind::A, unit, p_sq, reg)?;
    let tensor = 4.0 * kin.integral(MasterIntegralKind::E, x_squared, p_sq, reg)?;
    Ok((scalar, tensor))
}

/// `Sigma_aa` at invariant `p_sq`; the four-vector `p` enters only through
/// `gamma^2_{tau lambda} p^tau p^lambda`.
pub fn self_energy(
    level: Level,
    p_sq: f64,
    p: &[f64],
    atoms: &AtomPair,
    gamma: &DipoleTensor,
    reg: &RegScheme,
    path: ExpansionPath,
) -> Result<SelfEnergyResult> {
    require_four_dim(gamma)?;
    require_vector(p, "p")?;
    let kin = Kinematics::new(level, atoms, path);
    let gamma_sq = gamma.gamma_sq();
    let gamma_sq_pp = gamma.gamma_sq_pp(p);
    let (scalar, tensor) = integrals(&kin, p_sq, reg)?;
    let value = |s: f64, t: f64| gamma_sq * s + gamma_sq_pp * t;
    let shell = -kin.m_a_sq;
    let on_shell_value = if p_sq == shell {
        Some(value(scalar, tensor))
    } else {
        match integrals(&kin, shell, reg) {
            Ok((s, t)) => Some(value(s, t)),
            Err(Error::KinematicDomain(_)) => None,
            Err(e) => return Err(e),
        }
    };
    Ok(SelfEnergyResult {
        level,
        path,
        p_sq,
        gamma_sq,
        gamma_sq_pp,
        scalar_integral: scalar,
        tensor_integral: tensor,
        sigma_i: gamma_sq * scalar,
        sigma_ii: gamma_sq_pp * tensor,
        total: value(scalar, tensor),
        on_shell_value,
    })
}

/// The same integrals as [`self_energy`] by nested quadrature over `x` and the
/// radial loop momentum, with no closed forms. Returns
/// `(scalar_integral, tensor_integral)`.
pub fn self_energy_by_quadrature(
    level: Level,
    p_sq: f64,
    atoms: &AtomPair,
    reg: &RegScheme,
    path: ExpansionPath,
) -> Result<(f64, f64)> {
    if path == ExpansionPath::FirstOrder {
        return Err(Error::InvalidInput(
            "the quadrature oracle covers the exact and leading paths".into(),
        ));
    }
    let kin = Kinematics::new(level, atoms, path);
    let p_sq = kin.clamp(p_sq);
    kin.check(p_sq)?;
    let inner_tol = reg.quad_tol * 1e-2;
    let run = |kind: MasterIntegralKind, w: fn(f64) -> f64| {
        try_integrate(
            |x| {
                let (s, _) = kin.scale(x, p_sq);
                if !(s > 0.0) {
                    return Err(Error::KinematicDomain(format!("a^2 = {s} at x = {x}")));
                }
                Ok(w(x) * radial_quadrature(|u| kind.integrand(u, s), reg.lambda, inner_tol)?)
            },
            0.0,
            1.0,
            reg.quad_options(),
        )
        .map(|r| r.value)
    };
    Ok((
        run(MasterIntegralKind::A, unit)?,
        4.0 * run(MasterIntegralKind::E, x_squared)?,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassShift {
    pub level: Level,
    /// On-shell external momentum used in the tensor part.
    pub p: [f64; 4],
    pub scalar_integral: f64,
    pub tensor_integral: f64,
    pub gamma_sq: f64,
    pub gamma_sq_pp: f64,
    pub delta_m_sq: f64,
}

/// `Delta m_a^2 = Sigma_aa(-m_a^2)` with `p = (E, p_spatial)` on shell.
pub fn mass_shift(
    level: Level,
    p_spatial: [f64; 3],
    atoms: &AtomPair,
    gamma: &DipoleTensor,
    reg: &RegScheme,
    path: ExpansionPath,
) -> Result<MassShift> {
    let m = atoms.mass(level);
    let p = on_shell_momentum(m, p_spatial);
    let r = self_energy(level, -m * m, &p, atoms, gamma, reg, path)?;
    Ok(MassShift {
        level,
        p,
        scalar_integral: r.scalar_integral,
        tensor_integral: r.tensor_integral,
        gamma_sq: r.gamma_sq,
        gamma_sq_pp: r.gamma_sq_pp,
        delta_m_sq: r.total,
    })
}

/// One-sided grid `eps_k = width M^2 k / points`, `k = 1..=points`, above the mass shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZGridOptions {
    pub width: f64,
    pub points: usize,
    /// Largest accepted `|c2| max(eps) / |f|`.
    pub max_curvature: f64,
}

impl Default for ZGridOptions {
    fn default() -> Self {
        Self {
            width: 1e-3,
            points: 8,
            max_curvature: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionZ {
    pub level: Level,
    pub eps: Vec<f64>,
    pub scalar_fit: SlopeFit,
    pub tensor_fit: SlopeFit,
    /// Slope of the subtracted scalar integral: `f` per unit `gamma^2`.
    pub f_scalar: f64,
    /// Slope of the subtracted tensor integral: `f` per unit `gamma^2_{tau lambda} p^tau p^lambda`.
    pub f_tensor: f64,
    pub gamma_sq: f64,
    pub gamma_sq_pp: f64,
    pub f_total: f64,
    pub z_inv: f64,
    pub curvature_residual: f64,
}

/// `Z^{-1} = 1 + f`, with `f` the slope of `Sigma(p^2) - Sigma(-m_a^2)` in
/// `p^2 + m_a^2`, fitted together with a quadratic term on a one-sided grid.
/// The tensor factor `gamma^2_{tau lambda} p^tau p^lambda` is held at the given `p`.
pub fn wavefunction_z(
    level: Level,
    p: &[f64],
    atoms: &AtomPair,
    gamma: &DipoleTensor,
    reg: &RegScheme,
    path: ExpansionPath,
    opts: &ZGridOptions,
) -> Result<WavefunctionZ> {
    require_four_dim(gamma)?;
    require_vector(p, "p")?;
    if opts.points < 3 || !(opts.width > 0.0) {
        return Err(Error::InvalidInput(
            "Z grid needs at least 3 points and a positive width".into(),
        ));
    }
    let kin = Kinematics::new(level, atoms, path);
    let shell = -kin.m_a_sq;
    let w = opts.width * kin.mean_sq;
    let eps: Vec<f64> = (1..=opts.points).map(|k| w * k as f64 / opts.points as f64).collect();
    let mut scalar = Vec::with_capacity(eps.len());
    let mut tensor = Vec::with_capacity(eps.len());
    for &e in &eps {
        scalar.push(kin.difference(MasterIntegralKind::A, unit, shell + e, shell, reg)?);
        tensor.push(4.0 * kin.difference(MasterIntegralKind::E, x_squared, shell + e, shell, reg)?);
    }
    let scalar_fit = slope_through_origin(&eps, &scalar)?;
    let tensor_fit = slope_through_origin(&eps, &tensor)?;
    let curvature_residual = scalar_fit.curvature_residual.max(tensor_fit.curvature_residual);
    if !(curvature_residual <= opts.max_curvature) {
        return Err(Error::FitRejected(format!(
            "curvature residual {curvature_residual:e} exceeds {:e}; shrink the grid or b",
            opts.max_curvature
        )));
    }
    let gamma_sq = gamma.gamma_sq();
    let gamma_sq_pp = gamma.gamma_sq_pp(p);
    let f_total = gamma_sq * scalar_fit.slope + gamma_sq_pp * tensor_fit.slope;
    Ok(WavefunctionZ {
        level,
        eps,
        scalar_fit,
        tensor_fit,
        f_scalar: scalar_fit.slope,
        f_tensor: tensor_fit.slope,
        gamma_sq,
        gamma_sq_pp,
        f_total,
        z_inv: 1.0 + f_total,
        curvature_residual,
    })
}
