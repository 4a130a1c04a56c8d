//! Counterterm ledger: mass shifts, `Z` factors and the induced operators.

use crate::error::Result;
use crate::loops::RegScheme;
use crate::model::{on_shell_momentum, AtomPair, DipoleTensor, Level};

use super::polarization::polarization_integral;
use super::self_energy::{
    mass_shift, require_four_dim, wavefunction_z, ExpansionPath, MassShift, WavefunctionZ, ZGridOptions,
};
use super::vertex::{vertex_one_loop, VertexResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub path: ExpansionPath,
    /// Spatial momentum of both on-shell external scalars.
    pub p_spatial: [f64; 3],
    pub z_grid: ZGridOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            path: ExpansionPath::Leading,
            p_spatial: [0.0; 3],
            z_grid: ZGridOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorClass {
    /// Rescales an operator already in the Lagrangian.
    Original,
    /// An operator absent from the classical action.
    New,
}

impl OperatorClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::Original => "original",
            Self::New => "new",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountertermEntry {
    pub name: &'static str,
    pub operator: &'static str,
    pub class: OperatorClass,
    pub value: f64,
}

/// Coefficient of an induced operator per unit coupling, and its strength
/// (coefficient times the Frobenius norm of the coupling structure it multiplies).
#[derive(Debug, Clone, PartialEq)]
pub struct InducedCoupling {
    pub name: &'static str,
    pub operator: &'static str,
    pub coefficient: f64,
    pub strength: f64,
}

pub const KINETIC_OPERATOR: &str = "gamma^2_{mu nu} (d^mu phi)(d^nu phi)";
pub const MAXWELL_OPERATOR: &str = "1/4 gamma^{lambda mu} gamma^{tau nu} F_{lambda mu} F_{tau nu}";

#[derive(Debug, Clone, PartialEq)]
pub struct RenormConstants {
    pub mass_shifts: [MassShift; 2],
    pub z_phi: [WavefunctionZ; 2],
    pub vertex: VertexResult,
    /// `int dx I_E(M^2(x))` at `q^2 = 0`.
    pub polarization_integral: f64,
    pub induced: [InducedCoupling; 2],
    pub entries: Vec<CountertermEntry>,
}

impl RenormConstants {
    pub fn delta_m_sq(&self, level: Level) -> f64 {
        self.mass_shifts[level.index() - 1].delta_m_sq
    }

    /// Flat `key = value` listing in a fixed order.
    pub fn key_values(&self) -> Vec<(String, f64)> {
        let mut kv = Vec::new();
        for (i, m) in self.mass_shifts.iter().enumerate() {
            kv.push((format!("delta_m_sq.{}", i + 1), m.delta_m_sq));
        }
        for (i, z) in self.z_phi.iter().enumerate() {
            let l = i + 1;
            kv.push((format!("z_phi_inv.{l}"), z.z_inv));
            kv.push((format!("z_phi_inv.{l}.scalar"), z.gamma_sq * z.f_scalar));
            kv.push((format!("z_phi_inv.{l}.tensor"), z.gamma_sq_pp * z.f_tensor));
            kv.push((format!("z_phi_inv.{l}.f_scalar"), z.f_scalar));
            kv.push((format!("z_phi_inv.{l}.f_tensor"), z.f_tensor));
            kv.push((format!("z_phi_inv.{l}.curvature_residual"), z.curvature_residual));
        }
        let v = &self.vertex;
        kv.push(("z1_inv".into(), v.z1_inv));
        kv.push(("z1_inv.scalar".into(), v.z1_inv_scalar));
        kv.push(("z1_inv.tensor".into(), v.z1_inv_tensor));
        kv.push(("vertex.gamma_i".into(), v.integrals.gamma_i));
        kv.push(("vertex.c_pp".into(), v.integrals.c_pp));
        kv.push(("vertex.c_sym".into(), v.integrals.c_sym));
        kv.push(("vertex.c_qq".into(), v.integrals.c_qq));
        kv.push(("polarization.integral".into(), self.polarization_integral));
        for c in &self.induced {
            kv.push((format!("induced.{}.coefficient", c.name), c.coefficient));
            kv.push((format!("induced.{}.strength", c.name), c.strength));
        }
        kv
    }
}

/// Collects the one-loop renormalization constants at the cutoff in `reg`.
pub fn counterterm_report(
    atoms: &AtomPair,
    gamma: &DipoleTensor,
    reg: &RegScheme,
    opts: &ReportOptions,
) -> Result<RenormConstants> {
    require_four_dim(gamma)?;
    let path = opts.path;
    let shift = |l| mass_shift(l, opts.p_spatial, atoms, gamma, reg, path);
    let mass_shifts = [shift(Level::One)?, shift(Level::Two)?];
    let z = |l: Level| {
        let p = on_shell_momentum(atoms.mass(l), opts.p_spatial);
        wavefunction_z(l, &p, atoms, gamma, reg, path, &opts.z_grid)
    };
    let z_phi = [z(Level::One)?, z(Level::Two)?];

    let p = on_shell_momentum(atoms.m2(), opts.p_spatial);
    let p_prime = on_shell_momentum(atoms.m1(), opts.p_spatial);
    let q: Vec<f64> = p_prime.iter().zip(&p).map(|(a, b)| a - b).collect();
    let vertex = vertex_one_loop(&p, &p_prime, &q, atoms, gamma, reg)?;

    let polarization_integral = polarization_integral(0.0, atoms, reg)?;
    let c = gamma.contractions();
    let kinetic_coefficient = mass_shifts[0].tensor_integral;
    let maxwell_coefficient = 4.0 * polarization_integral;
    let induced = [
        InducedCoupling {
            name: "kinetic",
            operator: KINETIC_OPERATOR,
            coefficient: kinetic_coefficient,
            strength: kinetic_coefficient * c.gamma_sq_tensor.norm(),
        },
        InducedCoupling {
            name: "maxwell",
            operator: MAXWELL_OPERATOR,
            coefficient: maxwell_coefficient,
            strength: maxwell_coefficient * gamma.upper().norm_squared(),
        },
    ];

    let mut entries = Vec::new();
    for (l, name) in [(0, "mass.1"), (1, "mass.2")] {
        entries.push(CountertermEntry {
            name,
            operator: "m_a^2 phi_a^* phi_a",
            class: OperatorClass::Original,
            value: mass_shifts[l].delta_m_sq,
        });
    }
    for (l, name) in [(0, "wavefunction.1"), (1, "wavefunction.2")] {
        entries.push(CountertermEntry {
            name,
            operator: "(d_mu phi_a^*)(d^mu phi_a)",
            class: OperatorClass::Original,
            value: z_phi[l].z_inv - 1.0,
        });
    }
    entries.push(CountertermEntry {
        name: "vertex",
        operator: "gamma^{mu nu} F_{mu nu} phi_1^* phi_2 + h.c.",
        class: OperatorClass::Original,
        value: vertex.z1_inv - 1.0,
    });
    for c in &induced {
        entries.push(CountertermEntry {
            name: c.name,
            operator: c.operator,
            class: OperatorClass::New,
            value: c.strength,
        });
    }
    Ok(RenormConstants {
        mass_shifts,
        z_phi,
        vertex,
        polarization_integral,
        induced,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Metric;

    fn gamma() -> DipoleTensor {
        DipoleTensor::from_independent(Metric::minkowski4(), &[0.1, 0.05, -0.02, 0.0, 0.03, 0.01]).unwrap()
    }

    fn report(g: &DipoleTensor) -> RenormConstants {
        let atoms = AtomPair::new(1.0005, 0.9995).unwrap();
        let opts = ReportOptions {
            p_spatial: [0.1, 0.0, 0.2],
            ..ReportOptions::default()
        };
        counterterm_report(&atoms, g, &RegScheme::new(100.0).unwrap(), &opts).unwrap()
    }

    #[test]
    fn trivial_at_zero_coupling() {
        let r = report(&DipoleTensor::zero(Metric::minkowski4()));
        assert!(r.entries.iter().all(|e| e.value == 0.0));
        assert_eq!(r.vertex.z1_inv, 1.0);
        assert!(r.z_phi.iter().all(|z| z.z_inv == 1.0));
    }

    #[test]
    fn exactly_two_new_operators() {
        let r = report(&gamma());
        let new: Vec<_> = r
            .entries
            .iter()
            .filter(|e| e.class == OperatorClass::New)
            .map(|e| e.operator)
            .collect();
        assert_eq!(new, vec![KINETIC_OPERATOR, MAXWELL_OPERATOR]);
    }

    #[test]
    fn induced_strengths_scale_by_four() {
        let a = report(&gamma());
        let b = report(&gamma().scaled(2.0));
        for (x, y) in a.induced.iter().zip(&b.induced) {
            assert!((y.strength / x.strength - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn leading_order_z_is_level_symmetric() {
        let r = report(&gamma());
        let (a, b) = (r.z_phi[0].f_scalar, r.z_phi[1].f_scalar);
        assert!(((a - b) / a).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn mass_shift_lookup_by_level() {
        let r = report(&gamma());
        assert_eq!(r.delta_m_sq(Level::One), r.mass_shifts[0].delta_m_sq);
        assert_eq!(r.delta_m_sq(Level::Two), r.mass_shifts[1].delta_m_sq);
        assert_eq!(r.mass_shifts[1].level, Level::Two);
    }
}
