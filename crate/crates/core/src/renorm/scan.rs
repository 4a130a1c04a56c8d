//! Cutoff scans of the divergent one-loop quantities and their fits.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loops::RegScheme;
use crate::model::{AtomPair, DipoleTensor, Level, Metric};

use super::fit::{divergence_fit, DivergenceFit, FitModel};
use super::polarization::polarization_integral;
use super::self_energy::{self_energy, self_energy_by_quadrature, wavefunction_z, ExpansionPath, ZGridOptions};
use super::vertex::vertex_integrals;

/// Per-unit-coupling quantities that can be scanned in Lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanQuantity {
    /// On-shell `int dx I_A`, level 1, closed forms. Fitted to `{Lambda^2, M^2 ln, M^2}`.
    SigmaI,
    /// As `SigmaI` but by nested radial quadrature.
    SigmaIOracle,
    /// Scalar slope `f` of the subtracted self-energy, level 1. Fitted to `{ln, 1}`.
    WavefunctionScalar,
    /// `-4 int x I_D(b^2)` at `q^2 = 0`. Fitted to `{ln, 1}`.
    VertexScalar,
    /// `int dx I_E(M^2(x))` at `q^2 = 0`. Fitted to `{ln, 1}`.
    Polarization,
}

impl ScanQuantity {
    pub const ALL: [ScanQuantity; 5] = [
        Self::SigmaI,
        Self::SigmaIOracle,
        Self::WavefunctionScalar,
        Self::VertexScalar,
        Self::Polarization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SigmaI => "sigma_i",
            Self::SigmaIOracle => "sigma_i_oracle",
            Self::WavefunctionScalar => "z_phi_scalar",
            Self::VertexScalar => "vertex_gamma_i",
            Self::Polarization => "polarization",
        }
    }

    fn model(self, mass_sq: f64) -> FitModel {
        match self {
            Self::SigmaI | Self::SigmaIOracle => FitModel::mass_dimension_two(mass_sq),
            _ => FitModel::logarithmic(mass_sq),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub quantity: ScanQuantity,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: DivergenceFit,
}

fn evaluate(
    quantity: ScanQuantity,
    lambda: f64,
    atoms: &AtomPair,
    reg: &RegScheme,
    path: ExpansionPath,
    z_opts: &ZGridOptions,
) -> Result<f64> {
    let reg = reg.with_lambda(lambda)?;
    let m1 = atoms.m1();
    let rest = [m1, 0.0, 0.0, 0.0];
    // the scalar parts do not depend on the dipole tensor
    let gamma = DipoleTensor::zero(Metric::minkowski4());
    match quantity {
        ScanQuantity::SigmaI => {
            Ok(self_energy(Level::One, -m1 * m1, &rest, atoms, &gamma, &reg, path)?.scalar_integral)
        }
        ScanQuantity::SigmaIOracle => Ok(self_energy_by_quadrature(Level::One, -m1 * m1, atoms, &reg, path)?.0),
        ScanQuantity::WavefunctionScalar => {
            Ok(wavefunction_z(Level::One, &rest, atoms, &gamma, &reg, path, z_opts)?.f_scalar)
        }
        ScanQuantity::VertexScalar => Ok(vertex_integrals(0.0, atoms, &reg)?.gamma_i),
        ScanQuantity::Polarization => polarization_integral(0.0, atoms, &reg),
    }
}

/// Evaluates `quantity` on every cutoff in `lambdas` (in parallel) and fits
/// the divergent structure, with `M^2` the mean mass squared.
pub fn divergence_scan(
    quantity: ScanQuantity,
    lambdas: &[f64],
    atoms: &AtomPair,
    reg: &RegScheme,
    path: ExpansionPath,
    z_opts: &ZGridOptions,
) -> Result<Scan> {
    if quantity == ScanQuantity::SigmaIOracle && path == ExpansionPath::FirstOrder {
        return Err(Error::InvalidInput(
            "the quadrature oracle covers the exact and leading paths".into(),
        ));
    }
    let values = lambdas
        .par_iter()
        .map(|&l| evaluate(quantity, l, atoms, reg, path, z_opts))
        .collect::<Result<Vec<f64>>>()?;
    let fit = divergence_fit(lambdas, &values, &quantity.model(atoms.mean_mass_sq()))?;
    Ok(Scan {
        quantity,
        lambdas: lambdas.to_vec(),
        values,
        fit,
    })
}

/// `1 / (2 pi)^3`, the normalization the loop results are compared against.
pub const REFERENCE_PREFACTOR: f64 = 1.0 / (8.0 * PI * PI * PI);

#[derive(Debug, Clone, PartialEq)]
pub struct PrefactorReport {
    /// Fitted `Lambda^2` coefficient of the closed-form on-shell scalar integral.
    pub measured: f64,
    /// The same fit on nested-quadrature values.
    pub oracle: f64,
    pub relative_difference: f64,
    pub reference: f64,
    /// `measured / reference`.
    pub ratio: f64,
    pub closed_form: Scan,
    pub quadrature: Scan,
}

pub fn prefactor_report(
    lambdas: &[f64],
    atoms: &AtomPair,
    reg: &RegScheme,
    path: ExpansionPath,
) -> Result<PrefactorReport> {
    let z_opts = ZGridOptions::default();
    let closed_form = divergence_scan(ScanQuantity::SigmaI, lambdas, atoms, reg, path, &z_opts)?;
    let quadrature = divergence_scan(ScanQuantity::SigmaIOracle, lambdas, atoms, reg, path, &z_opts)?;
    let measured = closed_form.fit.c_quad.expect("quadratic term is in the model");
    let oracle = quadrature.fit.c_quad.expect("quadratic term is in the model");
    Ok(PrefactorReport {
        measured,
        oracle,
        relative_difference: ((measured - oracle) / oracle).abs(),
        reference: REFERENCE_PREFACTOR,
        ratio: measured / REFERENCE_PREFACTOR,
        closed_form,
        quadrature,
    })
}
