//! One-loop renormalization: self-energies, vertex, polarization and the
//! divergent-coefficient fits.

pub mod fit;
pub mod polarization;
pub mod report;
pub mod scan;
pub mod self_energy;
pub mod vertex;

pub use fit::{divergence_fit, DivergenceFit, FitModel, FitTerm, SlopeFit, MAX_CONDITION, MAX_RELATIVE_RESIDUAL};
pub use polarization::{
    photon_exchange_kernel, photon_polarization, polarization_integral, polarization_integral_by_quadrature,
    ExchangeKernel, Polarization, EXCHANGE_INDICES,
};
pub use report::{
    counterterm_report, CountertermEntry, InducedCoupling, OperatorClass, RenormConstants, ReportOptions,
    KINETIC_OPERATOR, MAXWELL_OPERATOR,
};
pub use scan::{divergence_scan, prefactor_report, PrefactorReport, Scan, ScanQuantity, REFERENCE_PREFACTOR};
pub use self_energy::{
    mass_shift, self_energy, self_energy_by_quadrature, wavefunction_z, ExpansionPath, MassShift, SelfEnergyResult,
    WavefunctionZ, ZGridOptions,
};
pub use vertex::{vertex_integrals, vertex_integrals_by_quadrature, vertex_one_loop, VertexIntegrals, VertexResult};
