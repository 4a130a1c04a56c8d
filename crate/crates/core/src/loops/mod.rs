//! Cutoff-regularized Euclidean loop integrals in four dimensions.

pub mod feynman;
pub mod kinematics;
pub mod master;
pub mod quadrature;

pub use feynman::{feynman_identity_check, symmetric_integration_moments, TensorMoments};
pub use kinematics::{a_sq, b_sq, polarization_sq};
pub use master::{
    master_integral, master_integral_by_quadrature, master_integral_derivative, master_integral_difference,
    radial_quadrature, MasterIntegralKind, RegScheme, LOOP_FACTOR,
};
pub use quadrature::{
    integrate, integrate_unit_square, try_integrate, try_integrate_unit_square, QuadOptions, QuadResult,
};
