//! Conventions and the covariant dipole coupling.

pub mod atoms;
pub mod dipole;
pub mod metric;
pub mod power_counting;
pub mod units;

pub use atoms::{AtomPair, Level};
pub use dipole::{Contractions, DipoleTensor, FieldStrength};
pub use metric::{on_shell_momentum, Metric};
pub use power_counting::{classify_renormalizability, engineering_dimension, Interaction, Renormalizability};
pub use units::{Quantity, UnitMode, UnitSystem};
