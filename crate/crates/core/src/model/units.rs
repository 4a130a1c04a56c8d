//! SI <-> natural unit conversion (hbar = c = eps0 = mu0 = 1).
//!
//! Natural units leave one scale free; it is fixed by an energy unit given in
//! electronvolts. Every natural-unit quantity is then a pure number: masses and
//! energies in that unit, lengths and times in its inverse, and charges in units
//! of `sqrt(eps0 hbar c)`.

use crate::error::{ensure_positive, Result};

pub const HBAR: f64 = 1.054_571_817e-34; // J s
pub const C: f64 = 299_792_458.0; // m/s
pub const EPS0: f64 = 8.854_187_812_8e-12; // F/m
pub const MU0: f64 = 1.256_637_062_12e-6; // N/A^2
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19; // J

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitMode {
    Si,
    Natural,
}

/// Physical dimension of a value being converted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Mass,
    Energy,
    Length,
    Time,
    AngularFrequency,
    Volume,
    Charge,
    DipoleMoment,
    ElectricField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub mode: UnitMode,
    energy_unit: f64,
}

impl UnitSystem {
    pub fn natural() -> Self {
        Self {
            mode: UnitMode::Natural,
            energy_unit: ELECTRON_VOLT,
        }
    }

    /// SI input converted with the given natural energy unit (in eV).
    pub fn si(energy_unit_ev: f64) -> Result<Self> {
        ensure_positive("energy unit", energy_unit_ev)?;
        Ok(Self {
            mode: UnitMode::Si,
            energy_unit: energy_unit_ev * ELECTRON_VOLT,
        })
    }

    pub fn hbar(&self) -> f64 {
        match self.mode {
            UnitMode::Si => HBAR,
            UnitMode::Natural => 1.0,
        }
    }

    pub fn c(&self) -> f64 {
        match self.mode {
            UnitMode::Si => C,
            UnitMode::Natural => 1.0,
        }
    }

    pub fn eps0(&self) -> f64 {
        match self.mode {
            UnitMode::Si => EPS0,
            UnitMode::Natural => 1.0,
        }
    }

    pub fn mu0(&self) -> f64 {
        match self.mode {
            UnitMode::Si => MU0,
            UnitMode::Natural => 1.0,
        }
    }

    /// Multiplier taking an SI value of `q` to natural units.
    pub fn si_to_natural_factor(&self, q: Quantity) -> f64 {
        let e = self.energy_unit;
        let hbar_c = HBAR * C;
        let charge = (EPS0 * hbar_c).sqrt();
        let length = hbar_c / e;
        match q {
            Quantity::Energy => 1.0 / e,
            Quantity::Mass => C * C / e,
            Quantity::Length => 1.0 / length,
            Quantity::Time => e / HBAR,
            Quantity::AngularFrequency => HBAR / e,
            Quantity::Volume => 1.0 / length.powi(3),
            Quantity::Charge => 1.0 / charge,
            Quantity::DipoleMoment => 1.0 / (charge * length),
            // eps0 E^2 is an energy density
            Quantity::ElectricField => EPS0.sqrt() * hbar_c.powf(1.5) / (e * e),
        }
    }

    /// Converts a value given in this system to natural units.
    pub fn to_natural(&self, q: Quantity, value: f64) -> f64 {
        match self.mode {
            UnitMode::Natural => value,
            UnitMode::Si => value * self.si_to_natural_factor(q),
        }
    }

    /// Converts a natural-unit value back into this system.
    pub fn from_natural(&self, q: Quantity, value: f64) -> f64 {
        match self.mode {
            UnitMode::Natural => value,
            UnitMode::Si => value / self.si_to_natural_factor(q),
        }
    }
}
