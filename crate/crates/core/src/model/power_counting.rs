use num_rational::Ratio;

use crate::error::{Error, Result};

/// The two admissible dipole interactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interaction {
    /// `i gamma_{mu nu} eps^{ab} phi_a d_0 phi_b` (time-derivative coupling).
    PTilde,
    /// `(1/2) gamma_{mu nu} epsbar^{ab} phi_a phi_b`.
    P,
}

impl Interaction {
    pub fn name(self) -> &'static str {
        match self {
            Interaction::PTilde => "P_tilde",
            Interaction::P => "P",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Renormalizability {
    Super,
    Marginal,
    NonRenormalizable,
}

impl Renormalizability {
    pub fn name(self) -> &'static str {
        match self {
            Renormalizability::Super => "super",
            Renormalizability::Marginal => "marginal",
            Renormalizability::NonRenormalizable => "non_renormalizable",
        }
    }
}

/// Length exponent of `[gamma^{mu nu}]` in `n + 1` dimensions.
///
/// Fields carry `L^{(1-n)/2}`; the derivative coupling picks up one extra
/// power of length relative to the plain one.
pub fn engineering_dimension(interaction: Interaction, n: usize) -> Result<Ratio<i64>> {
    if !(n == 2 || n == 3) {
        return Err(Error::UnsupportedDimension(n));
    }
    let n = n as i64;
    Ok(match interaction {
        Interaction::PTilde => Ratio::new(n - 1, 2),
        Interaction::P => Ratio::new(n - 3, 2),
    })
}

pub fn classify_renormalizability(interaction: Interaction, n: usize) -> Result<Renormalizability> {
    let d = engineering_dimension(interaction, n)?;
    let zero = Ratio::from_integer(0);
    Ok(if d > zero {
        Renormalizability::NonRenormalizable
    } else if d == zero {
        Renormalizability::Marginal
    } else {
        Renormalizability::Super
    })
}
