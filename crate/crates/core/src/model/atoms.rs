use crate::error::{ensure_positive, Error, Result};

/// The two level masses of the atom (natural units).
///
/// Level 1 carries mass `m1`, level 2 mass `m2`; the derived quantities are the
/// mean squared mass `M^2 = (m1^2 + m2^2)/2`, the splitting `delta = m1^2 - m2^2`,
/// the expansion parameter `b = delta / M^2`, the mean mass and the transition
/// frequency `omega12 = m1 - m2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPair {
    m1: f64,
    m2: f64,
}

/// Atomic level index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    One,
    Two,
}

impl Level {
    pub fn other(self) -> Self {
        match self {
            Level::One => Level::Two,
            Level::Two => Level::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Level::One => 1,
            Level::Two => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Level::One),
            2 => Some(Level::Two),
            _ => None,
        }
    }
}

impl AtomPair {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        ensure_positive("m1", m1)?;
        ensure_positive("m2", m2)?;
        let pair = Self { m1, m2 };
        if pair.b().abs() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "|b| = |delta/M^2| = {} must be below 1",
                pair.b().abs()
            )));
        }
        Ok(pair)
    }

    /// Equal-mass pair, the `b = 0` limit.
    pub fn degenerate(m: f64) -> Result<Self> {
        Self::new(m, m)
    }

    /// Builds the pair with given `M^2` and `b`: `m1^2 = M^2 (1 + b/2)`, `m2^2 = M^2 (1 - b/2)`.
    pub fn from_mean_and_b(mean_mass_sq: f64, b: f64) -> Result<Self> {
        ensure_positive("M^2", mean_mass_sq)?;
        if !(b.abs() < 1.0) {
            return Err(Error::InvalidInput(format!("|b| must be below 1, got {b}")));
        }
        Self::new(
            (mean_mass_sq * (1.0 + 0.5 * b)).sqrt(),
            (mean_mass_sq * (1.0 - 0.5 * b)).sqrt(),
        )
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn mass(&self, level: Level) -> f64 {
        match level {
            Level::One => self.m1,
            Level::Two => self.m2,
        }
    }

    pub fn mean_mass_sq(&self) -> f64 {
        0.5 * (self.m1 * self.m1 + self.m2 * self.m2)
    }

    pub fn delta(&self) -> f64 {
        self.m1 * self.m1 - self.m2 * self.m2
    }

    pub fn b(&self) -> f64 {
        self.delta() / self.mean_mass_sq()
    }

    pub fn mean_mass(&self) -> f64 {
        0.5 * (self.m1 + self.m2)
    }

    pub fn omega12(&self) -> f64 {
        self.m1 - self.m2
    }

    pub fn geometric_mass(&self) -> f64 {
        (self.m1 * self.m2).sqrt()
    }

    /// Same pair with the levels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            m1: self.m2,
            m2: self.m1,
        }
    }
}
