use crate::error::{Error, Result};

/// Minkowski metric with signature (-,+,+,+) in `n + 1` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metric {
    spatial_dim: usize,
}

impl Metric {
    pub fn new(spatial_dim: usize) -> Result<Self> {
        match spatial_dim {
            2 | 3 => Ok(Self { spatial_dim }),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    /// The 3+1 metric used by every loop calculation.
    pub const fn minkowski4() -> Self {
        Self { spatial_dim: 3 }
    }

    pub fn spatial_dim(&self) -> usize {
        self.spatial_dim
    }

    pub fn dim(&self) -> usize {
        self.spatial_dim + 1
    }

    /// Diagonal entry `g_{mu mu}`.
    #[inline]
    pub fn eta(&self, mu: usize) -> f64 {
        debug_assert!(mu < self.dim());
        if mu == 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Lowers (or raises) a single index of a vector.
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim(), "vector length does not match metric");
        v.iter().enumerate().map(|(mu, x)| self.eta(mu) * x).collect()
    }

    /// `g_{mu nu} u^mu v^nu`.
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        assert_eq!(u.len(), self.dim());
        assert_eq!(v.len(), self.dim());
        u.iter()
            .zip(v)
            .enumerate()
            .map(|(mu, (a, b))| self.eta(mu) * a * b)
            .sum()
    }
}

impl Default for Metric {
    fn default() -> Self {
        Self::minkowski4()
    }
}

/// On-shell four-momentum `(E, p)` with `E^2 = |p|^2 + m^2`, so that `p^2 = -m^2`.
pub fn on_shell_momentum(mass: f64, spatial: [f64; 3]) -> [f64; 4] {
    let p_sq: f64 = spatial.iter().map(|x| x * x).sum();
    [(p_sq + mass * mass).sqrt(), spatial[0], spatial[1], spatial[2]]
}
