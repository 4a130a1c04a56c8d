use nalgebra::DMatrix;

use super::atoms::AtomPair;
use super::metric::Metric;
use crate::error::{ensure_finite, Error, Result};

/// Antisymmetric dipole coupling `gamma^{mu nu}` (contravariant components).
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleTensor {
    metric: Metric,
    upper: DMatrix<f64>,
}

/// Scalar and rank-2 contractions of a dipole tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Contractions {
    /// `gamma_{mu nu} gamma^{mu nu}`
    pub gamma_sq: f64,
    /// `gamma^mu_tau gamma_{mu lambda}` (both indices down, symmetric)
    pub gamma_sq_tensor: DMatrix<f64>,
}

fn check_antisymmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            ensure_finite(what, m[(i, j)])?;
            if m[(i, j)] != -m[(j, i)] {
                return Err(Error::InvalidInput(format!("{what} is not antisymmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

impl DipoleTensor {
    pub fn zero(metric: Metric) -> Self {
        let d = metric.dim();
        Self {
            metric,
            upper: DMatrix::zeros(d, d),
        }
    }

    /// From the full contravariant matrix; must be exactly antisymmetric.
    pub fn from_upper(metric: Metric, upper: DMatrix<f64>) -> Result<Self> {
        if upper.nrows() != metric.dim() || upper.ncols() != metric.dim() {
            return Err(Error::InvalidInput(format!(
                "dipole tensor must be {0}x{0}",
                metric.dim()
            )));
        }
        check_antisymmetric(&upper, "dipole tensor")?;
        Ok(Self { metric, upper })
    }

    /// From the independent components `gamma^{mu nu}`, `mu < nu`, in row-major order
    /// (`01, 02, 03, 12, 13, 23` in 3+1).
    pub fn from_independent(metric: Metric, components: &[f64]) -> Result<Self> {
        let d = metric.dim();
        let expected = d * (d - 1) / 2;
        if components.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} independent components, got {}",
                components.len()
            )));
        }
        let mut upper = DMatrix::zeros(d, d);
        let mut it = components.iter();
        for mu in 0..d {
            for nu in (mu + 1)..d {
                let v = *it.next().unwrap();
                ensure_finite("dipole component", v)?;
                upper[(mu, nu)] = v;
                upper[(nu, mu)] = -v;
            }
        }
        Ok(Self { metric, upper })
    }

    /// Lab-frame tensor from an electric dipole moment `d`:
    /// `gamma^{0i} = d_i sqrt(m1 m2)`, `gamma^{ij} = 0`.
    pub fn from_moment(d: &[f64; 3], atoms: &AtomPair) -> Result<Self> {
        for (i, di) in d.iter().enumerate() {
            ensure_finite(&format!("d[{i}]"), *di)?;
        }
        let scale = atoms.geometric_mass();
        let mut g = Self::zero(Metric::minkowski4());
        for (i, di) in d.iter().enumerate() {
            g.upper[(0, i + 1)] = di * scale;
            g.upper[(i + 1, 0)] = -di * scale;
        }
        Ok(g)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn upper(&self) -> &DMatrix<f64> {
        &self.upper
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.upper[(mu, nu)]
    }

    /// Electric part `gamma^{0i}`, i = 1..n.
    pub fn electric(&self) -> Vec<f64> {
        (1..self.metric.dim()).map(|i| self.upper[(0, i)]).collect()
    }

    /// `gamma_{mu nu}`.
    pub fn lower(&self) -> DMatrix<f64> {
        let g = &self.metric;
        DMatrix::from_fn(self.upper.nrows(), self.upper.ncols(), |mu, nu| {
            g.eta(mu) * g.eta(nu) * self.upper[(mu, nu)]
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            metric: self.metric,
            upper: &self.upper * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|x| *x == 0.0)
    }

    pub fn contractions(&self) -> Contractions {
        let g = &self.metric;
        let d = g.dim();
        let mut gamma_sq = 0.0;
        for mu in 0..d {
            for nu in 0..d {
                gamma_sq += g.eta(mu) * g.eta(nu) * self.upper[(mu, nu)] * self.upper[(mu, nu)];
            }
        }
        let gamma_sq_tensor = DMatrix::from_fn(d, d, |tau, lam| {
            let s: f64 = (0..d)
                .map(|mu| g.eta(mu) * self.upper[(mu, tau)] * self.upper[(mu, lam)])
                .sum();
            g.eta(tau) * g.eta(lam) * s
        });
        Contractions {
            gamma_sq,
            gamma_sq_tensor,
        }
    }

    /// `gamma_{mu nu} gamma^{mu nu}`.
    pub fn gamma_sq(&self) -> f64 {
        self.contractions().gamma_sq
    }

    /// `gamma^2_{tau lambda} p^tau p^lambda` for a contravariant vector `p`.
    pub fn gamma_sq_pp(&self, p: &[f64]) -> f64 {
        self.gamma_sq_uv(p, p)
    }

    /// `gamma^2_{tau lambda} u^tau v^lambda`.
    pub fn gamma_sq_uv(&self, u: &[f64], v: &[f64]) -> f64 {
        let t = self.contractions().gamma_sq_tensor;
        let d = self.metric.dim();
        assert_eq!(u.len(), d);
        assert_eq!(v.len(), d);
        let mut acc = 0.0;
        for tau in 0..d {
            for lam in 0..d {
                acc += t[(tau, lam)] * u[tau] * v[lam];
            }
        }
        acc
    }

    /// `q_alpha gamma^{alpha mu}` for a contravariant `q` (result has an upper index).
    pub fn contract_lower_first(&self, q: &[f64]) -> Vec<f64> {
        let d = self.metric.dim();
        assert_eq!(q.len(), d);
        let q_low = self.metric.lower(q);
        (0..d)
            .map(|mu| (0..d).map(|a| q_low[a] * self.upper[(a, mu)]).sum())
            .collect()
    }
}

/// Electromagnetic field strength `F_{mu nu}` (covariant components).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrength {
    metric: Metric,
    lower: DMatrix<f64>,
}

impl FieldStrength {
    pub fn from_lower(metric: Metric, lower: DMatrix<f64>) -> Result<Self> {
        if lower.nrows() != metric.dim() || lower.ncols() != metric.dim() {
            return Err(Error::InvalidInput("field strength has wrong shape".into()));
        }
        check_antisymmetric(&lower, "field strength")?;
        Ok(Self { metric, lower })
    }

    /// Pure electric field in 3+1: `F_{0i} = -E_i`, `F_{i0} = E_i`.
    pub fn electric(e: [f64; 3]) -> Result<Self> {
        let mut f = DMatrix::zeros(4, 4);
        for (i, ei) in e.iter().enumerate() {
            ensure_finite("E", *ei)?;
            f[(0, i + 1)] = -ei;
            f[(i + 1, 0)] = *ei;
        }
        Ok(Self {
            metric: Metric::minkowski4(),
            lower: f,
        })
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// `gamma^{mu nu} F_{mu nu}`.
    pub fn gamma_dot_f(&self, gamma: &DipoleTensor) -> Result<f64> {
        if gamma.metric() != self.metric {
            return Err(Error::InvalidInput("dimension mismatch between gamma and F".into()));
        }
        Ok(gamma.upper().iter().zip(self.lower.iter()).map(|(g, f)| g * f).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn full_metric(d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(d, d, |i, j| {
            if i != j {
                0.0
            } else if i == 0 {
                -1.0
            } else {
                1.0
            }
        })
    }

    /// Quadruple index loop with the explicit metric matrix.
    fn brute_gamma_sq(g: &DipoleTensor) -> f64 {
        let d = g.metric().dim();
        let eta = full_metric(d);
        let up = g.upper();
        let mut s = 0.0;
        for mu in 0..d {
            for nu in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        s += eta[(mu, a)] * eta[(nu, b)] * up[(a, b)] * up[(mu, nu)];
                    }
                }
            }
        }
        s
    }

    fn brute_gamma_sq_tensor(g: &DipoleTensor) -> DMatrix<f64> {
        let d = g.metric().dim();
        let eta = full_metric(d);
        let up = g.upper();
        // gamma^mu_tau = gamma^{mu a} eta_{a tau}; gamma_{mu lam} = eta_{mu c} eta_{lam e} gamma^{c e}
        DMatrix::from_fn(d, d, |tau, lam| {
            let mut s = 0.0;
            for mu in 0..d {
                for a in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            s += up[(mu, a)] * eta[(a, tau)] * eta[(mu, c)] * eta[(lam, e)] * up[(c, e)];
                        }
                    }
                }
            }
            s
        })
    }

    #[test]
    fn moment_identification() {
        let atoms = AtomPair::new(1.0, 1.0).unwrap();
        let g = DipoleTensor::from_moment(&[1.0, 0.0, 0.0], &atoms).unwrap();
        assert_eq!(g.get(0, 1), 1.0);
        assert_eq!(g.get(1, 0), -1.0);
        let others: f64 = g.upper().iter().map(|x| x.abs()).sum();
        assert_eq!(others, 2.0);

        let atoms = AtomPair::new(1.0, 0.9).unwrap();
        let g = DipoleTensor::from_moment(&[0.3, 0.0, 0.0], &atoms).unwrap();
        assert!((g.get(0, 1) - 0.3 * 0.9f64.sqrt()).abs() < 1e-16);

        let z = DipoleTensor::from_moment(&[0.0; 3], &atoms).unwrap();
        assert!(z.is_zero());
        assert!(DipoleTensor::from_moment(&[f64::INFINITY, 0.0, 0.0], &atoms).is_err());
    }

    #[test]
    fn pure_electric_gamma_sq() {
        let g = DipoleTensor::from_independent(Metric::minkowski4(), &[0.7, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let c = g.contractions();
        assert!((c.gamma_sq + 2.0 * 0.49).abs() < 1e-15);
        assert!((brute_gamma_sq(&g) + 2.0 * 0.49).abs() < 1e-15);
    }

    #[test]
    fn zero_tensor_contractions() {
        let c = DipoleTensor::zero(Metric::minkowski4()).contractions();
        assert_eq!(c.gamma_sq, 0.0);
        assert!(c.gamma_sq_tensor.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn rejects_symmetric_input() {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        assert!(DipoleTensor::from_upper(Metric::minkowski4(), m).is_err());
    }

    #[test]
    fn electric_field_contraction() {
        let atoms = AtomPair::new(1.0, 1.0).unwrap();
        let g = DipoleTensor::from_moment(&[0.5, 0.0, 0.0], &atoms).unwrap();
        let f = FieldStrength::electric([2.0, 0.0, 0.0]).unwrap();
        // 2 gamma^{01} F_{01} = 2 * 0.5 * (-2)
        assert_eq!(f.gamma_dot_f(&g).unwrap(), -2.0);
    }

    fn boost(rapidity: f64, axis: usize) -> DMatrix<f64> {
        let mut l = DMatrix::identity(4, 4);
        l[(0, 0)] = rapidity.cosh();
        l[(axis, axis)] = rapidity.cosh();
        l[(0, axis)] = rapidity.sinh();
        l[(axis, 0)] = rapidity.sinh();
        l
    }

    proptest! {
        #[test]
        fn contractions_match_index_loops(c in prop::collection::vec(-3.0f64..3.0, 6)) {
            let g = DipoleTensor::from_independent(Metric::minkowski4(), &c).unwrap();
            let k = g.contractions();
            let bs = brute_gamma_sq(&g);
            prop_assert!((k.gamma_sq - bs).abs() <= 1e-12 * (1.0 + bs.abs()));
            let bt = brute_gamma_sq_tensor(&g);
            prop_assert!((&k.gamma_sq_tensor - &bt).amax() <= 1e-12 * (1.0 + bt.amax()));
            prop_assert!((&k.gamma_sq_tensor - k.gamma_sq_tensor.transpose()).amax() <= 1e-14 * (1.0 + bt.amax()));
        }

        #[test]
        fn contractions_in_two_plus_one(c in prop::collection::vec(-3.0f64..3.0, 3)) {
            let g = DipoleTensor::from_independent(Metric::new(2).unwrap(), &c).unwrap();
            let bs = brute_gamma_sq(&g);
            prop_assert!((g.gamma_sq() - bs).abs() <= 1e-12 * (1.0 + bs.abs()));
        }

        #[test]
        fn gamma_sq_is_boost_invariant(
            c in prop::collection::vec(-2.0f64..2.0, 6),
            r1 in -1.5f64..1.5, r2 in -1.5f64..1.5, axis1 in 1usize..4, axis2 in 1usize..4,
        ) {
            let g = DipoleTensor::from_independent(Metric::minkowski4(), &c).unwrap();
            let l = boost(r1, axis1) * boost(r2, axis2);
            let boosted = &l * g.upper() * l.transpose();
            // restore exact antisymmetry lost to rounding
            let anti = (&boosted - boosted.transpose()) * 0.5;
            let gb = DipoleTensor::from_upper(Metric::minkowski4(), anti).unwrap();
            let scale = boosted.amax().powi(2) + 1.0;
            prop_assert!((gb.gamma_sq() - g.gamma_sq()).abs() <= 1e-11 * scale);
        }
    }
}
