//! Exact 4x4 mode Hamiltonian in the `(psi_1, psi_2, chi_1, chi_2)` basis and
//! its perturbative decoupling.
//!
//! At fixed wavenumber `k` the Hamiltonian is `H = B (x) beta + C (x) O` with
//! `beta = diag(1, -1)`, `O = [[0, 1], [-1, 0]]` on the psi/chi split, i.e.
//! `H = [[B, C], [-C, -B]]`.

use nalgebra::{Complex, DMatrix, Matrix2, Schur};
use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_positive, Result};
use crate::linalg::{conjugate, frobenius, CMatrix};
use crate::model::AtomPair;

/// Validity bound on the expansion parameters.
pub const SMALL_PARAM_LIMIT: f64 = 0.1;

/// `psi = sqrt(m/2) (phi + i phi_dot / m)`, `chi = sqrt(m/2) (phi - i phi_dot / m)`.
pub fn psi_chi_decompose(phi: Complex64, phi_dot: Complex64, m: f64) -> Result<(Complex64, Complex64)> {
    ensure_positive("mass", m)?;
    let s = (0.5 * m).sqrt();
    let i = Complex64::i();
    Ok((s * (phi + i * phi_dot / m), s * (phi - i * phi_dot / m)))
}

/// Inverse of [`psi_chi_decompose`].
pub fn psi_chi_recompose(psi: Complex64, chi: Complex64, m: f64) -> Result<(Complex64, Complex64)> {
    ensure_positive("mass", m)?;
    let s = (2.0 * m).sqrt();
    let i = Complex64::i();
    Ok(((psi + chi) / s, -i * m * (psi - chi) / s))
}

/// Expansion parameters as magnitudes: `lambda_a = k^2 / m_a^2`,
/// `lambda3 = |gamma.F| / (m_bar sqrt(m1 m2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl SmallParams {
    pub fn new(k: f64, gamma_dot_f: f64, atoms: &AtomPair) -> Self {
        Self {
            lambda1: k * k / (atoms.m1() * atoms.m1()),
            lambda2: k * k / (atoms.m2() * atoms.m2()),
            lambda3: gamma_dot_f.abs() / (atoms.mean_mass() * atoms.geometric_mass()),
        }
    }

    pub fn max(&self) -> f64 {
        self.lambda1.max(self.lambda2).max(self.lambda3)
    }

    pub fn is_valid(&self) -> bool {
        self.max() < SMALL_PARAM_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeHamiltonian {
    pub matrix: CMatrix,
    pub k: f64,
    pub gamma_dot_f: f64,
    pub atoms: AtomPair,
}

fn kron2(a: &Matrix2<f64>, b: &Matrix2<f64>) -> CMatrix {
    DMatrix::from_fn(4, 4, |r, c| Complex64::new(a[(r % 2, c % 2)] * b[(r / 2, c / 2)], 0.0))
}

fn beta() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

fn odd() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

fn beta_odd() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, 1.0, 0.0)
}

/// `A (x) S`: `A` acts on the level index, `S` on the psi/chi split.
pub fn level_tensor(a: &Matrix2<f64>, s: &Matrix2<f64>) -> CMatrix {
    kron2(a, s)
}

/// Dipole mixing term `gamma.F / (2 sqrt(m1 m2))`.
fn mixing(gamma_dot_f: f64, atoms: &AtomPair) -> f64 {
    0.5 * gamma_dot_f / atoms.geometric_mass()
}

impl ModeHamiltonian {
    /// The beta-part `B_ab = delta_ab (k^2 / 2 m_a + m_a) + mix * eps_ab`.
    pub fn beta_part(&self) -> Matrix2<f64> {
        let (m1, m2) = (self.atoms.m1(), self.atoms.m2());
        let e = mixing(self.gamma_dot_f, &self.atoms);
        let k2 = self.k * self.k;
        Matrix2::new(k2 / (2.0 * m1) + m1, e, e, k2 / (2.0 * m2) + m2)
    }

    /// The O-part `C_ab = delta_ab k^2 / 2 m_a + mix * eps_ab`.
    pub fn odd_part(&self) -> Matrix2<f64> {
        let (m1, m2) = (self.atoms.m1(), self.atoms.m2());
        let e = mixing(self.gamma_dot_f, &self.atoms);
        let k2 = self.k * self.k;
        Matrix2::new(k2 / (2.0 * m1), e, e, k2 / (2.0 * m2))
    }

    pub fn small_params(&self) -> SmallParams {
        SmallParams::new(self.k, self.gamma_dot_f, &self.atoms)
    }
}

pub fn assemble_mode_hamiltonian(k: f64, gamma_dot_f: f64, atoms: &AtomPair) -> Result<ModeHamiltonian> {
    ensure_finite("k", k)?;
    ensure_finite("gamma.F", gamma_dot_f)?;
    let mut h = ModeHamiltonian {
        matrix: CMatrix::zeros(4, 4),
        k: k.abs(),
        gamma_dot_f,
        atoms: *atoms,
    };
    h.matrix = level_tensor(&h.beta_part(), &beta()) + level_tensor(&h.odd_part(), &odd());
    Ok(h)
}

/// Normalization of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorConvention {
    /// `Lambda = -(i/4) (lambda_a delta_ab + lambda3 eps_ab) (x) beta O`: the
    /// leading commutator cancels the O-part exactly.
    Decoupling,
    /// The same structure with `i/2` in place of `i/4`. It overshoots the
    /// cancellation and leaves a first-order remainder.
    Printed,
}

impl GeneratorConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Decoupling => "decoupling",
            Self::Printed => "printed",
        }
    }

    fn factor(self) -> f64 {
        match self {
            Self::Decoupling => 0.25,
            Self::Printed => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub matrix: CMatrix,
    pub params: SmallParams,
    pub convention: GeneratorConvention,
    /// False when the expansion parameters exceed [`SMALL_PARAM_LIMIT`].
    pub valid: bool,
}

impl Generator {
    /// `Lambda_1`, the kinetic piece.
    pub fn kinetic(&self) -> CMatrix {
        let f = self.convention.factor();
        let t = Matrix2::new(self.params.lambda1, 0.0, 0.0, self.params.lambda2) * -f;
        level_tensor(&t, &beta_odd()) * Complex64::i()
    }
}

pub fn build_generator(h: &ModeHamiltonian, convention: GeneratorConvention) -> Generator {
    let params = h.small_params();
    let f = convention.factor();
    let lambda3 = h.gamma_dot_f / (h.atoms.mean_mass() * h.atoms.geometric_mass());
    let t = Matrix2::new(params.lambda1, lambda3, lambda3, params.lambda2) * -f;
    Generator {
        matrix: level_tensor(&t, &beta_odd()) * Complex64::i(),
        params,
        convention,
        valid: params.is_valid(),
    }
}

/// `H' = e^{i Lambda} H e^{-i Lambda}`.
pub fn similarity_transform(h: &CMatrix, generator: &CMatrix) -> Result<CMatrix> {
    conjugate(h, generator)
}

/// Frobenius norm of the psi-chi coupling blocks.
pub fn off_block_norm(h: &CMatrix) -> f64 {
    frobenius(&h.view((0, 2), (2, 2)).into_owned()).hypot(frobenius(&h.view((2, 0), (2, 2)).into_owned()))
}

/// Reduced two-level Hamiltonian of the decoupled psi sector, written as
/// `(k^2/2 m_bar + m_bar) 1 + (omega12/2) sigma_z + mix sigma_x` plus the
/// kinetic correction `(omega12/2) diag(-k^2 / 2 m_bar m1, k^2 / 2 m_bar m2)`.
pub fn reduced_reference(k: f64, gamma_dot_f: f64, atoms: &AtomPair) -> Matrix2<f64> {
    let (mb, w) = (atoms.mean_mass(), atoms.omega12());
    let k2 = k * k;
    let e = mixing(gamma_dot_f, atoms);
    let free = k2 / (2.0 * mb) + mb;
    Matrix2::new(free, 0.0, 0.0, free)
        + Matrix2::new(0.5 * w, 0.0, 0.0, -0.5 * w)
        + Matrix2::new(0.0, e, e, 0.0)
        + Matrix2::new(-k2 / (2.0 * mb * atoms.m1()), 0.0, 0.0, k2 / (2.0 * mb * atoms.m2())) * (0.5 * w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingResidual {
    pub r_before: f64,
    pub r_after: f64,
    pub lambda_max: f64,
    pub transformed: CMatrix,
    /// Frobenius distance of the upper-left block of `H'` from [`reduced_reference`].
    pub reduced_deviation: f64,
    /// Frobenius norm of `H`.
    pub h_norm: f64,
    pub valid: bool,
}

pub fn decoupling_residual(
    k: f64,
    gamma_dot_f: f64,
    atoms: &AtomPair,
    convention: GeneratorConvention,
) -> Result<DecouplingResidual> {
    let h = assemble_mode_hamiltonian(k, gamma_dot_f, atoms)?;
    let gen = build_generator(&h, convention);
    let hp = similarity_transform(&h.matrix, &gen.matrix)?;
    let reference = reduced_reference(k, gamma_dot_f, atoms);
    let reduced_deviation = (0..2)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|(r, c)| (hp[(r, c)] - Complex64::new(reference[(r, c)], 0.0)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(DecouplingResidual {
        r_before: off_block_norm(&h.matrix),
        r_after: off_block_norm(&hp),
        lambda_max: gen.params.max(),
        reduced_deviation,
        h_norm: frobenius(&h.matrix),
        transformed: hp,
        valid: gen.valid,
    })
}

/// Residuals along a ray `k^2 = s k0^2`, `gamma.F = s gF0`, with `s` chosen so
/// that `lambda_max` takes each requested value.
pub fn residual_sweep(
    k0: f64,
    gamma_dot_f0: f64,
    atoms: &AtomPair,
    lambda_targets: &[f64],
    convention: GeneratorConvention,
) -> Result<Vec<DecouplingResidual>> {
    let base = SmallParams::new(k0, gamma_dot_f0, atoms).max();
    ensure_positive("lambda_max of the base point", base)?;
    lambda_targets
        .iter()
        .map(|&target| {
            ensure_positive("lambda target", target)?;
            let s = target / base;
            decoupling_residual(k0 * s.sqrt(), gamma_dot_f0 * s, atoms, convention)
        })
        .collect()
}

/// Least-squares slope of `ln r_after` against `ln lambda_max`.
pub fn log_log_slope(points: &[DecouplingResidual]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.lambda_max.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.r_after.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Eigenvalues sorted by real part, then imaginary part.
pub fn sorted_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let schur = Schur::new(m.clone());
    let mut ev: Vec<Complex<f64>> = schur
        .eigenvalues()
        .map(|v| v.iter().cloned().collect())
        .unwrap_or_default();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn static_field_splits_evenly() {
        let m = 1.7;
        let (psi, chi) = psi_chi_decompose(c(0.4), c(0.0), m).unwrap();
        assert!((psi - c((m / 2.0).sqrt() * 0.4)).norm() < 1e-15);
        assert_eq!(psi, chi);
    }

    #[test]
    fn positive_frequency_lives_in_psi() {
        let m = 2.3;
        let t = 0.37;
        // phi = exp(-i m t)
        let phi = Complex64::from_polar(1.0, -m * t);
        let phi_dot = Complex64::new(0.0, -m) * phi;
        let (psi, chi) = psi_chi_decompose(phi, phi_dot, m).unwrap();
        assert!((psi - (2.0 * m).sqrt() * phi).norm() < 1e-14);
        assert!(chi.norm() < 1e-14);
        // cos(m t) at t = pi / 2m: phi = 0, phi_dot = -m
        let (psi, chi) = psi_chi_decompose(c(0.0), c(-m), m).unwrap();
        assert!((psi - Complex64::new(0.0, -(m / 2.0).sqrt())).norm() < 1e-15);
        assert!((chi - Complex64::new(0.0, (m / 2.0).sqrt())).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn decomposition_round_trip(re in -5.0f64..5.0, im in -5.0f64..5.0, dre in -5.0f64..5.0, dim in -5.0f64..5.0, m in 0.1f64..10.0) {
            let (phi, phi_dot) = (Complex64::new(re, im), Complex64::new(dre, dim));
            let (psi, chi) = psi_chi_decompose(phi, phi_dot, m).unwrap();
            let (p2, d2) = psi_chi_recompose(psi, chi, m).unwrap();
            prop_assert!((p2 - phi).norm() <= 1e-14 * (1.0 + phi.norm() + phi_dot.norm() / m));
            prop_assert!((d2 - phi_dot).norm() <= 1e-14 * (m * phi.norm() + phi_dot.norm() + 1.0));
        }

        #[test]
        fn reference_equals_level_diagonal_form(k in 0.0f64..0.3, gf in -0.05f64..0.05, m1 in 0.8f64..1.2, m2 in 0.8f64..1.2) {
            let atoms = AtomPair::new(m1, m2).unwrap();
            let r = reduced_reference(k, gf, &atoms);
            let e = mixing(gf, &atoms);
            let direct = Matrix2::new(k * k / (2.0 * m1) + m1, e, e, k * k / (2.0 * m2) + m2);
            prop_assert!((r - direct).norm() < 1e-14);
        }

        #[test]
        fn similarity_preserves_spectrum(k in 0.0f64..0.2, gf in -0.02f64..0.02, m1 in 0.9f64..1.1, m2 in 0.9f64..1.1) {
            let atoms = AtomPair::new(m1, m2).unwrap();
            let h = assemble_mode_hamiltonian(k, gf, &atoms).unwrap();
            let g = build_generator(&h, GeneratorConvention::Decoupling);
            let hp = similarity_transform(&h.matrix, &g.matrix).unwrap();
            let (e0, e1) = (sorted_eigenvalues(&h.matrix), sorted_eigenvalues(&hp));
            prop_assert_eq!(e0.len(), 4);
            for (a, b) in e0.iter().zip(&e1) {
                prop_assert!((a - b).norm() <= 1e-12 * a.norm());
            }
            let (t0, t1) = (h.matrix.trace(), hp.trace());
            prop_assert!((t0 - t1).norm() <= 1e-13 * frobenius(&h.matrix));
        }
    }

    #[test]
    fn rest_energies() {
        let atoms = AtomPair::new(1.1, 0.9).unwrap();
        let h = assemble_mode_hamiltonian(0.0, 0.0, &atoms).unwrap();
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1), c(0.9), c(-1.1), c(-0.9)]));
        assert_eq!(h.matrix, expected);
        let g = build_generator(&h, GeneratorConvention::Decoupling);
        assert!(g.matrix.iter().all(|z| *z == c(0.0)));
    }

    #[test]
    fn block_structure() {
        let atoms = AtomPair::new(1.0, 1.0).unwrap();
        let h = assemble_mode_hamiltonian(0.0, 0.02, &atoms).unwrap();
        assert!((h.matrix[(0, 1)] - c(0.01)).norm() < 1e-17);
        assert!((h.matrix[(0, 3)] - c(0.01)).norm() < 1e-17);
        let h = assemble_mode_hamiltonian(0.3, 0.0, &AtomPair::new(1.2, 0.8).unwrap()).unwrap();
        let cpart = h.odd_part();
        assert_eq!(cpart[(0, 1)], 0.0);
        assert!((cpart[(0, 0)] - 0.09 / 2.4).abs() < 1e-16);
        // reassembly: H = [[B, C], [-C, -B]]
        let (b, cc) = (h.beta_part(), h.odd_part());
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(h.matrix[(r, col)], c(b[(r, col)]));
                assert_eq!(h.matrix[(r, col + 2)], c(cc[(r, col)]));
                assert_eq!(h.matrix[(r + 2, col)], c(-cc[(r, col)]));
                assert_eq!(h.matrix[(r + 2, col + 2)], c(-b[(r, col)]));
            }
        }
    }

    #[test]
    fn generator_pieces() {
        let atoms = AtomPair::new(1.02, 0.98).unwrap();
        let h = assemble_mode_hamiltonian(0.05, 0.0, &atoms).unwrap();
        let g = build_generator(&h, GeneratorConvention::Decoupling);
        // gamma.F = 0: only the kinetic piece survives
        assert_eq!(g.matrix, g.kinetic());
        // beta O acts as sigma_x on the psi/chi split
        assert_eq!(g.matrix[(0, 1)], c(0.0));
        assert!((g.matrix[(0, 2)] - Complex64::new(0.0, -0.25 * 0.0025 / (1.02 * 1.02))).norm() < 1e-18);
        assert_eq!(g.matrix[(0, 2)], g.matrix[(2, 0)]);
        assert!(g.valid);
    }

    #[test]
    fn leading_commutator_cancels_odd_part() {
        // ||C (x) O + i[Lambda, H]_odd|| is second order
        let atoms = AtomPair::new(1.01, 0.99).unwrap();
        let mut prev = None;
        for s in [1e-3f64, 1e-4] {
            let h = assemble_mode_hamiltonian(s.sqrt(), s, &atoms).unwrap();
            let g = build_generator(&h, GeneratorConvention::Decoupling);
            let i = Complex64::i();
            let comm = (&g.matrix * &h.matrix - &h.matrix * &g.matrix) * i;
            let sum = &h.matrix + comm;
            let r = off_block_norm(&sum) / off_block_norm(&h.matrix);
            if let Some(p) = prev {
                let ratio: f64 = p / r;
                assert!((ratio - 10.0).abs() < 0.5, "{ratio}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn zero_inputs_have_zero_residual() {
        let atoms = AtomPair::new(1.0, 0.9).unwrap();
        let r = decoupling_residual(0.0, 0.0, &atoms, GeneratorConvention::Decoupling).unwrap();
        assert_eq!(r.r_before, 0.0);
        assert_eq!(r.r_after, 0.0);
    }

    #[test]
    fn residual_is_quadratic() {
        let atoms = AtomPair::new(1.01, 0.99).unwrap();
        let pts = residual_sweep(0.05, 0.002, &atoms, &[1e-3, 1e-4], GeneratorConvention::Decoupling).unwrap();
        let ratio = pts[0].r_after / pts[1].r_after;
        assert!((ratio / 100.0 - 1.0).abs() < 0.05, "{ratio}");
        for p in &pts {
            assert!(p.reduced_deviation <= p.lambda_max * p.lambda_max * p.h_norm);
        }
        let printed = residual_sweep(0.05, 0.002, &atoms, &[1e-3, 1e-4], GeneratorConvention::Printed).unwrap();
        assert!((log_log_slope(&printed) - 1.0).abs() < 0.05);
    }
}
