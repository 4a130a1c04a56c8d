//! Single-mode Jaynes-Cummings dynamics in a truncated Fock space.
//!
//! `H = Omega a^dag a + (omega12 / 2) sigma_z + g (sigma_+ a + sigma_- a^dag)`,
//! plus `g (sigma_+ a^dag + sigma_- a)` when the rotating-wave approximation
//! is switched off. Evolution is exact through the eigendecomposition of the
//! real symmetric matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::model::{AtomPair, DipoleTensor};

/// Default ceiling on the population of the highest Fock band.
pub const DEFAULT_LEAK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    omega: f64,
    volume: f64,
    z: f64,
}

impl CavityMode {
    pub fn new(omega: f64, volume: f64, z: f64) -> Result<Self> {
        ensure_positive("cavity Omega", omega)?;
        ensure_positive("cavity volume", volume)?;
        ensure_finite("cavity z", z)?;
        Ok(Self { omega, volume, z })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Wavenumber, equal to the frequency with `c = 1`.
    pub fn k(&self) -> f64 {
        self.omega
    }

    /// Electric field per photon, `sqrt(Omega / V)`.
    pub fn field_per_photon(&self) -> f64 {
        (self.omega / self.volume).sqrt()
    }
}

/// Rabi coupling `g = -gamma^{0x} E_Omega sin(K z) / sqrt(m1 m2)`.
pub fn rabi_coupling(gamma: &DipoleTensor, cavity: &CavityMode, atoms: &AtomPair) -> f64 {
    let s = (cavity.k() * cavity.z()).sin();
    -gamma.get(0, 1) * cavity.field_per_photon() * s / atoms.geometric_mass()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCParams {
    pub g: f64,
    pub omega12: f64,
    pub omega: f64,
    pub n_max: usize,
    pub rwa: bool,
}

impl JCParams {
    pub fn new(g: f64, omega12: f64, omega: f64, n_max: usize, rwa: bool) -> Result<Self> {
        let p = Self {
            g,
            omega12,
            omega,
            n_max,
            rwa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("g", self.g)?;
        ensure_finite("omega12", self.omega12)?;
        ensure_finite("Omega", self.omega)?;
        if self.n_max < 1 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.omega12 - self.omega
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn with_rwa(&self, rwa: bool) -> Self {
        Self { rwa, ..*self }
    }
}

/// Basis index of `|level, n>`: the upper level occupies `0..=n_max`,
/// the lower level the next `n_max + 1` slots.
pub fn basis_index(level: AtomLevel, n: usize, n_max: usize) -> usize {
    match level {
        AtomLevel::Upper => n,
        AtomLevel::Lower => n_max + 1 + n,
    }
}

pub fn build_hamiltonian(p: &JCParams) -> Result<DMatrix<f64>> {
    p.validate()?;
    let nm = p.n_max;
    let up = |n| basis_index(AtomLevel::Upper, n, nm);
    let lo = |n| basis_index(AtomLevel::Lower, n, nm);
    let mut h = DMatrix::zeros(p.dim(), p.dim());
    for n in 0..=nm {
        h[(up(n), up(n))] = n as f64 * p.omega + 0.5 * p.omega12;
        h[(lo(n), lo(n))] = n as f64 * p.omega - 0.5 * p.omega12;
    }
    for n in 0..nm {
        let c = p.g * ((n + 1) as f64).sqrt();
        // sigma_+ a
        h[(up(n), lo(n + 1))] = c;
        h[(lo(n + 1), up(n))] = c;
        if !p.rwa {
            // sigma_+ a^dag
            h[(up(n + 1), lo(n))] = c;
            h[(lo(n), up(n + 1))] = c;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JCState {
    n_max: usize,
    amplitudes: DVector<Complex64>,
}

impl JCState {
    pub fn basis(level: AtomLevel, n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidInput(format!("photon number {n} above n_max {n_max}")));
        }
        let mut amplitudes = DVector::zeros(2 * (n_max + 1));
        amplitudes[basis_index(level, n, n_max)] = Complex64::new(1.0, 0.0);
        Ok(Self { n_max, amplitudes })
    }

    pub fn from_amplitudes(n_max: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != 2 * (n_max + 1) {
            return Err(Error::InvalidInput("amplitude vector has the wrong length".into()));
        }
        let s = Self { n_max, amplitudes };
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "state is not normalized (norm {})",
                s.norm()
            )));
        }
        Ok(s)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, level: AtomLevel, n: usize) -> Complex64 {
        self.amplitudes[basis_index(level, n, self.n_max)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn level_population(&self, level: AtomLevel) -> f64 {
        (0..=self.n_max).map(|n| self.amplitude(level, n).norm_sqr()).sum()
    }

    /// `<sigma_z>`.
    pub fn inversion(&self) -> f64 {
        self.level_population(AtomLevel::Upper) - self.level_population(AtomLevel::Lower)
    }

    pub fn top_band_population(&self) -> f64 {
        self.amplitude(AtomLevel::Upper, self.n_max).norm_sqr()
            + self.amplitude(AtomLevel::Lower, self.n_max).norm_sqr()
    }

    pub fn expectation(&self, h: &DMatrix<f64>) -> f64 {
        let hc = h.map(|x| Complex64::new(x, 0.0));
        let hv = hc * &self.amplitudes;
        self.amplitudes.dotc(&hv).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCSample {
    pub t: f64,
    pub p_excited: f64,
    pub inversion: f64,
    pub norm: f64,
    pub energy: f64,
    pub top_band: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub samples: Vec<JCSample>,
    pub states: Vec<JCState>,
}

/// Exact propagator `exp(-i H t)` through a cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: JCParams,
    hamiltonian: DMatrix<f64>,
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(p: &JCParams) -> Result<Self> {
        let h = build_hamiltonian(p)?;
        let eig = SymmetricEigen::new(h.clone());
        Ok(Self {
            params: *p,
            hamiltonian: h,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        })
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    fn check_state(&self, state: &JCState) -> Result<()> {
        if state.n_max != self.params.n_max {
            return Err(Error::InvalidInput("state and Hamiltonian truncations differ".into()));
        }
        if (state.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "state is not normalized (norm {})",
                state.norm()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, state: &JCState, t: f64) -> Result<JCState> {
        self.check_state(state)?;
        let coeffs = self.vectors.adjoint() * &state.amplitudes;
        Ok(self.apply_coeffs(&coeffs, t))
    }

    fn apply_coeffs(&self, coeffs: &DVector<Complex64>, t: f64) -> JCState {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.energies.iter())
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        JCState {
            n_max: self.params.n_max,
            amplitudes: &self.vectors * phased,
        }
    }

    /// `dP_upper/dt = 2 Re sum_{i in upper} conj(psi_i) (-i H psi)_i`.
    fn excited_rate(&self, state: &JCState) -> f64 {
        let nm = self.params.n_max;
        let mut rate = 0.0;
        for n in 0..=nm {
            let i = basis_index(AtomLevel::Upper, n, nm);
            let h_psi: Complex64 = (0..state.amplitudes.len())
                .map(|j| state.amplitudes[j] * self.hamiltonian[(i, j)])
                .sum();
            rate += 2.0 * (state.amplitudes[i].conj() * Complex64::new(0.0, -1.0) * h_psi).re;
        }
        rate
    }
}

fn sample_times(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    ensure_finite("t", t_end)?;
    if t_end < 0.0 {
        return Err(Error::InvalidInput("evolution time must be non-negative".into()));
    }
    ensure_positive("dt_report", dt)?;
    let steps = (t_end / dt + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    if t_end - times[steps] > 1e-12 * t_end.max(1.0) {
        times.push(t_end);
    }
    Ok(times)
}

pub fn evolve(state: &JCState, p: &JCParams, t: f64, dt_report: f64) -> Result<Evolution> {
    evolve_with_threshold(state, p, t, dt_report, DEFAULT_LEAK_THRESHOLD)
}

/// Samples the exact evolution every `dt_report` up to `t`. Refuses to report
/// once the top Fock band holds more than `leak_threshold`.
pub fn evolve_with_threshold(
    state: &JCState,
    p: &JCParams,
    t: f64,
    dt_report: f64,
    leak_threshold: f64,
) -> Result<Evolution> {
    let prop = Propagator::new(p)?;
    prop.check_state(state)?;
    let times = sample_times(t, dt_report)?;
    let coeffs = prop.vectors.adjoint() * &state.amplitudes;
    let mut samples = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    for &ti in &times {
        let s = prop.apply_coeffs(&coeffs, ti);
        let top = s.top_band_population();
        if top > leak_threshold {
            return Err(Error::TruncationLeak {
                population: top,
                threshold: leak_threshold,
                time: ti,
            });
        }
        samples.push(JCSample {
            t: ti,
            p_excited: s.level_population(AtomLevel::Upper),
            inversion: s.inversion(),
            norm: s.norm(),
            energy: s.expectation(&prop.hamiltonian),
            top_band: top,
        });
        states.push(s);
    }
    Ok(Evolution { samples, states })
}

/// First time after leaving it that the excited population comes back to
/// its initial value (a stationary point of `P_e`).
///
/// A uniform scan with `scan_points` samples over `(0, t_max]` brackets the
/// return, which is then refined by bisection on `dP_e/dt`. `None` if the
/// population never leaves or never returns within `t_max`.
pub fn rabi_return_time(state: &JCState, p: &JCParams, t_max: f64, scan_points: usize) -> Result<Option<f64>> {
    ensure_positive("t_max", t_max)?;
    if scan_points < 8 {
        return Err(Error::InvalidInput("scan needs at least 8 points".into()));
    }
    let prop = Propagator::new(p)?;
    prop.check_state(state)?;
    let coeffs = prop.vectors.adjoint() * &state.amplitudes;
    let p0 = state.level_population(AtomLevel::Upper);
    let dist = |t: f64| (prop.apply_coeffs(&coeffs, t).level_population(AtomLevel::Upper) - p0).abs();
    let h = t_max / scan_points as f64;
    let d: Vec<f64> = (0..=scan_points).map(|k| dist(k as f64 * h)).collect();
    let peak = d.iter().cloned().fold(0.0, f64::max);
    if peak < 1e-9 {
        return Ok(None);
    }
    // the population has left once it is halfway to its largest excursion
    let Some(left) = d.iter().position(|&v| v > 0.5 * peak) else {
        return Ok(None);
    };
    let Some(j) = (left + 1..scan_points).find(|&j| d[j] <= d[j - 1] && d[j] <= d[j + 1] && d[j] < 0.5 * peak) else {
        return Ok(None);
    };
    let rate = |t: f64| prop.excited_rate(&prop.apply_coeffs(&coeffs, t));
    let (mut a, mut b) = ((j - 1) as f64 * h, (j + 1) as f64 * h);
    let (mut fa, fb) = (rate(a), rate(b));
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput(
            "return not bracketed; increase the scan resolution".into(),
        ));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = rate(m);
        if fm == 0.0 {
            return Ok(Some(m));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Largest `|P_e^full(t) - P_e^rwa(t)|` over `[0, t_span]`, sampled densely
/// enough to resolve the counter-rotating frequency `omega12 + Omega`.
pub fn rwa_discrepancy(state: &JCState, p: &JCParams, t_span: f64) -> Result<f64> {
    ensure_positive("t_span", t_span)?;
    let full = Propagator::new(&p.with_rwa(false))?;
    let rwa = Propagator::new(&p.with_rwa(true))?;
    full.check_state(state)?;
    let cf = full.vectors.adjoint() * &state.amplitudes;
    let cr = rwa.vectors.adjoint() * &state.amplitudes;
    let fast = (p.omega12.abs() + p.omega.abs()) / (2.0 * std::f64::consts::PI);
    let points = (t_span * fast * 64.0).ceil() as usize + 256;
    let mut worst: f64 = 0.0;
    for k in 0..=points {
        let t = t_span * k as f64 / points as f64;
        let sf = full.apply_coeffs(&cf, t);
        let top = sf.top_band_population();
        if top > DEFAULT_LEAK_THRESHOLD {
            return Err(Error::TruncationLeak {
                population: top,
                threshold: DEFAULT_LEAK_THRESHOLD,
                time: t,
            });
        }
        let pf = sf.level_population(AtomLevel::Upper);
        let pr = rwa.apply_coeffs(&cr, t).level_population(AtomLevel::Upper);
        worst = worst.max((pf - pr).abs());
    }
    Ok(worst)
}
