//! End-to-end acceptance checks, one PASS/FAIL line each.
//!
//! Criteria 3 and 5 compare against constants that disagree with the closed
//! forms the library reproduces to quadrature precision; they are run as stated
//! and reported FAIL. The process exits non-zero if any other criterion fails,
//! or if one of those two unexpectedly passes.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dipole_loop::grid::{GridSpec, Spacing};
use dipole_loop::jc::{basis_index, evolve, rabi_return_time, AtomLevel, JCParams, JCState};
use dipole_loop::loops::{master_integral, master_integral_by_quadrature, MasterIntegralKind, RegScheme};
use dipole_loop::model::{
    classify_renormalizability, engineering_dimension, on_shell_momentum, AtomPair, DipoleTensor, Interaction, Level,
    Metric,
};
use dipole_loop::nr::{log_log_slope, residual_sweep, GeneratorConvention};
use dipole_loop::renorm::{
    divergence_scan, photon_polarization, prefactor_report, vertex_integrals, wavefunction_z, ExpansionPath,
    ScanQuantity, ZGridOptions,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    GridSpec::new(lo, hi, n, Spacing::Log).unwrap().values()
}

fn equal_masses() -> AtomPair {
    AtomPair::degenerate(1.0).unwrap()
}

fn reg() -> RegScheme {
    RegScheme::new(1.0).unwrap()
}

fn scan(q: ScanQuantity, lambdas: &[f64]) -> dipole_loop::renorm::Scan {
    divergence_scan(
        q,
        lambdas,
        &equal_masses(),
        &reg(),
        ExpansionPath::Leading,
        &ZGridOptions::default(),
    )
    .unwrap()
}

fn c1_oracle() -> Verdict {
    let kinds = [
        MasterIntegralKind::A,
        MasterIntegralKind::B,
        MasterIntegralKind::C,
        MasterIntegralKind::D,
    ];
    let mut worst: f64 = 0.0;
    for kind in kinds {
        for lam in [1.0, 10.0, 100.0] {
            for r in [1e-3, 1e-2, 0.1, 0.3] {
                let s = (r * lam) * (r * lam);
                let closed = master_integral(kind, s, lam).unwrap();
                let quad = master_integral_by_quadrature(kind, s, lam, 1e-13).unwrap();
                worst = worst.max(((closed - quad) / quad).abs());
            }
        }
    }
    verdict(
        worst <= 1e-10,
        format!("max relative deviation {worst:.3e} (limit 1e-10) over 48 points"),
    )
}

fn c2_sigma_structure() -> Verdict {
    let s = scan(ScanQuantity::SigmaI, &log_grid(10.0, 1e3, 12));
    let n = s.fit.normalized;
    let (q, l, c) = (n[0].unwrap(), n[1].unwrap(), n[2].unwrap());
    let dev = (q - 1.0).abs().max((l + 2.0 / 3.0).abs()).max((c + 1.0 / 9.0).abs());
    verdict(
        dev <= 1e-2,
        format!("normalized ({q:.6}, {l:.6}, {c:.6}) vs (1, -2/3, -1/9), max deviation {dev:.3e} (limit 1e-2)"),
    )
}

fn c3_subtracted() -> Verdict {
    let lambdas = log_grid(100.0, 1e4, 12);
    let s = scan(ScanQuantity::WavefunctionScalar, &lambdas);
    let (log, cst) = (s.fit.c_log.unwrap(), s.fit.c_const.unwrap());
    let ratio = log / cst;
    let expected = (1.0 / 3.0) / (25.0 / 18.0);
    let rel = ((ratio - expected) / expected).abs();
    let atoms = equal_masses();
    let rest = on_shell_momentum(1.0, [0.0; 3]);
    let gamma = DipoleTensor::zero(Metric::minkowski4());
    let curvature = lambdas
        .iter()
        .map(|&l| {
            let r = RegScheme::new(l).unwrap();
            wavefunction_z(
                Level::One,
                &rest,
                &atoms,
                &gamma,
                &r,
                ExpansionPath::Leading,
                &ZGridOptions::default(),
            )
            .unwrap()
            .curvature_residual
        })
        .fold(0.0, f64::max);
    verdict(
        rel <= 2e-2 && curvature <= 1e-3,
        format!("ln/const ratio {ratio:.6} vs {expected:.6} (relative deviation {rel:.3e}, limit 2e-2); max curvature residual {curvature:.3e} (limit 1e-3)"),
    )
}

fn c4_vertex() -> Verdict {
    let s = scan(ScanQuantity::VertexScalar, &log_grid(100.0, 1e4, 12));
    let c = s.fit.normalized[2].unwrap();
    let v = vertex_integrals(0.0, &equal_masses(), &RegScheme::new(100.0).unwrap()).unwrap();
    let (sym, qq) = (v.c_sym / v.c_pp, v.c_qq / v.c_pp);
    let dev_log = (c + 0.5).abs() / 0.5;
    let dev_t = ((sym + 0.5).abs() / 0.5).max((qq - 1.0 / 3.0).abs() * 3.0);
    verdict(
        dev_log <= 2e-2 && dev_t <= 2e-2,
        format!(
            "ln:const = 1 : {c:.6}; tensor ratios 1 : {sym:.6} : {qq:.6} (max relative deviation {:.3e}, limit 2e-2)",
            dev_log.max(dev_t)
        ),
    )
}

fn c5_polarization() -> Verdict {
    let s = scan(ScanQuantity::Polarization, &log_grid(100.0, 1e4, 12));
    let c = s.fit.normalized[2].unwrap();
    let dev = (c - 1.0).abs();
    let metric = Metric::minkowski4();
    let atoms = AtomPair::new(1.0005, 0.9995).unwrap();
    let r = RegScheme::new(50.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        // spacelike or mildly timelike q keeps M^2(x) positive
        let q: Vec<f64> = (0..4)
            .map(|i| {
                if i == 0 {
                    rng.random_range(-0.5..0.5)
                } else {
                    rng.random_range(-2.0..2.0)
                }
            })
            .collect();
        let comps: Vec<f64> = (0..6).map(|_| rng.random_range(-0.1..0.1)).collect();
        let gamma = DipoleTensor::from_independent(metric, &comps).unwrap();
        let p = photon_polarization(&q, &atoms, &gamma, &r).unwrap();
        worst = worst.max(p.transversality_residual(&q, &metric));
    }
    verdict(
        dev <= 2e-2 && worst <= 1e-13,
        format!("ln:const = 1 : {c:.6} vs 1 : 1 (deviation {dev:.3e}, limit 2e-2); transversality {worst:.3e} over 100 draws (limit 1e-13)"),
    )
}

fn c6_prefactor() -> Verdict {
    let r = prefactor_report(
        &log_grid(10.0, 1e3, 12),
        &equal_masses(),
        &reg(),
        ExpansionPath::Leading,
    )
    .unwrap();
    verdict(
        r.relative_difference <= 1e-6,
        format!(
            "measured {:.10e}, quadrature {:.10e} (relative difference {:.3e}, limit 1e-6); ratio to 1/(2 pi)^3 = {:.8}",
            r.measured, r.oracle, r.relative_difference, r.ratio
        ),
    )
}

fn c7_jc() -> Verdict {
    let (g, n_max) = (0.02, 8);
    let p = JCParams::new(g, 1.0, 1.0, n_max, true).unwrap();
    let mut period_err: f64 = 0.0;
    for n in [0usize, 1, 5] {
        let s = JCState::basis(AtomLevel::Upper, n, n_max).unwrap();
        let expected = PI / (g * ((n + 1) as f64).sqrt());
        let t = rabi_return_time(&s, &p, 1.5 * expected, 4000).unwrap().unwrap();
        period_err = period_err.max(((t - expected) / expected).abs());
    }
    // superposition over the n = 0 and n = 1 blocks, evolved for 10 of the slowest periods
    let mut amps = DVector::from_element(p.dim(), Complex64::new(0.0, 0.0));
    amps[basis_index(AtomLevel::Upper, 0, n_max)] = Complex64::new(0.6, 0.0);
    amps[basis_index(AtomLevel::Lower, 1, n_max)] = Complex64::new(0.0, 0.48);
    amps[basis_index(AtomLevel::Upper, 1, n_max)] = Complex64::new(0.64, 0.0);
    let s = JCState::from_amplitudes(n_max, amps).unwrap();
    let span = 10.0 * PI / g;
    let ev = evolve(&s, &p, span, span / 997.0).unwrap();
    let block = |st: &JCState, n: usize| {
        st.amplitude(AtomLevel::Upper, n).norm_sqr() + st.amplitude(AtomLevel::Lower, n + 1).norm_sqr()
    };
    let mut drift: f64 = 0.0;
    let mut block_err: f64 = 0.0;
    for (x, st) in ev.samples.iter().zip(&ev.states) {
        drift = drift.max((x.norm - 1.0).abs());
        for n in 0..n_max {
            block_err = block_err.max((block(st, n) - block(&s, n)).abs());
        }
    }
    verdict(
        period_err <= 1e-6 && drift <= 1e-12 && block_err <= 1e-10,
        format!("period error {period_err:.3e} (limit 1e-6); norm drift {drift:.3e} (limit 1e-12); block drift {block_err:.3e} (limit 1e-10)"),
    )
}

fn c8_nr() -> Verdict {
    let atoms = AtomPair::new(1.0005, 0.9995).unwrap();
    let targets = log_grid(1e-4, 1e-2, 9);
    let pts = residual_sweep(0.01, 0.001, &atoms, &targets, GeneratorConvention::Decoupling).unwrap();
    let slope = log_log_slope(&pts);
    let worst = pts
        .iter()
        .map(|p| p.reduced_deviation / (p.lambda_max * p.lambda_max * p.h_norm))
        .fold(0.0, f64::max);
    verdict(
        (slope - 2.0).abs() <= 0.1 && worst <= 1.0,
        format!("log-log slope {slope:.4} (2 +/- 0.1); max reduced-block deviation {worst:.3e} of lambda^2 |H|"),
    )
}

fn c9_power_counting() -> Verdict {
    let expected = [
        (Interaction::PTilde, 2, (1, 2), "non_renormalizable"),
        (Interaction::PTilde, 3, (1, 1), "non_renormalizable"),
        (Interaction::P, 2, (-1, 2), "super"),
        (Interaction::P, 3, (0, 1), "marginal"),
    ];
    let mut bad = Vec::new();
    for (i, n, (num, den), class) in expected {
        let d = engineering_dimension(i, n).unwrap();
        let c = classify_renormalizability(i, n).unwrap();
        if d != num_rational::Ratio::new(num, den) || c.name() != class {
            bad.push(format!("{} n={n}: got {d} {}", i.name(), c.name()));
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            "4 of 4 assignments match".into()
        } else {
            bad.join("; ")
        },
    )
}

const COMMANDS: [&str; 9] = [
    "jc-evolve",
    "jc-rabi",
    "nr-reduce",
    "loop-selfenergy",
    "loop-vertex",
    "loop-polarization",
    "report-counterterms",
    "check-dims",
    "oracle-verify",
];

const DETERMINISM_CONFIG: &str = "\
jc.g = 1e-3
jc.n_max = 8
jc.t = 0:3000:61
jc.rabi_n = 0,1,5
nr.k = 0.005:0.02:3
nr.lambda = 1e-4:1e-2:5,log
loop.lambda = 30:300:3,log
loop.fit_lambda = 50:5000:12,log
loop.p_sq = -1:-0.2:3
";

fn run_all(bin: &Path, cfg: &Path, out: &Path, threads: &str) -> Result<(), String> {
    for c in COMMANDS {
        let status = Command::new(bin)
            .args([c, "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(out)
            .env("DIPOLE_LOOP_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!(
                "{c} exited with {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stderr)
            ));
        }
    }
    Ok(())
}

fn c10_determinism() -> Verdict {
    let bin = Path::new(env!("CARGO_BIN_EXE_dipole-loop"));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, DETERMINISM_CONFIG).unwrap();
    // the output directory is echoed into every file, so both runs use the same one
    let out = tmp.path().join("out");
    let snapshot = || -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&p).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    if let Err(e) = run_all(bin, &cfg, &out, "1") {
        return verdict(false, e);
    }
    let first = snapshot();
    std::fs::remove_dir_all(&out).unwrap();
    if let Err(e) = run_all(bin, &cfg, &out, "4") {
        return verdict(false, e);
    }
    let second = snapshot();
    let csvs = first.iter().filter(|(n, _)| n.ends_with(".csv")).count();
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let same_set = first.len() == second.len();
    verdict(
        same_set && differing.is_empty(),
        format!(
            "{} commands, {csvs} CSV files, 1 vs 4 threads; differing: {differing:?}",
            COMMANDS.len()
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "closed forms vs radial quadrature", c1_oracle),
        (2, "on-shell self-energy divergence structure", c2_sigma_structure),
        (3, "subtracted self-energy slope", c3_subtracted),
        (4, "vertex divergence and tensor ratios", c4_vertex),
        (5, "photon polarization", c5_polarization),
        (6, "prefactor vs quadrature", c6_prefactor),
        (7, "Jaynes-Cummings dynamics", c7_jc),
        (8, "non-relativistic decoupling", c8_nr),
        (9, "power counting", c9_power_counting),
        (10, "byte-identical reruns", c10_determinism),
    ];
    // constants these two compare against disagree with the closed forms
    let known_divergent = [3, 5];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "C{id} {status} {name}: {} [{:.1}s]",
            v.detail,
            start.elapsed().as_secs_f64()
        );
        if v.pass == known_divergent.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
