//! The batch commands. Each returns its tables and a one-line summary.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jc::{evolve_with_threshold, rabi_coupling, rabi_return_time, AtomLevel, JCParams, JCState};
use crate::loops::{master_integral, master_integral_by_quadrature, symmetric_integration_moments, MasterIntegralKind};
use crate::model::{classify_renormalizability, engineering_dimension, on_shell_momentum, Interaction, Metric};
use crate::nr::{decoupling_residual, log_log_slope, residual_sweep};
use crate::renorm::{
    counterterm_report, divergence_scan, photon_exchange_kernel, photon_polarization, prefactor_report, self_energy,
    vertex_one_loop, wavefunction_z, ReportOptions, ScanQuantity,
};

use super::config::RunConfig;
use super::output::{coefficient_table, scan_table, Cell, Table};

pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub summary: String,
    /// Failed internal checks; non-empty only for `oracle-verify`.
    pub oracle_failures: Vec<String>,
    /// Extra plain-text artifact `(file name, contents)`.
    pub text: Option<(String, String)>,
}

impl CommandOutput {
    fn new(tables: Vec<Table>, summary: String) -> Self {
        Self {
            tables,
            summary,
            oracle_failures: Vec::new(),
            text: None,
        }
    }
}

fn jc_params(cfg: &RunConfig) -> Result<JCParams> {
    let g = cfg
        .jc
        .g
        .unwrap_or_else(|| rabi_coupling(&cfg.gamma, &cfg.cavity, &cfg.atoms));
    JCParams::new(g, cfg.atoms.omega12(), cfg.cavity.omega(), cfg.jc.n_max, cfg.jc.rwa)
}

pub fn jc_evolve(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = jc_params(cfg)?;
    let state = JCState::basis(cfg.jc.initial_level, cfg.jc.initial_n, cfg.jc.n_max)?;
    let t = &cfg.jc.t;
    let dt = t.stop / (t.count - 1) as f64;
    let ev = evolve_with_threshold(&state, &p, t.stop, dt, cfg.jc.leak_threshold)?;
    let mut table = Table::new(
        "jc-evolve",
        vec![
            "t [1/mass]",
            "p_excited [1]",
            "inversion [1]",
            "norm [1]",
            "energy [mass]",
            "top_band [1]",
        ],
    );
    let mut drift: f64 = 0.0;
    for s in &ev.samples {
        drift = drift.max((s.norm - 1.0).abs());
        table.push(vec![
            s.t.into(),
            s.p_excited.into(),
            s.inversion.into(),
            s.norm.into(),
            s.energy.into(),
            s.top_band.into(),
        ]);
    }
    let summary = format!(
        "jc-evolve: {} samples, g = {:e}, detuning = {:e}, max |norm - 1| = {drift:e}",
        ev.samples.len(),
        p.g,
        p.detuning()
    );
    Ok(CommandOutput::new(vec![table], summary))
}

pub fn jc_rabi(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = jc_params(cfg)?;
    let mut table = Table::new(
        "jc-rabi",
        vec![
            "n",
            "g [mass]",
            "detuning [mass]",
            "t_expected [1/mass]",
            "t_measured [1/mass]",
            "relative_error [1]",
        ],
    );
    let mut worst: f64 = 0.0;
    for &n in &cfg.jc.rabi_n {
        let state = JCState::basis(AtomLevel::Upper, n, cfg.jc.n_max)?;
        // P_e returns to 1 after half a generalized Rabi cycle
        let delta = p.detuning();
        let omega_n = 0.5 * (delta * delta + 4.0 * p.g * p.g * (n + 1) as f64).sqrt();
        let expected = std::f64::consts::PI / omega_n;
        let measured = rabi_return_time(&state, &p, 1.5 * expected, cfg.jc.rabi_scan_points)?;
        let err = measured.map(|m| ((m - expected) / expected).abs());
        if let Some(e) = err {
            worst = worst.max(e);
        }
        table.push(vec![
            n.into(),
            p.g.into(),
            delta.into(),
            expected.into(),
            measured.into(),
            err.into(),
        ]);
    }
    let summary = format!(
        "jc-rabi: {} photon numbers, worst relative error {worst:e}",
        cfg.jc.rabi_n.len()
    );
    Ok(CommandOutput::new(vec![table], summary))
}

pub fn nr_reduce(cfg: &RunConfig) -> Result<CommandOutput> {
    let ks = cfg.nr.k.values();
    let fs = cfg.nr.gamma_dot_f.values();
    let pairs: Vec<(f64, f64)> = ks.iter().flat_map(|&k| fs.iter().map(move |&f| (k, f))).collect();
    let conv = cfg.nr.convention;
    let points = pairs
        .par_iter()
        .map(|&(k, f)| decoupling_residual(k, f, &cfg.atoms, conv))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "nr-reduce",
        vec![
            "k [mass]",
            "gamma_dot_f [mass]",
            "lambda_max [1]",
            "r_before [mass]",
            "r_after [mass]",
            "reduced_deviation [mass]",
            "h_norm [mass]",
            "valid",
        ],
    );
    for ((k, f), r) in pairs.iter().zip(&points) {
        table.push(vec![
            (*k).into(),
            (*f).into(),
            r.lambda_max.into(),
            r.r_before.into(),
            r.r_after.into(),
            r.reduced_deviation.into(),
            r.h_norm.into(),
            r.valid.into(),
        ]);
    }
    let targets = cfg.nr.lambda.values();
    let sweep = residual_sweep(ks[0], fs[0], &cfg.atoms, &targets, conv)?;
    let mut slope_table = Table::new(
        "nr-reduce_sweep",
        vec![
            "lambda_target [1]",
            "lambda_max [1]",
            "r_after [mass]",
            "reduced_deviation [mass]",
            "h_norm [mass]",
        ],
    );
    for (t, r) in targets.iter().zip(&sweep) {
        slope_table.push(vec![
            (*t).into(),
            r.lambda_max.into(),
            r.r_after.into(),
            r.reduced_deviation.into(),
            r.h_norm.into(),
        ]);
    }
    let slope = if sweep.len() >= 2 {
        log_log_slope(&sweep)
    } else {
        f64::NAN
    };
    let summary = format!(
        "nr-reduce: {} points, {} convention, residual slope {slope:.4}",
        points.len(),
        conv.name()
    );
    Ok(CommandOutput::new(vec![table, slope_table], summary))
}

pub fn loop_selfenergy(cfg: &RunConfig) -> Result<CommandOutput> {
    let lc = &cfg.looping;
    let level = lc.level;
    let m = cfg.atoms.mass(level);
    let p = on_shell_momentum(m, lc.p_spatial);
    let p_sqs = lc.p_sq.map(|g| g.values()).unwrap_or_else(|| vec![-m * m]);
    let lambdas = lc.lambda.values();
    let rows = lambdas
        .par_iter()
        .map(|&lam| {
            let reg = lc.reg(lam)?;
            let z = wavefunction_z(level, &p, &cfg.atoms, &cfg.gamma, &reg, lc.path, &lc.z_grid);
            let mut out = Vec::new();
            for &p_sq in &p_sqs {
                let s = self_energy(level, p_sq, &p, &cfg.atoms, &cfg.gamma, &reg, lc.path)?;
                out.push((lam, s));
            }
            Ok((out, z))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "loop-selfenergy",
        vec![
            "level",
            "lambda [mass]",
            "p_sq [mass^2]",
            "sigma_i [mass^2]",
            "sigma_ii [mass^2]",
            "total [mass^2]",
            "on_shell_value [mass^2]",
            "scalar_integral [mass^2]",
            "tensor_integral [1]",
            "z_phi_inv [1]",
            "f_scalar [1/mass^2]",
            "f_tensor [1/mass^4]",
            "curvature_residual [1]",
        ],
    );
    let mut z_note = String::new();
    for (out, z) in &rows {
        let (z_inv, fs, ft, cr) = match z {
            Ok(z) => (
                Some(z.z_inv),
                Some(z.f_scalar),
                Some(z.f_tensor),
                Some(z.curvature_residual),
            ),
            Err(e) => {
                if z_note.is_empty() {
                    z_note = format!(" (Z not available: {e})");
                }
                (None, None, None, None)
            }
        };
        for (lam, s) in out {
            table.push(vec![
                level.index().into(),
                (*lam).into(),
                s.p_sq.into(),
                s.sigma_i.into(),
                s.sigma_ii.into(),
                s.total.into(),
                s.on_shell_value.into(),
                s.scalar_integral.into(),
                s.tensor_integral.into(),
                z_inv.into(),
                fs.into(),
                ft.into(),
                cr.into(),
            ]);
        }
    }
    let fit_lambdas = lc.fit_lambda.values();
    let reg = lc.reg(fit_lambdas[0])?;
    let sigma = divergence_scan(
        ScanQuantity::SigmaI,
        &fit_lambdas,
        &cfg.atoms,
        &reg,
        lc.path,
        &lc.z_grid,
    )?;
    let zs = divergence_scan(
        ScanQuantity::WavefunctionScalar,
        &fit_lambdas,
        &cfg.atoms,
        &reg,
        lc.path,
        &lc.z_grid,
    )?;
    let n = sigma.fit.normalized;
    let summary = format!(
        "loop-selfenergy: {} rows, sigma_i fit (1, {:.6}, {:.6}), z_phi log:const = 1 : {:.6}{z_note}",
        table.rows.len(),
        n[1].unwrap_or(f64::NAN),
        n[2].unwrap_or(f64::NAN),
        zs.fit.normalized[2].unwrap_or(f64::NAN)
    );
    let tables = vec![
        table,
        scan_table("loop-selfenergy_fit", &[&sigma, &zs]),
        coefficient_table("loop-selfenergy_coefficients", &[&sigma, &zs]),
    ];
    Ok(CommandOutput::new(tables, summary))
}

pub fn loop_vertex(cfg: &RunConfig) -> Result<CommandOutput> {
    let lc = &cfg.looping;
    let p = on_shell_momentum(cfg.atoms.m2(), lc.p_spatial);
    let pp = on_shell_momentum(cfg.atoms.m1(), lc.p_prime_spatial);
    let q: Vec<f64> = pp.iter().zip(&p).map(|(a, b)| a - b).collect();
    let lambdas = lc.lambda.values();
    let results = lambdas
        .par_iter()
        .map(|&lam| vertex_one_loop(&p, &pp, &q, &cfg.atoms, &cfg.gamma, &lc.reg(lam)?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "loop-vertex",
        vec![
            "lambda [mass]",
            "q_sq [mass^2]",
            "gamma_i [1]",
            "c_pp [1/mass^2]",
            "c_sym [1/mass^2]",
            "c_qq [1/mass^2]",
            "z1_inv_scalar [1]",
            "z1_inv_tensor [1]",
            "z1_inv [1]",
        ],
    );
    for (lam, v) in lambdas.iter().zip(&results) {
        let i = &v.integrals;
        table.push(vec![
            (*lam).into(),
            v.q_sq.into(),
            i.gamma_i.into(),
            i.c_pp.into(),
            i.c_sym.into(),
            i.c_qq.into(),
            v.z1_inv_scalar.into(),
            v.z1_inv_tensor.into(),
            v.z1_inv.into(),
        ]);
    }
    let fit_lambdas = lc.fit_lambda.values();
    let reg = lc.reg(fit_lambdas[0])?;
    let scan = divergence_scan(
        ScanQuantity::VertexScalar,
        &fit_lambdas,
        &cfg.atoms,
        &reg,
        lc.path,
        &lc.z_grid,
    )?;
    let first = &results[0].integrals;
    let summary = format!(
        "loop-vertex: {} rows, tensor ratios 1 : {:.6} : {:.6}, gamma_i log:const = 1 : {:.6}",
        results.len(),
        first.c_sym / first.c_pp,
        first.c_qq / first.c_pp,
        scan.fit.normalized[2].unwrap_or(f64::NAN)
    );
    let tables = vec![
        table,
        scan_table("loop-vertex_fit", &[&scan]),
        coefficient_table("loop-vertex_coefficients", &[&scan]),
    ];
    Ok(CommandOutput::new(tables, summary))
}

const PI_COLUMNS: [&str; 16] = [
    "pi_00", "pi_01", "pi_02", "pi_03", "pi_10", "pi_11", "pi_12", "pi_13", "pi_20", "pi_21", "pi_22", "pi_23",
    "pi_30", "pi_31", "pi_32", "pi_33",
];

pub fn loop_polarization(cfg: &RunConfig) -> Result<CommandOutput> {
    let lc = &cfg.looping;
    let q = lc.q;
    let metric = Metric::minkowski4();
    let lambdas = lc.lambda.values();
    let results = lambdas
        .par_iter()
        .map(|&lam| photon_polarization(&q, &cfg.atoms, &cfg.gamma, &lc.reg(lam)?))
        .collect::<Result<Vec<_>>>()?;
    let kernel = match photon_exchange_kernel(&q, &cfg.gamma) {
        Ok(k) => Some(k.value),
        Err(Error::PhotonPole) => None,
        Err(e) => return Err(e),
    };
    let mut header = vec![
        "lambda [mass]",
        "q_sq [mass^2]",
        "integral [1]",
        "transversality [1]",
        "exchange_kernel [1]",
    ];
    header.extend(PI_COLUMNS);
    let mut table = Table::new("loop-polarization", header);
    let mut worst: f64 = 0.0;
    for (lam, p) in lambdas.iter().zip(&results) {
        let tr = p.transversality_residual(&q, &metric);
        worst = worst.max(tr);
        let mut row: Vec<Cell> = vec![
            (*lam).into(),
            p.q_sq.into(),
            p.scalar_integral.into(),
            tr.into(),
            kernel.into(),
        ];
        for mu in 0..4 {
            for nu in 0..4 {
                row.push(p.tensor[(mu, nu)].into());
            }
        }
        table.push(row);
    }
    let fit_lambdas = lc.fit_lambda.values();
    let reg = lc.reg(fit_lambdas[0])?;
    let scan = divergence_scan(
        ScanQuantity::Polarization,
        &fit_lambdas,
        &cfg.atoms,
        &reg,
        lc.path,
        &lc.z_grid,
    )?;
    let summary = format!(
        "loop-polarization: {} rows, max transversality residual {worst:e}, log:const = 1 : {:.6}",
        results.len(),
        scan.fit.normalized[2].unwrap_or(f64::NAN)
    );
    let tables = vec![
        table,
        scan_table("loop-polarization_fit", &[&scan]),
        coefficient_table("loop-polarization_coefficients", &[&scan]),
    ];
    Ok(CommandOutput::new(tables, summary))
}

pub fn report_counterterms(cfg: &RunConfig) -> Result<CommandOutput> {
    let lc = &cfg.looping;
    let opts = ReportOptions {
        path: lc.path,
        p_spatial: lc.p_spatial,
        z_grid: lc.z_grid,
    };
    let lambdas = lc.lambda.values();
    let reports = lambdas
        .par_iter()
        .map(|&lam| counterterm_report(&cfg.atoms, &cfg.gamma, &lc.reg(lam)?, &opts))
        .collect::<Result<Vec<_>>>()?;
    let mut kv = Table::new("report-counterterms", vec!["lambda [mass]", "key", "value"]);
    let mut entries = Table::new(
        "report-counterterms_operators",
        vec!["lambda [mass]", "name", "class", "operator", "value"],
    );
    let mut text = String::new();
    for (lam, r) in lambdas.iter().zip(&reports) {
        text.push_str(&format!("[lambda = {}]\n", super::output::format_float(*lam)));
        for (k, v) in r.key_values() {
            text.push_str(&format!("{k} = {}\n", super::output::format_float(v)));
            kv.push(vec![(*lam).into(), k.into(), v.into()]);
        }
        for e in &r.entries {
            text.push_str(&format!(
                "counterterm.{}.{} = {}  # {}\n",
                e.class.name(),
                e.name,
                super::output::format_float(e.value),
                e.operator
            ));
            entries.push(vec![
                (*lam).into(),
                e.name.into(),
                e.class.name().into(),
                e.operator.into(),
                e.value.into(),
            ]);
        }
    }
    let fit_lambdas = lc.fit_lambda.values();
    let pre = prefactor_report(&fit_lambdas, &cfg.atoms, &lc.reg(fit_lambdas[0])?, lc.path)?;
    let mut prefactor = Table::new("report-counterterms_prefactor", vec!["key", "value"]);
    let lines = [
        ("prefactor.measured", pre.measured),
        ("prefactor.oracle", pre.oracle),
        ("prefactor.relative_difference", pre.relative_difference),
        ("prefactor.reference", pre.reference),
        ("prefactor.ratio", pre.ratio),
    ];
    text.push_str("[prefactor]\n");
    for (k, v) in lines {
        text.push_str(&format!("{k} = {}\n", super::output::format_float(v)));
        prefactor.push(vec![k.into(), v.into()]);
    }
    let summary = format!(
        "report-counterterms: {} cutoffs, {} new operators, prefactor {:.10e} (ratio {:.6} to 1/(2 pi)^3)",
        reports.len(),
        reports[0]
            .entries
            .iter()
            .filter(|e| e.class == crate::renorm::OperatorClass::New)
            .count(),
        pre.measured,
        pre.ratio
    );
    let tables = vec![
        kv,
        entries,
        prefactor,
        scan_table("report-counterterms_fit", &[&pre.closed_form, &pre.quadrature]),
        coefficient_table("report-counterterms_coefficients", &[&pre.closed_form, &pre.quadrature]),
    ];
    let mut out = CommandOutput::new(tables, summary);
    out.text = Some(("report-counterterms.txt".into(), text));
    Ok(out)
}

pub fn check_dims(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(
        "check-dims",
        vec!["interaction", "n", "dimension [length]", "dimension_value", "class"],
    );
    for &n in &cfg.dims {
        for i in [Interaction::PTilde, Interaction::P] {
            let d = engineering_dimension(i, n)?;
            let c = classify_renormalizability(i, n)?;
            let value = *d.numer() as f64 / *d.denom() as f64;
            table.push(vec![
                i.name().into(),
                n.into(),
                d.to_string().into(),
                value.into(),
                c.name().into(),
            ]);
        }
    }
    let summary = format!("check-dims: {} assignments", table.rows.len());
    Ok(CommandOutput::new(vec![table], summary))
}

/// Ratios `a / Lambda` and cutoffs of the closed-form suite.
pub const ORACLE_RATIOS: [f64; 4] = [1e-3, 1e-2, 0.1, 0.3];
pub const ORACLE_LAMBDAS: [f64; 3] = [1.0, 10.0, 100.0];
pub const ORACLE_TOLERANCE: f64 = 1e-10;

pub fn oracle_verify(_cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(
        "oracle-verify",
        vec![
            "check",
            "kind",
            "lambda [mass]",
            "a_over_lambda [1]",
            "closed_form",
            "reference",
            "error",
            "tolerance",
            "pass",
        ],
    );
    let mut failures = Vec::new();
    let mut record = |table: &mut Table,
                      check: &str,
                      kind: &str,
                      lam: Cell,
                      ratio: Cell,
                      closed: f64,
                      reference: f64,
                      err: f64,
                      tol: f64| {
        let pass = err <= tol;
        if !pass {
            failures.push(format!("{check} {kind}: error {err:e} above {tol:e}"));
        }
        table.push(vec![
            check.into(),
            kind.into(),
            lam,
            ratio,
            closed.into(),
            reference.into(),
            err.into(),
            tol.into(),
            pass.into(),
        ]);
    };
    for kind in MasterIntegralKind::ALL {
        for lam in ORACLE_LAMBDAS {
            for ratio in ORACLE_RATIOS {
                let a = ratio * lam;
                let s = a * a;
                let closed = master_integral(kind, s, lam)?;
                let quad = master_integral_by_quadrature(kind, s, lam, 1e-13)?;
                let err = ((closed - quad) / quad).abs();
                record(
                    &mut table,
                    "closed_vs_quadrature",
                    kind.name(),
                    lam.into(),
                    ratio.into(),
                    closed,
                    quad,
                    err,
                    ORACLE_TOLERANCE,
                );
            }
        }
        // strictly increasing in Lambda at fixed scale
        let vals: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 100.0]
            .iter()
            .map(|&l| master_integral(kind, 0.25, l))
            .collect::<Result<_>>()?;
        let worst_step = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let err = if worst_step > 0.0 { 0.0 } else { 1.0 };
        record(
            &mut table,
            "monotone_in_lambda",
            kind.name(),
            Cell::Empty,
            Cell::Empty,
            worst_step,
            0.0,
            err,
            0.0,
        );
    }
    let a2 = 0.3;
    let (m, diag_err) = symmetric_integration_moments(|u| 1.0 / ((u + a2) * (u + a2)), 3.0, 200_000, 7);
    let off = m.max_off_diagonal_sigma();
    record(
        &mut table,
        "symmetric_off_diagonal_sigma",
        "E",
        3.0.into(),
        Cell::Empty,
        off,
        0.0,
        off,
        4.0,
    );
    let diag = m.max_diagonal_sigma(&diag_err);
    record(
        &mut table,
        "symmetric_diagonal_sigma",
        "E",
        3.0.into(),
        Cell::Empty,
        diag,
        0.0,
        diag,
        3.0,
    );
    let summary = format!("oracle-verify: {} checks, {} failed", table.rows.len(), failures.len());
    let mut out = CommandOutput::new(vec![table], summary);
    out.oracle_failures = failures;
    Ok(out)
}
