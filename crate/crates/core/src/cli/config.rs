//! Line-oriented `section.key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::grid::{GridSpec, Spacing};
use crate::jc::{AtomLevel, CavityMode, DEFAULT_LEAK_THRESHOLD};
use crate::loops::RegScheme;
use crate::model::{AtomPair, DipoleTensor, Metric, Quantity, UnitSystem};
use crate::nr::GeneratorConvention;
use crate::renorm::{ExpansionPath, ZGridOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// Finite float.
    Float,
    /// Float > 0.
    Positive,
    /// Integer >= the bound.
    Count(usize),
    Bool,
    Grid,
    /// Comma-separated list of `n` floats.
    Floats(usize),
    /// Non-empty comma-separated list of unsigned integers.
    Counts,
    Choice(&'static [&'static str]),
    /// Any non-empty text.
    Text,
}

struct KeySpec {
    key: &'static str,
    kind: Kind,
    /// `None`: optional with no default.
    default: Option<&'static str>,
}

const fn key(key: &'static str, kind: Kind, default: Option<&'static str>) -> KeySpec {
    KeySpec { key, kind, default }
}

/// Natural-unit dipole moment used when neither `dipole.moment` nor `dipole.tensor` is set.
pub const DEFAULT_DIPOLE_MOMENT: [f64; 3] = [0.01, 0.0, 0.0];

const SCHEMA: &[KeySpec] = &[
    key("units.mode", Kind::Choice(&["natural", "si"]), Some("natural")),
    key("units.energy_ev", Kind::Positive, Some("1")),
    key("atoms.m1", Kind::Positive, Some("1.0005")),
    key("atoms.m2", Kind::Positive, Some("0.9995")),
    key("dipole.moment", Kind::Floats(3), None),
    key("dipole.tensor", Kind::Floats(6), None),
    key("cavity.omega", Kind::Positive, Some("1e-3")),
    key("cavity.volume", Kind::Positive, Some("100")),
    key("cavity.z", Kind::Float, Some("1570.7963267948966")),
    key("jc.g", Kind::Float, None),
    key("jc.n_max", Kind::Count(1), Some("30")),
    key("jc.rwa", Kind::Bool, Some("true")),
    key("jc.initial_level", Kind::Choice(&["upper", "lower"]), Some("upper")),
    key("jc.initial_n", Kind::Count(0), Some("0")),
    key("jc.t", Kind::Grid, Some("0:200000:401")),
    key("jc.leak_threshold", Kind::Positive, Some("1e-8")),
    key("jc.rabi_n", Kind::Counts, Some("0,1,5")),
    key("jc.rabi_scan_points", Kind::Count(8), Some("4000")),
    key("nr.k", Kind::Grid, Some("0.01")),
    key("nr.gamma_dot_f", Kind::Grid, Some("0.001")),
    key("nr.lambda", Kind::Grid, Some("1e-4:1e-2:9,log")),
    key(
        "nr.convention",
        Kind::Choice(&["decoupling", "printed"]),
        Some("decoupling"),
    ),
    key("loop.lambda", Kind::Grid, Some("100")),
    key("loop.fit_lambda", Kind::Grid, Some("50:5000:13,log")),
    key(
        "loop.path",
        Kind::Choice(&["leading", "exact", "first_order"]),
        Some("leading"),
    ),
    key("loop.level", Kind::Choice(&["1", "2"]), Some("1")),
    key("loop.p_sq", Kind::Grid, None),
    key("loop.p_spatial", Kind::Floats(3), Some("0,0,0")),
    key("loop.p_prime_spatial", Kind::Floats(3), None),
    key("loop.q", Kind::Floats(4), Some("0.1,0.3,0,0")),
    key("loop.z_width", Kind::Positive, Some("1e-3")),
    key("loop.z_points", Kind::Count(3), Some("8")),
    key("loop.z_max_curvature", Kind::Positive, Some("1e-3")),
    key("tol.quad", Kind::Positive, Some("1e-10")),
    key("dims.n", Kind::Counts, Some("2,3")),
    key("output.dir", Kind::Text, None),
];

/// One configuration problem, tied to a line when it came from the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: ")?,
            None => f.write_str("config: ")?,
        }
        if let Some(k) = &self.key {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

/// Every problem found in one parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, PartialEq)]
pub struct JcConfig {
    /// Explicit Rabi coupling; derived from the dipole and cavity when absent.
    pub g: Option<f64>,
    pub n_max: usize,
    pub rwa: bool,
    pub initial_level: AtomLevel,
    pub initial_n: usize,
    pub t: GridSpec,
    pub leak_threshold: f64,
    pub rabi_n: Vec<usize>,
    pub rabi_scan_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrConfig {
    pub k: GridSpec,
    pub gamma_dot_f: GridSpec,
    pub lambda: GridSpec,
    pub convention: GeneratorConvention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    pub lambda: GridSpec,
    pub fit_lambda: GridSpec,
    pub path: ExpansionPath,
    pub level: crate::model::Level,
    pub p_sq: Option<GridSpec>,
    pub p_spatial: [f64; 3],
    pub p_prime_spatial: [f64; 3],
    pub q: [f64; 4],
    pub z_grid: ZGridOptions,
    pub quad_tol: f64,
}

impl LoopConfig {
    pub fn reg(&self, lambda: f64) -> crate::Result<RegScheme> {
        RegScheme::with_tol(lambda, self.quad_tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units: UnitSystem,
    pub atoms: AtomPair,
    pub gamma: DipoleTensor,
    pub cavity: CavityMode,
    pub jc: JcConfig,
    pub nr: NrConfig,
    pub looping: LoopConfig,
    pub dims: Vec<usize>,
    pub output_dir: Option<PathBuf>,
    /// Every key with the value in effect, explicit or default.
    pub resolved: BTreeMap<String, String>,
}

fn spec(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == key)
}

fn floats(v: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", parts.len()));
    }
    parts
        .iter()
        .map(|p| match p.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("cannot parse '{p}' as a finite number")),
        })
        .collect()
}

fn check(kind: Kind, v: &str) -> Result<(), String> {
    match kind {
        Kind::Float | Kind::Positive => {
            let x: f64 = v.parse().map_err(|_| format!("cannot parse '{v}' as a number"))?;
            if !x.is_finite() {
                return Err(format!("'{v}' is not finite"));
            }
            if kind == Kind::Positive && x <= 0.0 {
                return Err(format!("must be positive, got {v}"));
            }
        }
        Kind::Count(min) => {
            let n: usize = v
                .parse()
                .map_err(|_| format!("cannot parse '{v}' as a non-negative integer"))?;
            if n < min {
                return Err(format!("must be at least {min}, got {n}"));
            }
        }
        Kind::Bool => {
            if v != "true" && v != "false" {
                return Err(format!("expected true or false, got '{v}'"));
            }
        }
        Kind::Grid => {
            v.parse::<GridSpec>().map_err(|e| e.0)?;
        }
        Kind::Floats(n) => {
            floats(v, n)?;
        }
        Kind::Counts => {
            for p in v.split(',').map(str::trim) {
                p.parse::<usize>()
                    .map_err(|_| format!("cannot parse '{p}' as a non-negative integer"))?;
            }
        }
        Kind::Choice(opts) => {
            if !opts.contains(&v) {
                return Err(format!("expected one of {}, got '{v}'", opts.join(", ")));
            }
        }
        Kind::Text => {
            if v.is_empty() {
                return Err("value is empty".into());
            }
        }
    }
    Ok(())
}

/// Raw `key -> (value, line)` after syntax and per-key checks.
struct Entries {
    values: BTreeMap<String, (String, Option<usize>)>,
    errors: Vec<ConfigError>,
}

impl Entries {
    fn parse(text: &str) -> Self {
        let mut values = BTreeMap::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut errors = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                errors.push(ConfigError {
                    line: Some(line),
                    key: None,
                    message: format!("expected 'key = value', got '{content}'"),
                });
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            let err = |message: String| ConfigError {
                line: Some(line),
                key: Some(k.to_string()),
                message,
            };
            let Some(s) = spec(k) else {
                errors.push(err("unknown key".into()));
                continue;
            };
            if let Some(first) = seen.get(k) {
                errors.push(err(format!("duplicate key (first set on line {first})")));
                continue;
            }
            seen.insert(k.to_string(), line);
            if let Err(m) = check(s.kind, v) {
                errors.push(err(m));
                continue;
            }
            values.insert(k.to_string(), (v.to_string(), Some(line)));
        }
        Self { values, errors }
    }

    fn set_override(&mut self, key: &str, value: &str, source: &str) {
        let err = |message: String| ConfigError {
            line: None,
            key: Some(key.to_string()),
            message: format!("{source}: {message}"),
        };
        match spec(key) {
            None => self.errors.push(err("unknown key".into())),
            Some(s) => match check(s.kind, value) {
                Ok(()) => {
                    self.values.insert(key.to_string(), (value.to_string(), None));
                }
                Err(m) => self.errors.push(err(m)),
            },
        }
    }
}

/// Typed view with defaults filled in; collects constraint violations.
struct Resolver<'a> {
    entries: &'a Entries,
    errors: Vec<ConfigError>,
}

impl Resolver<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        match self.entries.values.get(key) {
            Some((v, _)) => Some(v.as_str()),
            None => spec(key).and_then(|s| s.default),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.values.get(key).and_then(|(_, l)| *l)
    }

    fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line: self.line(key),
            key: Some(key.to_string()),
            message: message.into(),
        });
    }

    // per-key syntax was checked on entry, so parse failures here cannot happen
    fn float(&self, key: &str) -> f64 {
        self.raw(key).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
    }

    fn opt_float(&self, key: &str) -> Option<f64> {
        self.raw(key).and_then(|v| v.parse().ok())
    }

    fn count(&self, key: &str) -> usize {
        self.raw(key).and_then(|v| v.parse().ok()).unwrap_or(0)
    }

    fn counts(&self, key: &str) -> Vec<usize> {
        self.raw(key)
            .map(|v| v.split(',').filter_map(|p| p.trim().parse().ok()).collect())
            .unwrap_or_default()
    }

    fn grid(&self, key: &str) -> Option<GridSpec> {
        self.raw(key).and_then(|v| v.parse().ok())
    }

    fn floats<const N: usize>(&self, key: &str) -> Option<[f64; N]> {
        self.raw(key)
            .and_then(|v| floats(v, N).ok())
            .and_then(|v| v.try_into().ok())
    }

    fn text(&self, key: &str) -> &str {
        self.raw(key).unwrap_or("")
    }
}

/// Parses and validates a configuration. Every problem is reported, each
/// with its line number when it comes from the text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    parse_config_with_overrides(text, &[])
}

/// As [`parse_config`], then applies `(key, value, source)` overrides before validation.
pub fn parse_config_with_overrides(text: &str, overrides: &[(&str, &str, &str)]) -> Result<RunConfig, ConfigErrors> {
    let mut entries = Entries::parse(text);
    for (k, v, src) in overrides {
        entries.set_override(k, v, src);
    }
    let mut errors = std::mem::take(&mut entries.errors);
    let mut r = Resolver {
        entries: &entries,
        errors: Vec::new(),
    };
    let cfg = build(&mut r);
    errors.append(&mut r.errors);
    match cfg {
        Some(cfg) if errors.is_empty() => Ok(cfg),
        _ => Err(ConfigErrors(errors)),
    }
}

fn build(r: &mut Resolver<'_>) -> Option<RunConfig> {
    let units = match r.text("units.mode") {
        "si" => match UnitSystem::si(r.float("units.energy_ev")) {
            Ok(u) => u,
            Err(e) => {
                r.fail("units.energy_ev", e.to_string());
                UnitSystem::natural()
            }
        },
        _ => UnitSystem::natural(),
    };
    let nat = |q: Quantity, v: f64| units.to_natural(q, v);

    let (m1, m2) = (
        nat(Quantity::Mass, r.float("atoms.m1")),
        nat(Quantity::Mass, r.float("atoms.m2")),
    );
    let atoms = match AtomPair::new(m1, m2) {
        Ok(a) => Some(a),
        Err(e) => {
            r.fail("atoms.m1", e.to_string());
            None
        }
    };

    let metric = Metric::minkowski4();
    let gamma = match (r.floats::<3>("dipole.moment"), r.floats::<6>("dipole.tensor")) {
        (Some(_), Some(_)) => {
            r.fail("dipole.tensor", "set either dipole.moment or dipole.tensor, not both");
            None
        }
        (None, Some(t)) => DipoleTensor::from_independent(metric, &t).ok(),
        (moment, None) => {
            // the built-in default is in natural units whatever units.mode says
            let d = match moment {
                Some(m) => m.map(|x| nat(Quantity::DipoleMoment, x)),
                None => DEFAULT_DIPOLE_MOMENT,
            };
            atoms.as_ref().and_then(|a| match DipoleTensor::from_moment(&d, a) {
                Ok(g) => Some(g),
                Err(e) => {
                    r.fail("dipole.moment", e.to_string());
                    None
                }
            })
        }
    };

    let cavity = match CavityMode::new(
        nat(Quantity::AngularFrequency, r.float("cavity.omega")),
        nat(Quantity::Volume, r.float("cavity.volume")),
        nat(Quantity::Length, r.float("cavity.z")),
    ) {
        Ok(c) => Some(c),
        Err(e) => {
            r.fail("cavity.omega", e.to_string());
            None
        }
    };

    let t = r.grid("jc.t")?;
    if t.count < 2 || t.spacing != Spacing::Linear || t.start != 0.0 || !(t.stop > 0.0) {
        r.fail(
            "jc.t",
            "time grid must be linear, start at 0, end above 0 and have at least 2 points",
        );
    }
    let rabi_n = r.counts("jc.rabi_n");
    let n_max = r.count("jc.n_max");
    let initial_n = r.count("jc.initial_n");
    if initial_n > n_max {
        r.fail(
            "jc.initial_n",
            format!("initial photon number {initial_n} exceeds jc.n_max = {n_max}"),
        );
    }
    if let Some(&n) = rabi_n.iter().find(|&&n| n >= n_max) {
        r.fail(
            "jc.rabi_n",
            format!("photon number {n} needs jc.n_max above it (jc.n_max = {n_max})"),
        );
    }
    let jc = JcConfig {
        g: r.opt_float("jc.g"),
        n_max,
        rwa: r.text("jc.rwa") == "true",
        initial_level: if r.text("jc.initial_level") == "lower" {
            AtomLevel::Lower
        } else {
            AtomLevel::Upper
        },
        initial_n,
        t,
        leak_threshold: r.opt_float("jc.leak_threshold").unwrap_or(DEFAULT_LEAK_THRESHOLD),
        rabi_n,
        rabi_scan_points: r.count("jc.rabi_scan_points"),
    };

    let nr = NrConfig {
        k: r.grid("nr.k")?,
        gamma_dot_f: r.grid("nr.gamma_dot_f")?,
        lambda: r.grid("nr.lambda")?,
        convention: if r.text("nr.convention") == "printed" {
            GeneratorConvention::Printed
        } else {
            GeneratorConvention::Decoupling
        },
    };
    if nr.lambda.values().iter().any(|v| *v <= 0.0) {
        r.fail("nr.lambda", "lambda targets must be positive");
    }

    let lambda = r.grid("loop.lambda")?;
    if lambda.values().iter().any(|v| *v <= 0.0) {
        r.fail("loop.lambda", "cutoffs must be positive");
    }
    let fit_lambda = r.grid("loop.fit_lambda")?;
    if fit_lambda.values().iter().any(|v| *v <= 0.0) {
        r.fail("loop.fit_lambda", "cutoffs must be positive");
    }
    let p_spatial = r.floats::<3>("loop.p_spatial")?;
    let looping = LoopConfig {
        lambda,
        fit_lambda,
        path: r.text("loop.path").parse().ok()?,
        level: if r.text("loop.level") == "2" {
            crate::model::Level::Two
        } else {
            crate::model::Level::One
        },
        p_sq: r.grid("loop.p_sq"),
        p_spatial,
        p_prime_spatial: r.floats::<3>("loop.p_prime_spatial").unwrap_or(p_spatial),
        q: r.floats::<4>("loop.q")?,
        z_grid: ZGridOptions {
            width: r.float("loop.z_width"),
            points: r.count("loop.z_points"),
            max_curvature: r.float("loop.z_max_curvature"),
        },
        quad_tol: r.float("tol.quad"),
    };

    let dims = r.counts("dims.n");
    if let Some(&n) = dims.iter().find(|&&n| n != 2 && n != 3) {
        r.fail("dims.n", format!("spatial dimension {n} is not supported (2 or 3)"));
    }

    let mut resolved: BTreeMap<String, String> = SCHEMA
        .iter()
        .filter_map(|s| r.raw(s.key).map(|v| (s.key.to_string(), v.to_string())))
        .collect();
    if !resolved.contains_key("dipole.moment") && !resolved.contains_key("dipole.tensor") {
        let d = DEFAULT_DIPOLE_MOMENT.map(|x| x.to_string()).join(",");
        resolved.insert("dipole.moment".into(), format!("{d} (natural)"));
    }
    Some(RunConfig {
        units,
        atoms: atoms?,
        gamma: gamma?,
        cavity: cavity?,
        jc,
        nr,
        looping,
        dims,
        output_dir: r.raw("output.dir").map(PathBuf::from),
        resolved,
    })
}
