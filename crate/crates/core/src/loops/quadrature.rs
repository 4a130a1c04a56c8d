//! Globally adaptive Gauss-Kronrod (10/21) quadrature.

// node tables carry the full tabulated digits
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae; odd indices are the Gauss-10 nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_780,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kron = fc * WGK[10];
    let mut magnitude = fc.abs() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kron += WGK[j] * (f1 + f2);
        magnitude += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Segment {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
        magnitude: magnitude * half.abs(),
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol |I|)`.
///
/// The error estimate is the Gauss/Kronrod difference summed over segments.
/// Once it drops below the rounding floor `50 eps * int |f|` the result is
/// accepted regardless of the requested tolerance.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod(&f, a, b);
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;
    let mut magnitude = first.magnitude;
    let mut subdivisions = 0;

    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureNotConverged {
                value,
                error,
                subdivisions,
            });
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        let floor = 50.0 * f64::EPSILON * magnitude;
        if error <= target || error <= floor {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                value,
                error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval exhausted at machine resolution
            return Err(Error::QuadratureNotConverged {
                value,
                error,
                subdivisions,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
        // periodic exact resummation keeps the running totals honest
        if subdivisions % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
            magnitude = heap.iter().map(|s| s.magnitude).sum();
        }
    }
    let value_sum: f64 = heap.iter().map(|s| s.value).sum();
    let error_sum: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value: value_sum,
        error: error_sum,
        evaluations,
    })
}

/// [`integrate`] for an integrand that can fail; the first failure is returned.
pub fn try_integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = std::cell::RefCell::new(None);
    let r = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    r
}

/// Nested adaptive integration over the unit square, inner variable `y`.
pub fn integrate_unit_square<F>(f: F, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    let inner_opts = QuadOptions {
        rel_tol: opts.rel_tol * 1e-2,
        abs_tol: opts.abs_tol * 1e-2,
        ..opts
    };
    let failure = std::cell::RefCell::new(None);
    let evals = std::cell::Cell::new(0usize);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), 0.0, 1.0, inner_opts) {
            Ok(r) => {
                evals.set(evals.get() + r.evaluations);
                r.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer.map(|r| QuadResult {
        evaluations: evals.get(),
        ..r
    })
}

/// [`integrate_unit_square`] for an integrand that can fail.
pub fn try_integrate_unit_square<F>(f: F, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let inner_opts = QuadOptions {
        rel_tol: opts.rel_tol * 1e-2,
        abs_tol: opts.abs_tol * 1e-2,
        ..opts
    };
    try_integrate(
        |x| try_integrate(|y| f(x, y), 0.0, 1.0, inner_opts).map(|r| r.value),
        0.0,
        1.0,
        opts,
    )
}
