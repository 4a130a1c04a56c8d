//! Least-squares extraction of divergent coefficients from a Lambda scan.

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_positive, Error, Result};

/// Largest accepted condition number of the column-scaled design matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Largest accepted `max |residual|` relative to the leading term at the top of the grid.
pub const MAX_RELATIVE_RESIDUAL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitTerm {
    /// `Lambda^2 / M^2`
    Quadratic,
    /// `ln(Lambda^2 / M^2)`
    Log,
    /// `1`
    Const,
}

impl FitTerm {
    fn eval(self, lambda: f64, mass_sq: f64) -> f64 {
        match self {
            FitTerm::Quadratic => lambda * lambda / mass_sq,
            FitTerm::Log => (lambda * lambda / mass_sq).ln(),
            FitTerm::Const => 1.0,
        }
    }
}

/// Basis `unit * {Lambda^2/M^2, ln(Lambda^2/M^2), 1}`, restricted to `terms`.
///
/// With `unit = M^2` the basis is `{Lambda^2, M^2 ln, M^2}`; with `unit = 1`
/// it suits dimensionless quantities. Coefficients are dimensionless either way.
#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub terms: Vec<FitTerm>,
    pub mass_sq: f64,
    pub unit: f64,
}

impl FitModel {
    pub fn mass_dimension_two(mass_sq: f64) -> Self {
        Self {
            terms: vec![FitTerm::Quadratic, FitTerm::Log, FitTerm::Const],
            mass_sq,
            unit: mass_sq,
        }
    }

    pub fn logarithmic(mass_sq: f64) -> Self {
        Self {
            terms: vec![FitTerm::Log, FitTerm::Const],
            mass_sq,
            unit: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceFit {
    pub c_quad: Option<f64>,
    pub c_log: Option<f64>,
    pub c_const: Option<f64>,
    /// Coefficients divided by `c_quad` (or `c_log` when there is no quadratic term).
    pub normalized: [Option<f64>; 3],
    /// `max |y - fit|`.
    pub fit_residual: f64,
    /// `fit_residual` over the leading fitted term at the largest Lambda.
    pub relative_residual: f64,
    pub condition: f64,
    pub lambda_grid: Vec<f64>,
    pub mass_sq: f64,
    pub unit: f64,
}

impl DivergenceFit {
    /// The fitted curve at `lambda`.
    pub fn evaluate(&self, lambda: f64) -> f64 {
        let terms = [
            (self.c_quad, FitTerm::Quadratic),
            (self.c_log, FitTerm::Log),
            (self.c_const, FitTerm::Const),
        ];
        terms
            .iter()
            .filter_map(|(c, t)| c.map(|c| c * self.unit * t.eval(lambda, self.mass_sq)))
            .sum()
    }
}

/// Solves `min |A c - y|` by SVD after scaling the columns of `A` to unit norm.
/// Returns the coefficients and the condition number of the scaled matrix.
pub(crate) fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let scales: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::FitRejected(
            "design matrix has a zero or non-finite column".into(),
        ));
    }
    let mut scaled = a.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::FitRejected(format!(
            "ill-conditioned design matrix (condition {condition:e})"
        )));
    }
    let c = svd
        .solve(y, 0.0)
        .map_err(|e| Error::FitRejected(format!("least squares failed: {e}")))?;
    let coeffs = DVector::from_iterator(c.len(), c.iter().zip(&scales).map(|(c, s)| c / s));
    Ok((coeffs, condition))
}

/// Fits `values[i]` measured at `lambdas[i]` to `model`.
///
/// Rejects grids spanning less than two decades, grids reaching below
/// `Lambda / M = 10`, and ill-conditioned or poorly fitting models.
pub fn divergence_fit(lambdas: &[f64], values: &[f64], model: &FitModel) -> Result<DivergenceFit> {
    ensure_positive("M^2", model.mass_sq)?;
    ensure_positive("fit unit", model.unit)?;
    if lambdas.len() != values.len() {
        return Err(Error::InvalidInput("lambda grid and values differ in length".into()));
    }
    if model.terms.is_empty() {
        return Err(Error::InvalidInput("fit model has no terms".into()));
    }
    if lambdas.len() < model.terms.len() + 1 {
        return Err(Error::FitRejected(format!(
            "{} grid points for {} coefficients",
            lambdas.len(),
            model.terms.len()
        )));
    }
    let m = model.mass_sq.sqrt();
    let (lo, hi) = lambdas.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
        (lo.min(l), hi.max(l))
    });
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::FitRejected("Lambda values must be positive and finite".into()));
    }
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::FitRejected(format!(
            "grid spans {:.3} decades, need at least 2",
            (hi / lo).log10()
        )));
    }
    if lo / m < 10.0 * (1.0 - 1e-12) {
        return Err(Error::FitRejected(format!(
            "grid starts at Lambda/M = {:.3}, need at least 10",
            lo / m
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitRejected("non-finite value in the scan".into()));
    }

    let a = DMatrix::from_fn(lambdas.len(), model.terms.len(), |i, j| {
        model.unit * model.terms[j].eval(lambdas[i], model.mass_sq)
    });
    let y = DVector::from_column_slice(values);
    let (c, condition) = least_squares(&a, &y)?;
    let fit_residual = (&y - &a * &c).amax();

    let coeff = |t: FitTerm| model.terms.iter().position(|x| *x == t).map(|j| c[j]);
    let (c_quad, c_log, c_const) = (coeff(FitTerm::Quadratic), coeff(FitTerm::Log), coeff(FitTerm::Const));
    let leading_term = model.terms[0];
    let leading = c[0] * model.unit * leading_term.eval(hi, model.mass_sq);
    let relative_residual = if leading != 0.0 {
        fit_residual / leading.abs()
    } else {
        f64::INFINITY
    };
    if !(relative_residual <= MAX_RELATIVE_RESIDUAL) {
        return Err(Error::FitRejected(format!(
            "residual {fit_residual:e} is {relative_residual:e} of the leading term"
        )));
    }
    let norm = c[0];
    let normalized = [
        c_quad.map(|v| v / norm),
        c_log.map(|v| v / norm),
        c_const.map(|v| v / norm),
    ];
    Ok(DivergenceFit {
        c_quad,
        c_log,
        c_const,
        normalized,
        fit_residual,
        relative_residual,
        condition,
        lambda_grid: lambdas.to_vec(),
        mass_sq: model.mass_sq,
        unit: model.unit,
    })
}

/// `y = f eps + c2 eps^2` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub curvature: f64,
    /// `|c2| max(eps) / |f|`.
    pub curvature_residual: f64,
}

pub(crate) fn slope_through_origin(eps: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let w = eps.iter().cloned().fold(0.0, f64::max);
    let a = DMatrix::from_fn(eps.len(), 2, |i, j| if j == 0 { eps[i] } else { eps[i] * eps[i] });
    let (c, _) = least_squares(&a, &DVector::from_column_slice(y))?;
    let curvature_residual = if c[0] != 0.0 {
        (c[1] * w / c[0]).abs()
    } else {
        f64::INFINITY
    };
    Ok(SlopeFit {
        slope: c[0],
        curvature: c[1],
        curvature_residual,
    })
}
