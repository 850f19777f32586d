//! Scalar statistics and least-squares polynomial fitting.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Relative size below which a diagonal entry of R counts as zero.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("value {0} is not strictly positive")]
    NonPositiveValue(f64),
    #[error("{distinct} distinct abscissae cannot determine a degree-{degree} polynomial")]
    InsufficientPoints { distinct: usize, degree: usize },
    #[error("design matrix is numerically singular")]
    DegenerateSystem,
    #[error("polynomial needs at least one finite coefficient")]
    InvalidPolynomial,
}

/// Polynomial with coefficients in ascending degree: c0 + c1·x + … + cd·x^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, NumericsError> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(NumericsError::InvalidPolynomial);
        }
        Ok(Polynomial { coefficients })
    }

    /// The zero polynomial of the given degree.
    pub fn zero(degree: usize) -> Self {
        Polynomial {
            coefficients: vec![0.0; degree + 1],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

/// One sample of the curve being fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub x: f64,
    pub y: f64,
}

impl FitPoint {
    pub fn new(x: f64, y: f64) -> Self {
        FitPoint { x, y }
    }
}

pub fn arithmetic_mean(values: &[f64]) -> Result<f64, NumericsError> {
    if values.is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFiniteInput);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// (∏ values)^(1/n), accumulated in log space.
pub fn geometric_mean(values: &[f64]) -> Result<f64, NumericsError> {
    if values.is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    let mut log_sum = 0.0;
    for &v in values {
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteInput);
        }
        if v <= 0.0 {
            return Err(NumericsError::NonPositiveValue(v));
        }
        log_sum += v.ln();
    }
    Ok((log_sum / values.len() as f64).exp())
}

pub fn polyeval(p: &Polynomial, x: f64) -> f64 {
    p.eval(x)
}

/// Sum of squared residuals of `p` over `points`.
pub fn residual_sum_of_squares(p: &Polynomial, points: &[FitPoint]) -> f64 {
    points
        .iter()
        .map(|pt| {
            let r = pt.y - p.eval(pt.x);
            r * r
        })
        .sum()
}

fn distinct_abscissae(points: &[FitPoint]) -> usize {
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}

/// Least-squares polynomial fit of the given degree.
///
/// Solves the Vandermonde system through a Householder QR factorization
/// (`R c = Qᵀ y`) instead of forming the normal equations.
pub fn polyfit_least_squares(
    points: &[FitPoint],
    degree: usize,
) -> Result<Polynomial, NumericsError> {
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(NumericsError::NonFiniteInput);
    }
    let distinct = distinct_abscissae(points);
    if distinct <= degree {
        return Err(NumericsError::InsufficientPoints { distinct, degree });
    }

    let cols = degree + 1;
    let design = DMatrix::from_fn(points.len(), cols, |r, c| points[r].x.powi(c as i32));
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.y));

    let qr = design.qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if scale == 0.0
        || r.diagonal()
            .iter()
            .any(|d| d.abs() <= RANK_TOLERANCE * scale)
    {
        return Err(NumericsError::DegenerateSystem);
    }
    let qt_y = qr.q().transpose() * rhs;
    let coefficients = r
        .solve_upper_triangular(&qt_y)
        .ok_or(NumericsError::DegenerateSystem)?;

    Polynomial::new(coefficients.iter().copied().collect())
        .map_err(|_| NumericsError::DegenerateSystem)
}
