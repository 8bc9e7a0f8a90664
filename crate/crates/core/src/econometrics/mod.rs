//! Statistical inference used on the index series: least squares with
//! Newey–West errors, ADF stationarity tests, principal components of return
//! panels, Pearson tests and the event regression discontinuity design.

mod adf;
mod ols;
mod pca;
mod rdd;
pub mod table;

pub use adf::{adf_test, adf_test_with, mackinnon_critical_values, mackinnon_p_value, schwert_max_lag, AdfRegression, AdfResult, LagSelection};
pub use ols::{ar1, hc0_covariance, newey_west_covariance, ols_newey_west, ols_newey_west_with, Coefficient, DesignMatrix, HacOptions, RegressionResult};
pub use pca::{first_pc, FirstComponent};
pub use rdd::{market_controls, rdd, rdd_design, RddSpec, DEFAULT_CONTROL_SETS, KNOWN_CONTROLS};

use chrono::NaiveDate;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("design matrix is rank deficient: column `{column}` is collinear with earlier columns")]
    RankDeficient { column: String },
    #[error("{rows} complete rows cannot identify {columns} coefficients")]
    InsufficientRows { rows: usize, columns: usize },
    #[error("need at least {needed} observations, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("covariance matrix is degenerate")]
    DegenerateCovariance,
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("window {start}..={end} is not covered by `{series}`")]
    WindowNotCovered { series: String, start: NaiveDate, end: NaiveDate },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Significance stars at 0.1 / 0.05 / 0.01.
pub fn stars(p_value: f64) -> &'static str {
    if p_value < 0.01 {
        "***"
    } else if p_value < 0.05 {
        "**"
    } else if p_value < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Two-sided Student-t p-value; `t = ±∞` gives 0 and NaN is treated as no evidence.
pub(crate) fn t_p_value(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PearsonResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Sample correlation with a two-sided t-test on `n − 2` degrees of freedom.
pub fn pearson_test(x: &[f64], y: &[f64]) -> Result<PearsonResult, EstimationError> {
    if x.len() != y.len() {
        return Err(EstimationError::Invalid(format!("paired series differ in length ({} vs {})", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(EstimationError::InsufficientData { needed: 3, have: n });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EstimationError::ZeroVariance);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p_value = if r.abs() == 1.0 { 0.0 } else { t_p_value(r * (df / (1.0 - r * r)).sqrt(), df) };
    Ok(PearsonResult { r, p_value, n })
}
