//! Augmented Dickey–Fuller unit-root test.
//!
//! `Δy_t = γ·y_{t−1} + deterministic terms + Σ_{i=1}^{p} δ_i·Δy_{t−i} + ε_t`;
//! the statistic is the conventional OLS t-ratio of `γ`. With automatic lag
//! selection every candidate `p ≤ max_lag` is fitted on the same trimmed
//! sample, the lowest-AIC `p` is kept and the regression is refitted on the
//! full sample for that `p`. P-values come from MacKinnon's (1994) response
//! surface and critical values from MacKinnon (2010), single-series case.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::EstimationError;

pub const MIN_ADF_OBSERVATIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdfRegression {
    #[serde(rename = "n")]
    None,
    #[serde(rename = "c")]
    Constant,
    #[serde(rename = "ct")]
    ConstantTrend,
}

impl AdfRegression {
    fn deterministic_terms(self) -> usize {
        match self {
            AdfRegression::None => 0,
            AdfRegression::Constant => 1,
            AdfRegression::ConstantTrend => 2,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            AdfRegression::None => "n",
            AdfRegression::Constant => "c",
            AdfRegression::ConstantTrend => "ct",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "n" | "none" => Some(AdfRegression::None),
            "c" | "constant" => Some(AdfRegression::Constant),
            "ct" | "constant+trend" => Some(AdfRegression::ConstantTrend),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagSelection {
    /// AIC search up to the given bound, or the Schwert bound when `None`.
    Aic(Option<usize>),
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub used_lag: usize,
    pub n_obs: usize,
    /// 1%, 5% and 10% critical values.
    pub critical_values: [f64; 3],
    pub regression: AdfRegression,
    pub is_stationary_at_5pct: bool,
}

/// `⌊12·(n/100)^{1/4}⌋`.
pub fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

pub fn adf_test(series: &[f64], regression: AdfRegression) -> Result<AdfResult, EstimationError> {
    adf_test_with(series, regression, LagSelection::Aic(None))
}

struct Fit {
    gamma_t: f64,
    aic: f64,
}

/// Builds the ADF regression for `lags` lagged differences on the last `nobs`
/// usable observations and fits it by QR.
fn fit_adf(series: &[f64], regression: AdfRegression, lags: usize, nobs: usize) -> Result<Fit, EstimationError> {
    let n = series.len();
    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let det = regression.deterministic_terms();
    let k = 1 + lags + det;
    if nobs <= k {
        return Err(EstimationError::InsufficientData { needed: k + 1, have: nobs });
    }
    // Response Δy_t for t = n−nobs..n−1 (indices into the level series).
    let first = n - nobs;
    let x = DMatrix::from_fn(nobs, k, |row, col| {
        let t = first + row;
        match col {
            0 => series[t - 1],
            c if c <= lags => diff[t - 1 - c],
            c if c == lags + 1 => 1.0,
            _ => (row + 1) as f64,
        }
    });
    let y = DVector::from_fn(nobs, |row, _| diff[first + row - 1]);

    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)].abs() <= 1e-12 * x.column(j).norm().max(f64::MIN_POSITIVE) {
            return Err(EstimationError::RankDeficient { column: format!("adf column {j}") });
        }
    }
    let beta = r
        .solve_upper_triangular(&(qr.q().transpose() * &y))
        .ok_or(EstimationError::DegenerateCovariance)?;
    let resid = &y - &x * &beta;
    let ssr = resid.norm_squared();
    let sigma2 = ssr / (nobs - k) as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(EstimationError::DegenerateCovariance)?;
    let var_gamma = sigma2 * r_inv.row(0).norm_squared();
    let nobs_f = nobs as f64;
    let llf = -nobs_f / 2.0 * ((2.0 * std::f64::consts::PI).ln() + (ssr / nobs_f).ln() + 1.0);
    Ok(Fit { gamma_t: beta[0] / var_gamma.sqrt(), aic: -2.0 * llf + 2.0 * k as f64 })
}

pub fn adf_test_with(series: &[f64], regression: AdfRegression, lags: LagSelection) -> Result<AdfResult, EstimationError> {
    let n = series.len();
    if n < MIN_ADF_OBSERVATIONS {
        return Err(EstimationError::InsufficientData { needed: MIN_ADF_OBSERVATIONS, have: n });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(EstimationError::Invalid("ADF input contains non-finite values".into()));
    }
    let det = regression.deterministic_terms();
    let cap = (n / 2).saturating_sub(det + 1);

    let used_lag = match lags {
        LagSelection::Fixed(p) => {
            if p > cap {
                return Err(EstimationError::InsufficientData { needed: 2 * (p + det + 1), have: n });
            }
            p
        }
        LagSelection::Aic(bound) => {
            let max_lag = bound.unwrap_or_else(|| schwert_max_lag(n)).min(cap);
            // Common sample: drop max_lag + 1 leading observations.
            let nobs = n - 1 - max_lag;
            let mut best: Option<(f64, usize)> = None;
            let mut first_err = None;
            for p in 0..=max_lag {
                match fit_adf(series, regression, p, nobs) {
                    Ok(fit) => {
                        if best.is_none_or(|(aic, _)| fit.aic < aic) {
                            best = Some((fit.aic, p));
                        }
                    }
                    Err(e @ EstimationError::RankDeficient { .. }) => {
                        first_err.get_or_insert(e);
                    }
                    Err(e) => return Err(e),
                }
            }
            match (best, first_err) {
                (Some((_, p)), _) => p,
                (None, Some(e)) => return Err(e),
                (None, None) => 0,
            }
        }
    };

    let nobs = n - 1 - used_lag;
    let fit = fit_adf(series, regression, used_lag, nobs)?;
    let statistic = fit.gamma_t;
    let p_value = mackinnon_p_value(statistic, regression);
    Ok(AdfResult {
        statistic,
        p_value,
        used_lag,
        n_obs: nobs,
        critical_values: mackinnon_critical_values(regression, nobs),
        regression,
        is_stationary_at_5pct: p_value < 0.05,
    })
}

// MacKinnon (1994) response surface, one series.
// (tau_max, tau_min, tau_star, small-p poly, large-p poly); polys ascending.
struct Surface {
    max: f64,
    min: f64,
    star: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const SURFACE_NONE: Surface = Surface {
    max: f64::INFINITY,
    min: -19.04,
    star: -1.04,
    small: [0.6344, 1.2378, 3.2496e-2],
    large: [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
};
const SURFACE_CONSTANT: Surface = Surface {
    max: 2.74,
    min: -18.83,
    star: -1.61,
    small: [2.1659, 1.4412, 3.8269e-2],
    large: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};
const SURFACE_TREND: Surface = Surface {
    max: 0.7,
    min: -16.18,
    star: -2.89,
    small: [3.2512, 1.6047, 4.9588e-2],
    large: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

// MacKinnon (2010) critical-value polynomials in 1/T for 1%, 5%, 10%.
const CRIT_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.941, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const CRIT_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.04],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const CRIT_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.38],
];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Approximate asymptotic p-value of an ADF statistic.
pub fn mackinnon_p_value(statistic: f64, regression: AdfRegression) -> f64 {
    let s = match regression {
        AdfRegression::None => &SURFACE_NONE,
        AdfRegression::Constant => &SURFACE_CONSTANT,
        AdfRegression::ConstantTrend => &SURFACE_TREND,
    };
    if statistic > s.max {
        return 1.0;
    }
    if statistic < s.min {
        return 0.0;
    }
    let z = if statistic <= s.star { poly(&s.small, statistic) } else { poly(&s.large, statistic) };
    Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}

/// Finite-sample 1%, 5% and 10% critical values for `nobs` observations.
pub fn mackinnon_critical_values(regression: AdfRegression, nobs: usize) -> [f64; 3] {
    let table = match regression {
        AdfRegression::None => &CRIT_NONE,
        AdfRegression::Constant => &CRIT_CONSTANT,
        AdfRegression::ConstantTrend => &CRIT_TREND,
    };
    let inv = 1.0 / nobs as f64;
    table.map(|row| poly(&row, inv))
}
