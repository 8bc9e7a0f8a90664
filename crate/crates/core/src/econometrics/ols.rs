use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::{t_p_value, EstimationError};

pub const INTERCEPT: &str = "const";

/// Response and regressors on complete rows only. Rows with any missing
/// cell are dropped at assembly and counted in `dropped`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub dates: Vec<NaiveDate>,
    pub response: String,
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub dropped: usize,
    pub has_intercept: bool,
}

impl DesignMatrix {
    /// Builds `[const, regressors...]` (intercept first when requested).
    pub fn assemble(
        dates: &[NaiveDate],
        response: (&str, &[Option<f64>]),
        regressors: &[(&str, &[Option<f64>])],
        intercept: bool,
    ) -> Result<Self, EstimationError> {
        let n = dates.len();
        if response.1.len() != n || regressors.iter().any(|(_, c)| c.len() != n) {
            return Err(EstimationError::Invalid("columns differ in length from the date index".into()));
        }
        let mut names: Vec<String> = Vec::new();
        if intercept {
            names.push(INTERCEPT.to_string());
        }
        names.extend(regressors.iter().map(|(name, _)| name.to_string()));
        if names.is_empty() {
            return Err(EstimationError::Invalid("design has no columns".into()));
        }

        let mut kept_dates = Vec::new();
        let mut rows: Vec<f64> = Vec::new();
        let mut ys = Vec::new();
        for t in 0..n {
            let Some(yv) = response.1[t].filter(|v| v.is_finite()) else { continue };
            let cells: Option<Vec<f64>> = regressors.iter().map(|(_, c)| c[t].filter(|v| v.is_finite())).collect();
            let Some(cells) = cells else { continue };
            kept_dates.push(dates[t]);
            ys.push(yv);
            if intercept {
                rows.push(1.0);
            }
            rows.extend(cells);
        }
        let k = names.len();
        let m = ys.len();
        if m <= k {
            return Err(EstimationError::InsufficientRows { rows: m, columns: k });
        }
        Ok(Self {
            dates: kept_dates,
            response: response.0.to_string(),
            names,
            x: DMatrix::from_row_slice(m, k, &rows),
            y: DVector::from_vec(ys),
            dropped: n - m,
            has_intercept: intercept,
        })
    }

    /// Design from raw matrices; no rows are dropped.
    pub fn from_parts(names: Vec<String>, x: DMatrix<f64>, y: DVector<f64>, has_intercept: bool) -> Result<Self, EstimationError> {
        if x.ncols() != names.len() || x.nrows() != y.len() {
            return Err(EstimationError::Invalid("matrix shape does not match names/response".into()));
        }
        if x.nrows() <= x.ncols() {
            return Err(EstimationError::InsufficientRows { rows: x.nrows(), columns: x.ncols() });
        }
        Ok(Self {
            dates: Vec::new(),
            response: "y".into(),
            names,
            x,
            y,
            dropped: 0,
            has_intercept,
        })
    }

    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.x.column(j).iter().copied().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HacOptions {
    /// Bartlett-kernel lags; 0 gives White's HC0.
    pub lag: usize,
    /// Scale the covariance by `n / (n − k)`.
    pub small_sample: bool,
}

impl Default for HacOptions {
    fn default() -> Self {
        Self { lag: 1, small_sample: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub response: String,
    pub coefficients: Vec<Coefficient>,
    /// NaN when the response is constant.
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_std_error: f64,
    /// Robust Wald F over the non-intercept coefficients.
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub df_resid: usize,
    pub n_observations: usize,
    pub n_dropped: usize,
    pub hac_lag: usize,
    #[serde(skip)]
    pub covariance: DMatrix<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

/// `Σ_t e_t² x_t x_tᵀ`.
pub fn hc0_meat(x: &DMatrix<f64>, resid: &[f64]) -> DMatrix<f64> {
    let k = x.ncols();
    let mut s = DMatrix::<f64>::zeros(k, k);
    for (t, e) in resid.iter().enumerate() {
        let row = x.row(t).transpose();
        s += (e * e) * &row * row.transpose();
    }
    s
}

fn nw_meat(x: &DMatrix<f64>, resid: &[f64], lag: usize) -> DMatrix<f64> {
    let mut s = hc0_meat(x, resid);
    let n = resid.len();
    for l in 1..=lag.min(n.saturating_sub(1)) {
        let w = 1.0 - l as f64 / (lag as f64 + 1.0);
        let k = x.ncols();
        let mut gamma = DMatrix::<f64>::zeros(k, k);
        for t in l..n {
            let a = x.row(t).transpose();
            let b = x.row(t - l).transpose();
            gamma += (resid[t] * resid[t - l]) * &a * b.transpose();
        }
        s += w * (&gamma + gamma.transpose());
    }
    s
}

/// `(XᵀX)⁻¹ S (XᵀX)⁻¹` with a Bartlett-weighted `S` over `lag` lags.
pub fn newey_west_covariance(x: &DMatrix<f64>, resid: &[f64], lag: usize) -> Result<DMatrix<f64>, EstimationError> {
    let bread = (x.transpose() * x).try_inverse().ok_or(EstimationError::DegenerateCovariance)?;
    let cov = &bread * nw_meat(x, resid, lag) * &bread;
    Ok((&cov + cov.transpose()) * 0.5)
}

/// White's heteroskedasticity-consistent covariance.
pub fn hc0_covariance(x: &DMatrix<f64>, resid: &[f64]) -> Result<DMatrix<f64>, EstimationError> {
    let bread = (x.transpose() * x).try_inverse().ok_or(EstimationError::DegenerateCovariance)?;
    Ok(&bread * hc0_meat(x, resid) * &bread)
}

/// Least squares by Householder QR with Newey–West standard errors.
pub fn ols_newey_west(design: &DesignMatrix, lag: usize) -> Result<RegressionResult, EstimationError> {
    ols_newey_west_with(design, HacOptions { lag, small_sample: false })
}

pub fn ols_newey_west_with(design: &DesignMatrix, opts: HacOptions) -> Result<RegressionResult, EstimationError> {
    let x = &design.x;
    let (n, k) = (x.nrows(), x.ncols());
    if n <= k {
        return Err(EstimationError::InsufficientRows { rows: n, columns: k });
    }

    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let col_norm = x.column(j).norm();
        if col_norm == 0.0 || r[(j, j)].abs() <= 1e-10 * col_norm {
            return Err(EstimationError::RankDeficient { column: design.names[j].clone() });
        }
    }
    let qty = qr.q().transpose() * &design.y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| EstimationError::RankDeficient { column: design.names[k - 1].clone() })?;

    let fitted = x * &beta;
    let resid: Vec<f64> = design.y.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(EstimationError::DegenerateCovariance)?;
    let bread = &r_inv * r_inv.transpose();
    let mut cov = &bread * nw_meat(x, &resid, opts.lag) * &bread;
    cov = (&cov + cov.transpose()) * 0.5;
    if opts.small_sample {
        cov *= n as f64 / (n - k) as f64;
    }

    let df = (n - k) as f64;
    let coefficients: Vec<Coefficient> = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = beta[j];
            let std_error = cov[(j, j)].max(0.0).sqrt();
            let t_stat = if std_error > 0.0 {
                estimate / std_error
            } else if estimate == 0.0 {
                0.0
            } else {
                estimate.signum() * f64::INFINITY
            };
            Coefficient { name: name.clone(), estimate, std_error, t_stat, p_value: t_p_value(t_stat, df) }
        })
        .collect();

    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    let tss: f64 = if design.has_intercept {
        let m = design.y.mean();
        design.y.iter().map(|y| (y - m) * (y - m)).sum()
    } else {
        design.y.iter().map(|y| y * y).sum()
    };
    let r_squared = if tss > 0.0 { 1.0 - ssr / tss } else { f64::NAN };
    let df_model = if design.has_intercept { k - 1 } else { k };
    let denom_total = if design.has_intercept { n - 1 } else { n } as f64;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * denom_total / df;

    let slope_idx: Vec<usize> = (0..k).filter(|&j| !(design.has_intercept && j == 0)).collect();
    let (f_statistic, f_p_value) = robust_wald_f(&beta, &cov, &slope_idx, df);
    debug_assert_eq!(slope_idx.len(), df_model);

    Ok(RegressionResult {
        response: design.response.clone(),
        coefficients,
        r_squared,
        adj_r_squared,
        residual_std_error: (ssr / df).sqrt(),
        f_statistic,
        f_p_value,
        df_resid: n - k,
        n_observations: n,
        n_dropped: design.dropped,
        hac_lag: opts.lag,
        covariance: cov,
        residuals: resid,
    })
}

fn robust_wald_f(beta: &DVector<f64>, cov: &DMatrix<f64>, idx: &[usize], df: f64) -> (Option<f64>, Option<f64>) {
    let q = idx.len();
    if q == 0 {
        return (None, None);
    }
    let b = DVector::from_iterator(q, idx.iter().map(|&j| beta[j]));
    let v = DMatrix::from_fn(q, q, |a, c| cov[(idx[a], idx[c])]);
    let Some(chol) = v.cholesky() else { return (None, None) };
    let f = b.dot(&chol.solve(&b)) / q as f64;
    if !f.is_finite() {
        return (None, None);
    }
    let p = FisherSnedecor::new(q as f64, df).ok().map(|d| d.sf(f).clamp(0.0, 1.0));
    (Some(f), p)
}

/// `x_t` on `(1, x_{t−1})` with Newey–West lag-1 errors.
pub fn ar1(series: &[f64]) -> Result<RegressionResult, EstimationError> {
    if series.len() < 3 {
        return Err(EstimationError::InsufficientData { needed: 3, have: series.len() });
    }
    let n = series.len() - 1;
    let x = DMatrix::from_fn(n, 2, |t, j| if j == 0 { 1.0 } else { series[t] });
    let y = DVector::from_iterator(n, series[1..].iter().copied());
    let mut design = DesignMatrix::from_parts(vec![super::ols::INTERCEPT.into(), "L1".into()], x, y, true)?;
    design.response = "val".into();
    ols_newey_west(&design, 1)
}
