//! Daily series features: moving averages, multi-horizon returns, trailing
//! volatility and partial autocorrelation.

use std::io::Write;

use chrono::{Days, NaiveDate};
use thiserror::Error;

use crate::ingest::{MarketField, MarketSeries};

pub const DEFAULT_SMA_WINDOW: usize = 30;
pub const DEFAULT_EMA_ALPHA: f64 = 0.1;
pub const VOLATILITY_WINDOW: usize = 30;
/// Return horizons in days, named `Ret`, `Ret7`, … in output.
pub const RETURN_HORIZONS: [usize; 5] = [1, 7, 14, 21, 30];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("nonpositive price {price} at position {position}")]
    NonpositivePrice { position: usize, price: f64 },
    #[error("need more than {needed} observations, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("dates must be strictly increasing (position {0})")]
    UnorderedDates(usize),
    #[error("length mismatch: {0} dates vs {1} values")]
    LengthMismatch(usize, usize),
    #[error("{0}")]
    BadParameter(String),
}

/// Trailing mean over `window` observations, `None` until the window is full.
pub fn sma(series: &[f64], window: usize) -> Vec<Option<f64>> {
    assert!(window >= 1, "sma window must be at least 1");
    (0..series.len())
        .map(|t| {
            if t + 1 < window {
                return None;
            }
            let slice = &series[t + 1 - window..=t];
            // Deviations from the first element keep constant windows exact.
            let base = slice[0];
            let dev: f64 = slice.iter().map(|x| x - base).sum();
            Some(base + dev / window as f64)
        })
        .collect()
}

/// `y_1 = x_1`, `y_t = α·x_t + (1 − α)·y_{t−1}`.
pub fn ema(series: &[f64], alpha: f64) -> Vec<f64> {
    assert!(alpha > 0.0 && alpha <= 1.0, "ema alpha must lie in (0, 1]");
    if alpha == 1.0 {
        return series.to_vec();
    }
    let mut out = Vec::with_capacity(series.len());
    let mut prev: Option<f64> = None;
    for &x in series {
        let y = match prev {
            None => x,
            Some(p) => p + alpha * (x - p),
        };
        out.push(y);
        prev = Some(y);
    }
    out
}

fn check_prices(prices: &[Option<f64>]) -> Result<(), SeriesError> {
    for (position, p) in prices.iter().enumerate() {
        if let Some(price) = *p {
            if price <= 0.0 {
                return Err(SeriesError::NonpositivePrice { position, price });
            }
        }
    }
    Ok(())
}

/// Simple `k`-day returns `P_t / P_{t−k} − 1` on a gap-filled daily grid.
pub fn returns(prices: &[Option<f64>], horizon: usize) -> Result<Vec<Option<f64>>, SeriesError> {
    if horizon == 0 {
        return Err(SeriesError::BadParameter("return horizon must be at least 1".into()));
    }
    check_prices(prices)?;
    Ok((0..prices.len())
        .map(|t| match (t.checked_sub(horizon).and_then(|s| prices[s]), prices[t]) {
            (Some(prev), Some(cur)) => Some(cur / prev - 1.0),
            _ => None,
        })
        .collect())
}

/// Sample standard deviation (divisor n − 1) of the trailing 30 daily log
/// returns. Defined at `t ≥ 30` when all 31 prices are present.
pub fn volatility30(prices: &[Option<f64>]) -> Result<Vec<Option<f64>>, SeriesError> {
    check_prices(prices)?;
    let log_ret: Vec<Option<f64>> = (0..prices.len())
        .map(|t| match (t.checked_sub(1).and_then(|s| prices[s]), prices[t]) {
            (Some(prev), Some(cur)) => Some((cur / prev).ln()),
            _ => None,
        })
        .collect();
    let w = VOLATILITY_WINDOW;
    Ok((0..prices.len())
        .map(|t| {
            if t < w {
                return None;
            }
            let window: Option<Vec<f64>> = log_ret[t + 1 - w..=t].iter().copied().collect();
            window.map(|xs| sample_std(&xs))
        })
        .collect())
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() as f64 - 1.0)).sqrt()
}

/// Sample autocorrelations for lags `0..=max_lag` (demeaned, divisor n).
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>, SeriesError> {
    let n = series.len();
    if n <= max_lag + 1 {
        return Err(SeriesError::InsufficientData { needed: max_lag + 1, have: n });
    }
    let m = mean(series);
    let dev: Vec<f64> = series.iter().map(|x| x - m).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    if c0 == 0.0 {
        return Err(SeriesError::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|k| dev[k..].iter().zip(&dev[..n - k]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacfPoint {
    pub lag: usize,
    pub coefficient: f64,
    /// Half-width of the 95% band, `1.96/√n`.
    pub band: f64,
}

/// Partial autocorrelations for lags `1..=max_lag` by Durbin–Levinson.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<PacfPoint>, SeriesError> {
    let r = acf(series, max_lag)?;
    let band = 1.96 / (series.len() as f64).sqrt();
    let mut out = Vec::with_capacity(max_lag);
    let mut phi: Vec<f64> = Vec::new();
    for k in 1..=max_lag {
        let num = r[k] - (1..k).map(|j| phi[j - 1] * r[k - j]).sum::<f64>();
        let den = 1.0 - (1..k).map(|j| phi[j - 1] * r[j]).sum::<f64>();
        let kk = num / den;
        let mut next: Vec<f64> = (1..k).map(|j| phi[j - 1] - kk * phi[k - j - 1]).collect();
        next.push(kk);
        phi = next;
        out.push(PacfPoint { lag: k, coefficient: kk, band });
    }
    Ok(out)
}

/// A contiguous daily grid with optional values.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    pub start: NaiveDate,
    pub values: Vec<Option<f64>>,
}

impl DailySeries {
    /// Places `(date, value)` pairs on a gap-filled grid; dates must increase.
    pub fn from_pairs(dates: &[NaiveDate], values: &[Option<f64>]) -> Result<Self, SeriesError> {
        if dates.len() != values.len() {
            return Err(SeriesError::LengthMismatch(dates.len(), values.len()));
        }
        let Some(&start) = dates.first() else {
            return Ok(Self { start: NaiveDate::MIN, values: Vec::new() });
        };
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SeriesError::UnorderedDates(i + 1));
        }
        let span = (*dates.last().unwrap() - start).num_days() as usize + 1;
        let mut grid = vec![None; span];
        for (d, v) in dates.iter().zip(values) {
            grid[(*d - start).num_days() as usize] = *v;
        }
        Ok(Self { start, values: grid })
    }

    pub fn date_at(&self, i: usize) -> NaiveDate {
        self.start + Days::new(i as u64)
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        (0..self.values.len()).map(|i| self.date_at(i)).collect()
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        let offset = (date - self.start).num_days();
        if offset < 0 {
            return None;
        }
        self.values.get(offset as usize).copied().flatten()
    }
}

/// Daily decentralization index with its smoothed channels.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub dates: Vec<NaiveDate>,
    pub raw: Vec<f64>,
    pub sma: Vec<Option<f64>>,
    pub ema: Vec<f64>,
    pub sma_window: usize,
    pub ema_alpha: f64,
}

impl IndexSeries {
    pub fn new(dates: Vec<NaiveDate>, raw: Vec<f64>, sma_window: usize, ema_alpha: f64) -> Result<Self, SeriesError> {
        if dates.len() != raw.len() {
            return Err(SeriesError::LengthMismatch(dates.len(), raw.len()));
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SeriesError::UnorderedDates(i + 1));
        }
        if sma_window == 0 {
            return Err(SeriesError::BadParameter("sma window must be at least 1".into()));
        }
        if !(ema_alpha > 0.0 && ema_alpha <= 1.0) {
            return Err(SeriesError::BadParameter(format!("ema alpha {ema_alpha} outside (0, 1]")));
        }
        let sma = sma(&raw, sma_window);
        let ema = ema(&raw, ema_alpha);
        Ok(Self { dates, raw, sma, ema, sma_window, ema_alpha })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn channel(&self, channel: Channel) -> Vec<Option<f64>> {
        match channel {
            Channel::Raw => self.raw.iter().copied().map(Some).collect(),
            Channel::Sma => self.sma.clone(),
            Channel::Ema => self.ema.iter().copied().map(Some).collect(),
        }
    }

    pub fn to_frame(&self) -> Frame {
        let mut f = Frame::new(self.dates.clone());
        f.push("index", self.channel(Channel::Raw));
        f.push(&format!("sma{}", self.sma_window), self.sma.clone());
        f.push("ema", self.channel(Channel::Ema));
        f
    }
}

/// Index channel used as a dependent variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Raw,
    Sma,
    Ema,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Raw => "val",
            Channel::Sma => "sma30",
            Channel::Ema => "ema",
        }
    }

    /// Accepts the column names `val`, `sma30`, `ema` and the aliases `raw`, `index`, `sma`.
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "val" | "raw" | "index" => Some(Channel::Raw),
            "sma30" | "sma" => Some(Channel::Sma),
            "ema" => Some(Channel::Ema),
            _ => None,
        }
    }
}

/// Date-aligned named columns with explicit missing cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Frame {
    pub dates: Vec<NaiveDate>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
}

impl Frame {
    pub fn new(dates: Vec<NaiveDate>) -> Self {
        Self { dates, columns: Vec::new() }
    }

    pub fn push(&mut self, name: &str, values: Vec<Option<f64>>) {
        assert_eq!(values.len(), self.dates.len(), "column {name} has the wrong length");
        self.columns.push((name.to_string(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// CSV with a `date` column; missing cells are empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = String::from("date");
        for (name, _) in &self.columns {
            header.push(',');
            header.push_str(name);
        }
        writeln!(out, "{header}")?;
        for (i, d) in self.dates.iter().enumerate() {
            let mut line = d.format("%Y-%m-%d").to_string();
            for (_, col) in &self.columns {
                line.push(',');
                if let Some(v) = col[i] {
                    line.push_str(&v.to_string());
                }
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// `<prefix>_Ret…<prefix>_Ret30` and `<prefix>_VtyDayRet30d` on the market's
/// daily grid. Volatility comes from the file when present, else from prices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    pub prefix: String,
    pub frame: Frame,
}

pub fn return_column_name(prefix: &str, horizon: usize) -> String {
    if horizon == 1 {
        format!("{prefix}_Ret")
    } else {
        format!("{prefix}_Ret{horizon}")
    }
}

impl ReturnPanel {
    pub fn from_market(prefix: &str, market: &MarketSeries) -> Result<Self, SeriesError> {
        let grid = DailySeries::from_pairs(&market.dates(), &market.column(MarketField::PriceUSD))?;
        let mut frame = Frame::new(grid.dates());
        for h in RETURN_HORIZONS {
            frame.push(&return_column_name(prefix, h), returns(&grid.values, h)?);
        }
        let vol = if market.has(MarketField::VtyDayRet30d) {
            DailySeries::from_pairs(&market.dates(), &market.column(MarketField::VtyDayRet30d))?.values
        } else {
            volatility30(&grid.values)?
        };
        frame.push(&format!("{prefix}_VtyDayRet30d"), vol);
        Ok(Self { prefix: prefix.to_string(), frame })
    }

    pub fn return_columns(&self) -> Vec<&str> {
        self.frame.columns.iter().take(RETURN_HORIZONS.len()).map(|(n, _)| n.as_str()).collect()
    }
}
