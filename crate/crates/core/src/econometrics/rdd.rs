//! Sharp regression discontinuity in time around a protocol event:
//! `Y = α0 + α1·EIP + α2·Day + α3·EIP·Day + α4·Z + ε`.

use std::collections::HashMap;

use chrono::{Days, NaiveDate};

use super::{ols_newey_west_with, DesignMatrix, EstimationError, HacOptions, RegressionResult};
use crate::ingest::{MarketField, MarketSeries};
use crate::timeseries::{returns, volatility30, Channel, DailySeries, IndexSeries};

/// Nested control sets of the three reported models.
pub const DEFAULT_CONTROL_SETS: [&[&str]; 3] = [
    &[],
    &["TxTfrValAdjUSD", "TxTfrCnt"],
    &["TxTfrValAdjUSD", "TxTfrCnt", "ROI", "VtyDayRet30d"],
];

pub const KNOWN_CONTROLS: [&str; 4] = ["TxTfrValAdjUSD", "TxTfrCnt", "ROI", "VtyDayRet30d"];

#[derive(Debug, Clone, PartialEq)]
pub struct RddSpec {
    pub event: NaiveDate,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub channel: Channel,
    pub controls: Vec<String>,
}

impl RddSpec {
    pub fn new(
        event: NaiveDate,
        start: NaiveDate,
        end: NaiveDate,
        channel: Channel,
        controls: &[&str],
    ) -> Result<Self, EstimationError> {
        if !(start < event && event <= end) {
            return Err(EstimationError::Invalid(format!("need start < event <= end, got {start} / {event} / {end}")));
        }
        if let Some(bad) = controls.iter().find(|c| !KNOWN_CONTROLS.contains(c)) {
            return Err(EstimationError::Invalid(format!("unknown control `{bad}`")));
        }
        Ok(Self { event, start, end, channel, controls: controls.iter().map(|c| c.to_string()).collect() })
    }

    /// London hard fork (2021-08-05) with the 2021-07-25..=2021-08-27 window.
    pub fn london_hardfork(channel: Channel, controls: &[&str]) -> Self {
        let d = |m, day| NaiveDate::from_ymd_opt(2021, m, day).expect("valid date");
        Self::new(d(8, 5), d(7, 25), d(8, 27), channel, controls).expect("static window is ordered")
    }

    pub fn window_dates(&self) -> Vec<NaiveDate> {
        let days = (self.end - self.start).num_days() as u64;
        (0..=days).map(|i| self.start + Days::new(i)).collect()
    }
}

/// Control columns on the market's daily grid: volume and count as given,
/// `ROI` as the one-day simple return of `PriceUSD`, and `VtyDayRet30d` from
/// the file or, when absent, from prices.
pub fn market_controls(market: &MarketSeries) -> Result<(DailySeries, HashMap<&'static str, Vec<Option<f64>>>), EstimationError> {
    let dates = market.dates();
    let on_grid = |field| {
        DailySeries::from_pairs(&dates, &market.column(field)).map_err(|e| EstimationError::Invalid(e.to_string()))
    };
    let price = on_grid(MarketField::PriceUSD)?;
    let mut cols = HashMap::new();
    cols.insert("TxTfrValAdjUSD", on_grid(MarketField::TxTfrValAdjUSD)?.values);
    cols.insert("TxTfrCnt", on_grid(MarketField::TxTfrCnt)?.values);
    cols.insert("ROI", returns(&price.values, 1).map_err(|e| EstimationError::Invalid(e.to_string()))?);
    let vol = if market.has(MarketField::VtyDayRet30d) {
        on_grid(MarketField::VtyDayRet30d)?.values
    } else {
        volatility30(&price.values).map_err(|e| EstimationError::Invalid(e.to_string()))?
    };
    cols.insert("VtyDayRet30d", vol);
    Ok((price, cols))
}

/// Assembles the discontinuity design over the window of `spec`.
pub fn rdd_design(spec: &RddSpec, index: &IndexSeries, market: &MarketSeries) -> Result<DesignMatrix, EstimationError> {
    let not_covered = |series: &str| EstimationError::WindowNotCovered { series: series.into(), start: spec.start, end: spec.end };
    match (index.dates.first(), index.dates.last()) {
        (Some(&first), Some(&last)) if first <= spec.start && last >= spec.end => {}
        _ => return Err(not_covered("index")),
    }
    if !spec.controls.is_empty() {
        match (market.first_date(), market.last_date()) {
            (Some(first), Some(last)) if first <= spec.start && last >= spec.end => {}
            _ => return Err(not_covered("market")),
        }
    }

    let dates = spec.window_dates();
    let channel = index.channel(spec.channel);
    let by_date: HashMap<NaiveDate, Option<f64>> = index.dates.iter().copied().zip(channel).collect();
    let y: Vec<Option<f64>> = dates.iter().map(|d| by_date.get(d).copied().flatten()).collect();

    let day: Vec<Option<f64>> = dates.iter().map(|d| Some((*d - spec.event).num_days() as f64)).collect();
    let eip: Vec<Option<f64>> = dates.iter().map(|d| Some(if *d >= spec.event { 1.0 } else { 0.0 })).collect();
    let eip_day: Vec<Option<f64>> = eip.iter().zip(&day).map(|(e, d)| Some(e.unwrap() * d.unwrap())).collect();

    let mut columns: Vec<(String, Vec<Option<f64>>)> =
        vec![("EIP".into(), eip), ("Day".into(), day), ("EIP_Day".into(), eip_day)];
    if !spec.controls.is_empty() {
        let (grid, controls) = market_controls(market)?;
        for name in &spec.controls {
            let col = &controls[name.as_str()];
            let values = dates
                .iter()
                .map(|d| {
                    let off = (*d - grid.start).num_days();
                    if off < 0 { None } else { col.get(off as usize).copied().flatten() }
                })
                .collect();
            columns.push((name.clone(), values));
        }
    }
    let regressors: Vec<(&str, &[Option<f64>])> = columns.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
    DesignMatrix::assemble(&dates, (spec.channel.name(), &y), &regressors, true)
}

pub fn rdd(spec: &RddSpec, index: &IndexSeries, market: &MarketSeries, hac: HacOptions) -> Result<RegressionResult, EstimationError> {
    ols_newey_west_with(&rdd_design(spec, index, market)?, hac)
}
