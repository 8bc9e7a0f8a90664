//! Browser bindings for the decentralization index and LQRE curves.
//!
//! Every export has a plain Rust counterpart so the logic is testable natively.

use serde::Serialize;
use txentropy::index::{decentralization_index, gini, hhi, nakamoto, shannon_entropy_bits, weights, TransactionValues};
use txentropy::lqre::{lqre_index, LqreConfig};
use txentropy::svg::{LineChart, LineSeries};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueReport {
    pub transactions: usize,
    pub nonzero: usize,
    pub index: f64,
    pub entropy_bits: f64,
    pub gini: f64,
    pub hhi: f64,
    pub nakamoto_51: usize,
}

/// Parses numbers separated by whitespace, commas or semicolons.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number")))
        .collect()
}

pub fn analyze(text: &str) -> Result<ValueReport, String> {
    let values = parse_values(text)?;
    let tv = TransactionValues::new(values).map_err(|e| e.to_string())?;
    let dist = weights(&tv);
    Ok(ValueReport {
        transactions: tv.len(),
        nonzero: tv.positive_count(),
        index: decentralization_index(&tv).value(),
        entropy_bits: shannon_entropy_bits(&dist),
        gini: gini(&dist),
        hhi: hhi(&dist),
        nakamoto_51: nakamoto(&dist, 0.51).map_err(|e| e.to_string())?,
    })
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

fn lqre(n: usize, lambda: f64) -> Result<f64, String> {
    Ok(lqre_index(&LqreConfig::new(n, lambda).map_err(|e| e.to_string())?).value())
}

/// `(N, index)` pairs for `N` spread over `1..=n_max` at a fixed λ.
pub fn curve_over_n(lambda: f64, n_max: usize, points: usize) -> Result<Vec<(f64, f64)>, String> {
    let mut ns: Vec<usize> = grid(1.0, n_max.max(1) as f64, points).into_iter().map(|x| x.round() as usize).collect();
    ns.dedup();
    ns.into_iter().map(|n| Ok((n as f64, lqre(n, lambda)?))).collect()
}

/// `(λ, index)` pairs for λ spread over `0..=lambda_max` at a fixed N.
pub fn curve_over_lambda(n: usize, lambda_max: f64, points: usize) -> Result<Vec<(f64, f64)>, String> {
    grid(0.0, lambda_max, points).into_iter().map(|l| Ok((l, lqre(n, l)?))).collect()
}

/// Chart of index against N, one line per λ.
pub fn n_chart(lambdas: &[f64], n_max: usize, points: usize) -> Result<String, String> {
    let series = lambdas
        .iter()
        .map(|&l| Ok(LineSeries { name: format!("λ = {l}"), points: curve_over_n(l, n_max, points)? }))
        .collect::<Result<_, String>>()?;
    Ok(LineChart {
        title: "LQRE index against N".into(),
        x_label: "N".into(),
        y_label: "index".into(),
        series,
        x_is_date: false,
    }
    .render())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// JSON summary of a pasted list of transaction values.
#[wasm_bindgen(js_name = indexReport)]
pub fn index_report(text: &str) -> Result<String, JsError> {
    let report = analyze(text).map_err(js)?;
    serde_json::to_string(&report).map_err(|e| JsError::new(&e.to_string()))
}

/// Index values along the N axis; pairs are flattened as `[n0, h0, n1, h1, ...]`.
#[wasm_bindgen(js_name = lqreCurveN)]
pub fn lqre_curve_n(lambda: f64, n_max: usize, points: usize) -> Result<Vec<f64>, JsError> {
    Ok(curve_over_n(lambda, n_max, points).map_err(js)?.into_iter().flat_map(|(x, y)| [x, y]).collect())
}

/// Index values along the λ axis, flattened like [`lqre_curve_n`].
#[wasm_bindgen(js_name = lqreCurveLambda)]
pub fn lqre_curve_lambda(n: usize, lambda_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    Ok(curve_over_lambda(n, lambda_max, points).map_err(js)?.into_iter().flat_map(|(x, y)| [x, y]).collect())
}

/// SVG chart of index against N for comma-separated λ values.
#[wasm_bindgen(js_name = lqreChartSvg)]
pub fn lqre_chart_svg(lambdas: &str, n_max: usize, points: usize) -> Result<String, JsError> {
    let lambdas = parse_values(lambdas).map_err(js)?;
    n_chart(&lambdas, n_max, points).map_err(js)
}
