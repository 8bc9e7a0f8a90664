//! End-to-end commands: daily index files, LQRE sweeps, market regressions and
//! the event discontinuity. Each writes under `RunConfig::out_dir` and appends
//! a provenance footer (input digests, flags, seed) to every table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, TokenEntry};
use crate::econometrics::table::{coefficient_csv_rows, render_feature_table, render_text_table, COEFFICIENT_CSV_HEADER};
use crate::econometrics::{
    adf_test_with, ar1, first_pc, ols_newey_west_with, pearson_test, rdd, AdfResult, DesignMatrix, EstimationError,
    HacOptions, PearsonResult, RddSpec, LagSelection, RegressionResult, DEFAULT_CONTROL_SETS,
};
use crate::index::{decentralization_index, IndexError};
use crate::ingest::{parse_market, parse_transfers, window_daily, DateBounds, IngestError, MarketField, MarketSeries, TransferSchema};
use crate::lqre::{even_counts, even_reals, sweep, write_sweep_csv, LqreError, SweepGrid, SweepRow};
use crate::svg::{LineChart, LineSeries};
use crate::timeseries::{pacf, Channel, Frame, IndexSeries, ReturnPanel, SeriesError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{context}: {source}")]
    Series {
        context: String,
        #[source]
        source: SeriesError,
    },
    #[error("{context}: {source}")]
    Index {
        context: String,
        #[source]
        source: IndexError,
    },
    #[error(transparent)]
    Lqre(#[from] LqreError),
    #[error("{context}: {source}")]
    Estimation {
        context: String,
        #[source]
        source: EstimationError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Missing(String),
}

impl PipelineError {
    /// 2 for estimation failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Estimation { .. } => 2,
            _ => 1,
        }
    }
}

fn estimation(context: impl Into<String>) -> impl FnOnce(EstimationError) -> PipelineError {
    let context = context.into();
    move |source| PipelineError::Estimation { context, source }
}

fn series_err(context: impl Into<String>) -> impl FnOnce(SeriesError) -> PipelineError {
    let context = context.into();
    move |source| PipelineError::Series { context, source }
}

/// Files written and informational notes (detected formats, skipped rows,
/// ignored columns) from one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl CommandOutput {
    fn extend(&mut self, other: CommandOutput) {
        self.files.extend(other.files);
        self.notes.extend(other.notes);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub file: String,
    pub sha256: String,
}

/// Inputs, settings and seed behind a set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub flags: serde_json::Value,
}

impl Provenance {
    fn new(cfg: &RunConfig, command: &str, inputs: &[&Path], flags: serde_json::Value) -> Result<Self, PipelineError> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    file: p.strip_prefix(&cfg.base_dir).unwrap_or(p).to_string_lossy().replace('\\', "/"),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_, PipelineError>>()?;
        Ok(Self {
            tool: concat!("txentropy ", env!("CARGO_PKG_VERSION")).to_string(),
            command: command.to_string(),
            seed: cfg.seed,
            inputs,
            flags,
        })
    }

    /// `# `-prefixed footer lines.
    pub fn footer(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: {}", self.tool);
        let _ = writeln!(out, "# command: {}", self.command);
        for i in &self.inputs {
            let _ = writeln!(out, "# input: {} sha256={}", i.file, i.sha256);
        }
        let _ = writeln!(out, "# flags: {}", self.flags);
        let _ = writeln!(out, "# seed: {}", self.seed);
        out
    }
}

pub fn sha256_file(path: &Path) -> Result<String, PipelineError> {
    let io = |source| PipelineError::Io { path: path.to_path_buf(), source };
    let mut reader = BufReader::new(File::open(path).map_err(io)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf).map_err(io)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn write_file(path: &Path, contents: &str, out: &mut CommandOutput) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
    out.files.push(path.to_path_buf());
    Ok(())
}

fn write_table(path: &Path, body: &str, prov: &Provenance, out: &mut CommandOutput) -> Result<(), PipelineError> {
    write_file(path, &format!("{body}{}", prov.footer()), out)
}

fn write_json<T: Serialize>(path: &Path, payload: &T, prov: &Provenance, out: &mut CommandOutput) -> Result<(), PipelineError> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        #[serde(flatten)]
        payload: &'a T,
        provenance: &'a Provenance,
    }
    let text = serde_json::to_string_pretty(&Wrapped { payload, provenance: prov }).expect("serializable report");
    write_file(path, &format!("{text}\n"), out)
}

fn frame_csv(frame: &Frame) -> String {
    let mut buf = Vec::new();
    frame.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 csv")
}

fn epoch_days(d: NaiveDate) -> f64 {
    (d - NaiveDate::from_ymd_opt(1970, 1, 1).expect("epoch")).num_days() as f64
}

/// Daily index of one token plus ingestion bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenIndex {
    pub name: String,
    pub series: IndexSeries,
    /// Days whose transfers all carried value 0 (no index point).
    pub zero_value_days: Vec<NaiveDate>,
    pub records: usize,
    pub notes: Vec<String>,
}

pub fn build_token_index(token: &TokenEntry, cfg: &RunConfig) -> Result<TokenIndex, PipelineError> {
    let bounds = DateBounds { genesis: token.genesis, end: token.end };
    let mut reader = parse_transfers(&token.transfers, &TransferSchema::default(), bounds, cfg.index.error_budget)?;
    let mut count = 0usize;
    let mut fatal = None;
    let records = reader.by_ref().map_while(|r| match r {
        Ok(rec) => {
            count += 1;
            Some(rec)
        }
        Err(e) => {
            fatal = Some(e);
            None
        }
    });
    let windows = window_daily(records, token.token_address.as_deref(), &cfg.index.filter());
    if let Some(e) = fatal {
        return Err(e.into());
    }
    let mut notes = Vec::new();
    if let Some(fmt) = reader.timestamp_format() {
        notes.push(format!("{}: timestamps parsed as {}", token.name, fmt.name()));
    }
    if let Some(first) = reader.errors().first() {
        notes.push(format!("{}: skipped {} malformed row(s); first at {first}", token.name, reader.errors().len()));
    }
    let mut dates = Vec::with_capacity(windows.len());
    let mut raw = Vec::with_capacity(windows.len());
    let mut zero_value_days = Vec::new();
    for w in &windows {
        match w.transaction_values() {
            Ok(values) => {
                dates.push(w.date);
                raw.push(decentralization_index(&values).value());
            }
            Err(IndexError::AllZero) => zero_value_days.push(w.date),
            Err(source) => return Err(PipelineError::Index { context: format!("{} on {}", token.name, w.date), source }),
        }
    }
    if !zero_value_days.is_empty() {
        notes.push(format!("{}: {} day(s) with only zero-value transfers have no index point", token.name, zero_value_days.len()));
    }
    if dates.is_empty() {
        return Err(PipelineError::Missing(format!("{}: no day with a positive-value transfer", token.name)));
    }
    let series = IndexSeries::new(dates, raw, cfg.index.sma_window, cfg.index.ema_alpha).map_err(series_err(&token.name))?;
    Ok(TokenIndex { name: token.name.clone(), series, zero_value_days, records: count, notes })
}

fn build_all(cfg: &RunConfig) -> Result<Vec<TokenIndex>, PipelineError> {
    if cfg.tokens.is_empty() {
        return Err(PipelineError::Missing("no [[token]] entries configured".into()));
    }
    cfg.tokens.par_iter().map(|t| build_token_index(t, cfg)).collect()
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn summary_csv(t: &TokenIndex) -> String {
    let mut sorted = t.series.raw.clone();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let mut s = String::from("stat,value\n");
    let rows: [(&str, String); 10] = [
        ("days", sorted.len().to_string()),
        ("transfers", t.records.to_string()),
        ("zero_value_days", t.zero_value_days.len().to_string()),
        ("min", sorted[0].to_string()),
        ("q1", quantile(&sorted, 0.25).to_string()),
        ("median", quantile(&sorted, 0.5).to_string()),
        ("q3", quantile(&sorted, 0.75).to_string()),
        ("max", sorted[sorted.len() - 1].to_string()),
        ("mean", mean.to_string()),
        ("first_date", t.series.dates[0].to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

const HISTOGRAM_BINS: usize = 20;

fn histogram_csv(values: &[f64]) -> String {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = if hi > lo { HISTOGRAM_BINS } else { 1 };
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 0.0 };
    let mut counts = vec![0usize; bins];
    for v in values {
        let b = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
        counts[b] += 1;
    }
    let mut s = String::from("bin_low,bin_high,count\n");
    for (i, c) in counts.iter().enumerate() {
        let a = lo + width * i as f64;
        let b = if i + 1 == bins { hi } else { lo + width * (i + 1) as f64 };
        let _ = writeln!(s, "{a},{b},{c}");
    }
    s
}

fn index_chart(t: &TokenIndex) -> String {
    let x: Vec<f64> = t.series.dates.iter().map(|d| epoch_days(*d)).collect();
    let points = |vals: Vec<Option<f64>>| x.iter().zip(vals).map(|(&x, v)| (x, v.unwrap_or(f64::NAN))).collect();
    LineChart {
        title: format!("Decentralization index: {}", t.name),
        x_label: "date".into(),
        y_label: "index".into(),
        series: vec![
            LineSeries { name: "daily".into(), points: points(t.series.channel(Channel::Raw)) },
            LineSeries { name: format!("SMA{}", t.series.sma_window), points: points(t.series.channel(Channel::Sma)) },
        ],
        x_is_date: true,
    }
    .render()
}

fn index_flags(cfg: &RunConfig) -> serde_json::Value {
    serde_json::json!({ "index": cfg.index })
}

/// Per token: `index/<name>.csv` (`date,index,sma30,ema`), summary,
/// histogram and an SVG of the daily index with its SMA.
pub fn cmd_index(cfg: &RunConfig) -> Result<CommandOutput, PipelineError> {
    cfg.validate()?;
    let built = build_all(cfg)?;
    let mut out = CommandOutput::default();
    let dir = cfg.out_dir.join("index");
    for t in &built {
        let token = cfg.tokens.iter().find(|e| e.name == t.name).expect("token from config");
        let prov = Provenance::new(cfg, "index", &[&token.transfers], index_flags(cfg))?;
        write_table(&dir.join(format!("{}.csv", t.name)), &frame_csv(&t.series.to_frame()), &prov, &mut out)?;
        write_table(&dir.join(format!("{}_summary.csv", t.name)), &summary_csv(t), &prov, &mut out)?;
        write_table(&dir.join(format!("{}_histogram.csv", t.name)), &histogram_csv(&t.series.raw), &prov, &mut out)?;
        write_file(&dir.join(format!("{}.svg", t.name)), &index_chart(t), &mut out)?;
        out.notes.extend(t.notes.iter().cloned());
    }
    Ok(out)
}

fn sweep_chart(rows: &[SweepRow], by_lambda: bool, title: &str) -> String {
    let mut groups: BTreeMap<u64, (String, Vec<(f64, f64)>)> = BTreeMap::new();
    for r in rows {
        let (key, name, x) = if by_lambda {
            (r.lambda.to_bits(), format!("λ = {}", r.lambda), r.n as f64)
        } else {
            (r.n as u64, format!("N = {}", r.n), r.lambda)
        };
        groups.entry(key).or_insert_with(|| (name, Vec::new())).1.push((x, r.index));
    }
    let mut series: Vec<LineSeries> = groups.into_values().map(|(name, points)| LineSeries { name, points }).collect();
    if by_lambda {
        series.sort_by(|a, b| a.points[0].1.total_cmp(&b.points[0].1).reverse());
    }
    LineChart {
        title: title.into(),
        x_label: if by_lambda { "N".into() } else { "λ".into() },
        y_label: "index".into(),
        series,
        x_is_date: false,
    }
    .render()
}

/// Two sweeps: index against N for each fixed λ, and against λ for each fixed N.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput, PipelineError> {
    cfg.validate()?;
    let s = &cfg.simulate;
    let prov = Provenance::new(cfg, "simulate", &[], serde_json::json!({ "simulate": s }))?;
    let mut out = CommandOutput::default();
    let dir = cfg.out_dir.join("simulate");

    let mut lambdas = s.fixed_lambdas.clone();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let n_grid = SweepGrid::new(even_counts(1, s.n_max, s.points), lambdas)?;
    // λ-minor order within each N; regroup per fixed λ for the CSV.
    let mut n_rows = sweep(&n_grid);
    n_rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.n.cmp(&b.n)));

    let mut ns = s.fixed_ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let l_grid = SweepGrid::new(ns, even_reals(0.0, s.lambda_max, s.points))?;
    let l_rows = sweep(&l_grid);

    for (name, rows, by_lambda, title) in [
        ("sweep_n", &n_rows, true, "Index against N at fixed λ"),
        ("sweep_lambda", &l_rows, false, "Index against λ at fixed N"),
    ] {
        let mut buf = Vec::new();
        write_sweep_csv(rows, &mut buf).expect("writing to memory");
        write_table(&dir.join(format!("{name}.csv")), &String::from_utf8(buf).expect("utf-8"), &prov, &mut out)?;
        write_file(&dir.join(format!("{name}.svg")), &sweep_chart(rows, by_lambda, title), &mut out)?;
    }
    Ok(out)
}

fn align(dates: &[NaiveDate], grid: &Frame, column: &[Option<f64>]) -> Vec<Option<f64>> {
    dates
        .iter()
        .map(|d| grid.dates.binary_search(d).ok().and_then(|i| column[i]))
        .collect()
}

/// Reference return features: `<P>_Ret…<P>_Ret30`, `<P>_VtyDayRet30d` and
/// `<P>_PC`, the first principal component of the five return horizons over
/// days where all of them are observed.
pub fn reference_features(prefix: &str, market: &MarketSeries) -> Result<Frame, PipelineError> {
    let panel = ReturnPanel::from_market(prefix, market).map_err(series_err(format!("{prefix} returns")))?;
    let mut frame = panel.frame.clone();
    let ret_cols: Vec<Vec<Option<f64>>> = panel
        .return_columns()
        .iter()
        .map(|c| frame.column(c).expect("return column").to_vec())
        .collect();
    let complete: Vec<usize> = (0..frame.dates.len()).filter(|&i| ret_cols.iter().all(|c| c[i].is_some())).collect();
    let columns: Vec<Vec<f64>> = ret_cols.iter().map(|c| complete.iter().map(|&i| c[i].expect("complete")).collect()).collect();
    let pc = first_pc(&columns).map_err(estimation(format!("{prefix} principal component")))?;
    let mut scores = vec![None; frame.dates.len()];
    for (&i, s) in complete.iter().zip(pc.scores) {
        scores[i] = Some(s);
    }
    frame.push(&format!("{prefix}_PC"), scores);
    Ok(frame)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityRow {
    pub variable: String,
    #[serde(flatten)]
    pub adf: AdfResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PearsonRow {
    pub token: String,
    pub variable: String,
    #[serde(flatten)]
    pub result: PearsonResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureModel {
    pub token: String,
    pub feature: String,
    pub result: RegressionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressReport {
    pub dependent: String,
    pub features: Vec<FeatureModel>,
    pub autoregressions: Vec<FeatureModel>,
    pub stationarity: Vec<StationarityRow>,
    pub pearson: Vec<PearsonRow>,
}

fn present(values: &[Option<f64>]) -> Vec<f64> {
    values.iter().flatten().copied().collect()
}

fn stationarity(variable: &str, values: &[Option<f64>], cfg: &RunConfig) -> Result<StationarityRow, PipelineError> {
    let adf = adf_test_with(&present(values), cfg.regress.adf_regression, LagSelection::Aic(None))
        .map_err(estimation(format!("ADF on {variable}")))?;
    Ok(StationarityRow { variable: variable.to_string(), adf })
}

fn regress_inputs(cfg: &RunConfig) -> Vec<&Path> {
    let mut inputs: Vec<&Path> = Vec::new();
    for t in &cfg.tokens {
        inputs.push(&t.transfers);
        if let Some(m) = &t.market {
            inputs.push(m);
        }
    }
    if let Some(r) = cfg.reference() {
        inputs.push(&r.market);
    }
    inputs
}

/// Single-regressor Newey–West models of the index on each reference feature,
/// AR(1) per token, ADF stationarity of every variable, PACF per token and
/// Pearson tests against the token's own volume and count.
pub fn cmd_regress(cfg: &RunConfig) -> Result<CommandOutput, PipelineError> {
    cfg.validate()?;
    let reference = cfg
        .reference()
        .ok_or_else(|| PipelineError::Missing("regress needs a [[reference]] market".into()))?;
    let built = build_all(cfg)?;
    let ref_market = parse_market(&reference.market)?;
    let mut out = CommandOutput::default();
    for col in &ref_market.ignored_columns {
        out.notes.push(format!("{}: ignored column `{col}`", reference.market.display()));
    }
    let features = reference_features(&reference.name, &ref_market)?;
    let feature_names: Vec<String> = features.columns.iter().map(|(n, _)| n.clone()).collect();
    let channel = cfg.regress.channel;
    let hac = HacOptions { lag: cfg.regress.nw_lag, small_sample: cfg.regress.small_sample };

    struct PerToken {
        models: Vec<FeatureModel>,
        ar: FeatureModel,
        adf: StationarityRow,
        pacf: String,
        pearson: Vec<PearsonRow>,
        notes: Vec<String>,
    }
    let per_token: Vec<PerToken> = built
        .par_iter()
        .zip(cfg.tokens.par_iter())
        .map(|(t, entry)| -> Result<PerToken, PipelineError> {
            let y = t.series.channel(channel);
            let mut models = Vec::new();
            for (name, col) in &features.columns {
                let x = align(&t.series.dates, &features, col);
                let design = DesignMatrix::assemble(&t.series.dates, (channel.name(), &y), &[(name.as_str(), &x)], true)
                    .map_err(estimation(format!("{} on {name}", t.name)))?;
                let result = ols_newey_west_with(&design, hac).map_err(estimation(format!("{} on {name}", t.name)))?;
                models.push(FeatureModel { token: t.name.clone(), feature: name.clone(), result });
            }
            let level = present(&y);
            let ar = FeatureModel {
                token: t.name.clone(),
                feature: "L1".into(),
                result: ar1(&level).map_err(estimation(format!("{} AR(1)", t.name)))?,
            };
            let adf = stationarity(&format!("{}_{}", t.name, channel.name()), &y, cfg)?;
            let max_lag = cfg.regress.pacf_lags.min(level.len().saturating_sub(2));
            let mut pacf_text = String::from("lag,coefficient,band\n");
            for p in pacf(&level, max_lag).map_err(series_err(format!("{} PACF", t.name)))? {
                let _ = writeln!(pacf_text, "{},{},{}", p.lag, p.coefficient, p.band);
            }
            let mut pearson = Vec::new();
            let mut notes = Vec::new();
            if let Some(path) = &entry.market {
                let market = parse_market(path)?;
                for col in &market.ignored_columns {
                    notes.push(format!("{}: ignored column `{col}`", path.display()));
                }
                for field in [MarketField::TxTfrValAdjUSD, MarketField::TxTfrCnt] {
                    let (xs, ys): (Vec<f64>, Vec<f64>) = t
                        .series
                        .dates
                        .iter()
                        .zip(&y)
                        .filter_map(|(d, v)| Some(((*v)?, market.get(*d)?.get(field)?)))
                        .unzip();
                    let result = pearson_test(&xs, &ys).map_err(estimation(format!("{} Pearson vs {}", t.name, field.name())))?;
                    pearson.push(PearsonRow { token: t.name.clone(), variable: field.name().to_string(), result });
                }
            }
            Ok(PerToken { models, ar, adf, pacf: pacf_text, pearson, notes })
        })
        .collect::<Result<_, _>>()?;

    let mut report = RegressReport {
        dependent: channel.name().to_string(),
        features: Vec::new(),
        autoregressions: Vec::new(),
        stationarity: Vec::new(),
        pearson: Vec::new(),
    };
    let prov = Provenance::new(
        cfg,
        "regress",
        &regress_inputs(cfg),
        serde_json::json!({ "index": cfg.index, "regress": cfg.regress, "reference": reference.name }),
    )?;
    let dir = cfg.out_dir.join("regress");
    for (t, p) in built.iter().zip(&per_token) {
        write_table(&dir.join(format!("pacf_{}.csv", t.name)), &p.pacf, &prov, &mut out)?;
        out.notes.extend(p.notes.iter().cloned());
    }
    for p in per_token {
        report.features.extend(p.models);
        report.autoregressions.push(p.ar);
        report.stationarity.push(p.adf);
        report.pearson.extend(p.pearson);
    }
    for (name, col) in &features.columns {
        report.stationarity.push(stationarity(name, col, cfg)?);
    }

    let columns: Vec<(String, Vec<Option<&RegressionResult>>)> = built
        .iter()
        .map(|t| {
            let cells = feature_names
                .iter()
                .map(|f| report.features.iter().find(|m| m.token == t.name && &m.feature == f).map(|m| &m.result))
                .collect();
            (t.name.clone(), cells)
        })
        .collect();
    let dependent = format!("Decentralization Index ({})", channel.name());
    let table3 = render_feature_table(
        &format!("{} Market Regression on Decentralization", reference.name),
        &dependent,
        &feature_names,
        &columns,
    );
    write_table(&dir.join("table3.txt"), &table3, &prov, &mut out)?;

    let ar_models: Vec<(String, &RegressionResult)> =
        report.autoregressions.iter().map(|m| (m.token.clone(), &m.result)).collect();
    let table12 = render_text_table("Autoregression of Decentralization", &dependent, &ar_models, &["L1".into()], "Constant");
    write_table(&dir.join("table12.txt"), &table12, &prov, &mut out)?;

    let mut csv = format!("{COEFFICIENT_CSV_HEADER}\n");
    for m in report.features.iter().chain(&report.autoregressions) {
        for row in coefficient_csv_rows(&format!("{}/{}", m.token, m.feature), &m.result) {
            let _ = writeln!(csv, "{row}");
        }
    }
    write_table(&dir.join("coefficients.csv"), &csv, &prov, &mut out)?;

    let mut st = String::from("variable,statistic,p_value,used_lag,n_obs,cv_1pct,cv_5pct,cv_10pct,regression,stationary_at_5pct\n");
    for r in &report.stationarity {
        let a = &r.adf;
        let _ = writeln!(
            st,
            "{},{},{},{},{},{},{},{},{},{}",
            r.variable,
            a.statistic,
            a.p_value,
            a.used_lag,
            a.n_obs,
            a.critical_values[0],
            a.critical_values[1],
            a.critical_values[2],
            a.regression.code(),
            a.is_stationary_at_5pct
        );
    }
    write_table(&dir.join("stationarity.csv"), &st, &prov, &mut out)?;

    let mut pe = String::from("token,variable,r,p_value,n\n");
    for r in &report.pearson {
        let _ = writeln!(pe, "{},{},{},{},{}", r.token, r.variable, r.result.r, r.result.p_value, r.result.n);
    }
    write_table(&dir.join("pearson.csv"), &pe, &prov, &mut out)?;
    write_json(&dir.join("regress.json"), &report, &prov, &mut out)?;
    for t in &built {
        out.notes.extend(t.notes.iter().cloned());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RddModel {
    pub token: String,
    pub channel: String,
    pub column: usize,
    pub controls: Vec<String>,
    pub result: RegressionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RddReport {
    pub event: NaiveDate,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub models: Vec<RddModel>,
}

const RDD_TERMS: [&str; 7] = ["EIP", "Day", "EIP_Day", "TxTfrValAdjUSD", "TxTfrCnt", "ROI", "VtyDayRet30d"];

/// Three nested discontinuity models per token and dependent channel.
/// Tokens without a market file get column (1) only.
pub fn cmd_rdd(cfg: &RunConfig) -> Result<CommandOutput, PipelineError> {
    cfg.validate()?;
    let built = build_all(cfg)?;
    let hac = HacOptions { lag: cfg.rdd.nw_lag, small_sample: cfg.regress.small_sample };
    let r = &cfg.rdd;

    let per_token: Vec<(Vec<RddModel>, Vec<String>)> = built
        .par_iter()
        .zip(cfg.tokens.par_iter())
        .map(|(t, entry)| -> Result<_, PipelineError> {
            let mut notes = Vec::new();
            let market = match &entry.market {
                Some(p) => Some(parse_market(p)?),
                None => {
                    notes.push(format!("{}: no market file; control columns (2) and (3) skipped", t.name));
                    None
                }
            };
            let empty = MarketSeries::default();
            let mut models = Vec::new();
            for &channel in &r.channels {
                for (i, controls) in DEFAULT_CONTROL_SETS.iter().enumerate() {
                    if market.is_none() && !controls.is_empty() {
                        continue;
                    }
                    let context = format!("{} {} column ({})", t.name, channel.name(), i + 1);
                    let spec = RddSpec::new(r.event, r.start, r.end, channel, controls).map_err(estimation(&context))?;
                    let result = rdd(&spec, &t.series, market.as_ref().unwrap_or(&empty), hac).map_err(estimation(&context))?;
                    models.push(RddModel {
                        token: t.name.clone(),
                        channel: channel.name().to_string(),
                        column: i + 1,
                        controls: spec.controls,
                        result,
                    });
                }
            }
            Ok((models, notes))
        })
        .collect::<Result<_, _>>()?;

    let mut inputs: Vec<&Path> = Vec::new();
    for t in &cfg.tokens {
        inputs.push(&t.transfers);
        if let Some(m) = &t.market {
            inputs.push(m);
        }
    }
    let prov = Provenance::new(cfg, "rdd", &inputs, serde_json::json!({ "index": cfg.index, "rdd": cfg.rdd, "small_sample": cfg.regress.small_sample }))?;
    let mut out = CommandOutput::default();
    let dir = cfg.out_dir.join("rdd");
    let mut report = RddReport { event: r.event, start: r.start, end: r.end, models: Vec::new() };
    let mut csv = format!("{COEFFICIENT_CSV_HEADER}\n");
    let terms: Vec<String> = RDD_TERMS.iter().map(|s| s.to_string()).collect();
    for (t, (models, notes)) in built.iter().zip(per_token) {
        for &channel in &r.channels {
            let cols: Vec<(String, &RegressionResult)> = models
                .iter()
                .filter(|m| m.channel == channel.name())
                .map(|m| (format!("({})", m.column), &m.result))
                .collect();
            let label = match channel {
                Channel::Sma => format!("SMA{}", cfg.index.sma_window),
                Channel::Ema => format!("EMA (alpha = {})", cfg.index.ema_alpha),
                Channel::Raw => "daily".to_string(),
            };
            let text = render_text_table(
                &format!("Regression Discontinuity ({}), event {}", t.name, r.event),
                &format!("Decentralization Index {label}"),
                &cols,
                &terms,
                "Constant",
            );
            write_table(&dir.join(format!("table7_{}_{}.txt", t.name, channel.name())), &text, &prov, &mut out)?;
        }
        for m in &models {
            for row in coefficient_csv_rows(&format!("{}/{}/({})", m.token, m.channel, m.column), &m.result) {
                let _ = writeln!(csv, "{row}");
            }
        }
        report.models.extend(models);
        out.notes.extend(notes);
    }
    write_table(&dir.join("rdd.csv"), &csv, &prov, &mut out)?;
    write_json(&dir.join("rdd.json"), &report, &prov, &mut out)?;
    Ok(out)
}

/// Runs every command, then writes `manifest.csv` with each output's digest.
pub fn cmd_report(cfg: &RunConfig) -> Result<CommandOutput, PipelineError> {
    let mut out = CommandOutput::default();
    out.extend(cmd_index(cfg)?);
    out.extend(cmd_simulate(cfg)?);
    if cfg.reference().is_some() {
        out.extend(cmd_regress(cfg)?);
    } else {
        out.notes.push("no [[reference]] market configured; regress skipped".into());
    }
    out.extend(cmd_rdd(cfg)?);
    let mut manifest = String::from("file,sha256\n");
    for f in &out.files {
        let rel = f.strip_prefix(&cfg.out_dir).unwrap_or(f).to_string_lossy().replace('\\', "/");
        let _ = writeln!(manifest, "{rel},{}", sha256_file(f)?);
    }
    write_file(&cfg.out_dir.join("manifest.csv"), &manifest, &mut out)?;
    let mut seen = std::collections::HashSet::new();
    out.notes.retain(|n| seen.insert(n.clone()));
    Ok(out)
}
