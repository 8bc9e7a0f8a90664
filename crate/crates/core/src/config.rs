//! Run configuration loaded from TOML. Relative paths resolve against the
//! directory holding the config file. See `fixtures/example.toml`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::econometrics::AdfRegression;
use crate::ingest::{parse_date, TransferFilter, DEFAULT_ERROR_BUDGET};
use crate::timeseries::{Channel, DEFAULT_EMA_ALPHA, DEFAULT_SMA_WINDOW};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Accepts both TOML dates (`2021-08-05`) and quoted strings.
fn de_date<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Toml(toml::value::Datetime),
        Text(String),
    }
    let text = match Repr::deserialize(d)? {
        Repr::Toml(dt) => dt.to_string(),
        Repr::Text(s) => s,
    };
    parse_date(&text).ok_or_else(|| serde::de::Error::custom(format!("invalid date `{text}`")))
}

fn de_opt_date<'de, D: Deserializer<'de>>(d: D) -> Result<Option<NaiveDate>, D::Error> {
    #[derive(Deserialize)]
    struct Wrap(#[serde(deserialize_with = "de_date")] NaiveDate);
    Option::<Wrap>::deserialize(d).map(|w| w.map(|Wrap(date)| date))
}

fn de_channel<'de, D: Deserializer<'de>>(d: D) -> Result<Channel, D::Error> {
    let s = String::deserialize(d)?;
    Channel::from_name(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown channel `{s}`")))
}

fn de_channels<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Channel>, D::Error> {
    Vec::<String>::deserialize(d)?
        .into_iter()
        .map(|s| Channel::from_name(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown channel `{s}`"))))
        .collect()
}

fn de_adf<'de, D: Deserializer<'de>>(d: D) -> Result<AdfRegression, D::Error> {
    let s = String::deserialize(d)?;
    AdfRegression::from_code(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown ADF regression `{s}`")))
}

fn ser_channel<S: serde::Serializer>(c: &Channel, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

fn ser_channels<S: serde::Serializer>(c: &[Channel], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|c| c.name()))
}

fn ser_adf<S: serde::Serializer>(r: &AdfRegression, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(r.code())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexOptions {
    pub sma_window: usize,
    pub ema_alpha: f64,
    pub drop_self_transfers: bool,
    pub drop_zero_address: bool,
    pub error_budget: usize,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            sma_window: DEFAULT_SMA_WINDOW,
            ema_alpha: DEFAULT_EMA_ALPHA,
            drop_self_transfers: false,
            drop_zero_address: false,
            error_budget: DEFAULT_ERROR_BUDGET,
        }
    }
}

impl IndexOptions {
    pub fn filter(&self) -> TransferFilter {
        TransferFilter { drop_self_transfers: self.drop_self_transfers, drop_zero_address: self.drop_zero_address }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenEntry {
    pub name: String,
    pub transfers: PathBuf,
    /// Keep only rows whose `token_address` matches.
    #[serde(default)]
    pub token_address: Option<String>,
    #[serde(default, deserialize_with = "de_opt_date")]
    pub genesis: Option<NaiveDate>,
    #[serde(default, deserialize_with = "de_opt_date")]
    pub end: Option<NaiveDate>,
    /// The token's own market file (controls and Pearson tests).
    #[serde(default)]
    pub market: Option<PathBuf>,
}

/// A market whose returns serve as regressors, e.g. ETH.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceEntry {
    pub name: String,
    pub market: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegressOptions {
    /// Reference market name; the first `[[reference]]` when unset.
    pub reference: Option<String>,
    #[serde(deserialize_with = "de_channel", serialize_with = "ser_channel")]
    pub channel: Channel,
    pub nw_lag: usize,
    pub small_sample: bool,
    pub pacf_lags: usize,
    #[serde(deserialize_with = "de_adf", serialize_with = "ser_adf")]
    pub adf_regression: AdfRegression,
}

impl Default for RegressOptions {
    fn default() -> Self {
        Self {
            reference: None,
            channel: Channel::Raw,
            nw_lag: 1,
            small_sample: false,
            pacf_lags: 20,
            adf_regression: AdfRegression::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RddOptions {
    #[serde(deserialize_with = "de_date")]
    pub event: NaiveDate,
    #[serde(deserialize_with = "de_date")]
    pub start: NaiveDate,
    #[serde(deserialize_with = "de_date")]
    pub end: NaiveDate,
    #[serde(deserialize_with = "de_channels", serialize_with = "ser_channels")]
    pub channels: Vec<Channel>,
    pub nw_lag: usize,
}

impl Default for RddOptions {
    fn default() -> Self {
        let d = |m, day| NaiveDate::from_ymd_opt(2021, m, day).expect("valid date");
        Self { event: d(8, 5), start: d(7, 25), end: d(8, 27), channels: vec![Channel::Sma, Channel::Ema], nw_lag: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateOptions {
    /// Points per swept axis.
    pub points: usize,
    pub n_max: usize,
    pub lambda_max: f64,
    /// One N-sweep curve per value.
    pub fixed_lambdas: Vec<f64>,
    /// One λ-sweep curve per value.
    pub fixed_ns: Vec<usize>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            points: 200,
            n_max: 10_000,
            lambda_max: 10_000.0,
            fixed_lambdas: vec![0.0, 5_000.0, 10_000.0],
            fixed_ns: vec![100, 10_000, 50_000, 100_000],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    index: IndexOptions,
    #[serde(default, rename = "token")]
    tokens: Vec<TokenEntry>,
    #[serde(default, rename = "reference")]
    references: Vec<ReferenceEntry>,
    #[serde(default)]
    regress: RegressOptions,
    #[serde(default)]
    rdd: RddOptions,
    #[serde(default)]
    simulate: SimulateOptions,
}

/// Fully resolved run settings. Input paths are absolute or relative to the
/// process working directory; `base_dir` is kept for provenance labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub index: IndexOptions,
    pub tokens: Vec<TokenEntry>,
    pub references: Vec<ReferenceEntry>,
    pub regress: RegressOptions,
    pub rdd: RddOptions,
    pub simulate: SimulateOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            base_dir: PathBuf::from("."),
            out_dir: PathBuf::from("out"),
            seed: 0,
            index: IndexOptions::default(),
            tokens: Vec::new(),
            references: Vec::new(),
            regress: RegressOptions::default(),
            rdd: RddOptions::default(),
            simulate: SimulateOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text)?;
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };
        let mut tokens = file.tokens;
        for t in &mut tokens {
            t.transfers = resolve(&t.transfers);
            t.market = t.market.as_deref().map(resolve);
        }
        let mut references = file.references;
        for r in &mut references {
            r.market = resolve(&r.market);
        }
        Ok(Self {
            base_dir: base_dir.to_path_buf(),
            tokens,
            references,
            index: file.index,
            regress: file.regress,
            rdd: file.rdd,
            simulate: file.simulate,
            ..Self::default()
        })
    }

    /// Checks names, parameter ranges, date ordering and that input files exist.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut seen = HashSet::new();
        for t in &self.tokens {
            check_name(&t.name)?;
            if !seen.insert(t.name.to_ascii_lowercase()) {
                return Err(invalid(format!("duplicate token name `{}`", t.name)));
            }
            if let (Some(g), Some(e)) = (t.genesis, t.end) {
                if g > e {
                    return Err(invalid(format!("token `{}`: genesis {g} is after end {e}", t.name)));
                }
            }
            check_file(&t.transfers)?;
            if let Some(m) = &t.market {
                check_file(m)?;
            }
        }
        let mut seen = HashSet::new();
        for r in &self.references {
            check_name(&r.name)?;
            if !seen.insert(r.name.to_ascii_lowercase()) {
                return Err(invalid(format!("duplicate reference name `{}`", r.name)));
            }
            check_file(&r.market)?;
        }
        if let Some(name) = &self.regress.reference {
            if !self.references.iter().any(|r| &r.name == name) {
                return Err(invalid(format!("regress.reference `{name}` is not a configured [[reference]]")));
            }
        }
        let ix = &self.index;
        if ix.sma_window == 0 {
            return Err(invalid("index.sma_window must be at least 1"));
        }
        if !(ix.ema_alpha > 0.0 && ix.ema_alpha <= 1.0) {
            return Err(invalid(format!("index.ema_alpha {} outside (0, 1]", ix.ema_alpha)));
        }
        let r = &self.rdd;
        if !(r.start < r.event && r.event <= r.end) {
            return Err(invalid(format!("rdd needs start < event <= end, got {} / {} / {}", r.start, r.event, r.end)));
        }
        if r.channels.is_empty() {
            return Err(invalid("rdd.channels is empty"));
        }
        let s = &self.simulate;
        if s.points < 2 || s.n_max < 1 || !(s.lambda_max >= 0.0 && s.lambda_max.is_finite()) {
            return Err(invalid("simulate needs points >= 2, n_max >= 1 and a finite lambda_max >= 0"));
        }
        Ok(())
    }

    /// The regression reference market.
    pub fn reference(&self) -> Option<&ReferenceEntry> {
        match &self.regress.reference {
            Some(name) => self.references.iter().find(|r| &r.name == name),
            None => self.references.first(),
        }
    }
}

fn check_name(name: &str) -> Result<(), ConfigError> {
    let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("name `{name}` must be nonempty ASCII letters, digits, `_` or `-`")))
    }
}

fn check_file(path: &Path) -> Result<(), ConfigError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(format!("input file {} does not exist", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_file() {
        let cfg = RunConfig::from_toml("", Path::new("/data")).unwrap();
        assert_eq!(cfg.index, IndexOptions::default());
        assert_eq!(cfg.rdd.event, NaiveDate::from_ymd_opt(2021, 8, 5).unwrap());
        assert_eq!(cfg.simulate.points, 200);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn paths_resolve_against_config_dir() {
        let text = r#"
            [index]
            ema_alpha = 0.2

            [[token]]
            name = "dai"
            transfers = "dai.csv"
            genesis = 2019-11-13
            end = "2021-09-30"

            [[reference]]
            name = "ETH"
            market = "/abs/eth.csv"

            [rdd]
            channels = ["sma30"]
        "#;
        let cfg = RunConfig::from_toml(text, Path::new("/data")).unwrap();
        assert_eq!(cfg.tokens[0].transfers, PathBuf::from("/data/dai.csv"));
        assert_eq!(cfg.tokens[0].genesis, NaiveDate::from_ymd_opt(2019, 11, 13));
        assert_eq!(cfg.tokens[0].end, NaiveDate::from_ymd_opt(2021, 9, 30));
        assert_eq!(cfg.references[0].market, PathBuf::from("/abs/eth.csv"));
        assert_eq!(cfg.rdd.channels, vec![Channel::Sma]);
        assert_eq!(cfg.index.ema_alpha, 0.2);
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(m)) if m.contains("does not exist")));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml("[index]\nsma = 3\n", Path::new(".")).is_err());
        assert!(RunConfig::from_toml("[rdd]\nchannels = [\"median\"]\n", Path::new(".")).is_err());
        let mut cfg = RunConfig::default();
        cfg.rdd.start = cfg.rdd.event;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.index.ema_alpha = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.regress.reference = Some("BTC".into());
        assert!(cfg.validate().is_err());
    }
}
