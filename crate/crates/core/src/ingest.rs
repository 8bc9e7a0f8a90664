//! Transfer and market CSV ingestion, plus UTC-day windowing of transfers.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, TimeZone, Utc};
use thiserror::Error;

use crate::index::{IndexError, TransactionValues};

pub const ZERO_ADDRESS: &str = "0x0000000000000000000000000000000000000000";

/// Row errors tolerated per transfer file before parsing becomes fatal.
pub const DEFAULT_ERROR_BUDGET: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: header is missing required column(s) {missing:?}")]
    SchemaMismatch { path: PathBuf, missing: Vec<String> },
    #[error("{path}: {error}")]
    RowParse { path: PathBuf, error: RowError },
    #[error("{path}: {} malformed rows exceed the error budget of {budget}; first: {}", errors.len(), errors[0])]
    ErrorBudgetExceeded { path: PathBuf, budget: usize, errors: Vec<RowError> },
    #[error("{path}: line {line}: date {date} does not follow the previous date")]
    NonMonotoneDates { path: PathBuf, line: u64, date: NaiveDate },
}

/// Header names for the five transfer fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferSchema {
    pub value: String,
    pub from_address: String,
    pub to_address: String,
    pub block_timestamp: String,
    pub token_address: String,
}

impl Default for TransferSchema {
    fn default() -> Self {
        Self {
            value: "value".into(),
            from_address: "from_address".into(),
            to_address: "to_address".into(),
            block_timestamp: "block_timestamp".into(),
            token_address: "token_address".into(),
        }
    }
}

impl TransferSchema {
    fn names(&self) -> [&str; 5] {
        [&self.value, &self.from_address, &self.to_address, &self.block_timestamp, &self.token_address]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferRecord {
    /// Token base units (wei for 18-decimal tokens).
    pub value: u128,
    pub from_address: String,
    pub to_address: String,
    pub block_timestamp: DateTime<Utc>,
    pub token_address: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimestampFormat {
    EpochSeconds,
    /// `2021-07-01T01:00:00Z`, with optional fraction and offset.
    Rfc3339,
    /// `2021-07-01 01:00:00 UTC`, as exported from BigQuery.
    BigQuery,
    /// Offset-less `2021-07-01T01:00:00` or `2021-07-01 01:00:00`, read as UTC.
    NaiveUtc,
}

impl TimestampFormat {
    pub fn name(self) -> &'static str {
        match self {
            TimestampFormat::EpochSeconds => "epoch-seconds",
            TimestampFormat::Rfc3339 => "rfc3339",
            TimestampFormat::BigQuery => "bigquery-utc",
            TimestampFormat::NaiveUtc => "naive-utc",
        }
    }
}

/// Parses a timestamp in any supported form and reports which one matched.
pub fn parse_timestamp(raw: &str) -> Option<(DateTime<Utc>, TimestampFormat)> {
    let s = raw.trim();
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        let secs: i64 = s.parse().ok()?;
        return Utc.timestamp_opt(secs, 0).single().map(|t| (t, TimestampFormat::EpochSeconds));
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some((t.with_timezone(&Utc), TimestampFormat::Rfc3339));
    }
    if let Some(body) = s.strip_suffix(" UTC") {
        if let Ok(t) = NaiveDateTime::parse_from_str(body, "%Y-%m-%d %H:%M:%S%.f") {
            return Some((t.and_utc(), TimestampFormat::BigQuery));
        }
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some((t.and_utc(), TimestampFormat::NaiveUtc));
        }
    }
    None
}

/// Calendar date from `YYYY-MM-DD` or any timestamp form above.
pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let s = raw.trim();
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .or_else(|| parse_timestamp(s).map(|(t, _)| t.date_naive()))
}

/// Optional validity range for transfer timestamps (inclusive calendar days).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DateBounds {
    pub genesis: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
}

/// Streaming transfer reader. Malformed rows are skipped and recorded; once
/// more than `budget` have been seen the iterator yields
/// [`IngestError::ErrorBudgetExceeded`] and stops.
pub struct TransferReader<R: Read> {
    path: PathBuf,
    records: csv::StringRecordsIntoIter<R>,
    columns: [usize; 5],
    bounds: DateBounds,
    budget: usize,
    errors: Vec<RowError>,
    format: Option<TimestampFormat>,
    done: bool,
}

/// Opens a transfer CSV. The header must contain every column named in `schema`.
pub fn parse_transfers(
    path: &Path,
    schema: &TransferSchema,
    bounds: DateBounds,
    budget: usize,
) -> Result<TransferReader<BufReader<File>>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    TransferReader::new(path.to_path_buf(), BufReader::new(file), schema, bounds, budget)
}

impl<R: Read> TransferReader<R> {
    pub fn new(
        path: PathBuf,
        input: R,
        schema: &TransferSchema,
        bounds: DateBounds,
        budget: usize,
    ) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let header = reader
            .headers()
            .map_err(|source| IngestError::Csv { path: path.clone(), source })?
            .clone();
        let mut columns = [0usize; 5];
        let mut missing = Vec::new();
        for (slot, name) in columns.iter_mut().zip(schema.names()) {
            match header.iter().position(|h| h.trim() == name) {
                Some(i) => *slot = i,
                None => missing.push(name.to_string()),
            }
        }
        if !missing.is_empty() {
            return Err(IngestError::SchemaMismatch { path, missing });
        }
        Ok(Self {
            path,
            records: reader.into_records(),
            columns,
            bounds,
            budget,
            errors: Vec::new(),
            format: None,
            done: false,
        })
    }

    /// Row errors collected so far.
    pub fn errors(&self) -> &[RowError] {
        &self.errors
    }

    /// Timestamp format of the first valid row.
    pub fn timestamp_format(&self) -> Option<TimestampFormat> {
        self.format
    }

    fn parse_row(&mut self, row: &csv::StringRecord) -> Result<TransferRecord, String> {
        let field = |i: usize| row.get(i).map(str::trim).unwrap_or("");
        let [vi, fi, ti, si, ki] = self.columns;

        let raw_value = field(vi);
        let value = if raw_value.starts_with('-') {
            return Err(format!("negative value {raw_value:?}"));
        } else {
            raw_value.parse::<u128>().map_err(|_| format!("invalid value {raw_value:?}"))?
        };
        let from_address = field(fi);
        let to_address = field(ti);
        if from_address.is_empty() || to_address.is_empty() {
            return Err("empty address".into());
        }
        let (block_timestamp, format) =
            parse_timestamp(field(si)).ok_or_else(|| format!("unparseable timestamp {:?}", field(si)))?;
        let day = block_timestamp.date_naive();
        if self.bounds.genesis.is_some_and(|g| day < g) {
            return Err(format!("timestamp {day} precedes token genesis"));
        }
        if self.bounds.end.is_some_and(|e| day > e) {
            return Err(format!("timestamp {day} is after the dataset end"));
        }
        self.format.get_or_insert(format);
        Ok(TransferRecord {
            value,
            from_address: from_address.to_string(),
            to_address: to_address.to_string(),
            block_timestamp,
            token_address: field(ki).to_string(),
        })
    }
}

impl<R: Read> Iterator for TransferReader<R> {
    type Item = Result<TransferRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let row = match self.records.next()? {
                Ok(row) => row,
                Err(source) => {
                    self.done = true;
                    return Some(Err(IngestError::Csv { path: self.path.clone(), source }));
                }
            };
            let line = row.position().map_or(0, |p| p.line());
            match self.parse_row(&row) {
                Ok(record) => return Some(Ok(record)),
                Err(message) => {
                    self.errors.push(RowError { line, message });
                    if self.errors.len() > self.budget {
                        self.done = true;
                        return Some(Err(IngestError::ErrorBudgetExceeded {
                            path: self.path.clone(),
                            budget: self.budget,
                            errors: self.errors.clone(),
                        }));
                    }
                }
            }
        }
    }
}

/// Writes records with the default schema; timestamps as RFC 3339 UTC.
pub fn write_transfers_csv<W: Write>(records: &[TransferRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let schema = TransferSchema::default();
    w.write_record(schema.names())?;
    for r in records {
        w.write_record([
            r.value.to_string(),
            r.from_address.clone(),
            r.to_address.clone(),
            r.block_timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            r.token_address.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Optional exclusions applied before windowing. Both default to off.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TransferFilter {
    pub drop_self_transfers: bool,
    /// Drop mints and burns (either side is the zero address).
    pub drop_zero_address: bool,
}

impl TransferFilter {
    pub fn keeps(&self, r: &TransferRecord) -> bool {
        if self.drop_self_transfers && r.from_address.eq_ignore_ascii_case(&r.to_address) {
            return false;
        }
        if self.drop_zero_address
            && (r.from_address.eq_ignore_ascii_case(ZERO_ADDRESS) || r.to_address.eq_ignore_ascii_case(ZERO_ADDRESS))
        {
            return false;
        }
        true
    }
}

/// Transfer values of one UTC calendar day, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyWindow {
    pub date: NaiveDate,
    pub values: Vec<f64>,
}

impl DailyWindow {
    /// Fails with [`IndexError::AllZero`] on a day whose transfers all carry value 0.
    pub fn transaction_values(&self) -> Result<TransactionValues, IndexError> {
        TransactionValues::new(self.values.clone())
    }
}

/// Groups records into UTC days, `[00:00, 24:00)`. Records whose
/// `token_address` differs from `token` (case-insensitive) are skipped when a
/// token is given. Days without transfers produce no window.
pub fn window_daily<I>(records: I, token: Option<&str>, filter: &TransferFilter) -> Vec<DailyWindow>
where
    I: IntoIterator<Item = TransferRecord>,
{
    let mut days: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for r in records {
        if token.is_some_and(|t| !r.token_address.eq_ignore_ascii_case(t)) || !filter.keeps(&r) {
            continue;
        }
        days.entry(r.block_timestamp.date_naive()).or_default().push(r.value as f64);
    }
    days.into_iter().map(|(date, values)| DailyWindow { date, values }).collect()
}

/// Market columns understood by [`parse_market`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MarketField {
    CapMrktCurUSD,
    PriceUSD,
    VtyDayRet30d,
    TxTfrValAdjUSD,
    TxTfrCnt,
}

impl MarketField {
    pub const ALL: [MarketField; 5] = [
        MarketField::CapMrktCurUSD,
        MarketField::PriceUSD,
        MarketField::VtyDayRet30d,
        MarketField::TxTfrValAdjUSD,
        MarketField::TxTfrCnt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MarketField::CapMrktCurUSD => "CapMrktCurUSD",
            MarketField::PriceUSD => "PriceUSD",
            MarketField::VtyDayRet30d => "VtyDayRet30d",
            MarketField::TxTfrValAdjUSD => "TxTfrValAdjUSD",
            MarketField::TxTfrCnt => "TxTfrCnt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketRecord {
    pub date: NaiveDate,
    values: [Option<f64>; 5],
}

impl MarketRecord {
    pub fn new(date: NaiveDate) -> Self {
        Self { date, values: [None; 5] }
    }

    /// `None` marks a missing cell or a column absent from the file.
    pub fn get(&self, field: MarketField) -> Option<f64> {
        self.values[field as usize]
    }

    pub fn set(&mut self, field: MarketField, value: Option<f64>) {
        self.values[field as usize] = value;
    }
}

/// Daily market records with strictly increasing dates. Gaps stay gaps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarketSeries {
    pub records: Vec<MarketRecord>,
    /// Dictionary columns present in the header.
    pub fields: Vec<MarketField>,
    /// Header columns that were not recognized.
    pub ignored_columns: Vec<String>,
}

impl MarketSeries {
    pub fn has(&self, field: MarketField) -> bool {
        self.fields.contains(&field)
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.records.iter().map(|r| r.date).collect()
    }

    pub fn column(&self, field: MarketField) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.get(field)).collect()
    }

    pub fn get(&self, date: NaiveDate) -> Option<&MarketRecord> {
        self.records.binary_search_by_key(&date, |r| r.date).ok().map(|i| &self.records[i])
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.records.first().map(|r| r.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.records.last().map(|r| r.date)
    }
}

fn is_missing_marker(s: &str) -> bool {
    s.is_empty() || ["na", "nan", "null", "none"].contains(&s.to_ascii_lowercase().as_str())
}

/// Parses a market CSV: a `date` column plus any subset of [`MarketField`] names.
pub fn parse_market(path: &Path) -> Result<MarketSeries, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    read_market(path, BufReader::new(file))
}

pub fn read_market<R: Read>(path: &Path, input: R) -> Result<MarketSeries, IngestError> {
    let csv_err = |source| IngestError::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = reader.headers().map_err(csv_err)?.clone();
    let date_col = header
        .iter()
        .position(|h| h.trim() == "date")
        .ok_or_else(|| IngestError::SchemaMismatch { path: path.to_path_buf(), missing: vec!["date".into()] })?;

    let mut mapped = Vec::new();
    let mut ignored_columns = Vec::new();
    for (i, name) in header.iter().enumerate() {
        if i == date_col {
            continue;
        }
        match MarketField::from_name(name.trim()) {
            Some(f) => mapped.push((i, f)),
            None => ignored_columns.push(name.trim().to_string()),
        }
    }

    let mut records: Vec<MarketRecord> = Vec::new();
    for row in reader.into_records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line());
        let row_err = |message: String| IngestError::RowParse { path: path.to_path_buf(), error: RowError { line, message } };
        let raw_date = row.get(date_col).unwrap_or("").trim();
        let date = parse_date(raw_date).ok_or_else(|| row_err(format!("unparseable date {raw_date:?}")))?;
        if records.last().is_some_and(|prev| prev.date >= date) {
            return Err(IngestError::NonMonotoneDates { path: path.to_path_buf(), line, date });
        }
        let mut record = MarketRecord::new(date);
        for &(i, field) in &mapped {
            let raw = row.get(i).unwrap_or("").trim();
            let value = if is_missing_marker(raw) {
                None
            } else {
                let v: f64 = raw.parse().map_err(|_| row_err(format!("{}: invalid number {raw:?}", field.name())))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(row_err(format!("{}: value {raw} must be finite and nonnegative", field.name())));
                }
                Some(v)
            };
            record.set(field, value);
        }
        records.push(record);
    }
    Ok(MarketSeries { records, fields: mapped.into_iter().map(|(_, f)| f).collect(), ignored_columns })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "value,from_address,to_address,block_timestamp,token_address\n";

    fn reader(body: &str, budget: usize) -> TransferReader<&[u8]> {
        let text: &'static str = Box::leak(format!("{HEADER}{body}").into_boxed_str());
        TransferReader::new("t.csv".into(), text.as_bytes(), &TransferSchema::default(), DateBounds::default(), budget)
            .unwrap()
    }

    #[test]
    fn well_formed_rows() {
        let mut r = reader(
            "1,0xa,0xb,2021-07-01 01:00:00 UTC,0xdai\n2,0xb,0xc,2021-07-01 02:00:00 UTC,0xdai\n3,0xc,0xa,2021-07-02 00:00:00 UTC,0xdai\n",
            0,
        );
        let recs: Vec<_> = r.by_ref().collect::<Result<_, _>>().unwrap();
        assert_eq!(recs.len(), 3);
        assert!(r.errors().is_empty());
        assert_eq!(r.timestamp_format(), Some(TimestampFormat::BigQuery));
        assert_eq!(recs[2].value, 3);
    }

    #[test]
    fn negative_value_names_line() {
        let mut r = reader("1,0xa,0xb,1625101200,0xdai\n-5,0xa,0xb,1625101200,0xdai\n", 5);
        let recs: Vec<_> = r.by_ref().collect::<Result<_, _>>().unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(r.errors().len(), 1);
        assert_eq!(r.errors()[0].line, 3);
        assert!(r.errors()[0].message.contains("negative"));
    }

    #[test]
    fn budget_exhaustion_is_fatal() {
        let mut r = reader("x,0xa,0xb,1,t\ny,0xa,0xb,1,t\n1,0xa,0xb,1,t\n", 1);
        let out: Vec<_> = r.by_ref().collect();
        assert_eq!(out.len(), 1);
        assert!(matches!(out[0], Err(IngestError::ErrorBudgetExceeded { .. })));
    }

    #[test]
    fn schema_mismatch() {
        let err = TransferReader::new(
            "t.csv".into(),
            "value,from,to\n".as_bytes(),
            &TransferSchema::default(),
            DateBounds::default(),
            0,
        )
        .err()
        .unwrap();
        match err {
            IngestError::SchemaMismatch { missing, .. } => assert_eq!(missing.len(), 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn genesis_bound() {
        let text = format!("{HEADER}1,0xa,0xb,2019-01-01T00:00:00Z,t\n2,0xa,0xb,2020-01-01T00:00:00Z,t\n");
        let bounds = DateBounds { genesis: NaiveDate::from_ymd_opt(2019, 6, 1), end: None };
        let mut r = TransferReader::new("t".into(), text.as_bytes(), &TransferSchema::default(), bounds, 10).unwrap();
        let recs: Vec<_> = r.by_ref().collect::<Result<_, _>>().unwrap();
        assert_eq!(recs.len(), 1);
        assert!(r.errors()[0].message.contains("genesis"));
    }

    #[test]
    fn timestamp_forms() {
        let expect = Utc.with_ymd_and_hms(2021, 7, 1, 1, 0, 0).unwrap();
        for (raw, fmt) in [
            ("1625101200", TimestampFormat::EpochSeconds),
            ("2021-07-01T01:00:00Z", TimestampFormat::Rfc3339),
            ("2021-07-01T03:00:00+02:00", TimestampFormat::Rfc3339),
            ("2021-07-01 01:00:00 UTC", TimestampFormat::BigQuery),
            ("2021-07-01 01:00:00.000 UTC", TimestampFormat::BigQuery),
            ("2021-07-01T01:00:00", TimestampFormat::NaiveUtc),
        ] {
            assert_eq!(parse_timestamp(raw), Some((expect, fmt)), "{raw}");
        }
        assert_eq!(parse_timestamp("yesterday"), None);
    }

    fn rec(value: u128, ts: &str) -> TransferRecord {
        TransferRecord {
            value,
            from_address: "0xa".into(),
            to_address: "0xb".into(),
            block_timestamp: parse_timestamp(ts).unwrap().0,
            token_address: "0xdai".into(),
        }
    }

    #[test]
    fn windows_respect_utc_boundaries() {
        let w = window_daily(
            vec![rec(1, "2021-07-01T01:00:00Z"), rec(2, "2021-07-01T23:59:00Z")],
            Some("0xDAI"),
            &TransferFilter::default(),
        );
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].values, vec![1.0, 2.0]);

        let w = window_daily(
            vec![rec(1, "2021-07-01T23:59:59Z"), rec(2, "2021-07-02T00:00:00Z")],
            None,
            &TransferFilter::default(),
        );
        assert_eq!(w.len(), 2);
        assert_eq!(w[1].date, NaiveDate::from_ymd_opt(2021, 7, 2).unwrap());
    }

    #[test]
    fn filters() {
        let mut self_tx = rec(5, "2021-07-01T00:00:00Z");
        self_tx.to_address = "0xA".into();
        let mut mint = rec(7, "2021-07-01T00:00:00Z");
        mint.from_address = ZERO_ADDRESS.into();
        let all = vec![self_tx, mint, rec(1, "2021-07-01T00:00:00Z")];
        let keep_all = window_daily(all.clone(), None, &TransferFilter::default());
        assert_eq!(keep_all[0].values.len(), 3);
        let strict = TransferFilter { drop_self_transfers: true, drop_zero_address: true };
        assert_eq!(window_daily(all, None, &strict)[0].values, vec![1.0]);
    }

    #[test]
    fn all_zero_day_has_no_index() {
        let w = window_daily(vec![rec(0, "2021-07-01T00:00:00Z")], None, &TransferFilter::default());
        assert_eq!(w[0].transaction_values(), Err(IndexError::AllZero));
    }

    #[test]
    fn market_parsing() {
        let text = "date,PriceUSD,TxTfrCnt,Extra\n2021-07-01,10,5,x\n2021-07-02,,6,y\n2021-07-03,NA,7,z\n2021-07-04,11,8,z\n2021-07-05,12,9,z\n";
        let m = read_market(Path::new("m.csv"), text.as_bytes()).unwrap();
        assert_eq!(m.records.len(), 5);
        assert_eq!(m.ignored_columns, vec!["Extra".to_string()]);
        assert_eq!(m.records[1].get(MarketField::PriceUSD), None);
        assert_eq!(m.records[1].get(MarketField::TxTfrCnt), Some(6.0));
        assert!(!m.has(MarketField::VtyDayRet30d));
        assert_eq!(m.get(NaiveDate::from_ymd_opt(2021, 7, 4).unwrap()).unwrap().get(MarketField::PriceUSD), Some(11.0));
    }

    #[test]
    fn market_rejects_duplicate_dates() {
        let text = "date,PriceUSD\n2021-07-01,1\n2021-07-01,2\n";
        assert!(matches!(
            read_market(Path::new("m.csv"), text.as_bytes()),
            Err(IngestError::NonMonotoneDates { line: 3, .. })
        ));
        let text = "PriceUSD\n1\n";
        assert!(matches!(read_market(Path::new("m.csv"), text.as_bytes()), Err(IngestError::SchemaMismatch { .. })));
    }
}
