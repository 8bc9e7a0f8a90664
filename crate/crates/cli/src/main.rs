use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use txentropy::config::RunConfig;
use txentropy::econometrics::AdfRegression;
use txentropy::pipeline::{cmd_index, cmd_rdd, cmd_regress, cmd_report, cmd_simulate, CommandOutput, PipelineError};
use txentropy::timeseries::Channel;

#[derive(Debug, Parser)]
#[command(name = "txentropy", version, about = "Transaction decentralization index pipeline")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed recorded in every provenance footer.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Daily index per token with SMA/EMA channels, summary and histogram.
    Index(IndexFlags),
    /// LQRE comparative-statics sweeps over N and lambda.
    Simulate(SimulateFlags),
    /// Market regressions, AR(1), stationarity, PACF and Pearson tests.
    Regress {
        #[command(flatten)]
        index: IndexFlags,
        #[command(flatten)]
        regress: RegressFlags,
    },
    /// Regression discontinuity around the event date.
    Rdd {
        #[command(flatten)]
        index: IndexFlags,
        #[command(flatten)]
        rdd: RddFlags,
    },
    /// Every command above plus a digest manifest.
    Report {
        #[command(flatten)]
        index: IndexFlags,
        #[command(flatten)]
        regress: RegressFlags,
        #[command(flatten)]
        rdd: RddFlags,
        #[command(flatten)]
        simulate: SimulateFlags,
    },
}

#[derive(Debug, Args)]
struct IndexFlags {
    #[arg(long)]
    sma_window: Option<usize>,
    #[arg(long)]
    ema_alpha: Option<f64>,
    #[arg(long)]
    drop_self_transfers: bool,
    #[arg(long)]
    drop_zero_address: bool,
    /// Malformed transfer rows tolerated per file.
    #[arg(long)]
    error_budget: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateFlags {
    /// Grid points per swept axis.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Fixed lambda values of the N sweep.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Fixed N values of the lambda sweep.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct RegressFlags {
    /// Newey-West lags for the market regressions.
    #[arg(long)]
    nw_lag: Option<usize>,
    #[arg(long)]
    small_sample: bool,
    /// Dependent channel: val, sma30 or ema.
    #[arg(long, value_parser = parse_channel)]
    channel: Option<Channel>,
    #[arg(long)]
    pacf_lags: Option<usize>,
    #[arg(long)]
    reference: Option<String>,
    /// n, c or ct.
    #[arg(long, value_parser = parse_adf)]
    adf_regression: Option<AdfRegression>,
}

#[derive(Debug, Args)]
struct RddFlags {
    #[arg(long, value_parser = parse_day)]
    event: Option<NaiveDate>,
    #[arg(long, value_parser = parse_day)]
    start: Option<NaiveDate>,
    #[arg(long, value_parser = parse_day)]
    end: Option<NaiveDate>,
    /// Dependent channels, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_channel)]
    channels: Option<Vec<Channel>>,
    /// Newey-West lags for the discontinuity regressions.
    #[arg(long)]
    rdd_nw_lag: Option<usize>,
}

fn parse_channel(s: &str) -> Result<Channel, String> {
    Channel::from_name(s).ok_or_else(|| format!("unknown channel `{s}` (expected val, sma30 or ema)"))
}

fn parse_adf(s: &str) -> Result<AdfRegression, String> {
    AdfRegression::from_code(s).ok_or_else(|| format!("unknown regression `{s}` (expected n, c or ct)"))
}

fn parse_day(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("{s}: {e}"))
}

impl IndexFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        let ix = &mut cfg.index;
        if let Some(v) = self.sma_window {
            ix.sma_window = v;
        }
        if let Some(v) = self.ema_alpha {
            ix.ema_alpha = v;
        }
        ix.drop_self_transfers |= self.drop_self_transfers;
        ix.drop_zero_address |= self.drop_zero_address;
        if let Some(v) = self.error_budget {
            ix.error_budget = v;
        }
    }
}

impl SimulateFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.simulate;
        if let Some(v) = self.points {
            s.points = v;
        }
        if let Some(v) = self.n_max {
            s.n_max = v;
        }
        if let Some(v) = self.lambda_max {
            s.lambda_max = v;
        }
        if let Some(v) = &self.lambdas {
            s.fixed_lambdas = v.clone();
        }
        if let Some(v) = &self.ns {
            s.fixed_ns = v.clone();
        }
    }
}

impl RegressFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        let r = &mut cfg.regress;
        if let Some(v) = self.nw_lag {
            r.nw_lag = v;
        }
        r.small_sample |= self.small_sample;
        if let Some(v) = self.channel {
            r.channel = v;
        }
        if let Some(v) = self.pacf_lags {
            r.pacf_lags = v;
        }
        if let Some(v) = &self.reference {
            r.reference = Some(v.clone());
        }
        if let Some(v) = self.adf_regression {
            r.adf_regression = v;
        }
    }
}

impl RddFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        let r = &mut cfg.rdd;
        if let Some(v) = self.event {
            r.event = v;
        }
        if let Some(v) = self.start {
            r.start = v;
        }
        if let Some(v) = self.end {
            r.end = v;
        }
        if let Some(v) = &self.channels {
            r.channels = v.clone();
        }
        if let Some(v) = self.rdd_nw_lag {
            r.nw_lag = v;
        }
    }
}

fn run(cli: &Cli) -> Result<CommandOutput, PipelineError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.out_dir = cli.out.clone();
    cfg.seed = cli.seed;
    match &cli.command {
        Command::Index(ix) => {
            ix.apply(&mut cfg);
            cmd_index(&cfg)
        }
        Command::Simulate(s) => {
            s.apply(&mut cfg);
            cmd_simulate(&cfg)
        }
        Command::Regress { index, regress } => {
            index.apply(&mut cfg);
            regress.apply(&mut cfg);
            cmd_regress(&cfg)
        }
        Command::Rdd { index, rdd } => {
            index.apply(&mut cfg);
            rdd.apply(&mut cfg);
            cmd_rdd(&cfg)
        }
        Command::Report { index, regress, rdd, simulate } => {
            index.apply(&mut cfg);
            regress.apply(&mut cfg);
            rdd.apply(&mut cfg);
            simulate.apply(&mut cfg);
            cmd_report(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n.max(1));
    }
    if let Err(e) = pool.build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(out) => {
            for note in &out.notes {
                eprintln!("note: {note}");
            }
            for f in &out.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
