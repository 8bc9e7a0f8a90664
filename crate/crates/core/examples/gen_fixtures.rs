//! Regenerates the synthetic dataset under `fixtures/`.
//!
//! ```text
//! cargo run -p txentropy --example gen_fixtures -- fixtures
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::{Days, NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

const DAI: &str = "0x6b175474e89094c44da98b954eedeac495271d0f";
const USDT: &str = "0xdac17f958d2ee523a2206206994597c13d831ec7";
const ZERO: &str = "0x0000000000000000000000000000000000000000";

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn days(from: NaiveDate, to: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    (0..=(to - from).num_days() as u64).map(move |i| from + Days::new(i))
}

fn address(rng: &mut ChaCha8Rng, pool: usize) -> String {
    let id: u64 = rng.gen_range(1..=pool as u64);
    format!("0x{:040x}", id.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

struct TokenSpec {
    token: &'static str,
    decimals: u32,
    epoch_seconds: bool,
    event_shift: f64,
    seed: u64,
}

/// Transfers with lognormal values. After the London fork the value spread
/// narrows by `event_shift`, lifting the index. One day carries only
/// zero-value transfers; a few rows are self transfers, mints and burns.
fn transfers(spec: &TokenSpec) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = String::from("value,from_address,to_address,block_timestamp,token_address\n");
    let event = date(2021, 8, 5);
    let zero_day = date(2021, 6, 13);
    let scale = 10f64.powi(spec.decimals as i32);
    for day in days(date(2021, 5, 1), date(2021, 9, 30)) {
        let count = rng.gen_range(40..120);
        let sigma = if day >= event { 2.2 - spec.event_shift } else { 2.2 };
        let values = LogNormal::new(5.0, sigma).unwrap();
        let mut seconds: Vec<u32> = (0..count).map(|_| rng.gen_range(0..86_400)).collect();
        seconds.sort_unstable();
        for s in seconds {
            let ts = Utc.from_utc_datetime(&day.and_hms_opt(0, 0, 0).unwrap()) + chrono::Duration::seconds(s as i64);
            let value: u128 = if day == zero_day || rng.gen_bool(0.02) {
                0
            } else {
                (values.sample(&mut rng) * scale) as u128
            };
            let from = if rng.gen_bool(0.01) { ZERO.to_string() } else { address(&mut rng, 400) };
            let to = if rng.gen_bool(0.02) { from.clone() } else { address(&mut rng, 400) };
            let stamp = if spec.epoch_seconds {
                ts.timestamp().to_string()
            } else {
                ts.format("%Y-%m-%d %H:%M:%S UTC").to_string()
            };
            let _ = writeln!(out, "{value},{from},{to},{stamp},{}", spec.token);
        }
    }
    out
}

/// Geometric random-walk prices with volume and count columns.
fn market(seed: u64, start_price: f64, daily_sd: f64, with_volatility: bool, gap: Option<NaiveDate>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shock = Normal::new(0.0, daily_sd).unwrap();
    let mut header = String::from("date,PriceUSD,CapMrktCurUSD,TxTfrValAdjUSD,TxTfrCnt");
    if with_volatility {
        header.push_str(",VtyDayRet30d");
    }
    let mut out = header + "\n";
    let mut price = start_price;
    let mut log_returns: Vec<f64> = Vec::new();
    for day in days(date(2021, 3, 1), date(2021, 9, 30)) {
        let r: f64 = shock.sample(&mut rng);
        price *= r.exp();
        log_returns.push(r);
        let volume = price * rng.gen_range(2.0e6..9.0e6);
        let count = rng.gen_range(5_000..40_000);
        let cap = price * 5.0e9;
        let price_cell = if Some(day) == gap { String::new() } else { format!("{price:.6}") };
        let _ = write!(out, "{day},{price_cell},{cap:.2},{volume:.2},{count}");
        if with_volatility {
            if log_returns.len() > 30 {
                let w = &log_returns[log_returns.len() - 30..];
                let m = w.iter().sum::<f64>() / 30.0;
                let sd = (w.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 29.0).sqrt();
                let _ = write!(out, ",{sd:.8}");
            } else {
                out.push(',');
            }
        }
        out.push('\n');
    }
    out
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir).expect("create fixture directory");
    let write = |name: &str, body: String| std::fs::write(dir.join(name), body).expect("write fixture");
    write(
        "dai_transfers.csv",
        transfers(&TokenSpec { token: DAI, decimals: 18, epoch_seconds: false, event_shift: 0.6, seed: 1 }),
    );
    write(
        "usdt_transfers.csv",
        transfers(&TokenSpec { token: USDT, decimals: 6, epoch_seconds: true, event_shift: 0.3, seed: 2 }),
    );
    write("eth_market.csv", market(3, 1_500.0, 0.045, false, None));
    write("dai_market.csv", market(4, 1.0, 0.002, true, Some(date(2021, 6, 10))));
    write("usdt_market.csv", market(5, 1.0, 0.001, true, None));
}
