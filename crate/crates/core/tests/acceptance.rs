//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.
//!
//! Criterion 11 runs on `fixtures/` unless `TXENTROPY_DAI_EXPORT` names a
//! full transfer export (optionally with `TXENTROPY_DAI_MARKET`).

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use rayon::prelude::*;
use txentropy::config::RunConfig;
use txentropy::econometrics::*;
use txentropy::index::*;
use txentropy::ingest::MarketSeries;
use txentropy::lqre::*;
use txentropy::pipeline::{cmd_index, cmd_rdd, cmd_regress};
use txentropy::timeseries::Channel;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {:.2?}, limit {limit:?}", elapsed))
}

fn index(v: &[f64]) -> f64 {
    decentralization_index(&TransactionValues::new(v.to_vec()).unwrap()).value()
}

fn instance(seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let len = r.gen_range(1..=500);
    let mut v: Vec<f64> = (0..len)
        .map(|_| match r.gen_range(0..10) {
            0 => 0.0,
            1..=5 => r.gen_range(1e-3..1e3),
            _ => 10f64.powf(r.gen_range(-6.0..24.0)),
        })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        v[0] = 1.0;
    }
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let failures: Vec<String> = (0..10_000u64)
        .into_par_iter()
        .filter_map(|seed| {
            let v = instance(seed);
            let tv = TransactionValues::new(v.clone()).unwrap();
            let h = decentralization_index(&tv).value();
            let n = tv.positive_count() as f64;
            let mut r = rng(seed ^ 0xdead_beef);
            let mut perm = v.clone();
            for i in (1..perm.len()).rev() {
                perm.swap(i, r.gen_range(0..=i));
            }
            let c = 10f64.powf(r.gen_range(-6.0..6.0));
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            let product = decentralization_index_product(&tv);
            let problems = [
                (h >= 1.0 - 1e-12, "lower bound"),
                (h <= n + 1e-9, "upper bound"),
                (index(&perm).to_bits() == h.to_bits(), "symmetry"),
                ((index(&scaled) - h).abs() <= 1e-12 * h, "scale invariance"),
                ((product - h).abs() <= 1e-9 * h, "product form"),
            ];
            problems.iter().find(|(ok, _)| !ok).map(|(_, what)| format!("seed {seed}: {what}"))
        })
        .collect();
    let elapsed = start.elapsed();
    check(failures.is_empty(), format!("{} failing instance(s), first {:?}", failures.len(), failures.first()))?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("10000 instances in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = 10f64.powf(5.0 * i as f64 / 99.0).round() as usize;
        let h = decentralization_index(&TransactionValues::new(vec![3.7; n]).unwrap()).value();
        worst = worst.max((h - n as f64).abs());
    }
    check(worst <= 1e-9, format!("max |H - N| = {worst:e}"))?;
    Ok(format!("100 sizes in 1..=1e5, max |H - N| = {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let mut r = rng(1_000_000 + seed);
        let p: Vec<f64> = (0..r.gen_range(1..=8)).map(|_| r.gen_range(0.01..10.0)).collect();
        let q: Vec<f64> = (0..r.gen_range(1..=8)).map(|_| r.gen_range(0.01..10.0)).collect();
        let joint: Vec<f64> = p.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
        let expect = index(&p) * index(&q);
        worst = worst.max((index(&joint) - expect).abs() / expect);
    }
    check(worst <= 1e-9, format!("max relative error {worst:e}"))?;
    Ok(format!("1000 joints, max relative error {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let lambdas = [0.0, 0.01, 0.1, 1.0];
    let mut f64_ties = 0;
    for &lambda in &lambdas {
        let mut prev: Option<PreciseIndex> = None;
        let mut prev_f64 = 0.0;
        for n in 2..=200 {
            let cfg = LqreConfig::new(n, lambda).unwrap();
            let h = lqre_index_precise(&cfg, precision_bits_for(&cfg));
            if let Some(p) = &prev {
                check(h > *p, format!("not increasing in N at λ = {lambda}, N = {n}"))?;
            }
            prev = Some(h);
            let fast = lqre_index(&cfg).value();
            check(fast >= prev_f64, format!("f64 value decreases at λ = {lambda}, N = {n}"))?;
            f64_ties += usize::from(fast == prev_f64);
            prev_f64 = fast;
            if lambda == 0.0 {
                check(fast == n as f64, format!("λ = 0 gives {fast} at N = {n}"))?;
            }
        }
    }
    for n in 2..=200 {
        let curve: Vec<f64> = lambdas.iter().map(|&l| lqre_index(&LqreConfig::new(n, l).unwrap()).value()).collect();
        check(curve.windows(2).all(|w| w[1] < w[0]), format!("not decreasing in λ at N = {n}: {curve:?}"))?;
        let h500 = lqre_index(&LqreConfig::new(n, 500.0).unwrap()).value();
        check((h500 - 1.0).abs() <= 1e-6, format!("λ = 500 gives {h500} at N = {n}"))?;
    }
    let extreme = lqre_index(&LqreConfig::new(10_000, 10_000.0).unwrap()).value();
    check(extreme.is_finite(), format!("N = 1e4, λ = 1e4 gives {extreme}"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "strict in N at {} bits or more, {f64_ties} f64 ties at λ = 1, extreme point {extreme}, {elapsed:.2?}",
        precision_bits_for(&LqreConfig::new(2, 1.0).unwrap())
    ))
}

fn criterion_5() -> Outcome {
    let h = index(&[1.0, 1.0, 2.0]);
    check((h - 2f64.powf(1.5)).abs() <= 1e-12, format!("index([1,1,2]) = {h}"))?;
    let w = lqre_weights(&LqreConfig::new(3, std::f64::consts::LN_2).unwrap());
    for (got, want) in w.as_slice().iter().zip([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]) {
        check((got - want).abs() <= 1e-12, format!("weights {:?}", w.as_slice()))?;
    }
    Ok(format!("index([1,1,2]) = {h:.15}, weights {:?}", w.as_slice()))
}

fn criterion_6() -> Outcome {
    let (mut coef_err, mut cov_err): (f64, f64) = (0.0, 0.0);
    for seed in 0..500 {
        let (x, y) = random_problem(seed);
        let fit = ols_newey_west(&design(&x, &y), 0).map_err(|e| format!("seed {seed}: {e}"))?;
        for (a, b) in fit.estimates().iter().zip(normal_equations(&x, &y)) {
            coef_err = coef_err.max((a - b).abs());
        }
        for (i, row) in hc0(&x, &y).iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                cov_err = cov_err.max((fit.covariance[(i, j)] - v).abs());
            }
        }
    }
    check(coef_err <= 1e-8, format!("coefficient error {coef_err:e}"))?;
    check(cov_err <= 1e-10, format!("covariance error {cov_err:e}"))?;
    Ok(format!("500 problems, coefficient error {coef_err:.1e}, HC0 error {cov_err:.1e}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let kept = (0..200u64)
        .into_par_iter()
        .filter(|s| !adf_test(&random_walk(20_000 + s, 500), AdfRegression::Constant).unwrap().is_stationary_at_5pct)
        .count();
    let rejected = (0..200u64)
        .into_par_iter()
        .filter(|s| adf_test(&normals(&mut rng(30_000 + s), 500), AdfRegression::Constant).unwrap().is_stationary_at_5pct)
        .count();
    let elapsed = start.elapsed();
    let summary = format!("random walk kept {kept}/200, white noise rejected {rejected}/200, {elapsed:.2?}");
    check(kept >= 180 && rejected >= 198, summary.clone())?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(summary)
}

fn criterion_8() -> Outcome {
    let phi = 0.6815;
    let estimates: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|s| ar1(&ar1_path(40_000 + s, 5000, phi)).unwrap().estimates()[1])
        .collect();
    let mean = estimates.iter().sum::<f64>() / 50.0;
    check((mean - phi).abs() <= 0.03, format!("mean estimate {mean}"))?;
    Ok(format!("mean estimate {mean:.4} over 50 seeds"))
}

fn criterion_9() -> Outcome {
    let spec = RddSpec::london_hardfork(Channel::Raw, &[]);
    let d = rdd_design(&spec, &index_with_jump(0, 0.0), &MarketSeries::default()).map_err(|e| e.to_string())?;
    check(d.nrows() == 34, format!("{} rows", d.nrows()))?;
    let day = d.column("Day").unwrap();
    let eip = d.column("EIP").unwrap();
    let eip_day = d.column("EIP_Day").unwrap();
    let expected: Vec<f64> = (-11..=22).map(f64::from).collect();
    check(day == expected, format!("Day column {day:?}"))?;
    check(eip.iter().zip(&day).zip(&eip_day).all(|((e, t), p)| e * t == *p), "EIP_Day differs from EIP·Day")?;

    let jump = 4.0;
    let covered = (0..100u64)
        .into_par_iter()
        .filter(|s| {
            let fit = rdd(&spec, &index_with_jump(50_000 + s, jump), &MarketSeries::default(), HacOptions { lag: 1, small_sample: false })
                .unwrap();
            let eip = fit.coefficient("EIP").unwrap();
            (eip.estimate - jump).abs() <= 2.0 * eip.std_error
        })
        .count();
    check(covered >= 90, format!("jump covered in {covered}/100 seeds"))?;
    Ok(format!("34 rows, Day -11..=22, jump covered in {covered}/100 seeds"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run_outputs(cfg: &RunConfig) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut files = cmd_index(cfg).map_err(|e| e.to_string())?.files;
    files.extend(cmd_regress(cfg).map_err(|e| e.to_string())?.files);
    files.extend(cmd_rdd(cfg).map_err(|e| e.to_string())?.files);
    files
        .iter()
        .map(|f| Ok((f.strip_prefix(&cfg.out_dir).unwrap().to_path_buf(), std::fs::read(f).map_err(|e| e.to_string())?)))
        .collect()
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for (label, threads) in [("a1", 1), ("b1", 1), ("a8", 8), ("b8", 8)] {
        let mut cfg = RunConfig::load(&fixtures().join("example.toml")).map_err(|e| e.to_string())?;
        cfg.out_dir = tmp.path().join(label);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        runs.push(pool.install(|| run_outputs(&cfg))?);
    }
    check(!runs[0].is_empty(), "no outputs")?;
    for (i, run) in runs.iter().enumerate().skip(1) {
        check(run == &runs[0], format!("run {i} differs from run 0"))?;
    }
    Ok(format!("{} files identical over 4 runs (threads 1, 1, 8, 8)", runs[0].len()))
}

fn criterion_11() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::load(&fixtures().join("example.toml")).map_err(|e| e.to_string())?;
    cfg.out_dir = tmp.path().to_path_buf();
    let source = match std::env::var_os("TXENTROPY_DAI_EXPORT") {
        Some(export) => {
            let dai = &mut cfg.tokens[0];
            dai.transfers = PathBuf::from(export);
            dai.token_address = None;
            dai.genesis = None;
            dai.end = None;
            dai.market = std::env::var_os("TXENTROPY_DAI_MARKET").map(PathBuf::from);
            cfg.tokens.truncate(1);
            "user export"
        }
        None => "shipped BigQuery-format fixture",
    };
    cmd_regress(&cfg).map_err(|e| e.to_string())?;
    cmd_rdd(&cfg).map_err(|e| e.to_string())?;

    let table3 = std::fs::read_to_string(tmp.path().join("regress/table3.txt")).map_err(|e| e.to_string())?;
    for row in ["ETH_Ret", "ETH_Ret7", "ETH_Ret14", "ETH_Ret21", "ETH_Ret30", "ETH_VtyDayRet30d", "ETH_PC", "Observations"] {
        check(table3.lines().any(|l| l.split_whitespace().next() == Some(row)), format!("table 3 lacks row {row}"))?;
    }
    let columns = if cfg.tokens[0].market.is_some() { 3 } else { 1 };
    for channel in &cfg.rdd.channels {
        let path = tmp.path().join(format!("rdd/table7_dai_{}.txt", channel.name()));
        let table7 = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        for row in ["EIP", "Day", "EIP_Day", "Constant", "Observations", "R^2"] {
            check(table7.lines().any(|l| l.starts_with(row)), format!("table 7 ({}) lacks row {row}", channel.name()))?;
        }
        let obs = table7.lines().find(|l| l.starts_with("Observations")).unwrap();
        check(
            obs.split_whitespace().skip(1).filter(|c| *c == "34").count() == columns,
            format!("table 7 observations row: {obs}"),
        )?;
    }
    Ok(format!("table 3 and table 7 layouts emitted from the {source}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("index lemma suite", criterion_1),
        ("uniform exactness", criterion_2),
        ("multiplicity", criterion_3),
        ("LQRE comparative statics", criterion_4),
        ("hand-derived anchors", criterion_5),
        ("OLS oracle", criterion_6),
        ("ADF size and power", criterion_7),
        ("AR(1) recovery", criterion_8),
        ("RDD structure and jump recovery", criterion_9),
        ("pipeline determinism", criterion_10),
        ("Table 3 and Table 7 reports", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
