//! Logit-equilibrium (LQRE) value family `v_n = e^{nλ}`, `n = 1..=N`, and
//! its decentralization index.
//!
//! Weights are evaluated in log space: exponents are shifted by their maximum
//! `Nλ` before exponentiation and the entropy is taken from the shifted
//! log-weights directly, so `(N, λ) = (10^4, 10^4)` stays finite.
//!
//! For `λ > 0` the distribution is geometric and adding one more transaction
//! changes the index by roughly `N·e^{-Nλ}`. Past `N·λ ≈ 40` that increment
//! drops below one ulp of an `f64`, so [`lqre_index_precise`] repeats the
//! computation with arbitrary-precision floats for comparative statics that
//! need to resolve it.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use astro_float::{BigFloat, Consts, RoundingMode};
use rayon::prelude::*;
use thiserror::Error;

use crate::index::{compensated_sum, DecentralizationIndex, WeightDistribution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LqreError {
    #[error("transaction count must be at least 1")]
    ZeroTransactions,
    #[error("lambda must be finite and nonnegative, got {0}")]
    BadLambda(f64),
    #[error("sweep axis `{0}` must be nonempty and strictly increasing")]
    BadAxis(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqreConfig {
    n_transactions: usize,
    lambda: f64,
}

impl LqreConfig {
    pub fn new(n_transactions: usize, lambda: f64) -> Result<Self, LqreError> {
        if n_transactions == 0 {
            return Err(LqreError::ZeroTransactions);
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(LqreError::BadLambda(lambda));
        }
        Ok(Self { n_transactions, lambda })
    }

    pub fn n_transactions(&self) -> usize {
        self.n_transactions
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Natural-log weights `ln P(v_n)`, `n = 1..=N`.
fn log_weights(cfg: &LqreConfig) -> Vec<f64> {
    let n = cfg.n_transactions;
    // Shifted exponents (n − N)·λ are all ≤ 0 with the last exactly 0.
    let shifted: Vec<f64> = (1..=n).map(|i| (i as f64 - n as f64) * cfg.lambda).collect();
    // Accumulate from the smallest terms up.
    let log_partition = compensated_sum(shifted.iter().map(|&s| s.exp())).ln();
    shifted.into_iter().map(|s| s - log_partition).collect()
}

/// `P(v_n) = e^{nλ} / Σ_m e^{mλ}`.
pub fn lqre_weights(cfg: &LqreConfig) -> WeightDistribution {
    WeightDistribution::from_normalized(log_weights(cfg).into_iter().map(f64::exp).collect())
}

/// Index of the LQRE distribution with entropy taken from log-weights.
pub fn lqre_index(cfg: &LqreConfig) -> DecentralizationIndex {
    if cfg.lambda == 0.0 {
        return DecentralizationIndex::uniform(cfg.n_transactions);
    }
    let entropy_nats = compensated_sum(log_weights(cfg).into_iter().map(|lp| {
        let p = lp.exp();
        if p == 0.0 {
            0.0
        } else {
            -p * lp
        }
    }));
    DecentralizationIndex::from_entropy_bits(entropy_nats.max(0.0) / std::f64::consts::LN_2)
}

/// High-precision LQRE index value.
#[derive(Clone)]
pub struct PreciseIndex(BigFloat);

impl PreciseIndex {
    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.0
    }
}

impl PartialEq for PreciseIndex {
    fn eq(&self, other: &Self) -> bool {
        self.0.partial_cmp(&other.0) == Some(Ordering::Equal)
    }
}

impl PartialOrd for PreciseIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for PreciseIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PreciseIndex({})", self.0)
    }
}

/// Mantissa bits sufficient to resolve the tail weight `e^{-(N-1)λ}` against 1
/// with 128 bits to spare.
pub fn precision_bits_for(cfg: &LqreConfig) -> usize {
    let tail_bits = (cfg.n_transactions as f64 * cfg.lambda * std::f64::consts::LOG2_E).ceil();
    let bits = 128 + tail_bits.min(1_048_576.0) as usize;
    bits.div_ceil(64) * 64
}

/// [`lqre_index`] evaluated with `precision_bits` of mantissa.
///
/// With `w_k = e^{-kλ}` (`k = N − n`) and `Z = Σ w_k`, the entropy in nats is
/// `λ·Σ k·w_k / Z + ln Z`, so one `exp`, one `ln` and `2N` products suffice.
pub fn lqre_index_precise(cfg: &LqreConfig, precision_bits: usize) -> PreciseIndex {
    let p = precision_bits;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("astro-float constant cache");
    let lambda = BigFloat::from_f64(cfg.lambda, p);
    let q = lambda.neg().exp(p, rm, &mut cc);

    let mut w = BigFloat::from_u64(1, p);
    let mut weights = Vec::with_capacity(cfg.n_transactions);
    for _ in 0..cfg.n_transactions {
        weights.push(w.clone());
        w = w.mul(&q, p, rm);
    }
    let mut z = BigFloat::from_u64(0, p);
    let mut first_moment = BigFloat::from_u64(0, p);
    for (k, w) in weights.iter().enumerate().rev() {
        z = z.add(w, p, rm);
        first_moment = first_moment.add(&w.mul(&BigFloat::from_u64(k as u64, p), p, rm), p, rm);
    }
    let entropy = lambda.mul(&first_moment, p, rm).div(&z, p, rm).add(&z.ln(p, rm, &mut cc), p, rm);
    PreciseIndex(entropy.exp(p, rm, &mut cc))
}

/// Strictly increasing N and λ axes of a comparative-statics sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    n_values: Vec<usize>,
    lambda_values: Vec<f64>,
}

impl SweepGrid {
    pub fn new(n_values: Vec<usize>, lambda_values: Vec<f64>) -> Result<Self, LqreError> {
        if n_values.is_empty() || n_values[0] == 0 || n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LqreError::BadAxis("n"));
        }
        if lambda_values.is_empty()
            || lambda_values.iter().any(|l| !l.is_finite() || *l < 0.0)
            || lambda_values.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(LqreError::BadAxis("lambda"));
        }
        Ok(Self { n_values, lambda_values })
    }

    pub fn n_values(&self) -> &[usize] {
        &self.n_values
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda_values
    }
}

/// `points` integers spread evenly over `[lo, hi]`, deduplicated after rounding.
pub fn even_counts(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    let lo = lo.max(1);
    if points <= 1 || hi <= lo {
        return vec![lo];
    }
    let step = (hi - lo) as f64 / (points - 1) as f64;
    let mut out: Vec<usize> = (0..points).map(|i| lo + (i as f64 * step).round() as usize).collect();
    out.dedup();
    out
}

/// `points` reals spread evenly over `[lo, hi]`.
pub fn even_reals(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 || hi <= lo {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { hi } else { lo + i as f64 * step }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub lambda: f64,
    pub index: f64,
}

/// One row per `(N, λ)`, N-major. Rows are computed in parallel; order is fixed.
pub fn sweep(grid: &SweepGrid) -> Vec<SweepRow> {
    let pairs: Vec<(usize, f64)> = grid
        .n_values
        .iter()
        .flat_map(|&n| grid.lambda_values.iter().map(move |&l| (n, l)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(n, lambda)| {
            let cfg = LqreConfig { n_transactions: n, lambda };
            SweepRow { n, lambda, index: lqre_index(&cfg).value() }
        })
        .collect()
}

/// CSV with header `n,lambda,index`; floats use shortest round-trip formatting.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,lambda,index")?;
    for row in rows {
        writeln!(out, "{},{},{}", row.n, row.lambda, row.index)?;
    }
    Ok(())
}
