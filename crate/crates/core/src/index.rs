//! Entropy-based decentralization index and auxiliary concentration metrics.
//!
//! The index of a set of transaction values is `2^H` where `H` is the Shannon
//! entropy (bits) of the value-weighted distribution. It reads as the effective
//! number of equally sized transactions: 1 for a single transfer, `N` for `N`
//! equal transfers.
//!
//! Conventions:
//! - zero-valued transactions keep their position but carry weight 0 and add
//!   nothing to the entropy (`0 · log 0 = 0`);
//! - an all-zero input is an error, never index 1;
//! - positive weights are accumulated in ascending order with compensated
//!   summation, so any permutation of the input gives a bitwise-identical result.

use thiserror::Error;

/// Absolute tolerance on `Σ p_i = 1` for a [`WeightDistribution`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Default share that the Nakamoto coefficient must reach.
pub const DEFAULT_NAKAMOTO_THRESHOLD: f64 = 0.51;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("no transaction values supplied")]
    Empty,
    #[error("every transaction value is zero; weights are undefined")]
    AllZero,
    #[error("transaction value at position {position} is negative ({value})")]
    NegativeValue { position: usize, value: f64 },
    #[error("transaction value at position {position} is not finite")]
    NonFinite { position: usize },
    #[error("weight at position {position} is outside [0, 1] ({value})")]
    WeightOutOfRange { position: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("threshold {0} is outside (0, 1]")]
    BadThreshold(f64),
}

/// Nonnegative transaction values with at least one strictly positive entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionValues(Vec<f64>);

impl TransactionValues {
    pub fn new(values: Vec<f64>) -> Result<Self, IndexError> {
        if values.is_empty() {
            return Err(IndexError::Empty);
        }
        for (position, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(IndexError::NonFinite { position });
            }
            if value < 0.0 {
                return Err(IndexError::NegativeValue { position, value });
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(IndexError::AllZero);
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of strictly positive values; the upper bound of the index.
    pub fn positive_count(&self) -> usize {
        self.0.iter().filter(|&&v| v > 0.0).count()
    }
}

impl TryFrom<Vec<f64>> for TransactionValues {
    type Error = IndexError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

/// A probability vector: nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution(Vec<f64>);

impl WeightDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self, IndexError> {
        if weights.is_empty() {
            return Err(IndexError::Empty);
        }
        for (position, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(IndexError::NonFinite { position });
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(IndexError::WeightOutOfRange { position, value });
            }
        }
        let sum = compensated_sum(weights.iter().copied());
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(IndexError::NotNormalized { sum });
        }
        Ok(Self(weights))
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Result<Self, IndexError> {
        if n == 0 {
            return Err(IndexError::Empty);
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    // Constructors inside the crate that already guarantee normalization.
    pub(crate) fn from_normalized(weights: Vec<f64>) -> Self {
        Self(weights)
    }
}

/// The effective number of transactions, `2^H`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DecentralizationIndex(f64);

impl DecentralizationIndex {
    pub fn value(self) -> f64 {
        self.0
    }

    pub(crate) fn from_entropy_bits(bits: f64) -> Self {
        Self(bits.exp2())
    }

    /// Index of `n` equal weights.
    pub(crate) fn uniform(n: usize) -> Self {
        Self(n as f64)
    }
}

impl From<DecentralizationIndex> for f64 {
    fn from(index: DecentralizationIndex) -> f64 {
        index.0
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn sorted_positive(values: &[f64]) -> Vec<f64> {
    let mut positive: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    positive
}

/// Value-weighted shares `v_i / Σ v_j`, positionally aligned with the input.
pub fn weights(values: &TransactionValues) -> WeightDistribution {
    let total = compensated_sum(sorted_positive(values.as_slice()));
    WeightDistribution::from_normalized(values.as_slice().iter().map(|&v| v / total).collect())
}

fn entropy_bits_of_sorted(sorted_weights: &[f64]) -> f64 {
    let h = compensated_sum(sorted_weights.iter().map(|&p| -p * p.log2()));
    // All terms are nonnegative; clamp the rounding residue of a lone weight.
    h.max(0.0)
}

/// Shannon entropy in bits over the positive support.
pub fn shannon_entropy_bits(dist: &WeightDistribution) -> f64 {
    entropy_bits_of_sorted(&sorted_positive(dist.as_slice()))
}

/// `2^(-Σ p_i log2 p_i)` with `p_i = v_i / Σ v_j`.
pub fn decentralization_index(values: &TransactionValues) -> DecentralizationIndex {
    let positive = sorted_positive(values.as_slice());
    let total = compensated_sum(positive.iter().copied());
    let shares: Vec<f64> = positive.iter().map(|&v| v / total).collect();
    DecentralizationIndex::from_entropy_bits(entropy_bits_of_sorted(&shares))
}

/// Index of an already-normalized distribution.
pub fn index_of_distribution(dist: &WeightDistribution) -> DecentralizationIndex {
    DecentralizationIndex::from_entropy_bits(shannon_entropy_bits(dist))
}

/// The product form `Π p_i^(-p_i)`; algebraically identical to
/// [`decentralization_index`] and kept as a second route for cross-checks.
pub fn decentralization_index_product(values: &TransactionValues) -> f64 {
    let positive = sorted_positive(values.as_slice());
    let total = compensated_sum(positive.iter().copied());
    positive
        .iter()
        .map(|&v| {
            let p = v / total;
            p.powf(-p)
        })
        .product()
}

/// Population Gini coefficient of the weights (no small-sample correction).
pub fn gini(dist: &WeightDistribution) -> f64 {
    let mut sorted = dist.as_slice().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let total = compensated_sum(sorted.iter().copied());
    // G = 2 Σ i·x_(i) / (n Σ x) − (n + 1)/n, ranks starting at 1.
    let ranked = compensated_sum(sorted.iter().enumerate().map(|(i, &x)| (i as f64 + 1.0) * x));
    let g = 2.0 * ranked / (n * total) - (n + 1.0) / n;
    g.max(0.0)
}

/// Herfindahl–Hirschman index `Σ p_i²`.
pub fn hhi(dist: &WeightDistribution) -> f64 {
    let mut sorted = dist.as_slice().to_vec();
    sorted.sort_by(f64::total_cmp);
    compensated_sum(sorted.iter().map(|&p| p * p))
}

/// Smallest number of largest shares whose sum reaches `threshold`.
///
/// A `1e-12` slack absorbs rounding in the running sum, so 51 shares of 1/100
/// reach 0.51.
pub fn nakamoto(dist: &WeightDistribution, threshold: f64) -> Result<usize, IndexError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(IndexError::BadThreshold(threshold));
    }
    let mut sorted = dist.as_slice().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0;
    let mut carry = 0.0;
    for (k, &p) in sorted.iter().enumerate() {
        let t = sum + p;
        if sum >= p {
            carry += (sum - t) + p;
        } else {
            carry += (p - t) + sum;
        }
        sum = t;
        if sum + carry + 1e-12 >= threshold {
            return Ok(k + 1);
        }
    }
    Ok(sorted.len())
}
