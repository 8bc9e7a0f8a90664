//! Transaction decentralization index for token-transfer streams.
//!
//! The index of a set of transfer values is `2^H`, where `H` is the Shannon
//! entropy (bits) of the value shares. It ranges from 1 (one transfer carries
//! everything) to the number of positive transfers (all equal).

pub mod config;
pub mod econometrics;
pub mod index;
pub mod ingest;
pub mod lqre;
pub mod pipeline;
pub mod svg;
pub mod timeseries;

pub use index::{
    decentralization_index, decentralization_index_product, gini, hhi, index_of_distribution, nakamoto, shannon_entropy_bits,
    weights, DecentralizationIndex, IndexError, TransactionValues, WeightDistribution, DEFAULT_NAKAMOTO_THRESHOLD,
};
