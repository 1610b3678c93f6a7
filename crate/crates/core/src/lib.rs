//! Caption-set diversity measured as surprisal variance.

pub mod corpus;
pub mod lexstats;
pub mod ngram;
pub mod pipeline;
pub mod scalar;
pub mod scorers;
pub mod stats;

/// Kneser–Ney model over f64 probabilities.
pub type KneserNey<'c, C> = ngram::KneserNeyLm<'c, C, f64>;
/// Paired test result in f64.
pub type PairedTest = stats::PairedTestResult<f64>;
