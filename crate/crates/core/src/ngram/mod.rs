//! Interpolated Kneser–Ney n-gram models over caption corpora.
//!
//! A [`NgramCountTable`] is built once over a corpus. Leave-one-out views are
//! [`CountOverlay`]s that subtract a handful of captions from the shared table
//! without copying it. Both implement [`CountSource`], which is everything the
//! estimator in [`KneserNeyLm`] needs.

mod cache;
mod kn;
mod overlay;
mod table;
mod vocab;

use std::fmt;

use thiserror::Error;

pub use kn::{caption_surprisal, KneserNeyLm, SurprisalScore, DEFAULT_DISCOUNT, DEFAULT_FLOOR};
pub use overlay::{subtract_image, CountOverlay};
pub use table::{build_counts, tables_built_on_current_thread, NgramCountTable};
pub use vocab::{TokenId, Vocab, BOS, BOS_TOKEN, EOS, EOS_TOKEN, UNK, UNK_TOKEN};

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("n-gram order must be 2 or 3, got {0}")]
    InvalidOrder(usize),
    #[error("context has {got} tokens, order {order} needs {expected}")]
    InvalidContextLength { order: usize, expected: usize, got: usize },
    #[error("discount must lie in (0, 1)")]
    InvalidDiscount,
    #[error("smoothing floor must be finite and non-negative")]
    InvalidFloor,
    #[error("held-out n-gram {ngram:?} exceeds its count in the base table")]
    NegativeCount { ngram: Vec<String> },
    #[error("the start symbol is never predicted")]
    UnscorableToken,
    #[error("model has no continuation mass (empty training pool)")]
    EmptyModel,
    #[error("empty token sequence")]
    EmptyCaption,
    #[error("count cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Model order. Only bigram and trigram models are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Bigram,
    Trigram,
}

impl Order {
    pub fn n(self) -> usize {
        match self {
            Order::Bigram => 2,
            Order::Trigram => 3,
        }
    }

    pub fn context_len(self) -> usize {
        self.n() - 1
    }
}

impl TryFrom<usize> for Order {
    type Error = NgramError;

    fn try_from(n: usize) -> Result<Self, Self::Error> {
        match n {
            2 => Ok(Order::Bigram),
            3 => Ok(Order::Trigram),
            other => Err(NgramError::InvalidOrder(other)),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n())
    }
}

/// Pad a caption with `order - 1` start symbols and one end symbol.
pub fn padded_ids(order: Order, ids: impl IntoIterator<Item = TokenId>) -> Vec<TokenId> {
    let mut out = vec![BOS; order.context_len()];
    out.extend(ids);
    out.push(EOS);
    out
}

/// Total and distinct-continuation counts of a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContextStats {
    /// Sum of the counts of everything following the context.
    pub total: u64,
    /// Number of distinct tokens following the context.
    pub types: u64,
}

/// Sufficient statistics for interpolated Kneser–Ney.
///
/// Token ids come from [`CountSource::lookup`]; a token the source has no
/// live count for resolves to [`UNK`]. Continuation statistics never count an
/// n-gram whose final token is the start symbol, since that symbol is not part
/// of the predictive support.
pub trait CountSource {
    fn order(&self) -> Order;

    /// Resolve a token string, mapping anything without live counts to `UNK`.
    fn lookup(&self, token: &str) -> TokenId;

    /// Raw count c(w) over padded captions.
    fn unigram(&self, w: TokenId) -> u64;
    /// Raw count c(vw).
    fn bigram(&self, v: TokenId, w: TokenId) -> u64;
    /// Raw count c(uvw). Always zero for bigram tables.
    fn trigram(&self, u: TokenId, v: TokenId, w: TokenId) -> u64;

    /// c(v·) and N1+(v·) from raw bigram counts.
    fn bigram_context(&self, v: TokenId) -> ContextStats;
    /// c(uv·) and N1+(uv·) from raw trigram counts.
    fn trigram_context(&self, u: TokenId, v: TokenId) -> ContextStats;

    /// N1+(·vw): distinct tokens preceding the bigram `vw` in trigrams.
    fn middle(&self, v: TokenId, w: TokenId) -> u64;
    /// N1+(·v·) as `total` and the number of `w` with N1+(·vw) > 0 as `types`.
    fn middle_context(&self, v: TokenId) -> ContextStats;

    /// N1+(·w): distinct left neighbours of `w`.
    fn continuation(&self, w: TokenId) -> u64;
    /// N1+(··): number of distinct bigram types.
    fn continuation_total(&self) -> u64;

    /// Number of live word types (special symbols excluded).
    fn word_types(&self) -> u64;

    /// Size of the predictive support: word types plus `</s>` and `<unk>`.
    fn support_size(&self) -> u64 {
        self.word_types() + 2
    }

    /// Every token id that can be predicted: live words, `</s>`, `<unk>`.
    fn support(&self) -> Vec<TokenId>;
}
