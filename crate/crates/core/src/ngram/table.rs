use std::cell::Cell;

use rustc_hash::FxHashMap;

use super::vocab::{TokenId, Vocab, BOS, EOS, UNK};
use super::{padded_ids, ContextStats, CountSource, Order};

thread_local! {
    static TABLES_BUILT: Cell<usize> = const { Cell::new(0) };
}

/// Number of count tables constructed on the calling thread so far.
pub fn tables_built_on_current_thread() -> usize {
    TABLES_BUILT.with(Cell::get)
}

pub(crate) type Bigram = (TokenId, TokenId);
pub(crate) type Trigram = (TokenId, TokenId, TokenId);

/// Raw n-gram counts plus the derived Kneser–Ney statistics.
///
/// Immutable once built; every derived field is a pure function of the raw
/// unigram, bigram and trigram counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramCountTable {
    order: Order,
    vocab: Vocab,
    pub(crate) unigrams: Vec<u64>,
    pub(crate) bigrams: FxHashMap<Bigram, u64>,
    pub(crate) trigrams: FxHashMap<Trigram, u64>,
    bigram_ctx: Vec<ContextStats>,
    trigram_ctx: FxHashMap<Bigram, ContextStats>,
    middle: FxHashMap<Bigram, u64>,
    middle_ctx: Vec<ContextStats>,
    continuation: Vec<u64>,
    continuation_total: u64,
    word_types: u64,
}

/// Count every padded n-gram of `captions`.
pub fn build_counts<'a, I, T>(captions: I, order: Order) -> NgramCountTable
where
    I: IntoIterator<Item = &'a T>,
    T: AsRef<[String]> + ?Sized + 'a,
{
    NgramCountTable::build(captions, order)
}

impl NgramCountTable {
    pub fn build<'a, I, T>(captions: I, order: Order) -> Self
    where
        I: IntoIterator<Item = &'a T>,
        T: AsRef<[String]> + ?Sized + 'a,
    {
        let mut vocab = Vocab::new();
        let mut unigrams: Vec<u64> = vec![0; vocab.len()];
        let mut bigrams: FxHashMap<Bigram, u64> = FxHashMap::default();
        let mut trigrams: FxHashMap<Trigram, u64> = FxHashMap::default();
        let mut ids = Vec::new();
        for caption in captions {
            ids.clear();
            ids.extend(caption.as_ref().iter().map(|t| vocab.intern(t)));
            if unigrams.len() < vocab.len() {
                unigrams.resize(vocab.len(), 0);
            }
            let padded = padded_ids(order, ids.iter().copied());
            for &w in &padded {
                unigrams[w as usize] += 1;
            }
            for pair in padded.windows(2) {
                *bigrams.entry((pair[0], pair[1])).or_default() += 1;
            }
            if order == Order::Trigram {
                for tri in padded.windows(3) {
                    *trigrams.entry((tri[0], tri[1], tri[2])).or_default() += 1;
                }
            }
        }
        Self::from_raw(order, vocab, unigrams, bigrams, trigrams)
    }

    /// Derive every Kneser–Ney statistic from raw counts.
    pub(crate) fn from_raw(
        order: Order,
        vocab: Vocab,
        mut unigrams: Vec<u64>,
        bigrams: FxHashMap<Bigram, u64>,
        trigrams: FxHashMap<Trigram, u64>,
    ) -> Self {
        TABLES_BUILT.with(|c| c.set(c.get() + 1));
        let n = vocab.len();
        unigrams.resize(n, 0);
        let mut bigram_ctx = vec![ContextStats::default(); n];
        let mut continuation = vec![0u64; n];
        let mut continuation_total = 0;
        for (&(v, w), &c) in &bigrams {
            let ctx = &mut bigram_ctx[v as usize];
            ctx.total += c;
            ctx.types += 1;
            if w != BOS {
                continuation[w as usize] += 1;
                continuation_total += 1;
            }
        }
        let mut trigram_ctx: FxHashMap<Bigram, ContextStats> = FxHashMap::default();
        let mut middle: FxHashMap<Bigram, u64> = FxHashMap::default();
        for (&(u, v, w), &c) in &trigrams {
            let ctx = trigram_ctx.entry((u, v)).or_default();
            ctx.total += c;
            ctx.types += 1;
            *middle.entry((v, w)).or_default() += 1;
        }
        let mut middle_ctx = vec![ContextStats::default(); n];
        for (&(v, _), &m) in &middle {
            let ctx = &mut middle_ctx[v as usize];
            ctx.total += m;
            ctx.types += 1;
        }
        let word_types = unigrams
            .iter()
            .enumerate()
            .filter(|&(id, &c)| c > 0 && !Vocab::is_special(id as TokenId))
            .count() as u64;
        Self {
            order,
            vocab,
            unigrams,
            bigrams,
            trigrams,
            bigram_ctx,
            trigram_ctx,
            middle,
            middle_ctx,
            continuation,
            continuation_total,
            word_types,
        }
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Sum of all unigram counts, i.e. the number of padded tokens counted.
    pub fn total_unigrams(&self) -> u64 {
        self.unigrams.iter().sum()
    }

    pub fn n_bigram_types(&self) -> usize {
        self.bigrams.len()
    }

    pub fn n_trigram_types(&self) -> usize {
        self.trigrams.len()
    }

    /// Count of an n-gram given as strings (length 1 to order).
    pub fn count(&self, ngram: &[&str]) -> u64 {
        let Some(ids) = ngram.iter().map(|t| self.vocab.get(t)).collect::<Option<Vec<_>>>() else {
            return 0;
        };
        match ids[..] {
            [w] => self.unigram(w),
            [v, w] => self.bigram(v, w),
            [u, v, w] => self.trigram(u, v, w),
            _ => 0,
        }
    }
}

impl CountSource for NgramCountTable {
    fn order(&self) -> Order {
        self.order
    }

    fn lookup(&self, token: &str) -> TokenId {
        self.vocab.get(token).unwrap_or(UNK)
    }

    fn unigram(&self, w: TokenId) -> u64 {
        self.unigrams.get(w as usize).copied().unwrap_or(0)
    }

    fn bigram(&self, v: TokenId, w: TokenId) -> u64 {
        self.bigrams.get(&(v, w)).copied().unwrap_or(0)
    }

    fn trigram(&self, u: TokenId, v: TokenId, w: TokenId) -> u64 {
        self.trigrams.get(&(u, v, w)).copied().unwrap_or(0)
    }

    fn bigram_context(&self, v: TokenId) -> ContextStats {
        self.bigram_ctx.get(v as usize).copied().unwrap_or_default()
    }

    fn trigram_context(&self, u: TokenId, v: TokenId) -> ContextStats {
        self.trigram_ctx.get(&(u, v)).copied().unwrap_or_default()
    }

    fn middle(&self, v: TokenId, w: TokenId) -> u64 {
        self.middle.get(&(v, w)).copied().unwrap_or(0)
    }

    fn middle_context(&self, v: TokenId) -> ContextStats {
        self.middle_ctx.get(v as usize).copied().unwrap_or_default()
    }

    fn continuation(&self, w: TokenId) -> u64 {
        self.continuation.get(w as usize).copied().unwrap_or(0)
    }

    fn continuation_total(&self) -> u64 {
        self.continuation_total
    }

    fn word_types(&self) -> u64 {
        self.word_types
    }

    fn support(&self) -> Vec<TokenId> {
        let mut ids = vec![EOS, UNK];
        ids.extend(
            (0..self.vocab.len() as TokenId).filter(|&id| !Vocab::is_special(id) && self.unigram(id) > 0),
        );
        ids
    }
}
