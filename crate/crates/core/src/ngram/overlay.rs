use rustc_hash::FxHashMap;

use super::table::{Bigram, NgramCountTable, Trigram};
use super::vocab::{TokenId, Vocab, BOS, UNK};
use super::{padded_ids, ContextStats, CountSource, NgramError, Order};

/// A base table with some captions' counts subtracted.
///
/// Only the subtracted amounts are stored. Distinct-type statistics (the
/// N1+ family) are decremented exactly when an effective count reaches zero,
/// so every query agrees with a table rebuilt from the remaining captions.
#[derive(Debug, Clone)]
pub struct CountOverlay<'a> {
    base: &'a NgramCountTable,
    unigrams: FxHashMap<TokenId, u64>,
    bigrams: FxHashMap<Bigram, u64>,
    trigrams: FxHashMap<Trigram, u64>,
    bigram_ctx: FxHashMap<TokenId, ContextStats>,
    trigram_ctx: FxHashMap<Bigram, ContextStats>,
    middle: FxHashMap<Bigram, u64>,
    middle_ctx: FxHashMap<TokenId, ContextStats>,
    continuation: FxHashMap<TokenId, u64>,
    continuation_total: u64,
    dead_types: u64,
}

fn sub(a: ContextStats, b: Option<&ContextStats>) -> ContextStats {
    match b {
        Some(b) => ContextStats { total: a.total - b.total, types: a.types - b.types },
        None => a,
    }
}

/// Leave-one-out view of `base` without `held_out`.
pub fn subtract_image<'a, 'c, I, T>(base: &'a NgramCountTable, held_out: I) -> Result<CountOverlay<'a>, NgramError>
where
    I: IntoIterator<Item = &'c T>,
    T: AsRef<[String]> + ?Sized + 'c,
{
    CountOverlay::new(base, held_out)
}

impl<'a> CountOverlay<'a> {
    pub fn new<'c, I, T>(base: &'a NgramCountTable, held_out: I) -> Result<Self, NgramError>
    where
        I: IntoIterator<Item = &'c T>,
        T: AsRef<[String]> + ?Sized + 'c,
    {
        let order = base.order();
        let mut overlay = Self {
            base,
            unigrams: FxHashMap::default(),
            bigrams: FxHashMap::default(),
            trigrams: FxHashMap::default(),
            bigram_ctx: FxHashMap::default(),
            trigram_ctx: FxHashMap::default(),
            middle: FxHashMap::default(),
            middle_ctx: FxHashMap::default(),
            continuation: FxHashMap::default(),
            continuation_total: 0,
            dead_types: 0,
        };
        for caption in held_out {
            let tokens = caption.as_ref();
            let ids = tokens
                .iter()
                .map(|t| base.vocab().get(t).filter(|&id| !Vocab::is_special(id)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| NgramError::NegativeCount { ngram: tokens.to_vec() })?;
            let padded = padded_ids(order, ids);
            for &w in &padded {
                *overlay.unigrams.entry(w).or_default() += 1;
            }
            for pair in padded.windows(2) {
                *overlay.bigrams.entry((pair[0], pair[1])).or_default() += 1;
            }
            if order == Order::Trigram {
                for tri in padded.windows(3) {
                    *overlay.trigrams.entry((tri[0], tri[1], tri[2])).or_default() += 1;
                }
            }
        }
        overlay.derive()?;
        Ok(overlay)
    }

    fn negative(&self, ids: &[TokenId]) -> NgramError {
        let vocab = self.base.vocab();
        NgramError::NegativeCount { ngram: ids.iter().map(|&id| vocab.word(id).to_owned()).collect() }
    }

    fn derive(&mut self) -> Result<(), NgramError> {
        let base = self.base;
        for (&w, &d) in &self.unigrams {
            let c = base.unigram(w);
            if d > c {
                return Err(self.negative(&[w]));
            }
            if d == c && !Vocab::is_special(w) {
                self.dead_types += 1;
            }
        }
        for (&(v, w), &d) in &self.bigrams {
            let c = base.bigram(v, w);
            if d > c {
                return Err(self.negative(&[v, w]));
            }
            let ctx = self.bigram_ctx.entry(v).or_default();
            ctx.total += d;
            if d == c {
                ctx.types += 1;
                if w != BOS {
                    *self.continuation.entry(w).or_default() += 1;
                    self.continuation_total += 1;
                }
            }
        }
        for (&(u, v, w), &d) in &self.trigrams {
            let c = base.trigram(u, v, w);
            if d > c {
                return Err(self.negative(&[u, v, w]));
            }
            let ctx = self.trigram_ctx.entry((u, v)).or_default();
            ctx.total += d;
            if d == c {
                ctx.types += 1;
                *self.middle.entry((v, w)).or_default() += 1;
            }
        }
        for (&(v, w), &m) in &self.middle {
            let ctx = self.middle_ctx.entry(v).or_default();
            ctx.total += m;
            if m == base.middle(v, w) {
                ctx.types += 1;
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &NgramCountTable {
        self.base
    }

    /// Whether nothing was subtracted.
    pub fn is_identity(&self) -> bool {
        self.unigrams.is_empty()
    }
}

impl CountSource for CountOverlay<'_> {
    fn order(&self) -> Order {
        self.base.order()
    }

    fn lookup(&self, token: &str) -> TokenId {
        match self.base.vocab().get(token) {
            Some(id) if Vocab::is_special(id) || self.unigram(id) > 0 => id,
            _ => UNK,
        }
    }

    fn unigram(&self, w: TokenId) -> u64 {
        self.base.unigram(w) - self.unigrams.get(&w).copied().unwrap_or(0)
    }

    fn bigram(&self, v: TokenId, w: TokenId) -> u64 {
        self.base.bigram(v, w) - self.bigrams.get(&(v, w)).copied().unwrap_or(0)
    }

    fn trigram(&self, u: TokenId, v: TokenId, w: TokenId) -> u64 {
        self.base.trigram(u, v, w) - self.trigrams.get(&(u, v, w)).copied().unwrap_or(0)
    }

    fn bigram_context(&self, v: TokenId) -> ContextStats {
        sub(self.base.bigram_context(v), self.bigram_ctx.get(&v))
    }

    fn trigram_context(&self, u: TokenId, v: TokenId) -> ContextStats {
        sub(self.base.trigram_context(u, v), self.trigram_ctx.get(&(u, v)))
    }

    fn middle(&self, v: TokenId, w: TokenId) -> u64 {
        self.base.middle(v, w) - self.middle.get(&(v, w)).copied().unwrap_or(0)
    }

    fn middle_context(&self, v: TokenId) -> ContextStats {
        sub(self.base.middle_context(v), self.middle_ctx.get(&v))
    }

    fn continuation(&self, w: TokenId) -> u64 {
        self.base.continuation(w) - self.continuation.get(&w).copied().unwrap_or(0)
    }

    fn continuation_total(&self) -> u64 {
        self.base.continuation_total() - self.continuation_total
    }

    fn word_types(&self) -> u64 {
        self.base.word_types() - self.dead_types
    }

    fn support(&self) -> Vec<TokenId> {
        let mut ids = self.base.support();
        ids.retain(|&id| Vocab::is_special(id) || self.unigram(id) > 0);
        ids
    }
}
