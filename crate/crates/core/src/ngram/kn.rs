use crate::scalar::{LogBase, Real, Scalar};

use super::vocab::{TokenId, BOS};
use super::{CountSource, NgramError, Order};

/// Absolute discount used when none is configured.
pub const DEFAULT_DISCOUNT: f64 = 0.1;
/// Additive floor on continuation counts used when none is configured.
pub const DEFAULT_FLOOR: f64 = 1.0;

/// Interpolated Kneser–Ney estimator over any [`CountSource`].
///
/// With discount `D` and floor `α`, the trigram estimate is
///
/// ```text
/// P(w|uv)   = max(c(uvw) - D, 0) / c(uv·) + D N1+(uv·) / c(uv·) · Pmid(w|v)
/// Pmid(w|v) = max(N1+(·vw) - D, 0) / N1+(·v·) + D N1+(v·) / N1+(·v·) · Pcont(w)
/// Pcont(w)  = (N1+(·w) + α) / (N1+(··) + α |support|)
/// ```
///
/// A level whose denominator is zero hands over to the next lower level.
/// Bigram models skip the middle level. `|support|` counts the live word
/// types plus `</s>` and `<unk>`, so every seen context sums to one over the
/// support.
#[derive(Debug, Clone, Copy)]
pub struct KneserNeyLm<'c, C: CountSource + ?Sized, S> {
    counts: &'c C,
    discount: S,
    floor: S,
}

impl<'c, C: CountSource + ?Sized, S: Scalar> KneserNeyLm<'c, C, S> {
    pub fn new(counts: &'c C, discount: S, floor: S) -> Result<Self, NgramError> {
        if !(discount > S::zero() && discount < S::one()) {
            return Err(NgramError::InvalidDiscount);
        }
        // rejects NaN and infinities for floats; always passes for rationals
        if !(floor >= S::zero()) || floor - floor != S::zero() {
            return Err(NgramError::InvalidFloor);
        }
        Ok(Self { counts, discount, floor })
    }

    pub fn counts(&self) -> &'c C {
        self.counts
    }

    pub fn order(&self) -> Order {
        self.counts.order()
    }

    pub fn discount(&self) -> S {
        self.discount
    }

    pub fn floor(&self) -> S {
        self.floor
    }

    fn discounted(&self, count: u64) -> S {
        let c = S::from_count(count);
        if c > self.discount {
            c - self.discount
        } else {
            S::zero()
        }
    }

    /// Floored continuation distribution.
    pub fn p_continuation(&self, w: TokenId) -> Result<S, NgramError> {
        let denom = S::from_count(self.counts.continuation_total())
            + self.floor * S::from_count(self.counts.support_size());
        if denom == S::zero() {
            return Err(NgramError::EmptyModel);
        }
        Ok((S::from_count(self.counts.continuation(w)) + self.floor) / denom)
    }

    fn p_middle(&self, v: TokenId, w: TokenId) -> Result<S, NgramError> {
        let ctx = self.counts.middle_context(v);
        let lower = self.p_continuation(w)?;
        if ctx.total == 0 {
            return Ok(lower);
        }
        let total = S::from_count(ctx.total);
        Ok(self.discounted(self.counts.middle(v, w)) / total
            + self.discount * S::from_count(ctx.types) / total * lower)
    }

    fn p_bigram(&self, v: TokenId, w: TokenId) -> Result<S, NgramError> {
        let ctx = self.counts.bigram_context(v);
        let lower = self.p_continuation(w)?;
        if ctx.total == 0 {
            return Ok(lower);
        }
        let total = S::from_count(ctx.total);
        Ok(self.discounted(self.counts.bigram(v, w)) / total
            + self.discount * S::from_count(ctx.types) / total * lower)
    }

    fn p_trigram(&self, u: TokenId, v: TokenId, w: TokenId) -> Result<S, NgramError> {
        let ctx = self.counts.trigram_context(u, v);
        let lower = self.p_middle(v, w)?;
        if ctx.total == 0 {
            return Ok(lower);
        }
        let total = S::from_count(ctx.total);
        Ok(self.discounted(self.counts.trigram(u, v, w)) / total
            + self.discount * S::from_count(ctx.types) / total * lower)
    }

    /// P(word | context) over resolved token ids.
    pub fn prob_ids(&self, context: &[TokenId], word: TokenId) -> Result<S, NgramError> {
        let order = self.order();
        if context.len() != order.context_len() {
            return Err(NgramError::InvalidContextLength {
                order: order.n(),
                expected: order.context_len(),
                got: context.len(),
            });
        }
        if word == BOS {
            return Err(NgramError::UnscorableToken);
        }
        match *context {
            [v] => self.p_bigram(v, word),
            [u, v] => self.p_trigram(u, v, word),
            _ => unreachable!("context length checked above"),
        }
    }

    /// P(word | context); unknown tokens are treated as `<unk>`.
    pub fn prob(&self, context: &[&str], word: &str) -> Result<S, NgramError> {
        let ids: Vec<TokenId> = context.iter().map(|t| self.counts.lookup(t)).collect();
        self.prob_ids(&ids, self.counts.lookup(word))
    }
}

/// Per-position surprisal of one caption and its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SurprisalScore<R> {
    pub per_token: Vec<R>,
    pub mean: R,
}

/// Surprisal of every non-start position of a padded caption.
///
/// With `score_end` the closing `</s>` is scored as well. Values are
/// `-log P` in the requested base.
pub fn caption_surprisal<C, R, T>(
    lm: &KneserNeyLm<'_, C, R>,
    tokens: &[T],
    base: LogBase,
    score_end: bool,
) -> Result<SurprisalScore<R>, NgramError>
where
    C: CountSource + ?Sized,
    R: Real,
    T: AsRef<str>,
{
    if tokens.is_empty() {
        return Err(NgramError::EmptyCaption);
    }
    let counts = lm.counts();
    let order = counts.order();
    let mut ids: Vec<TokenId> = vec![BOS; order.context_len()];
    ids.extend(tokens.iter().map(|t| counts.lookup(t.as_ref())));
    if score_end {
        ids.push(super::EOS);
    }
    let per_token = ids
        .windows(order.n())
        .map(|win| {
            let (context, word) = win.split_at(order.context_len());
            lm.prob_ids(context, word[0]).map(|p| -base.log(p))
        })
        .collect::<Result<Vec<R>, _>>()?;
    let mean = per_token.iter().copied().sum::<R>() / R::from_count(per_token.len() as u64);
    Ok(SurprisalScore { per_token, mean })
}
