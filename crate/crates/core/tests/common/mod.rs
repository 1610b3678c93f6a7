#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use capdiv::corpus::{Dataset, Group, TokenizedCaption};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn words(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_owned).collect()
}

pub fn cap(img: &str, who: &str, group: Group, line: &str) -> TokenizedCaption {
    TokenizedCaption { image_id: img.into(), describer_id: who.into(), group, tokens: words(line) }
}

/// Zipf-ish random corpus over `w0..w{vocab}`.
pub fn random_corpus(rng: &mut ChaCha8Rng, n_captions: usize, vocab: usize, max_len: usize) -> Vec<Vec<String>> {
    (0..n_captions)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| {
                    let r: f64 = rng.gen();
                    format!("w{}", ((r * r * r) * vocab as f64) as usize)
                })
                .collect()
        })
        .collect()
}

/// Random dataset with `n_images` images and `per_group` captions in each group.
pub fn random_dataset(rng: &mut ChaCha8Rng, n_images: usize, per_group: usize, vocab: usize, max_len: usize) -> Dataset {
    let mut caps = Vec::new();
    for i in 0..n_images {
        for group in Group::ALL {
            for (k, tokens) in random_corpus(rng, per_group, vocab, max_len).into_iter().enumerate() {
                caps.push(TokenizedCaption {
                    image_id: format!("i{i:04}"),
                    describer_id: format!("{group}{k}"),
                    group,
                    tokens,
                });
            }
        }
    }
    Dataset::from_captions(caps, false).unwrap()
}

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const UNK: &str = "<unk>";

/// Interpolated Kneser–Ney computed directly from string n-gram counts.
pub struct BruteKn {
    n: usize,
    d: f64,
    alpha: f64,
    words: HashSet<String>,
    c2: HashMap<(String, String), u64>,
    c3: HashMap<(String, String, String), u64>,
}

impl BruteKn {
    pub fn new(captions: &[Vec<String>], n: usize, d: f64, alpha: f64) -> Self {
        let mut c2 = HashMap::new();
        let mut c3 = HashMap::new();
        let mut words = HashSet::new();
        for c in captions {
            let mut padded = vec![BOS.to_string(); n - 1];
            padded.extend(c.iter().cloned());
            padded.push(EOS.to_string());
            words.extend(c.iter().cloned());
            for w in padded.windows(2) {
                *c2.entry((w[0].clone(), w[1].clone())).or_insert(0) += 1;
            }
            if n == 3 {
                for w in padded.windows(3) {
                    *c3.entry((w[0].clone(), w[1].clone(), w[2].clone())).or_insert(0) += 1;
                }
            }
        }
        Self { n, d, alpha, words, c2, c3 }
    }

    fn resolve<'a>(&self, w: &'a str) -> &'a str {
        if w == BOS || w == EOS || self.words.contains(w) {
            w
        } else {
            UNK
        }
    }

    /// Every token that can be predicted.
    pub fn support(&self) -> Vec<String> {
        let mut s: Vec<String> = self.words.iter().cloned().collect();
        s.sort();
        s.push(EOS.into());
        s.push(UNK.into());
        s
    }

    pub fn p_cont(&self, w: &str) -> f64 {
        let w = self.resolve(w);
        let n1 = self.c2.keys().filter(|(_, b)| b == w).count() as f64;
        let total = self.c2.keys().filter(|(_, b)| b != BOS).count() as f64;
        (n1 + self.alpha) / (total + self.alpha * (self.words.len() + 2) as f64)
    }

    fn interp(&self, count: f64, total: f64, types: f64, lower: f64) -> f64 {
        if total == 0.0 {
            lower
        } else {
            (count - self.d).max(0.0) / total + self.d * types / total * lower
        }
    }

    fn p_bigram(&self, v: &str, w: &str) -> f64 {
        let (v, w) = (self.resolve(v), self.resolve(w));
        let follows: Vec<(&(String, String), &u64)> = self.c2.iter().filter(|((a, _), _)| a == v).collect();
        let total: u64 = follows.iter().map(|(_, &c)| c).sum();
        let count = self.c2.get(&(v.to_string(), w.to_string())).copied().unwrap_or(0);
        self.interp(count as f64, total as f64, follows.len() as f64, self.p_cont(w))
    }

    fn p_middle(&self, v: &str, w: &str) -> f64 {
        let (v, w) = (self.resolve(v), self.resolve(w));
        let mut cont: HashMap<&str, HashSet<&str>> = HashMap::new();
        for (a, b, c) in self.c3.keys() {
            if b == v {
                cont.entry(c.as_str()).or_default().insert(a.as_str());
            }
        }
        let total: usize = cont.values().map(HashSet::len).sum();
        let count = cont.get(w).map_or(0, HashSet::len);
        self.interp(count as f64, total as f64, cont.len() as f64, self.p_cont(w))
    }

    fn p_trigram(&self, u: &str, v: &str, w: &str) -> f64 {
        let (u, v, w) = (self.resolve(u), self.resolve(v), self.resolve(w));
        let follows: Vec<(&(String, String, String), &u64)> =
            self.c3.iter().filter(|((a, b, _), _)| a == u && b == v).collect();
        let total: u64 = follows.iter().map(|(_, &c)| c).sum();
        let count = self.c3.get(&(u.to_string(), v.to_string(), w.to_string())).copied().unwrap_or(0);
        self.interp(count as f64, total as f64, follows.len() as f64, self.p_middle(v, w))
    }

    pub fn prob(&self, context: &[&str], w: &str) -> f64 {
        match (self.n, context) {
            (2, [v]) => self.p_bigram(v, w),
            (3, [u, v]) => self.p_trigram(u, v, w),
            _ => panic!("context length"),
        }
    }

    /// Contexts with at least one observed continuation.
    pub fn seen_contexts(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = if self.n == 2 {
            self.c2.keys().map(|(a, _)| vec![a.clone()]).collect::<HashSet<_>>().into_iter().collect()
        } else {
            self.c3.keys().map(|(a, b, _)| vec![a.clone(), b.clone()]).collect::<HashSet<_>>().into_iter().collect()
        };
        out.sort();
        out
    }
}

/// Captions of every image except `held_out`, in dataset order.
pub fn others(dataset: &Dataset, held_out: &str) -> Vec<Vec<String>> {
    dataset.captions().filter(|c| c.image_id != held_out).map(|c| c.tokens.clone()).collect()
}
