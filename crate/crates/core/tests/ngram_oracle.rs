mod common;

use capdiv::ngram::{
    caption_surprisal, tables_built_on_current_thread, CountOverlay, CountSource, KneserNeyLm, NgramCountTable, Order,
    UNK,
};
use capdiv::scalar::LogBase;
use common::{random_corpus, random_dataset, rng, BruteKn};
use rand::seq::SliceRandom;
use rand::Rng;

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn table_model_matches_brute_force_counts() {
    let mut r = rng(11);
    for (order, n) in [(Order::Bigram, 2), (Order::Trigram, 3)] {
        for &(d, alpha) in &[(0.1, 1.0), (0.75, 0.0), (0.4, 0.5)] {
            let corpus = random_corpus(&mut r, 40, 15, 7);
            let table = NgramCountTable::build(&corpus, order);
            let lm = KneserNeyLm::new(&table, d, alpha).unwrap();
            let oracle = BruteKn::new(&corpus, n, d, alpha);
            let mut targets = oracle.support();
            targets.push("never_seen".into());
            let mut contexts = oracle.seen_contexts();
            contexts.push(vec!["never_seen".to_string(); n - 1]);
            for ctx in &contexts {
                for w in &targets {
                    let got: f64 = lm.prob(&strs(ctx), w).unwrap();
                    let want = oracle.prob(&strs(ctx), w);
                    assert!((got - want).abs() < 1e-12, "{order} d={d} a={alpha} P({w}|{ctx:?}) {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn overlay_matches_table_rebuilt_without_image() {
    let mut r = rng(23);
    for round in 0..6 {
        let order = if round % 2 == 0 { Order::Bigram } else { Order::Trigram };
        let ds = random_dataset(&mut r, 12, 3, 25, 8);
        let table = NgramCountTable::build(ds.captions().map(|c| c.tokens.as_slice()), order);
        let vocab: Vec<String> = table.vocab().words().to_vec();
        for (image_id, image) in ds.images() {
            let overlay = CountOverlay::new(&table, image.iter().map(|c| c.tokens.as_slice())).unwrap();
            let rest = common::others(&ds, image_id);
            let scratch = NgramCountTable::build(&rest, order);
            assert_eq!(overlay.word_types(), scratch.word_types());
            assert_eq!(overlay.continuation_total(), scratch.continuation_total());
            let a = KneserNeyLm::new(&overlay, 0.1, 1.0).unwrap();
            let b = KneserNeyLm::new(&scratch, 0.1, 1.0).unwrap();
            for _ in 0..200 {
                let ctx: Vec<&str> = (0..order.context_len()).map(|_| vocab.choose(&mut r).unwrap().as_str()).collect();
                let w = vocab.choose(&mut r).unwrap();
                if w == "<s>" {
                    continue;
                }
                let (pa, pb): (f64, f64) = (a.prob(&ctx, w).unwrap(), b.prob(&ctx, w).unwrap());
                assert!((pa - pb).abs() < 1e-12, "{image_id}: P({w}|{ctx:?}) {pa} vs {pb}");
            }
        }
    }
}

#[test]
fn held_out_words_resolve_to_unknown() {
    let corpus: Vec<Vec<String>> = ["a dog runs", "a cat sleeps", "zebra dances wildly"].iter().map(|l| common::words(l)).collect();
    let table = NgramCountTable::build(&corpus, Order::Bigram);
    let overlay = CountOverlay::new(&table, corpus[2..].iter()).unwrap();
    assert_eq!(overlay.lookup("zebra"), UNK);
    assert_ne!(overlay.lookup("dog"), UNK);
    let lm = KneserNeyLm::new(&overlay, 0.1, 1.0).unwrap();
    let p_zebra: f64 = lm.prob(&["a"], "zebra").unwrap();
    let p_unk: f64 = lm.prob(&["a"], "<unk>").unwrap();
    assert_eq!(p_zebra, p_unk);
}

#[test]
fn caption_order_does_not_change_probabilities() {
    let mut r = rng(5);
    let corpus = random_corpus(&mut r, 60, 20, 9);
    let mut shuffled = corpus.clone();
    shuffled.shuffle(&mut r);
    for order in [Order::Bigram, Order::Trigram] {
        let a = NgramCountTable::build(&corpus, order);
        let b = NgramCountTable::build(&shuffled, order);
        let (la, lb) = (KneserNeyLm::new(&a, 0.1, 1.0).unwrap(), KneserNeyLm::new(&b, 0.1, 1.0).unwrap());
        for c in corpus.iter().take(20) {
            let sa = caption_surprisal::<_, f64, _>(&la, c, LogBase::Two, true).unwrap();
            let sb = caption_surprisal::<_, f64, _>(&lb, c, LogBase::Two, true).unwrap();
            for (x, y) in sa.per_token.iter().zip(&sb.per_token) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn unigram_total_counts_padding() {
    let mut r = rng(99);
    let corpus: Vec<Vec<String>> = (0..49_990)
        .map(|_| (0..r.gen_range(8..=14)).map(|_| format!("w{}", r.gen_range(0..3000))).collect())
        .collect();
    let tokens: u64 = corpus.iter().map(|c| c.len() as u64).sum();
    let before = tables_built_on_current_thread();
    let bigram = NgramCountTable::build(&corpus, Order::Bigram);
    assert_eq!(tables_built_on_current_thread(), before + 1);
    // one <s> and one </s> per caption
    assert_eq!(bigram.total_unigrams(), tokens + 2 * 49_990);
    let trigram = NgramCountTable::build(&corpus, Order::Trigram);
    assert_eq!(trigram.total_unigrams(), tokens + 3 * 49_990);
}
