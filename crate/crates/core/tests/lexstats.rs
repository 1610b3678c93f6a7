mod common;

use capdiv::corpus::{Dataset, Group, TokenizedCaption};
use capdiv::lexstats::{lexical_stats, lexical_stats_windowed, per_source_stats, LexReport, Source, DEFAULT_WINDOW};
use capdiv::pipeline::{generate_synthetic, SyntheticSpec};
use common::{cap, rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn corpus(lines: &[&str]) -> Vec<TokenizedCaption> {
    lines.iter().enumerate().map(|(i, l)| cap(&format!("{i:03}"), "d", Group::Human, l)).collect()
}

fn check(lines: &[&str], asl: f64, sdsl: f64, n_types: usize, n_tokens: usize) -> LexReport {
    let r = lexical_stats(&corpus(lines)).unwrap();
    assert_eq!((r.asl, r.sdsl, r.n_types, r.n_tokens, r.n_captions), (asl, sdsl, n_types, n_tokens, lines.len()), "{lines:?}");
    r
}

#[test]
fn hand_computed_corpora() {
    check(&["a b c", "a b c d e"], 4.0, 1.0, 5, 8);
    let r = check(&["x"], 1.0, 0.0, 1, 1);
    assert_eq!((r.ttr1, r.ttr2, r.n_bigrams), (1.0, 0.0, 0));
    let r = check(&["the dog", "the dog", "the dog"], 2.0, 0.0, 2, 6);
    assert_eq!((r.ttr1, r.ttr2), (2.0 / 6.0, 1.0 / 3.0));
    let r = check(&["t0", "t1 t2", "t3 t4 t5", "t6 t7 t8 t9"], 2.5, 1.25_f64.sqrt(), 10, 10);
    assert_eq!((r.ttr1, r.ttr2), (1.0, 1.0));
    let lens = [2, 4, 4, 4, 5, 5, 7, 9];
    let lines: Vec<String> = lens.iter().map(|&n| vec!["w"; n].join(" ")).collect();
    let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
    let r = check(&refs, 5.0, 2.0, 1, 40);
    assert_eq!((r.ttr1, r.ttr2), (1.0 / 40.0, 1.0 / 32.0));
}

fn brute_windowed_ttr(stream: &[String], window: usize) -> f64 {
    let n = stream.len() / window;
    let mut total = 0.0;
    for k in 0..n {
        let mut chunk: Vec<&String> = stream[k * window..(k + 1) * window].iter().collect();
        chunk.sort();
        chunk.dedup();
        total += chunk.len() as f64 / window as f64;
    }
    total / n as f64
}

#[test]
fn ttr_matches_brute_force_windows() {
    let mut r = rng(1000);
    let mut caps = Vec::new();
    let mut total = 0;
    let mut i = 0;
    while total < 3000 {
        let len = r.gen_range(5..15).min(3000 - total);
        let tokens: Vec<String> = (0..len).map(|_| format!("v{}", r.gen_range(0..400))).collect();
        total += len;
        caps.push(TokenizedCaption { image_id: format!("{i:05}"), describer_id: "d".into(), group: Group::Model, tokens });
        i += 1;
    }
    let stream: Vec<String> = caps.iter().flat_map(|c| c.tokens.clone()).collect();
    assert_eq!(stream.len(), 3000);
    let rep = lexical_stats(&caps).unwrap();
    assert!((rep.ttr1 - brute_windowed_ttr(&stream, 1000)).abs() < 1e-12);
    let bigrams: Vec<String> = caps.iter().flat_map(|c| c.tokens.windows(2).map(|w| w.join(" "))).collect();
    assert!((rep.ttr2 - brute_windowed_ttr(&bigrams, 1000)).abs() < 1e-12);
    let small = lexical_stats_windowed(&caps, 250).unwrap();
    assert!((small.ttr1 - brute_windowed_ttr(&stream, 250)).abs() < 1e-12);
}

#[test]
fn caption_order_is_irrelevant() {
    let ds = generate_synthetic(&SyntheticSpec { n_images: 30, seed: 4, ..SyntheticSpec::default() }).unwrap();
    let mut caps: Vec<TokenizedCaption> = ds.captions().cloned().collect();
    let a = lexical_stats(&caps).unwrap();
    caps.shuffle(&mut rng(2));
    let b = lexical_stats(&caps).unwrap();
    assert_eq!(a, b);
}

#[test]
fn duplication_keeps_statistics() {
    let ds = generate_synthetic(&SyntheticSpec { n_images: 120, seed: 8, ..SyntheticSpec::default() }).unwrap();
    let caps: Vec<TokenizedCaption> = ds.captions().cloned().collect();
    let mut doubled = caps.clone();
    doubled.extend(caps.iter().map(|c| TokenizedCaption { image_id: format!("zz{}", c.image_id), ..c.clone() }));
    let a = lexical_stats(&caps).unwrap();
    assert!(a.n_tokens >= 10_000);
    let b = lexical_stats(&doubled).unwrap();
    assert_eq!((a.asl, a.n_types), (b.asl, b.n_types));
    assert!((a.sdsl - b.sdsl).abs() < 1e-12);
    assert!((a.ttr1 - b.ttr1).abs() <= 0.02, "{} vs {}", a.ttr1, b.ttr1);
}

#[test]
fn pooled_rows_equal_concatenation() {
    let ds = generate_synthetic(&SyntheticSpec { n_images: 40, seed: 6, ..SyntheticSpec::default() }).unwrap();
    let rows = per_source_stats(&ds, DEFAULT_WINDOW).unwrap();
    assert_eq!(rows.len(), 12);
    let model: Vec<&TokenizedCaption> = ds.captions().filter(|c| c.describer_id.starts_with("model")).collect();
    let pooled = rows.iter().find(|(s, _)| *s == Source::Pooled(Group::Model)).unwrap();
    assert_eq!(pooled.1, lexical_stats(model).unwrap());
    assert_eq!(rows[0].0, Source::Describer("human_1".into()));
}

fn small_dataset() -> impl Strategy<Value = Dataset> {
    proptest::collection::vec((0usize..4, 0usize..3, proptest::collection::vec(0usize..12, 1..10)), 1..25).prop_map(|rows| {
        let mut seen = std::collections::HashSet::new();
        let caps: Vec<TokenizedCaption> = rows
            .into_iter()
            .filter(|(img, who, _)| seen.insert((*img, *who)))
            .map(|(img, who, toks)| TokenizedCaption {
                image_id: format!("i{img}"),
                describer_id: format!("d{who}"),
                group: Group::Human,
                tokens: toks.iter().map(|t| format!("t{t}")).collect(),
            })
            .collect();
        Dataset::from_captions(caps, false).unwrap()
    })
}

proptest! {
    #[test]
    fn report_invariants(ds in small_dataset()) {
        for (_, r) in per_source_stats(&ds, 7).unwrap() {
            prop_assert!(r.ttr1 > 0.0 && r.ttr1 <= 1.0);
            prop_assert!(r.ttr2 >= 0.0 && r.ttr2 <= 1.0);
            prop_assert!(r.n_types <= r.n_tokens);
            prop_assert!(r.sdsl >= 0.0);
        }
    }
}
