use addrnorm_core::addrlm::{train_ngram, LmConfig};
use addrnorm_core::corpus::is_pincode;
use addrnorm_core::preprocess::basic_clean;
use addrnorm_core::rng::{self, Draw};
use addrnorm_core::synthgen::{generate_corpus, Category, ErrorRates, SynthConfig};

#[test]
fn misspelling_rate_within_three_sigma() {
    let p = 0.2;
    let cfg = SynthConfig {
        n_addresses: 2500,
        seed: 21,
        error_rates: ErrorRates { misspelling: p, ..ErrorRates::none() },
        ..SynthConfig::default()
    };
    let corpus = generate_corpus(&cfg).unwrap();
    // only lowercase words of three or more letters can be misspelled
    let eligible = |t: &String| t.len() >= 3 && t.bytes().all(|b| b.is_ascii_lowercase());
    let n: usize = corpus
        .iter()
        .map(|s| s.clean_tokens.iter().filter(|t| eligible(t) && !is_pincode(t)).count())
        .sum();
    let hits = corpus
        .iter()
        .flat_map(|s| &s.corruptions)
        .filter(|c| c.category == Category::Misspelling)
        .count();
    assert!(n >= 10_000, "only {n} eligible tokens");
    let mean = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    assert!((hits as f64 - mean).abs() <= 3.0 * sigma, "{hits} misspellings of {n}, expected {mean:.0} ± {:.0}", 3.0 * sigma);
}

#[test]
fn shuffled_addresses_are_more_perplexing() {
    let corpus = generate_corpus(&SynthConfig { n_addresses: 2000, seed: 8, ..SynthConfig::default() }).unwrap();
    let docs: Vec<Vec<String>> = corpus.iter().map(|s| basic_clean(&s.record.raw_text).tokens).collect();
    let (train, test) = docs.split_at(1500);
    let lm = train_ngram(train, LmConfig::default()).unwrap();
    let mut r = rng::stream(8, "shuffle", 0);
    let mut worse = 0;
    let mut n = 0;
    for d in test.iter().filter(|d| d.len() >= 4).take(100) {
        let mut s = d.clone();
        while &s == d {
            r.shuffle(&mut s);
        }
        n += 1;
        worse += usize::from(lm.perplexity(&s).unwrap() > lm.perplexity(d).unwrap());
    }
    assert_eq!(n, 100);
    assert!(worse >= 90, "shuffled worse in only {worse}/100");
}
