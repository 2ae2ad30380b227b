use addrnorm_core::corpus::TokenStatsTable;
use addrnorm_core::embed::{address_vector, compute_tfidf, sgns_loss, train_skipgram, EmbeddingModel, SgnsGrad, SkipGramConfig, Weighting};
use addrnorm_core::rng::{self, Draw};

fn rand_vec(r: &mut addrnorm_core::rng::Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| r.unit() - 0.5).collect()
}

#[test]
fn sgns_gradient_matches_finite_differences() {
    let d = 8;
    let h = 1e-6;
    for point in 0..5 {
        let mut r = rng::stream(3, "sgns-grad", point);
        let center = rand_vec(&mut r, d);
        let context = rand_vec(&mut r, d);
        let negs: Vec<Vec<f64>> = (0..4).map(|_| rand_vec(&mut r, d)).collect();
        let neg_refs = |n: &[Vec<f64>]| -> Vec<Vec<f64>> { n.to_vec() };
        let loss = |c: &[f64], o: &[f64], n: &[Vec<f64>]| {
            let refs: Vec<&[f64]> = n.iter().map(Vec::as_slice).collect();
            sgns_loss(c, o, &refs, &mut SgnsGrad::default())
        };
        let mut g = SgnsGrad::default();
        let refs: Vec<&[f64]> = negs.iter().map(Vec::as_slice).collect();
        sgns_loss(&center, &context, &refs, &mut g);

        let fd = |f: &dyn Fn(f64) -> f64| (f(h) - f(-h)) / (2.0 * h);
        for i in 0..d {
            let dc = fd(&|e| {
                let mut c = center.clone();
                c[i] += e;
                loss(&c, &context, &negs)
            });
            assert!((dc - g.center[i]).abs() < 1e-7, "centre[{i}]: {dc} vs {}", g.center[i]);
            let dox = fd(&|e| {
                let mut o = context.clone();
                o[i] += e;
                loss(&center, &o, &negs)
            });
            assert!((dox - g.context[i]).abs() < 1e-7);
            for k in 0..negs.len() {
                let dn = fd(&|e| {
                    let mut n = neg_refs(&negs);
                    n[k][i] += e;
                    loss(&center, &context, &n)
                });
                assert!((dn - g.negatives[k][i]).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn shared_contexts_give_closer_vectors() {
    // p and q always appear among the same neighbours; r never does
    let mut docs: Vec<Vec<String>> = Vec::new();
    for i in 0..400 {
        let w = if i % 2 == 0 { "p" } else { "q" };
        docs.push(["alpha", "beta", w, "gamma", "delta"].map(String::from).to_vec());
        docs.push(["omega", "sigma", "r", "kappa", "zeta"].map(String::from).to_vec());
    }
    let cfg = SkipGramConfig { dim: 20, epochs: 5, seed: 9, ..SkipGramConfig::default() };
    let m = train_skipgram(&docs, &cfg).unwrap();
    let pq = m.cosine("p", "q").unwrap();
    let pr = m.cosine("p", "r").unwrap();
    assert!(pq > pr, "cos(p,q)={pq} cos(p,r)={pr}");
}

#[test]
fn training_is_deterministic() {
    let docs: Vec<Vec<String>> = (0..50).map(|i| vec![format!("a{}", i % 7), format!("b{}", i % 5), "c".into()]).collect();
    let cfg = SkipGramConfig { dim: 10, seed: 4, ..SkipGramConfig::default() };
    assert_eq!(train_skipgram(&docs, &cfg).unwrap(), train_skipgram(&docs, &cfg).unwrap());
}

fn model() -> EmbeddingModel {
    let mut r = rng::stream(1, "embed-test", 0);
    let vocab: Vec<String> = ["aa", "bb", "cc", "dd", "ee"].map(String::from).to_vec();
    let vectors = vocab.iter().map(|_| rand_vec(&mut r, 6)).collect();
    EmbeddingModel::from_parts(6, 1, vocab, vectors).unwrap()
}

#[test]
fn idf_extremes() {
    let docs: Vec<Vec<&str>> = (0..12).map(|i| if i == 0 { vec!["aa", "bb"] } else { vec!["aa", "cc"] }).collect();
    let m = compute_tfidf(&TokenStatsTable::from_documents(&docs)).unwrap();
    assert!(m.idf("aa").unwrap().abs() < 1e-12);
    assert!((m.idf("bb").unwrap() - 12f64.ln()).abs() < 1e-12);
    assert!(m.is_singleton("bb") && !m.is_singleton("cc"));
}

#[test]
fn address_vector_ignores_token_order() {
    let m = model();
    let docs = vec![vec!["aa", "bb"], vec!["bb", "cc", "dd"], vec!["aa", "dd"], vec!["ee"]];
    let idf = compute_tfidf(&TokenStatsTable::from_documents(&docs)).unwrap();
    let tokens = ["dd", "aa", "cc", "aa", "bb", "zz"];
    let mut r = rng::stream(2, "perm", 0);
    for weighting in [Weighting::Uniform, Weighting::TfIdf(&idf)] {
        let base = address_vector(&tokens, &m, weighting);
        for _ in 0..20 {
            let mut p = tokens;
            r.shuffle(&mut p);
            assert_eq!(address_vector(&p, &m, weighting), base);
        }
    }
}

#[test]
fn address_vector_lies_in_convex_hull() {
    let m = model();
    let tokens = ["aa", "cc", "ee", "cc"];
    let v = address_vector(&tokens, &m, Weighting::Uniform).values;
    for (j, x) in v.iter().enumerate() {
        let coords: Vec<f64> = tokens.iter().map(|t| m.vector(t).unwrap()[j]).collect();
        let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo - 1e-12 <= *x && *x <= hi + 1e-12);
    }
    let expect: Vec<f64> = (0..6)
        .map(|j| (m.vector("aa").unwrap()[j] + 2.0 * m.vector("cc").unwrap()[j] + m.vector("ee").unwrap()[j]) / 4.0)
        .collect();
    for (a, b) in v.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-12);
    }
}
