//! Run the three-way vector comparison for a few seeds and print accuracies.

use std::time::Instant;

use addrnorm_core::experiment::{run_experiment, ExperimentConfig};

fn main() {
    let seeds: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let seeds = if seeds.is_empty() { vec![1, 2, 3] } else { seeds };
    let base = ExperimentConfig::default();
    for seed in seeds {
        let t = Instant::now();
        let r = run_experiment(&base.with_seed(seed)).expect("experiment");
        println!(
            "seed {seed}: plain {:.4}  tfidf-basic {:.4}  tfidf-full {:.4}  trend {}  ({:.1}s)",
            r.plain,
            r.tfidf_basic,
            r.tfidf_full,
            r.trend_holds(),
            t.elapsed().as_secs_f64()
        );
    }
}
