//! Random HST embeddings: non-contracting by construction, with
//! logarithmic expected stretch, and serializable as annotated tree
//! files.
//!
//! ```bash
//! cargo run --release --example hst_embedding
//! ```

use omm::hst::build_hst;
use omm::space::{sample, Distribution, Hst, MetricSpace};

fn main() {
    let space = MetricSpace::euclidean(2).unwrap();
    let points = sample(&Distribution::uniform(), &space, 32, 5).unwrap();

    // Stretch varies with the random permutation and radii; average a few.
    let mut means = Vec::new();
    for seed in 0..10 {
        let emb = build_hst(&points, &space, seed).unwrap();
        means.push(emb.stats.mean_expansion);
        if seed == 0 {
            println!(
                "seed 0: {} tree nodes, mean stretch {:.2}, max stretch {:.2} over {} pairs",
                emb.hst.tree().len(),
                emb.stats.mean_expansion,
                emb.stats.max_expansion,
                emb.stats.pairs
            );
            // Every pair expands or stays put; none contracts.
            let mut worst = f64::INFINITY;
            for a in 0..points.len() {
                for b in a + 1..points.len() {
                    let orig = space.dist(&points[a], &points[b]).unwrap();
                    worst = worst.min(emb.tree_dist(a, b) / orig);
                }
            }
            println!("smallest tree/original ratio: {worst:.3} (≥ 1 by construction)");
        }
    }
    println!(
        "mean stretch over 10 seeds: {:.2} (ln n = {:.2})",
        means.iter().sum::<f64>() / means.len() as f64,
        (points.len() as f64).ln()
    );

    // Round-trip through the annotated text format.
    let emb = build_hst(&points, &space, 3).unwrap();
    let text = emb.hst.to_text();
    println!("serialized HST head:\n{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    let parsed = Hst::from_text(&text).unwrap();
    assert_eq!(parsed.tree().len(), emb.hst.tree().len());
}
