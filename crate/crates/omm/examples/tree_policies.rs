//! The two tree greedy subroutines and their tie-break laws: uniform
//! over the anchor subtree's free servers, versus the product of
//! branch factors along a random descent.
//!
//! ```bash
//! cargo run --release --example tree_policies
//! ```

use omm::harness::exact_choice_probabilities;
use omm::hst::{MnpPolicy, RandomSubtreePolicy, TreePolicyKind};
use omm::online::run_online;
use omm::space::{Hst, MetricSpace, Point};

fn main() {
    // Root -> branches u, v; u has one leaf, v has two leaves.
    let text = "0 -1 0 # level 2\n1 0 2 # level 1\n2 0 2 # level 1\n\
                3 1 1 # level 0\n4 2 1 # level 0\n5 2 1 # level 0\n";
    let hst = Hst::from_text(text).unwrap();
    let tree = hst.tree().clone();
    let space = MetricSpace::tree(tree.clone());

    // One server at leaf 4, two at leaf 5; the request's branch is empty,
    // so the anchor is the root. Uniform tie-breaking gives each server
    // 1/3; the random-descent rule gives 1/2 to the lone server and 1/4
    // to each collocated one.
    let server_leaves = [4usize, 5, 5];
    let servers: Vec<Point> = server_leaves.iter().map(|&l| Point::node(l)).collect();
    let request_leaf = 3usize;
    let request = [Point::node(request_leaf)];

    for kind in [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree] {
        let exact = exact_choice_probabilities(kind, &tree, &server_leaves, request_leaf);
        let runs = 100_000;
        let mut freq = vec![0usize; servers.len()];
        for run in 0..runs {
            let chosen = match kind {
                TreePolicyKind::Mnp => {
                    let mut p = MnpPolicy::new();
                    run_online(&mut p, &space, &servers, &request, run).unwrap().steps[0].server
                }
                TreePolicyKind::RandomSubtree => {
                    let mut p = RandomSubtreePolicy::new();
                    run_online(&mut p, &space, &servers, &request, run).unwrap().steps[0].server
                }
            };
            freq[chosen] += 1;
        }
        println!("{kind:?}:");
        for (j, &e) in exact.iter().enumerate() {
            println!(
                "  server {j} at leaf {}: exact {:.4}, observed {:.4}",
                server_leaves[j],
                e,
                freq[j] as f64 / runs as f64
            );
        }
    }
}
