//! Exact expected costs of the tree policies, and the subset
//! monotonicity property: removing servers never lowers the expected
//! cost.
//!
//! ```bash
//! cargo run --release --example monotonicity
//! ```

use omm::harness::monotonicity_suite;
use omm::hst::{exact_expected_cost, TreePolicyKind};
use omm::space::Hst;

fn main() {
    let text = "0 -1 0 # level 2\n1 0 2 # level 1\n2 0 2 # level 1\n\
                3 1 1 # level 0\n4 2 1 # level 0\n5 2 1 # level 0\n";
    let tree = Hst::from_text(text).unwrap().into_tree();

    // Expected cost is computed by enumerating the policy's randomness.
    let full = [3usize, 4, 5, 5];
    let sub = [3usize, 4];
    let requests = [3usize, 5];
    for kind in [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree] {
        let with_full = exact_expected_cost(kind, &tree, &full, &requests).unwrap();
        let with_sub = exact_expected_cost(kind, &tree, &sub, &requests).unwrap();
        println!("{kind:?}: E[cost | S] = {with_full:.4} ≤ E[cost | S'] = {with_sub:.4}");
    }

    // Randomized suite over many instances and nested server sets.
    for kind in [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree] {
        let report = monotonicity_suite(kind, 100, 7, 4, 7);
        println!(
            "{kind:?}: {}/{} cases pass, {} skipped for budget, failures: {}",
            report.passes,
            report.cases,
            report.skipped_budget,
            report.failures.len()
        );
    }
}
