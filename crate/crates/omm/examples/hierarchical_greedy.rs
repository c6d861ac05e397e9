//! Hierarchical greedy on dyadic grids: deterministic cell-based
//! matching whose cost stays within a constant factor of the optimum
//! under uniform arrivals.
//!
//! ```bash
//! cargo run --release --example hierarchical_greedy
//! ```

use omm::online::{run_online, HierarchicalGreedyPolicy};
use omm::optmatch::opt_offline;
use omm::seed;
use omm::space::{sample, Distribution, MetricSpace};

fn main() {
    let space = MetricSpace::euclidean(2).unwrap();
    let dist = Distribution::uniform();
    for n in [64usize, 256, 1024] {
        let trials = 30;
        let mut ratios = Vec::new();
        for i in 0..trials {
            let ts = seed::trial_seed(7, i);
            let servers = sample(&dist, &space, n, seed::mix(ts, seed::tag::SERVERS)).unwrap();
            let requests = sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
            let mut policy = HierarchicalGreedyPolicy::new(None);
            let rec = run_online(&mut policy, &space, &servers, &requests, ts).unwrap();
            let opt = opt_offline(&space, &servers, &requests).unwrap();
            ratios.push(rec.total_cost / opt.total_cost);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let max = ratios.iter().cloned().fold(0.0f64, f64::max);
        println!("n={n:>5}: mean cost/OPT {mean:.3}, worst {max:.3}");
    }
}
