//! The simulate-optimize-assign-repeat policy: per arrival it samples
//! the remaining demand, solves the offline matching on the augmented
//! instance, and commits the arriving request's edge. In a balanced
//! self-distribution market its expected cost tracks
//! `Σ_t OPT(t)/t`.
//!
//! ```bash
//! cargo run --release --example soar_policy
//! ```

use omm::online::{run_online, SoarPolicy};
use omm::optmatch::estimate_opt;
use omm::seed;
use omm::space::{sample, Distribution, MetricSpace};

fn main() {
    let n = 32;
    let d = 2;
    let space = MetricSpace::euclidean(d).unwrap();
    let dist = Distribution::uniform();

    // Reference: sum of per-size optima.
    let mut reference = 0.0;
    for t in 1..=n {
        let est = estimate_opt(&space, &dist, t, 200, seed::mix(7, t as u64), None).unwrap();
        reference += est.mean / t as f64;
    }

    // Policy side: servers and requests drawn from the same distribution.
    let trials = 200;
    let mut total = 0.0;
    for i in 0..trials {
        let ts = seed::trial_seed(7, i);
        let servers = sample(&dist, &space, n, seed::mix(ts, seed::tag::SERVERS)).unwrap();
        let requests = sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
        let mut policy = SoarPolicy::new(dist.clone());
        let rec =
            run_online(&mut policy, &space, &servers, &requests, seed::mix(ts, seed::tag::POLICY))
                .unwrap();
        total += rec.total_cost;
    }
    let mean = total / trials as f64;
    println!("n={n}, d={d}: mean policy cost {mean:.4} vs sum-of-optima {reference:.4}");
    println!("relative gap {:.2}%", 100.0 * (mean - reference).abs() / reference);
}
