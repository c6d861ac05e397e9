//! Serving adversarial servers with a self-distribution policy: sample a
//! phantom server set from the request distribution, relay the inner
//! policy's choices through a fixed minimum-cost matching, and pay at
//! most the relay cost plus the inner cost per run.
//!
//! ```bash
//! cargo run --release --example reduction
//! ```

use omm::harness::generate_adversarial;
use omm::online::{run_online, SoarPolicy};
use omm::reduce::{reduction_bound_report, PolicyFactory, ReductionPolicy};
use omm::space::{sample, Distribution, MetricSpace};

fn main() {
    let space = MetricSpace::euclidean(2).unwrap();
    let dist = Distribution::uniform();
    let n = 24;

    // A hostile server placement: everything inside a corner ball.
    let servers = generate_adversarial("corner-cluster", n, &space, 17).unwrap();

    // One wrapped run, with the per-run accounting.
    let mut wrapped =
        ReductionPolicy::new(Box::new(SoarPolicy::new(dist.clone())), dist.clone());
    let requests = sample(&dist, &space, n, 99).unwrap();
    let record = run_online(&mut wrapped, &space, &servers, &requests, 3).unwrap();
    println!(
        "single run: wrapped {:.3} ≤ relay {:.3} + inner {:.3} = {:.3}",
        record.total_cost,
        wrapped.relay_cost(),
        wrapped.inner_cost(),
        wrapped.relay_cost() + wrapped.inner_cost()
    );

    // The statistical report over shared trial seeds.
    let factory: PolicyFactory = std::sync::Arc::new({
        let dist = dist.clone();
        move || Box::new(SoarPolicy::new(dist.clone()))
    });
    let report = reduction_bound_report(&space, &servers, &dist, &factory, n, 60, 7).unwrap();
    println!(
        "{} trials: wrapped {:.3}±{:.3}, OPT(S,n)≈{:.3}±{:.3}, inner {:.3}±{:.3}",
        report.trials,
        report.wrapped.mean,
        report.wrapped.se,
        report.opt_sn.mean,
        report.opt_sn.se,
        report.inner.mean,
        report.inner.se
    );
    println!(
        "bound slack {:.4}, pointwise violations {}, pass: {}",
        report.slack, report.pointwise_violations, report.pass
    );
}
