//! Driving an online policy over a request sequence.
//!
//! ```bash
//! cargo run --example greedy_online
//! ```

use omm::online::{closest_set, run_online, GreedyPolicy, UniformTieBreak, TIE_TOL};
use omm::optmatch::opt_offline;
use omm::space::{sample, Distribution, MetricSpace, Point};

fn main() {
    let line = MetricSpace::euclidean(1).unwrap();
    let servers: Vec<Point> = [0.0, 1.0].iter().map(|&x| Point::from(x)).collect();
    let requests: Vec<Point> = [0.6, 0.0].iter().map(|&x| Point::from(x)).collect();

    let mut policy = GreedyPolicy::new(UniformTieBreak);
    let record = run_online(&mut policy, &line, &servers, &requests, 7).unwrap();
    for (i, step) in record.steps.iter().enumerate() {
        println!("request {i} -> server {} (cost {:.3})", step.server, step.cost);
    }
    println!("greedy total {:.3}", record.total_cost);

    // Hindsight benchmark on the same realized instance.
    let opt = opt_offline(&line, &servers, &requests).unwrap();
    println!("offline optimum {:.3}, ratio {:.3}", opt.total_cost, record.total_cost / opt.total_cost);

    // The tied set is explicit: a request equidistant from both servers.
    let tied = closest_set(&line, &servers, &[0, 1], &Point::from(0.5), TIE_TOL).unwrap();
    println!("closest_set at 0.5: {tied:?}");

    // Greedy against the optimum over random balanced instances.
    let dist = Distribution::uniform();
    let mut worst: f64 = 1.0;
    for seed in 0..50 {
        let servers = sample(&dist, &line, 16, 100 + seed).unwrap();
        let requests = sample(&dist, &line, 16, 200 + seed).unwrap();
        let mut policy = GreedyPolicy::new(UniformTieBreak);
        let rec = run_online(&mut policy, &line, &servers, &requests, seed).unwrap();
        let opt = opt_offline(&line, &servers, &requests).unwrap();
        worst = worst.max(rec.total_cost / opt.total_cost);
    }
    println!("worst greedy/OPT ratio over 50 random n=16 instances: {worst:.3}");
}
