//! Request distributions: seeded sampling, rejection from a density
//! bound, discrete node weights, and the uniform-over-server-locations
//! construction.
//!
//! ```bash
//! cargo run --example sampling_distributions
//! ```

use omm::space::{make_server_uniform, sample, Distribution, MetricSpace, Point, TreeMetric};

fn main() {
    let line = MetricSpace::euclidean(1).unwrap();

    // Identical seeds give identical draws.
    let a = sample(&Distribution::uniform(), &line, 3, 42).unwrap();
    let b = sample(&Distribution::uniform(), &line, 3, 42).unwrap();
    assert_eq!(a, b);
    println!("uniform draws (seed 42): {a:?}");

    // Bounded density 2·1[x ≤ 1/2], sampled by rejection.
    let half = Distribution::bounded_density(2.0, |x| if x[0] <= 0.5 { 2.0 } else { 0.0 }).unwrap();
    let draws = sample(&half, &line, 50_000, 7).unwrap();
    let left = draws.iter().filter(|p| p.as_coords().unwrap()[0] <= 0.5).count();
    println!("step density: {}/{} draws in [0, 1/2]", left, draws.len());

    // Discrete weights over tree nodes.
    let tree = TreeMetric::from_text("0 -1 0\n1 0 1\n2 0 1\n").unwrap();
    let tspace = MetricSpace::tree(tree);
    let nodes = Distribution::discrete_nodes(vec![2, 0, 2]).unwrap();
    let draws = sample(&nodes, &tspace, 10_000, 7).unwrap();
    let mut freq = [0usize; 3];
    for p in &draws {
        freq[p.as_node().unwrap()] += 1;
    }
    println!("node weights (2,0,2) -> frequencies {freq:?}");

    // Uniform over server locations, respecting multiplicity.
    let servers = vec![Point::from(0.1), Point::from(0.1), Point::from(0.9)];
    let over_servers = make_server_uniform(&servers).unwrap();
    let draws = sample(&over_servers, &line, 30_000, 9).unwrap();
    let at_01 = draws.iter().filter(|p| **p == Point::from(0.1)).count();
    println!(
        "server-locations {{0.1 x2, 0.9}}: fraction at 0.1 = {:.3} (expect 2/3)",
        at_01 as f64 / draws.len() as f64
    );
}
