//! The exact offline matching oracle and the tree edge-flow identity.
//!
//! ```bash
//! cargo run --example offline_matching
//! ```

use omm::optmatch::{opt_offline, opt_tree_exact};
use omm::space::{MetricSpace, Point, TreeMetric};

fn main() {
    let line = MetricSpace::euclidean(1).unwrap();

    // Two servers, one request: nearest wins.
    let m = opt_offline(&line, &pts(&[0.0, 1.0]), &pts(&[0.1])).unwrap();
    println!("S={{0,1}}, R={{0.1}} -> pairs {:?}, cost {}", m.pairs, m.total_cost);

    // The optimum never crosses on the line.
    let m = opt_offline(&line, &pts(&[0.0, 1.0]), &pts(&[0.4, 0.6])).unwrap();
    println!("S={{0,1}}, R={{0.4,0.6}} -> pairs {:?}, cost {}", m.pairs, m.total_cost);

    // Unbalanced: excess servers are free slack.
    let m = opt_offline(&line, &pts(&[0.1, 0.5, 0.9]), &pts(&[0.45, 0.55])).unwrap();
    println!("3 servers, 2 requests -> pairs {:?}, cost {:.2}", m.pairs, m.total_cost);

    // On trees, the optimum decomposes over edges: each edge carries
    // |servers below − requests below| units of flow.
    let tree = TreeMetric::from_text("0 -1 0\n1 0 1.0\n2 0 2.0\n3 1 0.5\n").unwrap();
    let server_counts = [0u64, 1, 2, 0];
    let request_counts = [1u64, 0, 1, 1];
    let flow = opt_tree_exact(&tree, &server_counts, &request_counts).unwrap();

    // The same instance, solved by the generic oracle.
    let mut servers = Vec::new();
    let mut requests = Vec::new();
    for v in 0..tree.len() {
        servers.extend((0..server_counts[v]).map(|_| Point::node(v)));
        requests.extend((0..request_counts[v]).map(|_| Point::node(v)));
    }
    let space = MetricSpace::tree(tree);
    let solved = opt_offline(&space, &servers, &requests).unwrap();
    println!("tree instance: edge-flow cost {flow}, solver cost {}", solved.total_cost);
    assert!((flow - solved.total_cost).abs() < 1e-9);
}

fn pts(xs: &[f64]) -> Vec<Point> {
    xs.iter().map(|&x| Point::from(x)).collect()
}
