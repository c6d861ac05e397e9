//! Metric spaces and their cost functions.
//!
//! ```bash
//! cargo run --example point_distances
//! ```

use omm::space::{MetricSpace, Point, TreeMetric};

fn main() {
    // Euclidean plane.
    let plane = MetricSpace::euclidean(2).unwrap();
    let a = Point::coords(&[0.0, 0.0]);
    let b = Point::coords(&[0.3, 0.4]);
    println!("plane: |(0,0) - (0.3,0.4)| = {}", plane.dist(&a, &b).unwrap());
    println!("plane eta = {}", plane.eta());

    // Squared-distance cost on the line: not a metric, but it satisfies
    // the 2-approximate triangle inequality.
    let squared = MetricSpace::euclidean_power(1, 2.0).unwrap();
    println!(
        "squared line: d(0, 0.5) = {}, eta = {}",
        squared.dist(&0.0.into(), &0.5.into()).unwrap(),
        squared.eta()
    );

    // A path tree a--b--c with edge lengths 1 and 2.
    let tree = TreeMetric::from_text("0 -1 0\n1 0 1\n2 1 2\n").unwrap();
    let space = MetricSpace::tree(tree);
    println!(
        "path tree: d(a, c) = {}",
        space.dist(&Point::node(0), &Point::node(2)).unwrap()
    );

    // Errors are structured, not panics.
    let err = plane.dist(&a, &Point::coords(&[0.1])).unwrap_err();
    println!("dimension mismatch -> {err}");
    let err = space.dist(&Point::node(0), &Point::node(9)).unwrap_err();
    println!("unknown node -> {err}");
}
