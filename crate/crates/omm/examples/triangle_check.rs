//! Sampling check of the approximate triangle inequality for p-power
//! costs: `‖x−y‖₂^p` satisfies it with factor `2^(p−1)`, and for `p = 2`
//! the plain (factor-1) inequality demonstrably fails.
//!
//! ```bash
//! cargo run --release --example triangle_check
//! ```

use omm::space::{verify_approx_triangle, MetricSpace, Point};

fn main() {
    for p in [1.5, 2.0, 3.0] {
        let space = MetricSpace::euclidean_power(2, p).unwrap();
        let report = verify_approx_triangle(&space, 200_000, 7).unwrap();
        println!(
            "p={p}: eta={}, checked {} triples, violations {}, worst ratio {:.6}, skipped {}",
            space.eta(),
            report.checked,
            report.violations,
            report.worst_ratio,
            report.skipped
        );
    }

    // The analytic counterexample against eta = 1 for squared costs:
    // x=0, y=1/2, z=1 gives 1 > 1/4 + 1/4.
    let squared = MetricSpace::euclidean_power(1, 2.0).unwrap();
    let (x, y, z) = (Point::from(0.0), Point::from(0.5), Point::from(1.0));
    let lhs = squared.dist(&x, &z).unwrap();
    let rhs = squared.dist(&x, &y).unwrap() + squared.dist(&y, &z).unwrap();
    println!("p=2 triple (0, 1/2, 1): d(x,z) = {lhs} vs d(x,y)+d(y,z) = {rhs}");
    assert!(lhs > rhs);
}
