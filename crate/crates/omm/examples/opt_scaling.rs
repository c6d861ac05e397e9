//! How the expected offline optimum grows with the market size: close to
//! `√n` on the line, `√(n log n)` in the unit square, and `n^(2/3)` in
//! the cube.
//!
//! ```bash
//! cargo run --release --example opt_scaling
//! ```

use omm::harness::fit_scaling;
use omm::optmatch::estimate_opt;
use omm::space::{Distribution, MetricSpace};

fn main() {
    let grid = [64usize, 128, 256, 512, 1024];
    for d in [1usize, 2, 3] {
        let space = MetricSpace::euclidean(d).unwrap();
        let mut points = Vec::new();
        print!("d={d}:");
        for &n in &grid {
            let est = estimate_opt(&space, &Distribution::uniform(), n, 40, 7, None).unwrap();
            print!(" OPT({n})≈{:.3}±{:.3}", est.mean, est.se);
            points.push((n as f64, est.mean));
        }
        let fit = fit_scaling(&points).unwrap();
        println!("\n  log-log slope {:.3} (r2 {:.4})", fit.slope, fit.r2);
        if d == 2 {
            println!("  mean/sqrt(n ln n) per n:");
            for (n, mean) in &points {
                println!("    n={n:>5}: {:.4}", mean / (n * n.ln()).sqrt());
            }
        }
    }
}
