//! Times the offline matching routes on random instances.
//!
//! ```bash
//! cargo run --release --example bench_solvers
//! ```

use std::time::Instant;

use omm::optmatch::{opt_offline, solve_dense, solve_sparse};
use omm::space::{sample, Distribution, MetricSpace};

fn main() {
    let dist = Distribution::uniform();
    println!("{:>5} {:>3} {:>12} {:>12} {:>12}", "n", "d", "dense(s)", "sparse(s)", "line(s)");
    for &d in &[1usize, 2, 3] {
        let space = MetricSpace::euclidean(d).unwrap();
        for &n in &[128usize, 256, 512, 1024, 2048] {
            let servers = sample(&dist, &space, n, 1000 + n as u64).unwrap();
            let requests = sample(&dist, &space, n, 2000 + n as u64).unwrap();
            let mut cost = vec![0.0; n * n];
            for (i, r) in requests.iter().enumerate() {
                for (j, s) in servers.iter().enumerate() {
                    cost[i * n + j] = space.dist(r, s).unwrap();
                }
            }
            let total = |a: &[usize]| -> f64 {
                a.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum()
            };
            let (t_dense, dense_total) = if n <= 1024 {
                let t = Instant::now();
                let a = solve_dense(n, n, &cost);
                (t.elapsed().as_secs_f64(), total(&a))
            } else {
                (f64::NAN, f64::NAN)
            };
            let t = Instant::now();
            let a = solve_sparse(n, n, &cost, 16);
            let t_sparse = t.elapsed().as_secs_f64();
            let sparse_total = total(&a);
            if dense_total.is_finite() {
                assert!((dense_total - sparse_total).abs() < 1e-9, "routes disagree");
            }

            let t = Instant::now();
            let m = opt_offline(&space, &servers, &requests).unwrap();
            let t_route = t.elapsed().as_secs_f64();
            assert!((m.total_cost - sparse_total).abs() < 1e-9, "dispatch disagrees");

            println!("{n:>5} {d:>3} {t_dense:>12.4} {t_sparse:>12.4} {t_route:>12.4}");
        }
    }
}
