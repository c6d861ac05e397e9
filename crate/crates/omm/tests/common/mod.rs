//! Shared test oracles, independent of the library's solver internals.
#![allow(dead_code)] // each test binary uses a subset

use omm::space::{MetricSpace, Point, TreeMetric};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum matching cost by exhaustive enumeration over all injections
/// of requests into servers. Exponential; callers keep |R| ≤ 7.
pub fn brute_force_opt(space: &MetricSpace, servers: &[Point], requests: &[Point]) -> f64 {
    fn recurse(
        space: &MetricSpace,
        servers: &[Point],
        requests: &[Point],
        idx: usize,
        used: &mut Vec<bool>,
        acc: f64,
        best: &mut f64,
    ) {
        if acc >= *best {
            return;
        }
        if idx == requests.len() {
            *best = acc;
            return;
        }
        for j in 0..servers.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            let step = space.dist(&requests[idx], &servers[j]).unwrap();
            recurse(space, servers, requests, idx + 1, used, acc + step, best);
            used[j] = false;
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; servers.len()];
    recurse(space, servers, requests, 0, &mut used, 0.0, &mut best);
    best
}

/// A random rooted tree with `nodes` nodes and positive edge lengths;
/// no HST structure implied.
pub fn random_tree(nodes: usize, rng: &mut ChaCha8Rng) -> TreeMetric {
    assert!(nodes >= 1);
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut lens = vec![0.0];
    for v in 1..nodes {
        parents.push(Some(rng.gen_range(0..v)));
        lens.push(rng.gen_range(0.05..2.0));
    }
    TreeMetric::new(&parents, &lens).expect("valid random tree")
}

/// Uniformly random points of the given space.
pub fn random_points(space: &MetricSpace, k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    (0..k)
        .map(|_| match space {
            MetricSpace::Tree(t) => Point::node(rng.gen_range(0..t.len())),
            _ => {
                let d = space.dim().unwrap();
                Point::Coords((0..d).map(|_| rng.gen::<f64>()).collect())
            }
        })
        .collect()
}

/// The mixed bag of metric kinds the oracle tests sweep.
pub fn test_spaces(rng: &mut ChaCha8Rng) -> Vec<MetricSpace> {
    vec![
        MetricSpace::euclidean(1).unwrap(),
        MetricSpace::euclidean(2).unwrap(),
        MetricSpace::euclidean(3).unwrap(),
        MetricSpace::euclidean_power(1, 1.5).unwrap(),
        MetricSpace::euclidean_power(2, 2.0).unwrap(),
        MetricSpace::euclidean_power(1, 3.0).unwrap(),
        MetricSpace::tree(random_tree(rng.gen_range(2..=12), rng)),
    ]
}
