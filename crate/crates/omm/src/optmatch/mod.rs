//! Offline optimal matching and Monte Carlo estimators of its expectation.
//!
//! [`opt_offline`] is the exact benchmark every online policy is measured
//! against; [`estimate_opt`] averages it over sampled instances, either
//! with both sides drawn from a distribution or with a fixed server set.

mod solver;

pub use solver::{solve_dense, solve_line, solve_sparse};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;
use crate::space::{Distribution, MetricSpace, Point, SpaceError, TreeMetric};

/// Instance size from which large Euclidean solves switch to the
/// candidate-edge solver (identical results, certified).
const SPARSE_MIN: usize = 128;

/// Initial nearest-server candidates per request for the sparse route.
const SPARSE_K0: usize = 16;

#[derive(Debug, Error)]
pub enum OptError {
    #[error("need at least as many servers as requests: |S|={servers} < |R|={requests}")]
    NotEnoughServers { servers: usize, requests: usize },
    #[error("server and request counts must balance: {servers} vs {requests}")]
    Unbalanced { servers: u64, requests: u64 },
    #[error("count vector length {got} does not match tree size {expected}")]
    CountLength { expected: usize, got: usize },
    #[error("trial count must be ≥ 1")]
    NoTrials,
    #[error("t={t} outside 1..={n}")]
    TOutOfRange { t: usize, n: u64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A minimum-cost matching of requests onto distinct servers.
#[derive(Clone, Debug)]
pub struct Matching {
    /// `pairs[i]` is the server index matched to request `i`.
    pub pairs: Vec<usize>,
    /// Sum of matched pair distances (pairwise summation).
    pub total_cost: f64,
}

/// Sums with pairwise splitting so solver-scale instances stay well under
/// the 1e-9 equality tolerance.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Exact minimum-cost matching of all requests onto distinct servers.
///
/// The route is chosen by instance shape (line DP, sparse certified, or
/// dense successive shortest paths); all routes return an optimal
/// matching and a cost equal to the sum of its pair distances.
pub fn opt_offline(
    space: &MetricSpace,
    servers: &[Point],
    requests: &[Point],
) -> Result<Matching, OptError> {
    let n = requests.len();
    let m = servers.len();
    if m < n {
        return Err(OptError::NotEnoughServers { servers: m, requests: n });
    }
    for p in servers.iter().chain(requests) {
        space.validate_point(p)?;
    }
    if n == 0 {
        return Ok(Matching { pairs: Vec::new(), total_cost: 0.0 });
    }

    let pairs = match space {
        MetricSpace::Euclidean { dim: 1 } => {
            let (r, s) = (line_coords(requests), line_coords(servers));
            solver::solve_line(&r, &s, 1.0)
        }
        MetricSpace::EuclideanPower { dim: 1, exponent } => {
            let (r, s) = (line_coords(requests), line_coords(servers));
            solver::solve_line(&r, &s, *exponent)
        }
        _ => {
            let mut cost = vec![0.0; n * m];
            for (i, r) in requests.iter().enumerate() {
                for (j, s) in servers.iter().enumerate() {
                    cost[i * m + j] = space.dist(r, s)?;
                }
            }
            let euclidean = !matches!(space, MetricSpace::Tree(_));
            if euclidean && n >= SPARSE_MIN {
                solver::solve_sparse(n, m, &cost, SPARSE_K0)
            } else {
                solver::solve_dense(n, m, &cost)
            }
        }
    };

    let dists: Vec<f64> = pairs
        .iter()
        .enumerate()
        .map(|(i, &j)| space.dist(&requests[i], &servers[j]))
        .collect::<Result<_, _>>()?;
    Ok(Matching { pairs, total_cost: pairwise_sum(&dists) })
}

fn line_coords(points: &[Point]) -> Vec<f64> {
    points
        .iter()
        .map(|p| p.as_coords().expect("validated euclidean point")[0])
        .collect()
}

/// Exact optimal cost of a balanced tree instance by edge flows: each
/// edge `e` carries `|P_e − Q_e|` matched pairs, where `P_e` and `Q_e`
/// count servers and requests in the component below `e`.
pub fn opt_tree_exact(
    tree: &TreeMetric,
    server_counts: &[u64],
    request_counts: &[u64],
) -> Result<f64, OptError> {
    if server_counts.len() != tree.len() {
        return Err(OptError::CountLength { expected: tree.len(), got: server_counts.len() });
    }
    if request_counts.len() != tree.len() {
        return Err(OptError::CountLength { expected: tree.len(), got: request_counts.len() });
    }
    let s_total: u64 = server_counts.iter().sum();
    let r_total: u64 = request_counts.iter().sum();
    if s_total != r_total {
        return Err(OptError::Unbalanced { servers: s_total, requests: r_total });
    }
    // Deeper-first accumulation of subtree imbalances.
    let mut order: Vec<usize> = (0..tree.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.depth(v)));
    let mut net: Vec<i64> = (0..tree.len())
        .map(|v| server_counts[v] as i64 - request_counts[v] as i64)
        .collect();
    let mut terms = Vec::with_capacity(tree.len());
    for &v in &order {
        if let Some(p) = tree.parent(v) {
            terms.push(tree.edge_len(v) * net[v].unsigned_abs() as f64);
            net[p] += net[v];
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Monte Carlo estimate of the expected offline optimum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptEstimate {
    pub mean: f64,
    pub se: f64,
    pub trials: usize,
    pub seed: u64,
}

impl OptEstimate {
    pub fn from_samples(costs: &[f64], seed: u64) -> Self {
        let trials = costs.len();
        let mean = pairwise_sum(costs) / trials as f64;
        let se = if trials > 1 {
            let ss: Vec<f64> = costs.iter().map(|c| (c - mean) * (c - mean)).collect();
            (pairwise_sum(&ss) / (trials as f64 - 1.0)).sqrt() / (trials as f64).sqrt()
        } else {
            0.0
        };
        OptEstimate { mean, se, trials, seed }
    }
}

/// Estimates the expected optimal offline cost with `n` requests drawn
/// from `dist` per trial. Without `fixed_servers`, servers are drawn from
/// `dist` too (the doubly stochastic optimum); with them, the given set
/// serves every trial. Trials run in parallel with per-trial seeds, so
/// the estimate is independent of worker scheduling.
pub fn estimate_opt(
    space: &MetricSpace,
    dist: &Distribution,
    n: usize,
    trials: usize,
    master_seed: u64,
    fixed_servers: Option<&[Point]>,
) -> Result<OptEstimate, OptError> {
    if trials == 0 {
        return Err(OptError::NoTrials);
    }
    if let Some(s) = fixed_servers {
        if s.len() < n {
            return Err(OptError::NotEnoughServers { servers: s.len(), requests: n });
        }
    }
    let costs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64, OptError> {
            let ts = seed::trial_seed(master_seed, t);
            let servers: Vec<Point> = match fixed_servers {
                Some(s) => s.to_vec(),
                None => crate::space::sample(dist, space, n, seed::mix(ts, seed::tag::SERVERS))?,
            };
            let requests =
                crate::space::sample(dist, space, n, seed::mix(ts, seed::tag::REQUESTS))?;
            Ok(opt_offline(space, &servers, &requests)?.total_cost)
        })
        .collect::<Result<_, _>>()?;
    Ok(OptEstimate::from_samples(&costs, master_seed))
}

/// Closed-form predictor of the expected optimum for `t` servers and `t`
/// requests drawn uniformly over weighted tree nodes:
/// `(√t / n) · Σ_e d_e · √(n_e (n − n_e))`, with `n_e` the weight below
/// edge `e`. The proportionality constant is fixed at 1; tests bound the
/// ratio against Monte Carlo rather than asserting equality.
pub fn tree_opt_predictor(tree: &TreeMetric, weights: &[u64], t: usize) -> Result<f64, OptError> {
    if weights.len() != tree.len() {
        return Err(OptError::CountLength { expected: tree.len(), got: weights.len() });
    }
    let n: u64 = weights.iter().sum();
    if n == 0 || t == 0 || t as u64 > n {
        return Err(OptError::TOutOfRange { t, n });
    }
    let mut order: Vec<usize> = (0..tree.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.depth(v)));
    let mut below: Vec<u64> = weights.to_vec();
    let mut terms = Vec::with_capacity(tree.len());
    for &v in &order {
        if let Some(p) = tree.parent(v) {
            let ne = below[v];
            terms.push(tree.edge_len(v) * ((ne * (n - ne)) as f64).sqrt());
            below[p] += below[v];
        }
    }
    Ok((t as f64).sqrt() / n as f64 * pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_space() -> MetricSpace {
        MetricSpace::euclidean(1).unwrap()
    }

    fn pts(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::from(x)).collect()
    }

    #[test]
    fn nearest_of_two() {
        let m = opt_offline(&line_space(), &pts(&[0.0, 1.0]), &pts(&[0.1])).unwrap();
        assert_eq!(m.pairs, vec![0]);
        assert!((m.total_cost - 0.1).abs() < 1e-12);
    }

    #[test]
    fn non_crossing_on_line() {
        let m = opt_offline(&line_space(), &pts(&[0.0, 1.0]), &pts(&[0.4, 0.6])).unwrap();
        assert!((m.total_cost - 0.8).abs() < 1e-12);
    }

    #[test]
    fn too_few_servers_rejected() {
        let err = opt_offline(&line_space(), &pts(&[0.5]), &pts(&[0.1, 0.9]));
        assert!(matches!(err, Err(OptError::NotEnoughServers { .. })));
    }

    #[test]
    fn empty_requests_cost_zero() {
        let m = opt_offline(&line_space(), &pts(&[0.5]), &[]).unwrap();
        assert_eq!(m.total_cost, 0.0);
        assert!(m.pairs.is_empty());
    }

    #[test]
    fn tree_single_edge_flow() {
        // One edge of length 1; server on one side, request on the other.
        let tree = TreeMetric::from_text("0 -1 0\n1 0 1\n").unwrap();
        let c = opt_tree_exact(&tree, &[1, 0], &[0, 1]).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        // Balanced per node: zero flow everywhere.
        let c = opt_tree_exact(&tree, &[1, 2], &[1, 2]).unwrap();
        assert_eq!(c, 0.0);
        // Unbalanced totals rejected.
        assert!(matches!(
            opt_tree_exact(&tree, &[1, 0], &[1, 1]),
            Err(OptError::Unbalanced { .. })
        ));
    }

    #[test]
    fn estimate_opt_single_pair_is_one_third() {
        // E|s − r| for independent uniforms on [0,1] is 1/3.
        let space = line_space();
        let est = estimate_opt(&space, &Distribution::uniform(), 1, 4000, 7, None).unwrap();
        assert!(
            (est.mean - 1.0 / 3.0).abs() < 3.0 * est.se + 1e-3,
            "mean {} se {}",
            est.mean,
            est.se
        );
    }

    #[test]
    fn estimate_opt_deterministic_given_seed() {
        let space = line_space();
        let a = estimate_opt(&space, &Distribution::uniform(), 8, 50, 9, None).unwrap();
        let b = estimate_opt(&space, &Distribution::uniform(), 8, 50, 9, None).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.se, b.se);
    }

    #[test]
    fn predictor_direct_arithmetic() {
        // Single edge d_e = 1, weights (2, 2), n = 4, t = 4: (2/4)·√4 = 1.
        let tree = TreeMetric::from_text("0 -1 0\n1 0 1\n").unwrap();
        let p = tree_opt_predictor(&tree, &[2, 2], 4).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        // All weight on one node: zero for every t.
        let p = tree_opt_predictor(&tree, &[4, 0], 3).unwrap();
        assert_eq!(p, 0.0);
        assert!(matches!(
            tree_opt_predictor(&tree, &[2, 2], 5),
            Err(OptError::TOutOfRange { .. })
        ));
    }

    #[test]
    fn opt_estimate_serializes_expected_fields() {
        let est = OptEstimate { mean: 1.5, se: 0.1, trials: 10, seed: 7 };
        let json = serde_json::to_value(&est).unwrap();
        assert_eq!(json["mean"], 1.5);
        assert_eq!(json["se"], 0.1);
        assert_eq!(json["trials"], 10);
        assert_eq!(json["seed"], 7);
    }
}
