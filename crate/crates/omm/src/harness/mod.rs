//! Seeded experiment runner, adversarial server generators, scaling fits,
//! and the check suites behind the `omm` binary.
//!
//! A run is fully determined by its config and master seed: per-trial
//! seeds are derived by hashing, trials are independent work units, and
//! aggregation is order-independent, so the emitted CSV is byte-identical
//! regardless of worker count.

mod config;
mod fit;

pub use config::{named_density, DistSpec, EmbedMode, ExperimentConfig, SpaceSpec};
pub use fit::{bootstrap_slope_ci, fit_scaling, ScalingFit};

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hst::{
    build_hst, exact_expected_cost, HstError, MnpPolicy, RandomSubtreePolicy, TreePolicyKind,
};
use crate::online::{
    GreedyPolicy, HierarchicalGreedyPolicy, OnlineError, SoarPolicy, UniformTieBreak,
};
use crate::optmatch::{opt_offline, pairwise_sum, OptError};
use crate::reduce::{PolicyFactory, ReductionPolicy};
use crate::seed;
use crate::space::{sample, Distribution, Hst, MetricSpace, Point, SpaceError, TreeMetric};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown adversarial generator {0:?}")]
    UnknownGenerator(String),
    #[error("unknown policy key {0:?}")]
    UnknownPolicy(String),
    #[error("generator {0:?} needs a Euclidean space")]
    NeedsEuclidean(String),
    #[error("policy {0:?} needs a tree space; pass embed = hst for Euclidean instances")]
    NeedsTree(String),
    #[error("need at least 4 positive points for a scaling fit, got {0}")]
    TooFewPoints(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Online(#[from] OnlineError),
    #[error(transparent)]
    Hst(#[from] HstError),
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Config(format!("json: {e}"))
    }
}

/// Builds the named adversarial server family.
///
/// - `corner-cluster`: uniform in the radius-0.05 ball at the origin corner
/// - `half-cube`: uniform on `[0, 0.5] × [0,1]^(d−1)`
/// - `grid`: regular lattice of cell midpoints
/// - `duplicate-point`: every server at the centroid
/// - `uniform-control`: i.i.d. uniform (uniform leaves on tree spaces)
pub fn generate_adversarial(
    name: &str,
    m: usize,
    space: &MetricSpace,
    seed_val: u64,
) -> Result<Vec<Point>, HarnessError> {
    let mut rng = seed::rng(seed_val);
    if let MetricSpace::Tree(tree) = space {
        if name == "uniform-control" {
            let leaves = tree.leaves();
            return Ok((0..m)
                .map(|_| Point::node(leaves[rng.gen_range(0..leaves.len())]))
                .collect());
        }
        return Err(HarnessError::NeedsEuclidean(name.to_string()));
    }
    let d = space.dim().expect("euclidean space");
    match name {
        "corner-cluster" => Ok((0..m)
            .map(|_| loop {
                let c: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 0.05).collect();
                if c.iter().map(|x| x * x).sum::<f64>().sqrt() <= 0.05 {
                    return Point::Coords(c);
                }
            })
            .collect()),
        "half-cube" => Ok((0..m)
            .map(|_| {
                Point::Coords(
                    (0..d)
                        .map(|axis| {
                            if axis == 0 {
                                rng.gen::<f64>() * 0.5
                            } else {
                                rng.gen::<f64>()
                            }
                        })
                        .collect(),
                )
            })
            .collect()),
        "grid" => {
            let mut per_axis = 1usize;
            while per_axis.pow(d as u32) < m {
                per_axis += 1;
            }
            let mut out = Vec::with_capacity(m);
            let mut idx = vec![0usize; d];
            'fill: loop {
                out.push(Point::Coords(
                    idx.iter().map(|&i| (i as f64 + 0.5) / per_axis as f64).collect(),
                ));
                if out.len() == m {
                    break 'fill;
                }
                for axis in (0..d).rev() {
                    idx[axis] += 1;
                    if idx[axis] < per_axis {
                        continue 'fill;
                    }
                    idx[axis] = 0;
                }
                break;
            }
            Ok(out)
        }
        "duplicate-point" => Ok(vec![Point::Coords(vec![0.5; d]); m]),
        "uniform-control" => Ok((0..m)
            .map(|_| Point::Coords((0..d).map(|_| rng.gen::<f64>()).collect()))
            .collect()),
        other => Err(HarnessError::UnknownGenerator(other.to_string())),
    }
}

/// Maps a policy key to a fresh-instance factory. Keys:
/// `greedy-uniform`, `soar`, `hgreedy`, `mnp-hst`, `random-subtree`,
/// and `reduce:<inner>`. Distribution-driven policies sample from `dist`.
pub fn policy_factory(key: &str, dist: &Distribution) -> Result<PolicyFactory, HarnessError> {
    if let Some(inner_key) = key.strip_prefix("reduce:") {
        let inner = policy_factory(inner_key, dist)?;
        let dist = dist.clone();
        return Ok(Arc::new(move || Box::new(ReductionPolicy::new(inner(), dist.clone()))));
    }
    match key {
        "greedy-uniform" => Ok(Arc::new(|| Box::new(GreedyPolicy::new(UniformTieBreak)))),
        "soar" => {
            let dist = dist.clone();
            Ok(Arc::new(move || Box::new(SoarPolicy::new(dist.clone()))))
        }
        "hgreedy" => Ok(Arc::new(|| Box::new(HierarchicalGreedyPolicy::new(None)))),
        "mnp-hst" => Ok(Arc::new(|| Box::new(MnpPolicy::new()))),
        "random-subtree" => Ok(Arc::new(|| Box::new(RandomSubtreePolicy::new()))),
        other => Err(HarnessError::UnknownPolicy(other.to_string())),
    }
}

fn is_tree_policy(key: &str) -> bool {
    matches!(key, "mnp-hst" | "random-subtree")
}

/// One simulated instance: a policy run plus the paired offline optimum.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub policy: String,
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub cost: f64,
    pub opt: f64,
    /// `cost/opt` when `opt > 0`, else NaN.
    pub ratio: f64,
    /// `(cost − opt) / n`.
    pub regret: f64,
}

pub const CSV_HEADER: &str = "policy,n,m,trial,cost,opt,ratio,regret";

impl TrialRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.policy, self.n, self.m, self.trial, self.cost, self.opt, self.ratio, self.regret
        )
    }
}

/// Per-(policy, n) aggregates.
#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub policy: String,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub mean_cost: f64,
    pub se_cost: f64,
    pub mean_opt: f64,
    pub mean_ratio: f64,
    pub se_ratio: f64,
    pub mean_regret: f64,
    pub se_regret: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitSummary {
    pub policy: String,
    pub field: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Bootstrap 95% interval for the slope (1000 resamples).
    pub slope_ci: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct CellError {
    pub policy: String,
    pub n: usize,
    pub message: String,
}

/// Everything a run emits; the CSV text is written byte-for-byte.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub rows: Vec<TrialRow>,
    pub cells: Vec<CellSummary>,
    pub fits: Vec<FitSummary>,
    pub errors: Vec<CellError>,
    pub csv: String,
    pub summary: serde_json::Value,
}

pub(crate) fn mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = pairwise_sum(values) / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, (pairwise_sum(&ss) / (k - 1.0)).sqrt() / k.sqrt())
}

/// Runs one policy on one realized instance, routing tree policies
/// through a random HST embedding when configured. Returns the policy's
/// cost in the *original* space.
fn run_policy_trial(
    key: &str,
    factory: &PolicyFactory,
    space: &MetricSpace,
    servers: &[Point],
    requests: &[Point],
    embed: EmbedMode,
    trial_seed: u64,
) -> Result<f64, HarnessError> {
    let policy_seed = seed::mix(trial_seed, seed::tag::POLICY);
    let euclidean = !matches!(space, MetricSpace::Tree(_));
    if is_tree_policy(key) && euclidean {
        if embed != EmbedMode::Hst {
            return Err(HarnessError::NeedsTree(key.to_string()));
        }
        // Embed the realized instance; decisions happen on the tree,
        // costs are measured in the original space.
        let mut points = servers.to_vec();
        points.extend_from_slice(requests);
        let embedding = build_hst(&points, space, seed::mix(trial_seed, seed::tag::EMBED))?;
        let tree_space = MetricSpace::tree(embedding.hst.tree().clone());
        let server_pts: Vec<Point> =
            embedding.leaf_of[..servers.len()].iter().map(|&l| Point::node(l)).collect();
        let request_pts: Vec<Point> =
            embedding.leaf_of[servers.len()..].iter().map(|&l| Point::node(l)).collect();
        let mut policy = factory();
        let rec = crate::online::run_online(
            &mut *policy,
            &tree_space,
            &server_pts,
            &request_pts,
            policy_seed,
        )?;
        let dists: Vec<f64> = rec
            .steps
            .iter()
            .enumerate()
            .map(|(i, step)| space.dist(&requests[i], &servers[step.server]))
            .collect::<Result<_, _>>()?;
        return Ok(pairwise_sum(&dists));
    }
    let mut policy = factory();
    let rec = crate::online::run_online(&mut *policy, space, servers, requests, policy_seed)?;
    Ok(rec.total_cost)
}

/// Runs the full grid: for each policy and each `n`, `trials` seeded
/// instances with paired offline optima. A failing cell is recorded in
/// the summary; all other cells proceed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let space = cfg.space.build()?;
    let mut rows: Vec<TrialRow> = Vec::new();
    let mut cells = Vec::new();
    let mut errors = Vec::new();
    let mut ratio_samples: Vec<(String, f64, Vec<f64>)> = Vec::new();
    let mut regret_samples: Vec<(String, f64, Vec<f64>)> = Vec::new();

    for key in &cfg.policies {
        for &n in &cfg.n_grid {
            let m = cfg.servers_for(n);
            let cell: Result<Vec<TrialRow>, HarnessError> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| -> Result<TrialRow, HarnessError> {
                    let ts = seed::mix(seed::trial_seed(cfg.seed, trial), n as u64);
                    let servers = generate_adversarial(
                        &cfg.adversarial,
                        m,
                        &space,
                        seed::mix(ts, seed::tag::SERVERS),
                    )?;
                    let dist = cfg.dist.build(Some(&servers))?;
                    let requests = sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS))?;
                    let factory = policy_factory(key, &dist)?;
                    let cost =
                        run_policy_trial(key, &factory, &space, &servers, &requests, cfg.embed, ts)?;
                    let opt = opt_offline(&space, &servers, &requests)?.total_cost;
                    let ratio = if opt > 0.0 { cost / opt } else { f64::NAN };
                    let regret = (cost - opt) / n as f64;
                    Ok(TrialRow { policy: key.clone(), n, m, trial, cost, opt, ratio, regret })
                })
                .collect();
            match cell {
                Err(e) => errors.push(CellError { policy: key.clone(), n, message: e.to_string() }),
                Ok(cell_rows) => {
                    let costs: Vec<f64> = cell_rows.iter().map(|r| r.cost).collect();
                    let opts: Vec<f64> = cell_rows.iter().map(|r| r.opt).collect();
                    // Ratios are undefined (NaN) on zero-optimum trials;
                    // aggregates cover the defined ones.
                    let ratios: Vec<f64> =
                        cell_rows.iter().map(|r| r.ratio).filter(|x| x.is_finite()).collect();
                    let regrets: Vec<f64> = cell_rows.iter().map(|r| r.regret).collect();
                    let (mean_cost, se_cost) = mean_se(&costs);
                    let (mean_opt, _) = mean_se(&opts);
                    let (mean_ratio, se_ratio) = if ratios.is_empty() {
                        (f64::NAN, f64::NAN)
                    } else {
                        mean_se(&ratios)
                    };
                    let (mean_regret, se_regret) = mean_se(&regrets);
                    cells.push(CellSummary {
                        policy: key.clone(),
                        n,
                        m,
                        trials: cfg.trials,
                        mean_cost,
                        se_cost,
                        mean_opt,
                        mean_ratio,
                        se_ratio,
                        mean_regret,
                        se_regret,
                    });
                    ratio_samples.push((key.clone(), n as f64, ratios));
                    regret_samples.push((key.clone(), n as f64, regrets));
                    rows.extend(cell_rows);
                }
            }
        }
    }

    // Scaling fits per policy over the grid, when enough cells survive.
    let mut fits = Vec::new();
    for key in &cfg.policies {
        for (field, samples) in [("ratio", &ratio_samples), ("regret", &regret_samples)] {
            let per_n: Vec<(f64, Vec<f64>)> = samples
                .iter()
                .filter(|(p, _, _)| p == key)
                .map(|(_, n, vals)| (*n, vals.clone()))
                .collect();
            let points: Vec<(f64, f64)> =
                per_n.iter().map(|(n, vals)| (*n, mean_se(vals).0)).collect();
            if let Ok(fit) = fit_scaling(&points) {
                let positive: Vec<(f64, Vec<f64>)> =
                    per_n.into_iter().filter(|(_, vals)| mean_se(vals).0 > 0.0).collect();
                let slope_ci =
                    bootstrap_slope_ci(&positive, 1000, cfg.seed).unwrap_or((f64::NAN, f64::NAN));
                fits.push(FitSummary {
                    policy: key.clone(),
                    field: field.to_string(),
                    slope: fit.slope,
                    intercept: fit.intercept,
                    r2: fit.r2,
                    slope_ci,
                });
            }
        }
    }

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        let _ = writeln!(csv, "{}", row.csv_line());
    }

    let summary = serde_json::json!({
        "schema": 1,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "n_grid": cfg.n_grid,
        "excess": cfg.excess,
        "adversarial": cfg.adversarial,
        "policies": cfg.policies,
        "cells": cells,
        "fits": fits,
        "errors": errors,
    });

    Ok(ExperimentOutput { rows, cells, fits, errors, csv, summary })
}

/// Writes the CSV and JSON summary to the configured paths.
pub fn write_outputs(cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<(), HarnessError> {
    for path in [&cfg.csv_path, &cfg.summary_path] {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
    }
    std::fs::write(&cfg.csv_path, &out.csv)?;
    std::fs::write(&cfg.summary_path, serde_json::to_string_pretty(&out.summary)?.as_bytes())?;
    Ok(())
}

/// Monte Carlo mean of the nearest-server distance `min_s δ(s, r)` over
/// `r ~ dist`.
pub fn nn_distance_check(
    space: &MetricSpace,
    servers: &[Point],
    dist: &Distribution,
    trials: usize,
    seed_val: u64,
) -> Result<f64, HarnessError> {
    if servers.is_empty() {
        return Err(HarnessError::Config("empty server set".into()));
    }
    let draws = sample(dist, space, trials, seed_val)?;
    let mut mins = Vec::with_capacity(trials);
    for r in &draws {
        let mut best = f64::INFINITY;
        for s in servers {
            best = best.min(space.dist(s, r)?);
        }
        mins.push(best);
    }
    Ok(pairwise_sum(&mins) / trials as f64)
}

/// A random HST for test instances: every node at level `l > 0` gets
/// 1–3 children with level-dependent edge lengths, leaves at level 0.
pub fn random_hst(levels: u32, rng: &mut rand_chacha::ChaCha8Rng) -> Hst {
    let base: f64 = 0.5 + rng.gen::<f64>();
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut lens = vec![0.0];
    let mut node_levels = vec![levels];
    let mut frontier = vec![0usize];
    for level in (0..levels).rev() {
        let mut next = Vec::new();
        let len = base * ((level + 1) as f64).exp2();
        for &p in &frontier {
            let kids = rng.gen_range(1..=3);
            for _ in 0..kids {
                let id = parents.len();
                parents.push(Some(p));
                lens.push(len);
                node_levels.push(level);
                next.push(id);
            }
        }
        frontier = next;
    }
    let tree = TreeMetric::new(&parents, &lens).expect("construction is valid");
    Hst::new(tree, node_levels, 0.0).expect("level-based lengths separate exactly")
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub kind: String,
    pub cases: usize,
    pub passes: usize,
    pub skipped_budget: usize,
    /// Human-readable description of each failing instance.
    pub failures: Vec<String>,
}

impl MonotonicityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random exact-expectation instances checking that removing servers
/// never helps: for `S' ⊆ S` with `|S'| ≥ |R|`, the expected cost under
/// `S` must not exceed the expected cost under `S'` (within 1e−9).
pub fn monotonicity_suite(
    kind: TreePolicyKind,
    cases: usize,
    max_servers: usize,
    max_requests: usize,
    seed_val: u64,
) -> MonotonicityReport {
    let mut rng = seed::rng(seed_val);
    let mut report = MonotonicityReport {
        kind: format!("{kind:?}"),
        cases,
        passes: 0,
        skipped_budget: 0,
        failures: Vec::new(),
    };
    let mut done = 0usize;
    while done < cases {
        let hst = random_hst(rng.gen_range(1..=3), &mut rng);
        let tree = hst.tree();
        let leaves = tree.leaves();
        let n_requests = rng.gen_range(0..=max_requests);
        let n_sub = rng.gen_range(n_requests.max(1)..=max_servers);
        let n_full = rng.gen_range(n_sub..=max_servers);
        let sub: Vec<usize> = (0..n_sub).map(|_| leaves[rng.gen_range(0..leaves.len())]).collect();
        let mut full = sub.clone();
        full.extend((0..n_full - n_sub).map(|_| leaves[rng.gen_range(0..leaves.len())]));
        let requests: Vec<usize> =
            (0..n_requests).map(|_| leaves[rng.gen_range(0..leaves.len())]).collect();

        let full_cost = exact_expected_cost(kind, tree, &full, &requests);
        let sub_cost = exact_expected_cost(kind, tree, &sub, &requests);
        match (full_cost, sub_cost) {
            (Ok(f), Ok(s)) => {
                done += 1;
                if f <= s + 1e-9 {
                    report.passes += 1;
                } else {
                    report.failures.push(format!(
                        "S={full:?} S'={sub:?} R={requests:?}: cost(S)={f} > cost(S')={s}"
                    ));
                }
            }
            _ => {
                report.skipped_budget += 1;
                if report.skipped_budget > cases * 10 {
                    break;
                }
            }
        }
    }
    report
}

/// Outcome of one named check, for the `omm check` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

fn outcome(name: &str, pass: bool, details: String) -> CheckOutcome {
    CheckOutcome { name: name.to_string(), pass, details }
}

/// Approximate-triangle checks: the declared `2^(p−1)` bound holds over
/// sampled triples for each power, and the plain triangle inequality is
/// certifiably violated for `p = 2`.
pub fn check_triangle(triples: u64, seed_val: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &p in &[1.5, 2.0, 3.0] {
        let space = MetricSpace::euclidean_power(2, p).unwrap();
        let report = crate::space::verify_approx_triangle(&space, triples, seed_val).unwrap();
        out.push(outcome(
            &format!("eta-bound p={p}"),
            report.violations == 0 && report.worst_ratio <= space.eta() + 1e-12,
            format!(
                "violations={} worst_ratio={:.6} eta={}",
                report.violations,
                report.worst_ratio,
                space.eta()
            ),
        ));
    }
    // Certified plain-triangle violation for p = 2: the analytic triple
    // (0, 1/2, 1) and the sampled worst ratio both exceed 1.
    let space = MetricSpace::euclidean_power(1, 2.0).unwrap();
    let (x, y, z) = (Point::from(0.0), Point::from(0.5), Point::from(1.0));
    let dxz = space.dist(&x, &z).unwrap();
    let denom = space.dist(&x, &y).unwrap() + space.dist(&y, &z).unwrap();
    let report =
        crate::space::verify_approx_triangle(&space, triples.min(100_000), seed_val).unwrap();
    out.push(outcome(
        "eta-1-violation p=2",
        dxz > denom && report.worst_ratio > 1.0,
        format!("analytic triple ratio={} sampled worst={:.6}", dxz / denom, report.worst_ratio),
    ));
    out
}

/// Subset-monotonicity checks for both tree policies.
pub fn check_monotone(cases: usize, seed_val: u64) -> Vec<CheckOutcome> {
    [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree]
        .into_iter()
        .map(|kind| {
            let report = monotonicity_suite(kind, cases, 7, 4, seed_val);
            outcome(
                &format!("monotone {:?}", kind),
                report.pass(),
                format!(
                    "{}/{} passed, {} skipped (budget){}",
                    report.passes,
                    report.cases,
                    report.skipped_budget,
                    if report.failures.is_empty() {
                        String::new()
                    } else {
                        format!("; first failure: {}", report.failures[0])
                    }
                ),
            )
        })
        .collect()
}

/// Exact first-choice probability of each server for a tree policy,
/// derived from subtree counts only (independent of the policy code).
pub fn exact_choice_probabilities(
    kind: TreePolicyKind,
    tree: &TreeMetric,
    server_leaves: &[usize],
    request_leaf: usize,
) -> Vec<f64> {
    let mut count = vec![0u32; tree.len()];
    for &leaf in server_leaves {
        let mut v = leaf;
        loop {
            count[v] += 1;
            match tree.parent(v) {
                Some(p) => v = p,
                None => break,
            }
        }
    }
    let mut anchor = request_leaf;
    while count[anchor] == 0 {
        anchor = tree.parent(anchor).expect("a server exists somewhere");
    }
    server_leaves
        .iter()
        .map(|&leaf| {
            let mut v = leaf;
            let mut under = false;
            loop {
                if v == anchor {
                    under = true;
                    break;
                }
                match tree.parent(v) {
                    Some(p) => v = p,
                    None => break,
                }
            }
            if !under {
                return 0.0;
            }
            match kind {
                TreePolicyKind::Mnp => 1.0 / count[anchor] as f64,
                TreePolicyKind::RandomSubtree => {
                    // Product of 1/(occupied children) along anchor → leaf,
                    // then uniform among the servers at the leaf.
                    let mut path = vec![leaf];
                    let mut v = leaf;
                    while v != anchor {
                        v = tree.parent(v).expect("anchor is an ancestor");
                        path.push(v);
                    }
                    path.reverse();
                    let mut prob = 1.0;
                    for w in path.windows(2) {
                        let occupied =
                            tree.children(w[0]).iter().filter(|&&c| count[c] > 0).count();
                        prob /= occupied as f64;
                    }
                    prob / count[leaf] as f64
                }
            }
        })
        .collect()
}

/// Frequency checks of the tree tie-break laws on fixed random HSTs:
/// empirical first-choice frequencies over `runs` serves must match the
/// exact probabilities within `tol` (absolute).
pub fn check_tiebreak(instances: usize, runs: usize, tol: f64, seed_val: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for kind in [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree] {
        let mut worst = 0.0f64;
        let mut pass = true;
        for inst in 0..instances {
            let mut rng = seed::rng(seed::mix(seed_val, inst as u64));
            let hst = random_hst(rng.gen_range(2..=3), &mut rng);
            let tree = hst.tree().clone();
            let leaves = tree.leaves();
            let n_servers = rng.gen_range(3..=6);
            let server_leaves: Vec<usize> =
                (0..n_servers).map(|_| leaves[rng.gen_range(0..leaves.len())]).collect();
            let request_leaf = leaves[rng.gen_range(0..leaves.len())];
            let exact = exact_choice_probabilities(kind, &tree, &server_leaves, request_leaf);

            let space = MetricSpace::tree(tree.clone());
            let server_pts: Vec<Point> = server_leaves.iter().map(|&l| Point::node(l)).collect();
            let request = [Point::node(request_leaf)];
            let freq: Vec<usize> = (0..runs)
                .into_par_iter()
                .fold(
                    || vec![0usize; n_servers],
                    |mut acc, run| {
                        let run_seed =
                            seed::mix(seed::mix(seed_val, inst as u64), 1000 + run as u64);
                        let chosen = match kind {
                            TreePolicyKind::Mnp => {
                                let mut p = MnpPolicy::new();
                                crate::online::run_online(
                                    &mut p, &space, &server_pts, &request, run_seed,
                                )
                            }
                            TreePolicyKind::RandomSubtree => {
                                let mut p = RandomSubtreePolicy::new();
                                crate::online::run_online(
                                    &mut p, &space, &server_pts, &request, run_seed,
                                )
                            }
                        }
                        .expect("valid instance")
                        .steps[0]
                            .server;
                        acc[chosen] += 1;
                        acc
                    },
                )
                .reduce(
                    || vec![0usize; n_servers],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                );
            for (j, &e) in exact.iter().enumerate() {
                let f = freq[j] as f64 / runs as f64;
                let err = (f - e).abs();
                worst = worst.max(err);
                if err > tol {
                    pass = false;
                }
            }
        }
        out.push(outcome(
            &format!("tiebreak {:?}", kind),
            pass,
            format!("{instances} instances x {runs} runs, worst |freq - exact| = {worst:.4}"),
        ));
    }
    out
}

/// Nearest-neighbor distance sanity: closed forms on the line and the
/// `n^(−1/2)` floor for planar grids.
pub fn check_nn(seed_val: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let line = MetricSpace::euclidean(1).unwrap();
    let uniform = Distribution::uniform();

    let mid = nn_distance_check(&line, &[Point::from(0.5)], &uniform, 200_000, seed_val).unwrap();
    out.push(outcome(
        "nn single-midpoint",
        (mid - 0.25).abs() < 0.005,
        format!("mean={mid:.5} expected 0.25"),
    ));

    let n = 64;
    let grid = generate_adversarial("grid", n, &line, seed_val).unwrap();
    let g = nn_distance_check(&line, &grid, &uniform, 200_000, seed_val + 1).unwrap();
    out.push(outcome(
        "nn line-grid",
        (g - 1.0 / (4.0 * n as f64)).abs() < 0.0005,
        format!("mean={g:.6} expected {:.6}", 1.0 / (4.0 * n as f64)),
    ));

    let plane = MetricSpace::euclidean(2).unwrap();
    let mut scaled = Vec::new();
    for &n in &[64usize, 256, 1024] {
        let servers = generate_adversarial("grid", n, &plane, seed_val).unwrap();
        let mean =
            nn_distance_check(&plane, &servers, &uniform, 100_000, seed_val + n as u64).unwrap();
        scaled.push(mean * (n as f64).sqrt());
    }
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(outcome(
        "nn plane-exponent",
        lo > 0.2,
        format!("mean·√n over grids = {scaled:?}"),
    ));
    out
}
