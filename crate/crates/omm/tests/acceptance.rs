//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`). Master seed 7
//! throughout. The scaling criteria run Monte Carlo sweeps and take
//! minutes on a small machine; trial counts per grid point shrink as the
//! per-trial cost grows, never below 30.

mod common;

use std::time::Instant;

use omm::harness::{
    check_tiebreak, fit_scaling, generate_adversarial, monotonicity_suite, random_hst,
    run_experiment, ExperimentConfig,
};
use omm::hst::{MnpPolicy, RandomSubtreePolicy, TreePolicyKind};
use omm::online::{run_online, SoarPolicy};
use omm::optmatch::{estimate_opt, opt_offline, opt_tree_exact};
use omm::reduce::{reduction_bound_report, PolicyFactory, ReductionPolicy};
use omm::seed;
use omm::space::{sample, verify_approx_triangle, Distribution, MetricSpace, Point};
use rand::Rng;

const MASTER_SEED: u64 = 7;

fn report(id: u32, name: &str, pass: bool, details: &str) {
    println!("criterion {id:02} {name}: {} ({details})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id:02} {name}: {details}");
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Criterion 1: The assignment solver equals brute-force enumeration on 500 random
/// instances with |R| ≤ 7 and |S| ≤ 9, across every metric kind, within
/// 1e−9, in under 10 seconds.
#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = seed::rng(MASTER_SEED);
    let mut checked = 0;
    let mut worst_gap = 0.0f64;
    while checked < 500 {
        for space in common::test_spaces(&mut rng) {
            let n_requests = rng.gen_range(1..=7);
            let n_servers = rng.gen_range(n_requests..=9);
            let servers = common::random_points(&space, n_servers, &mut rng);
            let requests = common::random_points(&space, n_requests, &mut rng);
            let solved = opt_offline(&space, &servers, &requests).unwrap();
            let brute = common::brute_force_opt(&space, &servers, &requests);
            worst_gap = worst_gap.max((solved.total_cost - brute).abs());
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "oracle-equivalence",
        worst_gap < 1e-9 && elapsed < 10.0,
        &format!("{checked} instances, worst |gap| {worst_gap:.2e}, {elapsed:.2} s"),
    );
}

/// Criterion 2: The edge-flow formula equals the generic solver exactly on 200
/// random balanced tree instances of at most 8 units.
#[test]
fn criterion_02_tree_edge_flow_identity() {
    let mut rng = seed::rng(seed::mix(MASTER_SEED, 2));
    let mut worst_gap = 0.0f64;
    for _ in 0..200 {
        let tree = common::random_tree(rng.gen_range(2..=10), &mut rng);
        let nodes = tree.len();
        let units = rng.gen_range(1..=8usize);
        let mut server_counts = vec![0u64; nodes];
        let mut request_counts = vec![0u64; nodes];
        for _ in 0..units {
            server_counts[rng.gen_range(0..nodes)] += 1;
            request_counts[rng.gen_range(0..nodes)] += 1;
        }
        let flow = opt_tree_exact(&tree, &server_counts, &request_counts).unwrap();
        let mut servers = Vec::new();
        let mut requests = Vec::new();
        for v in 0..nodes {
            servers.extend((0..server_counts[v]).map(|_| Point::node(v)));
            requests.extend((0..request_counts[v]).map(|_| Point::node(v)));
        }
        let space = MetricSpace::tree(tree);
        let solved = opt_offline(&space, &servers, &requests).unwrap();
        worst_gap = worst_gap.max((flow - solved.total_cost).abs());
    }
    report(
        2,
        "tree-edge-flow",
        worst_gap < 1e-9,
        &format!("200 instances, worst |gap| {worst_gap:.2e}"),
    );
}

/// Criterion 3: Growth of the doubly stochastic optimum under uniform arrivals:
/// slope ≈ 1/2 on the line, ≈ 2/3 in the cube, and a flat
/// `mean/√(n ln n)` profile in the square (variation under 20%).
#[test]
fn criterion_03_opt_scaling_exponents() {
    let grid = [64usize, 128, 256, 512, 1024, 2048];
    let uniform = Distribution::uniform();
    let start = Instant::now();

    let slope_for = |d: usize| -> f64 {
        let space = MetricSpace::euclidean(d).unwrap();
        let points: Vec<(f64, f64)> = grid
            .iter()
            .map(|&n| {
                let est = estimate_opt(
                    &space,
                    &uniform,
                    n,
                    200,
                    seed::mix(MASTER_SEED, (d * 10_000 + n) as u64),
                    None,
                )
                .unwrap();
                (n as f64, est.mean)
            })
            .collect();
        fit_scaling(&points).unwrap().slope
    };

    let s1 = slope_for(1);
    let s3 = slope_for(3);

    let plane = MetricSpace::euclidean(2).unwrap();
    let akt: Vec<f64> = grid
        .iter()
        .map(|&n| {
            let est = estimate_opt(
                &plane,
                &uniform,
                n,
                200,
                seed::mix(MASTER_SEED, (2 * 10_000 + n) as u64),
                None,
            )
            .unwrap();
            est.mean / (n as f64 * (n as f64).ln()).sqrt()
        })
        .collect();
    let lo = akt.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = akt.iter().cloned().fold(0.0f64, f64::max);
    let spread = (hi - lo) / lo;

    let pass = (0.44..=0.56).contains(&s1) && (0.60..=0.73).contains(&s3) && spread < 0.20;
    report(
        3,
        "opt-scaling",
        pass,
        &format!(
            "d1 slope {s1:.3}, d3 slope {s3:.3}, d2 sqrt(n ln n) spread {:.1}%, {:.0} s",
            100.0 * spread,
            start.elapsed().as_secs_f64()
        ),
    );
}

/// Criterion 4: In a balanced self-distribution market at n = 128 the
/// simulate-optimize-assign-repeat policy's mean cost matches
/// `Σ_t OPT(t)/t` within three combined standard errors for d ∈ {1,2,3}.
#[test]
fn criterion_04_soar_cost_law() {
    let n = 128usize;
    let trials = 200usize;
    let mut details = Vec::new();
    let mut pass = true;
    for d in [1usize, 2, 3] {
        let space = MetricSpace::euclidean(d).unwrap();
        let dist = Distribution::uniform();

        let mut sum = 0.0;
        let mut sum_var = 0.0;
        for t in 1..=n {
            let est = estimate_opt(
                &space,
                &dist,
                t,
                trials,
                seed::mix(MASTER_SEED, (d * 1000 + t) as u64),
                None,
            )
            .unwrap();
            sum += est.mean / t as f64;
            sum_var += (est.se / t as f64).powi(2);
        }

        let costs: Vec<f64> = {
            use rayon::prelude::*;
            (0..trials)
                .into_par_iter()
                .map(|i| {
                    let ts = seed::mix(seed::trial_seed(MASTER_SEED, i), d as u64);
                    let servers =
                        sample(&dist, &space, n, seed::mix(ts, seed::tag::SERVERS)).unwrap();
                    let requests =
                        sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
                    let mut policy = SoarPolicy::new(dist.clone());
                    run_online(
                        &mut policy,
                        &space,
                        &servers,
                        &requests,
                        seed::mix(ts, seed::tag::POLICY),
                    )
                    .unwrap()
                    .total_cost
                })
                .collect()
        };
        let (mean, se) = mean_se(&costs);
        let combined = (se * se + sum_var).sqrt();
        let ok = (mean - sum).abs() <= 3.0 * combined;
        pass &= ok;
        details.push(format!("d{d}: {mean:.3} vs {sum:.3} (3se {:.3})", 3.0 * combined));
    }
    report(4, "soar-cost-law", pass, &details.join("; "));
}

/// Criterion 5: The reduction's expected bound and the per-trial relay bound hold
/// for every adversarial family, d ∈ {1,2,3}, and c ∈ {1,2} at n = 128.
#[test]
fn criterion_05_reduction_inequality() {
    let families = ["corner-cluster", "half-cube", "grid", "duplicate-point", "uniform-control"];
    let n = 128usize;
    let trials = 200usize;
    let mut pass = true;
    let mut failing = Vec::new();
    let mut cells = 0;
    for d in [1usize, 2, 3] {
        let space = MetricSpace::euclidean(d).unwrap();
        let dist = Distribution::uniform();
        let factory: PolicyFactory = std::sync::Arc::new({
            let dist = dist.clone();
            move || Box::new(SoarPolicy::new(dist.clone()))
        });
        for family in families {
            for c in [1usize, 2] {
                let m = c * n;
                let servers = generate_adversarial(
                    family,
                    m,
                    &space,
                    seed::mix(MASTER_SEED, (d * 100 + c) as u64),
                )
                .unwrap();
                let rep = reduction_bound_report(
                    &space,
                    &servers,
                    &dist,
                    &factory,
                    n,
                    trials,
                    seed::mix(MASTER_SEED, (d * 1000 + c * 10) as u64),
                )
                .unwrap();
                cells += 1;
                if !rep.pass {
                    pass = false;
                    failing.push(format!(
                        "{family} d{d} c{c}: slack {:.4}, pointwise {}",
                        rep.slack, rep.pointwise_violations
                    ));
                }
            }
        }
    }
    report(
        5,
        "reduction-inequality",
        pass,
        &if failing.is_empty() {
            format!("{cells} cells pass ({} trials each)", trials)
        } else {
            failing.join("; ")
        },
    );
}

fn ratio_cells(
    space: &MetricSpace,
    dist: &Distribution,
    schedule: &[(usize, usize)],
    excess: usize,
    tag: u64,
) -> Vec<(f64, f64, f64)> {
    use rayon::prelude::*;
    schedule
        .iter()
        .map(|&(n, trials)| {
            let values: Vec<(f64, f64)> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let ts = seed::mix(seed::mix(seed::trial_seed(MASTER_SEED, i), tag), n as u64);
                    let servers = generate_adversarial(
                        "uniform-control",
                        excess * n,
                        space,
                        seed::mix(ts, seed::tag::SERVERS),
                    )
                    .unwrap();
                    let requests =
                        sample(dist, space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
                    let mut policy = ReductionPolicy::new(
                        Box::new(SoarPolicy::new(dist.clone())),
                        dist.clone(),
                    );
                    let cost = run_online(
                        &mut policy,
                        space,
                        &servers,
                        &requests,
                        seed::mix(ts, seed::tag::POLICY),
                    )
                    .unwrap()
                    .total_cost;
                    let opt = opt_offline(space, &servers, &requests).unwrap().total_cost;
                    (cost / opt, (cost - opt) / n as f64)
                })
                .collect();
            let (ratio_mean, _) = mean_se(&values.iter().map(|v| v.0).collect::<Vec<_>>());
            let (regret_mean, _) = mean_se(&values.iter().map(|v| v.1).collect::<Vec<_>>());
            (n as f64, ratio_mean, regret_mean)
        })
        .collect()
}

/// Criterion 6: Balanced adversarial servers, reduce:soar: the mean competitive
/// ratio is flat in n (log-log slope within ±0.1 over n ∈ 64..1024) for
/// uniform requests in d ∈ {1,3} and a β = 2 smooth density in d = 3.
#[test]
fn criterion_06_balanced_constant_ratio() {
    // Trials shrink as the per-trial solver cost grows; never below 30.
    let schedule = [(64usize, 200usize), (128, 150), (256, 80), (512, 40), (1024, 30)];
    let start = Instant::now();
    let configs: [(&str, MetricSpace, Distribution); 3] = [
        ("uniform-d1", MetricSpace::euclidean(1).unwrap(), Distribution::uniform()),
        ("uniform-d3", MetricSpace::euclidean(3).unwrap(), Distribution::uniform()),
        (
            "ramp-d3",
            MetricSpace::euclidean(3).unwrap(),
            Distribution::bounded_density(2.0, |x: &[f64]| 2.0 * x[0]).unwrap(),
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (i, (label, space, dist)) in configs.iter().enumerate() {
        let cells = ratio_cells(space, dist, &schedule, 1, 60 + i as u64);
        let points: Vec<(f64, f64)> = cells.iter().map(|c| (c.0, c.1)).collect();
        let slope = fit_scaling(&points).unwrap().slope;
        let ok = (-0.1..=0.1).contains(&slope);
        pass &= ok;
        details.push(format!("{label} slope {slope:+.3}"));
    }
    details.push(format!("{:.0} s", start.elapsed().as_secs_f64()));
    report(6, "balanced-constant-ratio", pass, &details.join("; "));
}

/// Criterion 7: Unbalanced markets (c = 2), reduce:soar: per-request regret decays
/// with slope near −1/2 on the line and −1/3 in the cube.
#[test]
fn criterion_07_regret_exponents() {
    let schedule = [(32usize, 200usize), (64, 150), (128, 100), (256, 50), (512, 30)];
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for (d, band) in [(1usize, (-0.62, -0.38)), (3usize, (-0.48, -0.20))] {
        let space = MetricSpace::euclidean(d).unwrap();
        let dist = Distribution::uniform();
        let cells = ratio_cells(&space, &dist, &schedule, 2, 70 + d as u64);
        let points: Vec<(f64, f64)> = cells.iter().map(|c| (c.0, c.2)).collect();
        let slope = fit_scaling(&points).unwrap().slope;
        let ok = (band.0..=band.1).contains(&slope);
        pass &= ok;
        details.push(format!("d{d} regret slope {slope:+.3} (band [{}, {}])", band.0, band.1));
    }
    details.push(format!("{:.0} s", start.elapsed().as_secs_f64()));
    report(7, "regret-exponents", pass, &details.join("; "));
}

/// Criterion 8: Tie-break laws: empirical first-choice frequencies match the
/// uniform-over-subtree and product-of-branch-factors probabilities
/// within ±1% over 1e5 runs on 10 fixed random HSTs.
#[test]
fn criterion_08_tiebreak_laws() {
    let outcomes = check_tiebreak(10, 100_000, 0.01, MASTER_SEED);
    let pass = outcomes.iter().all(|o| o.pass);
    let details: Vec<String> =
        outcomes.iter().map(|o| format!("{}: {}", o.name, o.details)).collect();
    report(8, "tiebreak-laws", pass, &details.join("; "));
}

/// Criterion 9: Subset monotonicity: 500 exact-expectation cases per policy with
/// |R| ≤ 4 and |S| ≤ 7 all satisfy cost(S) ≤ cost(S') + 1e−9.
#[test]
fn criterion_09_subset_monotonicity() {
    let mut pass = true;
    let mut details = Vec::new();
    for kind in [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree] {
        let rep = monotonicity_suite(kind, 500, 7, 4, seed::mix(MASTER_SEED, 9));
        pass &= rep.pass() && rep.passes == 500;
        details.push(format!("{:?} {}/{}", kind, rep.passes, rep.cases));
        if !rep.failures.is_empty() {
            details.push(rep.failures[0].clone());
        }
    }
    report(9, "subset-monotonicity", pass, &details.join("; "));
}

/// Criterion 10: Excess servers never hurt the tree policies: on random HSTs with
/// n = 64 requests, the mean ratio at m = 2n stays within 3 SE of (or
/// below) the mean ratio at m = n.
#[test]
fn criterion_10_unbalanced_preservation() {
    let n = 64usize;
    let trials = 200usize;
    let mut pass = true;
    let mut details = Vec::new();
    for kind in [TreePolicyKind::Mnp, TreePolicyKind::RandomSubtree] {
        let mut balanced = Vec::new();
        let mut unbalanced = Vec::new();
        let mut rng = seed::rng(seed::mix(MASTER_SEED, 10));
        for trial in 0..trials {
            let hst = random_hst(4, &mut rng);
            let tree = hst.tree().clone();
            let leaves = tree.leaves();
            let space = MetricSpace::tree(tree);
            // Servers sit on a concentrated half of the leaves so requests
            // regularly have to travel; nested draws make the balanced set
            // a prefix of the doubled one.
            let server_leaves = &leaves[..leaves.len().div_ceil(2)];
            let full: Vec<Point> = (0..2 * n)
                .map(|_| Point::node(server_leaves[rng.gen_range(0..server_leaves.len())]))
                .collect();
            let requests: Vec<Point> = (0..n)
                .map(|_| Point::node(leaves[rng.gen_range(0..leaves.len())]))
                .collect();
            for (servers, bucket) in [(&full[..n], &mut balanced), (&full[..], &mut unbalanced)] {
                let run_seed = seed::mix(seed::trial_seed(MASTER_SEED, trial), servers.len() as u64);
                let cost = match kind {
                    TreePolicyKind::Mnp => {
                        let mut p = MnpPolicy::new();
                        run_online(&mut p, &space, servers, &requests, run_seed).unwrap().total_cost
                    }
                    TreePolicyKind::RandomSubtree => {
                        let mut p = RandomSubtreePolicy::new();
                        run_online(&mut p, &space, servers, &requests, run_seed).unwrap().total_cost
                    }
                };
                let opt = opt_offline(&space, servers, &requests).unwrap().total_cost;
                if opt > 0.0 {
                    bucket.push(cost / opt);
                }
            }
        }
        let (mb, sb) = mean_se(&balanced);
        let (mu, su) = mean_se(&unbalanced);
        let ok = mu <= mb + 3.0 * (sb * sb + su * su).sqrt();
        pass &= ok;
        details.push(format!("{kind:?}: m=n {mb:.3}±{sb:.3}, m=2n {mu:.3}±{su:.3}"));
    }
    report(10, "unbalanced-preservation", pass, &details.join("; "));
}

/// Criterion 11: Approximate triangle inequality: zero violations of `2^(p−1)`
/// over 1e6 sampled triples for p ∈ {1.5, 2, 3}, plus a certified
/// violation of the claim η = 1 for p = 2.
#[test]
fn criterion_11_approx_triangle() {
    let mut pass = true;
    let mut details = Vec::new();
    for p in [1.5f64, 2.0, 3.0] {
        let space = MetricSpace::euclidean_power(2, p).unwrap();
        let rep = verify_approx_triangle(&space, 1_000_000, seed::mix(MASTER_SEED, p as u64)).unwrap();
        pass &= rep.violations == 0;
        details.push(format!("p={p}: {} violations, worst {:.4}", rep.violations, rep.worst_ratio));
    }
    // Certified violation of the plain inequality for squared costs.
    let squared = MetricSpace::euclidean_power(1, 2.0).unwrap();
    let (x, y, z) = (Point::from(0.0), Point::from(0.5), Point::from(1.0));
    let lhs = squared.dist(&x, &z).unwrap();
    let rhs = squared.dist(&x, &y).unwrap() + squared.dist(&y, &z).unwrap();
    let rep = verify_approx_triangle(&squared, 100_000, MASTER_SEED).unwrap();
    let certified = lhs > rhs && rep.worst_ratio > 1.0;
    pass &= certified;
    details.push(format!("eta=1 violated for p=2: {lhs} > {rhs}, sampled worst {:.3}", rep.worst_ratio));
    report(11, "approx-triangle", pass, &details.join("; "));
}

/// Criterion 12: Any balanced adversarial placement retains at least half of the
/// doubly stochastic optimum: 20 random placements at n = 128, d = 2.
#[test]
fn criterion_12_balanced_lower_bound() {
    let n = 128usize;
    let space = MetricSpace::euclidean(2).unwrap();
    let dist = Distribution::uniform();
    let families = ["corner-cluster", "half-cube", "grid", "duplicate-point", "uniform-control"];
    let opt_n = estimate_opt(&space, &dist, n, 200, seed::mix(MASTER_SEED, 12), None).unwrap();
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    for i in 0..20 {
        let family = families[i % families.len()];
        let servers =
            generate_adversarial(family, n, &space, seed::mix(MASTER_SEED, 1200 + i as u64))
                .unwrap();
        let opt_sn = estimate_opt(
            &space,
            &dist,
            n,
            200,
            seed::mix(MASTER_SEED, 1300 + i as u64),
            Some(&servers),
        )
        .unwrap();
        let combined_se = (opt_sn.se.powi(2) + 0.25 * opt_n.se.powi(2)).sqrt();
        let margin = opt_sn.mean - (0.5 * opt_n.mean - 3.0 * combined_se);
        worst_margin = worst_margin.min(margin);
        pass &= margin >= 0.0;
    }
    report(
        12,
        "balanced-lower-bound",
        pass,
        &format!("20 placements, worst margin {worst_margin:.3} (OPT(n) {:.3})", opt_n.mean),
    );
}

/// Criterion 13: Determinism: the same config and master seed produce
/// byte-identical CSV output regardless of the worker count.
#[test]
fn criterion_13_determinism() {
    let cfg = ExperimentConfig::parse(
        "[space]\nkind = euclidean\nd = 2\n[distribution]\nkind = uniform\n\
         [policies]\nkeys = greedy-uniform, reduce:soar\n[experiment]\n\
         n_grid = 4, 8, 16\nc = 2.0\nadversarial = corner-cluster\n\
         trials = 12\nseed = 7\n",
    )
    .unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap());
    let multi = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap());
    let again = run_experiment(&cfg).unwrap();
    let pass = single.csv == multi.csv && multi.csv == again.csv;
    report(
        13,
        "determinism",
        pass,
        &format!("{} CSV bytes identical across 1, 4, and default workers", single.csv.len()),
    );
}
