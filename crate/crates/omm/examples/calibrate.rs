//! Development calibration sweep: measures the empirical quantities the
//! test suite pins down (scaling slopes, stretch factors, ratio bounds).
//!
//! ```bash
//! cargo run --release --example calibrate
//! ```

use std::time::Instant;

use omm::harness::{fit_scaling, generate_adversarial, random_hst};
use omm::hst::build_hst;
use omm::online::{run_online, SoarPolicy};
use omm::optmatch::{estimate_opt, opt_offline, tree_opt_predictor};
use omm::reduce::ReductionPolicy;
use omm::seed;
use omm::space::{make_server_uniform, sample, Distribution, MetricSpace, Point};
use rand::Rng;

fn main() {
    let t0 = Instant::now();
    opt_scaling();
    println!("[{:.1}s]", t0.elapsed().as_secs_f64());
    soar_cost_law(32);
    soar_cost_law(64);
    println!("[{:.1}s]", t0.elapsed().as_secs_f64());
    hst_stretch();
    tree_predictor_ratio();
    println!("[{:.1}s]", t0.elapsed().as_secs_f64());
    unbalanced_hst();
    println!("[{:.1}s]", t0.elapsed().as_secs_f64());
    reduce_soar_ratio_slopes();
    println!("[{:.1}s]", t0.elapsed().as_secs_f64());
    regret_slopes();
    println!("[{:.1}s] done", t0.elapsed().as_secs_f64());
}

fn opt_scaling() {
    println!("== OPT(n) exponents, uniform, trials=60 ==");
    for d in [1usize, 2, 3] {
        let space = MetricSpace::euclidean(d).unwrap();
        let grid = [64usize, 128, 256, 512, 1024, 2048];
        let mut points = Vec::new();
        let mut akt = Vec::new();
        for &n in &grid {
            let est = estimate_opt(&space, &Distribution::uniform(), n, 60, 7, None).unwrap();
            points.push((n as f64, est.mean));
            if d == 2 {
                akt.push(est.mean / (n as f64 * (n as f64).ln()).sqrt());
            }
        }
        let fit = fit_scaling(&points).unwrap();
        println!("  d={d}: slope {:.4} r2 {:.4} means {points:?}", fit.slope, fit.r2);
        if d == 2 {
            let lo = akt.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = akt.iter().cloned().fold(0.0f64, f64::max);
            println!("  d=2 AKT constants {akt:?} spread {:.3}", (hi - lo) / lo);
        }
    }
}

fn soar_cost_law(n: usize) {
    println!("== SOAR cost vs sum of OPT(t)/t, n={n}, uniform ==");
    for d in [1usize, 2, 3] {
        let space = MetricSpace::euclidean(d).unwrap();
        let dist = Distribution::uniform();
        // Sum side.
        let mut sum = 0.0;
        let mut var = 0.0;
        for t in 1..=n {
            let est = estimate_opt(&space, &dist, t, 120, seed::mix(7, t as u64), None).unwrap();
            sum += est.mean / t as f64;
            var += (est.se / t as f64).powi(2);
        }
        // Policy side.
        let trials = 120;
        let costs: Vec<f64> = (0..trials)
            .map(|i| {
                let ts = seed::trial_seed(7, i);
                let servers = sample(&dist, &space, n, seed::mix(ts, seed::tag::SERVERS)).unwrap();
                let requests =
                    sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
                let mut p = SoarPolicy::new(dist.clone());
                run_online(&mut p, &space, &servers, &requests, seed::mix(ts, seed::tag::POLICY))
                    .unwrap()
                    .total_cost
            })
            .collect();
        let mean = costs.iter().sum::<f64>() / trials as f64;
        let se = (costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>()
            / (trials as f64 - 1.0))
            .sqrt()
            / (trials as f64).sqrt();
        let combined = (se * se + var).sqrt();
        println!(
            "  d={d}: soar {mean:.4} ± {se:.4}, sum {sum:.4} ± {:.4}, |diff|/3se = {:.2}",
            var.sqrt(),
            (mean - sum).abs() / (3.0 * combined)
        );
    }
}

fn hst_stretch() {
    println!("== HST embedding stretch, 64 uniform points in d=2 ==");
    let space = MetricSpace::euclidean(2).unwrap();
    let pts = sample(&Distribution::uniform(), &space, 64, 11).unwrap();
    let mut means = Vec::new();
    let mut maxes: Vec<f64> = Vec::new();
    for s in 0..100 {
        let e = build_hst(&pts, &space, s).unwrap();
        means.push(e.stats.mean_expansion);
        maxes.push(e.stats.max_expansion);
    }
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let worst_mean = means.iter().cloned().fold(0.0f64, f64::max);
    println!(
        "  mean stretch {mean:.2}, worst per-seed mean {worst_mean:.2}, max single {:.2}, ln(64)={:.2}, mean/ln(n)={:.2}",
        maxes.iter().cloned().fold(0.0f64, f64::max),
        64f64.ln(),
        mean / 64f64.ln()
    );
}

fn tree_predictor_ratio() {
    println!("== tree predictor vs Monte Carlo, random trees ==");
    let mut rng = seed::rng(5);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for case in 0..12 {
        let hst = random_hst(rng.gen_range(2..=3), &mut rng);
        let tree = hst.tree().clone();
        let leaves = tree.leaves();
        // Random integer weights on leaves summing to n.
        let mut weights = vec![0u64; tree.len()];
        let n = 32u64;
        for _ in 0..n {
            weights[leaves[rng.gen_range(0..leaves.len())]] += 1;
        }
        let space = MetricSpace::tree(tree.clone());
        let dist = Distribution::discrete_nodes(weights.clone()).unwrap();
        for t in [4usize, 16, 32] {
            let pred = tree_opt_predictor(&tree, &weights, t).unwrap();
            if pred == 0.0 {
                continue;
            }
            let est = estimate_opt(&space, &dist, t, 150, seed::mix(9, case), None).unwrap();
            let ratio = est.mean / pred;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    println!("  estimate/predictor ratio range [{lo:.3}, {hi:.3}]");
}

fn unbalanced_hst() {
    println!("== MNP / random-subtree ratio at m=n vs m=2n, HSTs, n=64 ==");
    use omm::hst::{MnpPolicy, RandomSubtreePolicy};
    let mut rng = seed::rng(3);
    for label in ["mnp", "rst"] {
        let mut bal = Vec::new();
        let mut unbal = Vec::new();
        for trial in 0..200u64 {
            let hst = random_hst(3, &mut rng);
            let tree = hst.tree().clone();
            let leaves = tree.leaves();
            let space = MetricSpace::tree(tree.clone());
            let n = 64usize;
            let full: Vec<Point> = (0..2 * n)
                .map(|_| Point::node(leaves[rng.gen_range(0..leaves.len())]))
                .collect();
            let requests: Vec<Point> = (0..n)
                .map(|_| Point::node(leaves[rng.gen_range(0..leaves.len())]))
                .collect();
            for (servers, bucket) in
                [(&full[..n], &mut bal), (&full[..], &mut unbal)]
            {
                let cost = if label == "mnp" {
                    let mut p = MnpPolicy::new();
                    run_online(&mut p, &space, servers, &requests, seed::mix(trial, 1))
                        .unwrap()
                        .total_cost
                } else {
                    let mut p = RandomSubtreePolicy::new();
                    run_online(&mut p, &space, servers, &requests, seed::mix(trial, 2))
                        .unwrap()
                        .total_cost
                };
                let opt = opt_offline(&space, servers, &requests).unwrap().total_cost;
                if opt > 0.0 {
                    bucket.push(cost / opt);
                }
            }
        }
        let m = |v: &Vec<f64>| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let se = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (v.len() as f64 - 1.0))
                .sqrt()
                / (v.len() as f64).sqrt();
            (mean, se)
        };
        let (mb, sb) = m(&bal);
        let (mu, su) = m(&unbal);
        println!(
            "  {label}: balanced {mb:.3} ± {sb:.3}, m=2n {mu:.3} ± {su:.3}, diff/se {:.2}",
            (mu - mb) / (sb * sb + su * su).sqrt()
        );
    }
}

fn reduce_soar_ratio_slopes() {
    println!("== reduce:soar balanced ratio slopes (trials shrink with n) ==");
    let configs: [(&str, MetricSpace, Distribution); 3] = [
        ("uniform d=1", MetricSpace::euclidean(1).unwrap(), Distribution::uniform()),
        ("uniform d=3", MetricSpace::euclidean(3).unwrap(), Distribution::uniform()),
        (
            "ramp d=3",
            MetricSpace::euclidean(3).unwrap(),
            Distribution::bounded_density(2.0, |x: &[f64]| 2.0 * x[0]).unwrap(),
        ),
    ];
    for (label, space, dist) in configs {
        let mut points = Vec::new();
        for (n, trials) in [(64usize, 60), (128, 40), (256, 20), (512, 10), (1024, 6)] {
            let ratios: Vec<f64> = (0..trials)
                .map(|i| {
                    let ts = seed::mix(seed::trial_seed(11, i), n as u64);
                    let servers =
                        generate_adversarial("uniform-control", n, &space, seed::mix(ts, 1))
                            .unwrap();
                    let requests =
                        sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
                    let mut policy = ReductionPolicy::new(
                        Box::new(SoarPolicy::new(dist.clone())),
                        dist.clone(),
                    );
                    let cost = run_online(
                        &mut policy,
                        &space,
                        &servers,
                        &requests,
                        seed::mix(ts, seed::tag::POLICY),
                    )
                    .unwrap()
                    .total_cost;
                    let opt = opt_offline(&space, &servers, &requests).unwrap().total_cost;
                    cost / opt
                })
                .collect();
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            points.push((n as f64, mean));
        }
        let fit = fit_scaling(&points).unwrap();
        println!("  {label}: ratio slope {:.4}, means {points:?}", fit.slope);
    }
}

fn regret_slopes() {
    println!("== reduce:soar regret slopes, c=2 ==");
    for (label, d) in [("d=1", 1usize), ("d=3", 3)] {
        let space = MetricSpace::euclidean(d).unwrap();
        let dist = Distribution::uniform();
        let mut points = Vec::new();
        for (n, trials) in [(32usize, 80), (64, 60), (128, 40), (256, 20), (512, 8)] {
            if d == 1 && n > 256 {
                // line instances are cheap; keep the same grid anyway
            }
            let m = 2 * n;
            let regrets: Vec<f64> = (0..trials)
                .map(|i| {
                    let ts = seed::mix(seed::trial_seed(13, i), n as u64);
                    let servers =
                        generate_adversarial("uniform-control", m, &space, seed::mix(ts, 1))
                            .unwrap();
                    let requests =
                        sample(&dist, &space, n, seed::mix(ts, seed::tag::REQUESTS)).unwrap();
                    let mut policy = ReductionPolicy::new(
                        Box::new(SoarPolicy::new(dist.clone())),
                        dist.clone(),
                    );
                    let cost = run_online(
                        &mut policy,
                        &space,
                        &servers,
                        &requests,
                        seed::mix(ts, seed::tag::POLICY),
                    )
                    .unwrap()
                    .total_cost;
                    let opt = opt_offline(&space, &servers, &requests).unwrap().total_cost;
                    (cost - opt) / n as f64
                })
                .collect();
            let mean = regrets.iter().sum::<f64>() / regrets.len() as f64;
            points.push((n as f64, mean));
        }
        let fit = fit_scaling(&points).unwrap();
        println!("  {label}: regret slope {:.4}, means {points:?}", fit.slope);
    }
    // Same for the server-locations phantom distribution? Not needed here.
    let _ = make_server_uniform(&[Point::from(0.5)]);
}
