//! Thin command-line front end over the library.
//!
//! Exit codes: 0 success, 1 config error, 2 check-suite failure,
//! 3 runtime abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use omm::harness::{
    self, fit_scaling, named_density, run_experiment, write_outputs, EmbedMode, ExperimentConfig,
};
use omm::optmatch::estimate_opt;
use omm::space::{Distribution, MetricSpace, TreeMetric};

#[derive(Parser)]
#[command(name = "omm", about = "Online metric matching simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EmbedArg {
    None,
    Hst,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckSuite {
    Triangle,
    Monotone,
    Tiebreak,
    Nn,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitField {
    Cost,
    Opt,
    Ratio,
    Regret,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a config file.
    Run {
        config: PathBuf,
        /// Override the config's embed mode for tree policies.
        #[arg(long, value_enum)]
        embed: Option<EmbedArg>,
    },
    /// Estimate the expected offline optimum over an n grid.
    Opt {
        /// Distribution: uniform | step | ramp (built-in bounded densities)
        /// | discrete-nodes (with --weights).
        #[arg(long, default_value = "uniform")]
        dist: String,
        /// Space kind: euclidean | euclidean-power | tree.
        #[arg(long, default_value = "euclidean")]
        kind: String,
        /// Dimension for the Euclidean kinds.
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Exponent for euclidean-power.
        #[arg(long)]
        p: Option<f64>,
        /// Tree file for tree spaces.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Per-node weights for tree spaces (discrete-nodes requests).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        #[arg(long = "n-grid", value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Append `n,mean,se,trials` rows to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named check suite.
    Check {
        #[arg(value_enum)]
        suite: CheckSuite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Triples per power for the triangle suite.
        #[arg(long, default_value_t = 1_000_000)]
        triples: u64,
        /// Cases for the monotonicity suite.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Instances and runs for the tie-break suite.
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
    },
    /// Fit a log-log slope to per-n means of a trial CSV.
    Fit {
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "ratio")]
        field: FitField,
        /// Restrict to one policy key (default: fit each separately).
        #[arg(long)]
        policy: Option<String>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, embed } => run_cmd(config, embed),
        Command::Opt { dist, kind, d, p, tree, weights, n_grid, trials, seed, out } => {
            opt_cmd(dist, kind, d, p, tree, weights, n_grid, trials, seed, out)
        }
        Command::Check { suite, seed, triples, cases, instances, runs } => {
            check_cmd(suite, seed, triples, cases, instances, runs)
        }
        Command::Fit { csv, field, policy } => fit_cmd(csv, field, policy),
    }
}

fn run_cmd(config: PathBuf, embed: Option<EmbedArg>) -> ExitCode {
    let mut cfg = match ExperimentConfig::from_file(&config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(mode) = embed {
        cfg.embed = match mode {
            EmbedArg::None => EmbedMode::None,
            EmbedArg::Hst => EmbedMode::Hst,
        };
    }
    let out = match run_experiment(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("runtime abort: {e}");
            return ExitCode::from(3);
        }
    };
    if let Err(e) = write_outputs(&cfg, &out) {
        eprintln!("runtime abort: {e}");
        return ExitCode::from(3);
    }
    for cell in &out.cells {
        println!(
            "{} n={} m={}: cost {:.4} ± {:.4}, ratio {:.4} ± {:.4}, regret {:.6} ± {:.6}",
            cell.policy,
            cell.n,
            cell.m,
            cell.mean_cost,
            cell.se_cost,
            cell.mean_ratio,
            cell.se_ratio,
            cell.mean_regret,
            cell.se_regret
        );
    }
    for fit in &out.fits {
        println!(
            "{} {}: slope {:.4} (95% CI [{:.4}, {:.4}]), r2 {:.4}",
            fit.policy, fit.field, fit.slope, fit.slope_ci.0, fit.slope_ci.1, fit.r2
        );
    }
    for err in &out.errors {
        eprintln!("cell error: {} n={}: {}", err.policy, err.n, err.message);
    }
    println!("wrote {} and {}", cfg.csv_path.display(), cfg.summary_path.display());
    ExitCode::SUCCESS
}

#[allow(clippy::too_many_arguments)]
fn opt_cmd(
    dist: String,
    kind: String,
    d: usize,
    p: Option<f64>,
    tree: Option<PathBuf>,
    weights: Option<Vec<u64>>,
    n_grid: Vec<usize>,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> ExitCode {
    let space = match kind.as_str() {
        "euclidean" => match MetricSpace::euclidean(d) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(1);
            }
        },
        "euclidean-power" => match MetricSpace::euclidean_power(d, p.unwrap_or(2.0)) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(1);
            }
        },
        "tree" => {
            let Some(path) = tree else {
                eprintln!("config error: tree spaces need --tree <file>");
                return ExitCode::from(1);
            };
            match std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|t| TreeMetric::from_text(&t).map_err(|e| e.to_string()))
            {
                Ok(t) => MetricSpace::tree(t),
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        other => {
            eprintln!("config error: unknown space kind {other:?}");
            return ExitCode::from(1);
        }
    };
    let dist = match dist.as_str() {
        "uniform" => Distribution::uniform(),
        "discrete-nodes" => {
            let Some(w) = weights else {
                eprintln!("config error: discrete-nodes needs --weights");
                return ExitCode::from(1);
            };
            match Distribution::discrete_nodes(w) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        name => match named_density(name) {
            Ok(f) => Distribution::bounded_density(2.0, f).expect("valid bound"),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
        },
    };

    let mut csv_lines = Vec::new();
    for &n in &n_grid {
        match estimate_opt(&space, &dist, n, trials, seed, None) {
            Ok(est) => {
                println!("{}", serde_json::to_string(&est).expect("serializable"));
                csv_lines.push(format!("{},{},{},{}", n, est.mean, est.se, est.trials));
            }
            Err(e) => {
                eprintln!("runtime abort: {e}");
                return ExitCode::from(3);
            }
        }
    }
    if let Some(path) = out {
        let fresh = !path.exists();
        let mut text = String::new();
        if fresh {
            text.push_str("n,mean,se,trials\n");
        }
        for line in &csv_lines {
            text.push_str(line);
            text.push('\n');
        }
        use std::io::Write;
        let result = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .and_then(|mut f| f.write_all(text.as_bytes()));
        if let Err(e) = result {
            eprintln!("runtime abort: {e}");
            return ExitCode::from(3);
        }
    }
    ExitCode::SUCCESS
}

fn check_cmd(
    suite: CheckSuite,
    seed: u64,
    triples: u64,
    cases: usize,
    instances: usize,
    runs: usize,
) -> ExitCode {
    let outcomes = match suite {
        CheckSuite::Triangle => harness::check_triangle(triples, seed),
        CheckSuite::Monotone => harness::check_monotone(cases, seed),
        CheckSuite::Tiebreak => harness::check_tiebreak(instances, runs, 0.01, seed),
        CheckSuite::Nn => harness::check_nn(seed),
    };
    let mut all_pass = true;
    for o in &outcomes {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.details);
        all_pass &= o.pass;
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn fit_cmd(csv: PathBuf, field: FitField, policy: Option<String>) -> ExitCode {
    let text = match std::fs::read_to_string(&csv) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", csv.display());
            return ExitCode::from(1);
        }
    };
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        eprintln!("config error: empty CSV");
        return ExitCode::from(1);
    };
    if header.trim() != harness::CSV_HEADER {
        eprintln!("config error: unexpected header {header:?}");
        return ExitCode::from(1);
    }
    let col = match field {
        FitField::Cost => 4,
        FitField::Opt => 5,
        FitField::Ratio => 6,
        FitField::Regret => 7,
    };
    let mut groups: std::collections::BTreeMap<(String, usize), Vec<f64>> = Default::default();
    for (i, line) in lines.enumerate() {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 8 {
            eprintln!("config error: line {}: expected 8 fields", i + 2);
            return ExitCode::from(1);
        }
        let key = parts[0].to_string();
        if let Some(p) = &policy {
            if *p != key {
                continue;
            }
        }
        let n: usize = match parts[1].parse() {
            Ok(v) => v,
            Err(_) => {
                eprintln!("config error: line {}: bad n", i + 2);
                return ExitCode::from(1);
            }
        };
        let value: f64 = parts[col].parse().unwrap_or(f64::NAN);
        groups.entry((key, n)).or_default().push(value);
    }
    if groups.is_empty() {
        eprintln!("config error: no matching rows");
        return ExitCode::from(1);
    }
    let policies: std::collections::BTreeSet<String> =
        groups.keys().map(|(p, _)| p.clone()).collect();
    let mut ok = true;
    for p in policies {
        let points: Vec<(f64, f64)> = groups
            .iter()
            .filter(|((key, _), _)| *key == p)
            .map(|((_, n), vals)| {
                let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
                let mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
                (*n as f64, mean)
            })
            .collect();
        let field_name = match field {
            FitField::Cost => "cost",
            FitField::Opt => "opt",
            FitField::Ratio => "ratio",
            FitField::Regret => "regret",
        };
        match fit_scaling(&points) {
            Ok(fit) => println!(
                "policy={} field={} slope={:.4} intercept={:.4} r2={:.4} points={}",
                p, field_name, fit.slope, fit.intercept, fit.r2, fit.points
            ),
            Err(e) => {
                eprintln!("fit error for {p}: {e}");
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
