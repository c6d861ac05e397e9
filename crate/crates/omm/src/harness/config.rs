//! Experiment configuration: a sectioned key-value text format.
//!
//! ```text
//! # Lines starting with # are comments.
//! [space]
//! kind = euclidean          # euclidean | euclidean-power | tree
//! d = 2                     # dimension (euclidean kinds)
//! # p = 2.0                 # exponent (euclidean-power)
//! # tree = trees/star.txt   # node file (tree kind)
//!
//! [distribution]
//! kind = uniform            # uniform | bounded-density | discrete-nodes | server-locations
//! # density = step          # built-in density name (bounded-density): step | ramp
//! # beta = 2.0              # declared density bound (bounded-density)
//! # weights = 2, 0, 2       # per-node weights (discrete-nodes)
//!
//! [policies]
//! keys = greedy-uniform, soar, reduce:soar
//!
//! [experiment]
//! n_grid = 64, 128, 256, 512
//! c = 1.0                   # servers per request, m = ceil(c·n), 1 ≤ c ≤ 4
//! adversarial = uniform-control
//! trials = 200
//! seed = 7
//! embed = none              # none | hst (route tree policies through a random embedding)
//! csv = runs.csv
//! summary = summary.json
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::space::{Distribution, MetricSpace, Point, TreeMetric};

use super::HarnessError;

/// Which metric space to build.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceSpec {
    Euclidean { d: usize },
    EuclideanPower { d: usize, p: f64 },
    Tree { path: PathBuf },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<MetricSpace, HarnessError> {
        match self {
            SpaceSpec::Euclidean { d } => Ok(MetricSpace::euclidean(*d)?),
            SpaceSpec::EuclideanPower { d, p } => Ok(MetricSpace::euclidean_power(*d, *p)?),
            SpaceSpec::Tree { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    HarnessError::Config(format!("cannot read tree file {}: {e}", path.display()))
                })?;
                Ok(MetricSpace::tree(TreeMetric::from_text(&text)?))
            }
        }
    }
}

/// Which request distribution to build. `ServerLocations` derives the
/// uniform-over-server-locations distribution from each trial's servers.
#[derive(Clone, Debug, PartialEq)]
pub enum DistSpec {
    Uniform,
    BoundedDensity { name: String, beta: f64 },
    DiscreteNodes { weights: Vec<u64> },
    ServerLocations,
}

impl DistSpec {
    /// Builds the distribution; `servers` is required for the
    /// server-locations kind.
    pub fn build(&self, servers: Option<&[Point]>) -> Result<Distribution, HarnessError> {
        match self {
            DistSpec::Uniform => Ok(Distribution::uniform()),
            DistSpec::BoundedDensity { name, beta } => {
                Ok(Distribution::bounded_density(*beta, named_density(name)?)?)
            }
            DistSpec::DiscreteNodes { weights } => {
                Ok(Distribution::discrete_nodes(weights.clone())?)
            }
            DistSpec::ServerLocations => {
                let servers = servers.ok_or_else(|| {
                    HarnessError::Config(
                        "server-locations distribution needs a server set".into(),
                    )
                })?;
                Ok(crate::space::make_server_uniform(servers)?)
            }
        }
    }
}

/// Built-in bounded densities on `[0,1]^d`, both with bound 2:
/// `step` puts density 2 on `x₁ ≤ 1/2`; `ramp` has density `2·x₁`.
pub fn named_density(name: &str) -> Result<fn(&[f64]) -> f64, HarnessError> {
    match name {
        "step" => Ok(|x: &[f64]| if x[0] <= 0.5 { 2.0 } else { 0.0 }),
        "ramp" => Ok(|x: &[f64]| 2.0 * x[0]),
        other => Err(HarnessError::Config(format!(
            "unknown density {other:?}; built-ins: step, ramp"
        ))),
    }
}

/// Whether tree policies get a random embedding on Euclidean instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedMode {
    None,
    Hst,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub space: SpaceSpec,
    pub dist: DistSpec,
    pub policies: Vec<String>,
    pub n_grid: Vec<usize>,
    /// Excess-server factor: `m = ceil(c·n)`, `1 ≤ c ≤ 4`.
    pub excess: f64,
    pub adversarial: String,
    pub trials: usize,
    pub seed: u64,
    pub embed: EmbedMode,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let sections = parse_sections(text)?;
        let get = |section: &str, key: &str| -> Option<&str> {
            sections.get(section).and_then(|s| s.get(key)).map(|v| v.as_str())
        };
        let require = |section: &str, key: &str| -> Result<&str, HarnessError> {
            get(section, key).ok_or_else(|| {
                HarnessError::Config(format!("missing key {key:?} in section [{section}]"))
            })
        };

        let space = match require("space", "kind")? {
            "euclidean" => SpaceSpec::Euclidean { d: parse_num(require("space", "d")?)? },
            "euclidean-power" => SpaceSpec::EuclideanPower {
                d: parse_num(require("space", "d")?)?,
                p: parse_num(require("space", "p")?)?,
            },
            "tree" => SpaceSpec::Tree { path: PathBuf::from(require("space", "tree")?) },
            other => {
                return Err(HarnessError::Config(format!("unknown space kind {other:?}")));
            }
        };

        let dist = match require("distribution", "kind")? {
            "uniform" => DistSpec::Uniform,
            "bounded-density" => {
                let name = require("distribution", "density")?.to_string();
                named_density(&name)?;
                DistSpec::BoundedDensity {
                    name,
                    beta: get("distribution", "beta").map(parse_num).transpose()?.unwrap_or(2.0),
                }
            }
            "discrete-nodes" => DistSpec::DiscreteNodes {
                weights: parse_list(require("distribution", "weights")?)?,
            },
            "server-locations" => DistSpec::ServerLocations,
            other => {
                return Err(HarnessError::Config(format!("unknown distribution kind {other:?}")));
            }
        };

        let policies: Vec<String> = require("policies", "keys")?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if policies.is_empty() {
            return Err(HarnessError::Config("no policy keys given".into()));
        }

        let n_grid: Vec<usize> = match get("experiment", "n_grid") {
            Some(raw) => parse_list(raw)?,
            None => vec![32, 64, 128, 256, 512, 1024],
        };
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config(
                "n_grid must be nonempty and strictly increasing".into(),
            ));
        }
        let excess: f64 =
            get("experiment", "c").map(parse_num).transpose()?.unwrap_or(1.0);
        if !(1.0..=4.0).contains(&excess) {
            return Err(HarnessError::Config(format!(
                "excess factor c must lie in [1, 4], got {excess}"
            )));
        }
        let trials: usize =
            get("experiment", "trials").map(parse_num).transpose()?.unwrap_or(200);
        if trials == 0 {
            return Err(HarnessError::Config("trials must be ≥ 1".into()));
        }
        let embed = match get("experiment", "embed").unwrap_or("none") {
            "none" => EmbedMode::None,
            "hst" => EmbedMode::Hst,
            other => {
                return Err(HarnessError::Config(format!("unknown embed mode {other:?}")));
            }
        };

        Ok(ExperimentConfig {
            space,
            dist,
            policies,
            n_grid,
            excess,
            adversarial: require("experiment", "adversarial")?.to_string(),
            trials,
            seed: get("experiment", "seed").map(parse_num).transpose()?.unwrap_or(7),
            embed,
            csv_path: PathBuf::from(get("experiment", "csv").unwrap_or("runs.csv")),
            summary_path: PathBuf::from(get("experiment", "summary").unwrap_or("summary.json")),
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Server count at a grid point.
    pub fn servers_for(&self, n: usize) -> usize {
        (self.excess * n as f64).ceil() as usize
    }
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>, HarnessError> {
    let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            out.entry(name.trim().to_string()).or_default();
            continue;
        }
        let section = current.clone().ok_or_else(|| {
            HarnessError::Config(format!("line {}: key outside any [section]", lineno + 1))
        })?;
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        out.get_mut(&section)
            .expect("section entry exists")
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, HarnessError> {
    s.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("cannot parse number {s:?}")))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, HarnessError> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(parse_num)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo configuration
[space]
kind = euclidean
d = 2

[distribution]
kind = uniform

[policies]
keys = greedy-uniform, reduce:soar

[experiment]
n_grid = 32, 64, 128
c = 2.0
adversarial = grid
trials = 50
seed = 11
csv = out/rows.csv
summary = out/summary.json
";

    #[test]
    fn parses_a_full_config() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.space, SpaceSpec::Euclidean { d: 2 });
        assert_eq!(cfg.dist, DistSpec::Uniform);
        assert_eq!(cfg.policies, vec!["greedy-uniform", "reduce:soar"]);
        assert_eq!(cfg.n_grid, vec![32, 64, 128]);
        assert_eq!(cfg.servers_for(10), 20);
        assert_eq!(cfg.trials, 50);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.embed, EmbedMode::None);
    }

    #[test]
    fn rejects_bad_grids_and_ranges() {
        let bad_grid = SAMPLE.replace("n_grid = 32, 64, 128", "n_grid = 64, 64");
        assert!(ExperimentConfig::parse(&bad_grid).is_err());
        let bad_c = SAMPLE.replace("c = 2.0", "c = 5.0");
        assert!(ExperimentConfig::parse(&bad_c).is_err());
        let no_kind = SAMPLE.replace("kind = euclidean\n", "");
        assert!(ExperimentConfig::parse(&no_kind).is_err());
    }

    #[test]
    fn bounded_density_round_trips() {
        let cfg_text = SAMPLE
            .replace("kind = uniform", "kind = bounded-density\ndensity = step\nbeta = 2.0");
        let cfg = ExperimentConfig::parse(&cfg_text).unwrap();
        match &cfg.dist {
            DistSpec::BoundedDensity { name, beta } => {
                assert_eq!(name, "step");
                assert_eq!(*beta, 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let dist = cfg.dist.build(None).unwrap();
        assert_eq!(dist.beta(), Some(2.0));
    }

    #[test]
    fn unknown_density_is_config_error() {
        assert!(named_density("bogus").is_err());
    }
}
