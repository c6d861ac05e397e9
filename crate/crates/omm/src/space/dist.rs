//! Request distributions with seeded sampling access.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{MetricSpace, Point, SpaceError};

/// A density evaluator on `[0,1]^d`, used by rejection sampling.
pub type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A sampler over a metric space. Immutable after construction and safe
/// to share across workers; each worker owns its own seeded stream.
#[derive(Clone)]
pub enum Distribution {
    /// Uniform on `[0,1]^d` (Euclidean kinds only).
    Uniform,
    /// Density bounded by `beta`, sampled by rejection from uniform.
    BoundedDensity { beta: f64, density: DensityFn },
    /// Discrete over tree nodes: node `v` has probability `weights[v] / Σ`.
    DiscreteNodes { weights: Vec<u64> },
    /// Discrete over explicit locations with multiplicities.
    ServerLocations { locations: Vec<Point>, counts: Vec<u64> },
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform => write!(f, "Uniform"),
            Distribution::BoundedDensity { beta, .. } => {
                write!(f, "BoundedDensity {{ beta: {beta} }}")
            }
            Distribution::DiscreteNodes { weights } => {
                write!(f, "DiscreteNodes {{ weights: {weights:?} }}")
            }
            Distribution::ServerLocations { locations, counts } => write!(
                f,
                "ServerLocations {{ {} locations, counts: {counts:?} }}",
                locations.len()
            ),
        }
    }
}

impl Distribution {
    pub fn uniform() -> Self {
        Distribution::Uniform
    }

    pub fn bounded_density<F>(beta: f64, density: F) -> Result<Self, SpaceError>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(SpaceError::Distribution(format!(
                "density bound must be positive and finite, got {beta}"
            )));
        }
        Ok(Distribution::BoundedDensity { beta, density: Arc::new(density) })
    }

    pub fn discrete_nodes(weights: Vec<u64>) -> Result<Self, SpaceError> {
        if weights.iter().sum::<u64>() == 0 {
            return Err(SpaceError::Distribution("node weights sum to zero".into()));
        }
        Ok(Distribution::DiscreteNodes { weights })
    }

    /// Total weight of the discrete kinds, if applicable.
    pub fn total_weight(&self) -> Option<u64> {
        match self {
            Distribution::DiscreteNodes { weights } => Some(weights.iter().sum()),
            Distribution::ServerLocations { counts, .. } => Some(counts.iter().sum()),
            _ => None,
        }
    }

    /// Declared density bound for the smooth kinds (`1` for uniform).
    pub fn beta(&self) -> Option<f64> {
        match self {
            Distribution::Uniform => Some(1.0),
            Distribution::BoundedDensity { beta, .. } => Some(*beta),
            _ => None,
        }
    }

    /// Draws one point. `space` supplies the ambient dimension for the
    /// continuous kinds and validates node ids for the discrete ones.
    pub fn draw<R: Rng>(&self, space: &MetricSpace, rng: &mut R) -> Result<Point, SpaceError> {
        match self {
            Distribution::Uniform => {
                let dim = space.dim().ok_or_else(|| {
                    SpaceError::Distribution("uniform sampling needs a Euclidean space".into())
                })?;
                Ok(Point::Coords((0..dim).map(|_| rng.gen::<f64>()).collect()))
            }
            Distribution::BoundedDensity { beta, density } => {
                let dim = space.dim().ok_or_else(|| {
                    SpaceError::Distribution("bounded-density sampling needs a Euclidean space".into())
                })?;
                // Rejection from uniform: accept x with probability density(x)/beta.
                loop {
                    let x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
                    let f = density(&x);
                    if f > *beta * (1.0 + 1e-12) {
                        return Err(SpaceError::DensityAboveBound { value: f, beta: *beta });
                    }
                    if rng.gen::<f64>() * *beta < f {
                        return Ok(Point::Coords(x));
                    }
                }
            }
            Distribution::DiscreteNodes { weights } => {
                let tree = space.as_tree().ok_or_else(|| {
                    SpaceError::Distribution("discrete-nodes sampling needs a tree space".into())
                })?;
                if weights.len() != tree.len() {
                    return Err(SpaceError::Distribution(format!(
                        "{} node weights for a tree with {} nodes",
                        weights.len(),
                        tree.len()
                    )));
                }
                let total: u64 = weights.iter().sum();
                let mut u = rng.gen_range(0..total);
                for (v, &w) in weights.iter().enumerate() {
                    if u < w {
                        return Ok(Point::Node(v));
                    }
                    u -= w;
                }
                unreachable!("weights sum to total")
            }
            Distribution::ServerLocations { locations, counts } => {
                let total: u64 = counts.iter().sum();
                let mut u = rng.gen_range(0..total);
                for (i, &c) in counts.iter().enumerate() {
                    if u < c {
                        return Ok(locations[i].clone());
                    }
                    u -= c;
                }
                unreachable!("counts sum to total")
            }
        }
    }
}

/// Draws `k` i.i.d. points; deterministic given the seed.
pub fn sample(
    dist: &Distribution,
    space: &MetricSpace,
    k: usize,
    seed: u64,
) -> Result<Vec<Point>, SpaceError> {
    let mut rng = crate::seed::rng(seed);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(dist.draw(space, &mut rng)?);
    }
    Ok(out)
}

/// The uniform distribution over a server multiset: each location gets
/// mass `multiplicity / |S|`. Duplicate locations are grouped exactly.
pub fn make_server_uniform(servers: &[Point]) -> Result<Distribution, SpaceError> {
    if servers.is_empty() {
        return Err(SpaceError::Distribution("empty server set".into()));
    }
    let mut locations: Vec<Point> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for s in servers {
        match locations.iter().position(|l| l == s) {
            Some(i) => counts[i] += 1,
            None => {
                locations.push(s.clone());
                counts.push(1);
            }
        }
    }
    Ok(Distribution::ServerLocations { locations, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_reproducible_and_in_range() {
        let space = MetricSpace::euclidean(1).unwrap();
        let a = sample(&Distribution::uniform(), &space, 3, 99).unwrap();
        let b = sample(&Distribution::uniform(), &space, 3, 99).unwrap();
        assert_eq!(a, b);
        for p in &a {
            let x = p.as_coords().unwrap()[0];
            assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn discrete_frequencies_match_weights() {
        // Weights (2, 0, 2) on a 3-node tree: frequencies (0.5, 0, 0.5) ± 1%.
        let tree = super::super::TreeMetric::from_text("0 -1 0\n1 0 1\n2 0 1\n").unwrap();
        let space = MetricSpace::tree(tree);
        let dist = Distribution::discrete_nodes(vec![2, 0, 2]).unwrap();
        let draws = sample(&dist, &space, 100_000, 7).unwrap();
        let mut freq = [0usize; 3];
        for p in &draws {
            freq[p.as_node().unwrap()] += 1;
        }
        assert!((freq[0] as f64 / 1e5 - 0.5).abs() < 0.01);
        assert_eq!(freq[1], 0);
        assert!((freq[2] as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejection_sampling_matches_mass() {
        // density 2·1[x ≤ 0.5]: mass of [0, 0.5] should be ~1.
        let space = MetricSpace::euclidean(1).unwrap();
        let dist = Distribution::bounded_density(2.0, |x| if x[0] <= 0.5 { 2.0 } else { 0.0 }).unwrap();
        let draws = sample(&dist, &space, 100_000, 5).unwrap();
        let mass = draws
            .iter()
            .filter(|p| p.as_coords().unwrap()[0] <= 0.5)
            .count() as f64
            / 1e5;
        assert!((mass - 1.0).abs() < 1e-9, "mass {mass}");
    }

    #[test]
    fn density_above_bound_is_contract_violation() {
        let space = MetricSpace::euclidean(1).unwrap();
        let dist = Distribution::bounded_density(1.5, |_| 2.0).unwrap();
        let err = sample(&dist, &space, 10, 5);
        assert!(matches!(err, Err(SpaceError::DensityAboveBound { .. })));
    }

    #[test]
    fn server_uniform_counts_multiplicity() {
        let a = Point::coords(&[0.1]);
        let b = Point::coords(&[0.9]);
        let dist = make_server_uniform(&[a.clone(), a.clone(), b.clone()]).unwrap();
        match &dist {
            Distribution::ServerLocations { locations, counts } => {
                assert_eq!(locations.len(), 2);
                assert_eq!(counts.iter().sum::<u64>(), 3);
                let ia = locations.iter().position(|p| *p == a).unwrap();
                assert_eq!(counts[ia], 2);
            }
            _ => panic!("wrong kind"),
        }
        // Singleton: point mass.
        let single = make_server_uniform(std::slice::from_ref(&b)).unwrap();
        let space = MetricSpace::euclidean(1).unwrap();
        for p in sample(&single, &space, 20, 3).unwrap() {
            assert_eq!(p, b);
        }
    }

    #[test]
    fn server_uniform_frequencies() {
        // 5 distinct points, each mass 1/5 within ±1% over 1e5 draws.
        let pts: Vec<Point> = (0..5).map(|i| Point::coords(&[i as f64 / 10.0])).collect();
        let dist = make_server_uniform(&pts).unwrap();
        let space = MetricSpace::euclidean(1).unwrap();
        let draws = sample(&dist, &space, 100_000, 13).unwrap();
        for p in &pts {
            let freq = draws.iter().filter(|q| *q == p).count() as f64 / 1e5;
            assert!((freq - 0.2).abs() < 0.01, "freq {freq}");
        }
    }

    #[test]
    fn empty_server_set_rejected() {
        assert!(make_server_uniform(&[]).is_err());
    }
}
