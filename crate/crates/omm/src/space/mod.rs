//! Metric spaces and request distributions.
//!
//! A [`MetricSpace`] is `[0,1]^d` with the Euclidean distance, `[0,1]^d`
//! with a p-power cost `‖x−y‖₂^p`, or a rooted tree metric. Each space
//! declares an approximate-triangle parameter `eta`: the cost function
//! satisfies `δ(x,z) ≤ eta·(δ(x,y) + δ(y,z))` for all triples. Euclidean
//! and tree kinds are true metrics (`eta = 1`); p-power costs satisfy the
//! inequality with `eta = 2^(p−1)`.

mod dist;
mod tree;

pub use dist::{make_server_uniform, sample, Distribution};
pub use tree::{Hst, TreeMetric};

use rand::Rng;
use thiserror::Error;

/// Absolute tolerance for distance-equality comparisons. Continuous
/// metrics have measure-zero ties; tree and HST metrics produce exact
/// ties that must be detected reliably.
pub const DIST_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("dimension mismatch: space has d={expected}, point has d={got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point kind does not match space kind")]
    KindMismatch,
    #[error("unknown node id {0}")]
    UnknownNode(usize),
    #[error("coordinate {value} outside [0,1]")]
    CoordinateOutOfRange { value: f64 },
    #[error("invalid space parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("distribution error: {0}")]
    Distribution(String),
    #[error("density evaluator returned {value} > declared bound {beta}")]
    DensityAboveBound { value: f64, beta: f64 },
}

/// A location in the ambient space: coordinates in `[0,1]^d` for the
/// Euclidean kinds, or a node id for tree metrics.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Coords(Vec<f64>),
    Node(usize),
}

impl Point {
    pub fn coords(xs: &[f64]) -> Self {
        Point::Coords(xs.to_vec())
    }

    pub fn node(id: usize) -> Self {
        Point::Node(id)
    }

    pub fn as_coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Node(_) => None,
        }
    }

    pub fn as_node(&self) -> Option<usize> {
        match self {
            Point::Node(id) => Some(*id),
            Point::Coords(_) => None,
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Coords(vec![x])
    }
}

/// A metric space with a declared approximate-triangle parameter.
#[derive(Clone, Debug)]
pub enum MetricSpace {
    /// `[0,1]^d` with the Euclidean distance.
    Euclidean { dim: usize },
    /// `[0,1]^d` with cost `‖x−y‖₂^p`, `p ≥ 1`.
    EuclideanPower { dim: usize, exponent: f64 },
    /// Shortest-path distances in a rooted tree with positive edge lengths.
    Tree(TreeMetric),
}

impl MetricSpace {
    pub fn euclidean(dim: usize) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::InvalidParameter("dimension must be ≥ 1".into()));
        }
        Ok(MetricSpace::Euclidean { dim })
    }

    pub fn euclidean_power(dim: usize, exponent: f64) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::InvalidParameter("dimension must be ≥ 1".into()));
        }
        let exponent_ok = exponent.is_finite() && exponent >= 1.0;
        if !exponent_ok {
            return Err(SpaceError::InvalidParameter(format!(
                "exponent must be ≥ 1, got {exponent}"
            )));
        }
        Ok(MetricSpace::EuclideanPower { dim, exponent })
    }

    pub fn tree(tree: TreeMetric) -> Self {
        MetricSpace::Tree(tree)
    }

    /// Ambient dimension for the Euclidean kinds.
    pub fn dim(&self) -> Option<usize> {
        match self {
            MetricSpace::Euclidean { dim } | MetricSpace::EuclideanPower { dim, .. } => Some(*dim),
            MetricSpace::Tree(_) => None,
        }
    }

    pub fn as_tree(&self) -> Option<&TreeMetric> {
        match self {
            MetricSpace::Tree(t) => Some(t),
            _ => None,
        }
    }

    /// Declared approximate-triangle parameter: `1` for true metrics,
    /// `2^(p−1)` for the p-power cost.
    pub fn eta(&self) -> f64 {
        match self {
            MetricSpace::Euclidean { .. } | MetricSpace::Tree(_) => 1.0,
            MetricSpace::EuclideanPower { exponent, .. } => (exponent - 1.0).exp2(),
        }
    }

    /// Checks that a point belongs to this space.
    pub fn validate_point(&self, p: &Point) -> Result<(), SpaceError> {
        match (self, p) {
            (MetricSpace::Euclidean { dim } | MetricSpace::EuclideanPower { dim, .. }, Point::Coords(c)) => {
                if c.len() != *dim {
                    return Err(SpaceError::DimensionMismatch { expected: *dim, got: c.len() });
                }
                for &x in c {
                    if !(0.0..=1.0).contains(&x) {
                        return Err(SpaceError::CoordinateOutOfRange { value: x });
                    }
                }
                Ok(())
            }
            (MetricSpace::Tree(t), Point::Node(id)) => {
                if *id >= t.len() {
                    return Err(SpaceError::UnknownNode(*id));
                }
                Ok(())
            }
            _ => Err(SpaceError::KindMismatch),
        }
    }

    /// Cost of matching `x` to `y`. Symmetric, nonnegative, and zero
    /// exactly when the representations coincide.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64, SpaceError> {
        match self {
            MetricSpace::Euclidean { dim } => {
                let (a, b) = coord_pair(*dim, x, y)?;
                Ok(l2(a, b))
            }
            MetricSpace::EuclideanPower { dim, exponent } => {
                let (a, b) = coord_pair(*dim, x, y)?;
                Ok(l2(a, b).powf(*exponent))
            }
            MetricSpace::Tree(t) => {
                let (u, v) = match (x, y) {
                    (Point::Node(u), Point::Node(v)) => (*u, *v),
                    _ => return Err(SpaceError::KindMismatch),
                };
                if u >= t.len() {
                    return Err(SpaceError::UnknownNode(u));
                }
                if v >= t.len() {
                    return Err(SpaceError::UnknownNode(v));
                }
                Ok(t.node_dist(u, v))
            }
        }
    }

    /// Draws a point of this space uniformly (coordinates for Euclidean
    /// kinds, a uniform node for trees). Used by the triangle checker.
    pub(crate) fn uniform_point<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            MetricSpace::Euclidean { dim } | MetricSpace::EuclideanPower { dim, .. } => {
                Point::Coords((0..*dim).map(|_| rng.gen::<f64>()).collect())
            }
            MetricSpace::Tree(t) => Point::Node(rng.gen_range(0..t.len())),
        }
    }
}

fn coord_pair<'a>(dim: usize, x: &'a Point, y: &'a Point) -> Result<(&'a [f64], &'a [f64]), SpaceError> {
    let a = x.as_coords().ok_or(SpaceError::KindMismatch)?;
    let b = y.as_coords().ok_or(SpaceError::KindMismatch)?;
    if a.len() != dim {
        return Err(SpaceError::DimensionMismatch { expected: dim, got: a.len() });
    }
    if b.len() != dim {
        return Err(SpaceError::DimensionMismatch { expected: dim, got: b.len() });
    }
    Ok((a, b))
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Outcome of sampling triples against the declared `eta`.
#[derive(Clone, Debug)]
pub struct TriangleReport {
    /// Triples checked (excluding skipped ones).
    pub checked: u64,
    /// Triples where `δ(x,z) > eta·(δ(x,y) + δ(y,z))`.
    pub violations: u64,
    /// Largest observed `δ(x,z) / (δ(x,y) + δ(y,z))`.
    pub worst_ratio: f64,
    /// A triple attaining the worst ratio.
    pub worst_triple: Option<(Point, Point, Point)>,
    /// Triples skipped because the denominator was zero.
    pub skipped: u64,
}

/// Samples random triples `(x, y, z)` and checks the approximate triangle
/// inequality against the space's declared `eta`. The report also carries
/// the worst observed ratio so callers can test any other claimed bound.
pub fn verify_approx_triangle(
    space: &MetricSpace,
    triples: u64,
    seed: u64,
) -> Result<TriangleReport, SpaceError> {
    if triples == 0 {
        return Err(SpaceError::InvalidParameter("triple count must be ≥ 1".into()));
    }
    let eta = space.eta();
    let mut rng = crate::seed::rng(seed);
    let mut report = TriangleReport {
        checked: 0,
        violations: 0,
        worst_ratio: 0.0,
        worst_triple: None,
        skipped: 0,
    };
    for _ in 0..triples {
        let x = space.uniform_point(&mut rng);
        let y = space.uniform_point(&mut rng);
        let z = space.uniform_point(&mut rng);
        let dxz = space.dist(&x, &z)?;
        let denom = space.dist(&x, &y)? + space.dist(&y, &z)?;
        if denom == 0.0 {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let ratio = dxz / denom;
        if ratio > report.worst_ratio {
            report.worst_ratio = ratio;
            report.worst_triple = Some((x.clone(), y.clone(), z.clone()));
        }
        if dxz > eta * denom {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagorean_distance() {
        let space = MetricSpace::euclidean(2).unwrap();
        let d = space
            .dist(&Point::coords(&[0.0, 0.0]), &Point::coords(&[0.3, 0.4]))
            .unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn power_distance_squares() {
        let space = MetricSpace::euclidean_power(1, 2.0).unwrap();
        let d = space.dist(&0.0.into(), &0.5.into()).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert!((space.eta() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn path_tree_distance() {
        // a--b--c with edge lengths 1 and 2.
        let tree = TreeMetric::from_text("0 -1 0\n1 0 1\n2 1 2\n").unwrap();
        let space = MetricSpace::tree(tree);
        let d = space.dist(&Point::node(0), &Point::node(2)).unwrap();
        assert!((d - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let space = MetricSpace::euclidean(2).unwrap();
        let err = space.dist(&Point::coords(&[0.0]), &Point::coords(&[0.1, 0.2]));
        assert!(matches!(err, Err(SpaceError::DimensionMismatch { .. })));
    }

    #[test]
    fn unknown_node_rejected() {
        let tree = TreeMetric::from_text("0 -1 0\n1 0 1\n").unwrap();
        let space = MetricSpace::tree(tree);
        assert!(matches!(
            space.dist(&Point::node(0), &Point::node(9)),
            Err(SpaceError::UnknownNode(9))
        ));
    }

    #[test]
    fn euclidean_triangle_never_violated() {
        let space = MetricSpace::euclidean(1).unwrap();
        let report = verify_approx_triangle(&space, 20_000, 7).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.worst_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn power_two_violates_plain_triangle() {
        // x=0, y=0.5, z=1 under squared cost: 1 > 0.25 + 0.25.
        let space = MetricSpace::euclidean_power(1, 2.0).unwrap();
        let (x, y, z) = (Point::from(0.0), Point::from(0.5), Point::from(1.0));
        let dxz = space.dist(&x, &z).unwrap();
        let denom = space.dist(&x, &y).unwrap() + space.dist(&y, &z).unwrap();
        assert!(dxz > denom);
        // Random triples certify it too: worst ratio exceeds 1.
        let report = verify_approx_triangle(&space, 10_000, 7).unwrap();
        assert!(report.worst_ratio > 1.0);
        // But the declared eta = 2 bound holds.
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn symmetry_and_coincidence_sampled() {
        let spaces = [
            MetricSpace::euclidean(3).unwrap(),
            MetricSpace::euclidean_power(2, 1.5).unwrap(),
        ];
        for space in &spaces {
            let mut rng = crate::seed::rng(11);
            for _ in 0..200 {
                let x = space.uniform_point(&mut rng);
                let y = space.uniform_point(&mut rng);
                let dxy = space.dist(&x, &y).unwrap();
                let dyx = space.dist(&y, &x).unwrap();
                assert_eq!(dxy, dyx);
                assert!(dxy >= 0.0);
                assert_eq!(space.dist(&x, &x).unwrap(), 0.0);
            }
        }
    }
}
