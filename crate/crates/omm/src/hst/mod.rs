//! Random HST embeddings and the tree greedy subroutines.
//!
//! [`build_hst`] embeds a finite point set into a random hierarchically
//! separated tree via random-permutation, random-radius hierarchical
//! decomposition. The embedding never contracts a pairwise distance and
//! the expected stretch grows logarithmically with the point count; the
//! crate measures stretch rather than assuming a constant.
//!
//! [`MnpPolicy`] and [`RandomSubtreePolicy`] are greedy subroutines on an
//! HST with servers at leaves; [`exact_expected_cost`] evaluates a
//! policy's expected total cost exactly by enumerating its randomness.

mod exact;
mod policies;

pub use exact::{exact_expected_cost, TreePolicyKind, ENUMERATION_BUDGET};
pub use policies::{MnpPolicy, RandomSubtreePolicy, SubtreeState};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::space::{Hst, MetricSpace, Point, SpaceError, TreeMetric};

#[derive(Debug, Error)]
pub enum HstError {
    #[error("need at least one point")]
    NoPoints,
    #[error("embedding contracted a pair: tree {tree} < original {original}")]
    Contraction { tree: f64, original: f64 },
    #[error("exact expectation budget of {0} states exceeded")]
    EnumerationBudget(usize),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Stretch statistics over all embedded pairs of distinct points.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpansionStats {
    pub pairs: usize,
    pub mean_expansion: f64,
    pub max_expansion: f64,
}

/// A point set embedded into a random HST.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub points: Vec<Point>,
    pub hst: Hst,
    /// Leaf node hosting each input point (duplicates share a leaf).
    pub leaf_of: Vec<usize>,
    pub stats: ExpansionStats,
}

impl Embedding {
    /// Tree distance between two input points.
    pub fn tree_dist(&self, a: usize, b: usize) -> f64 {
        self.hst.tree().node_dist(self.leaf_of[a], self.leaf_of[b])
    }
}

/// Randomly embeds `points` into an HST.
///
/// Distinct points are split top-down: level-`h` clusters are carved by
/// balls of radius `β·2^(h−1)·dmin` around centers in random permutation
/// order, with `β` drawn from `[1, 2)`. The edge from a level-`h` node to
/// its children has length `β·2^h·dmin`, which makes every tree distance
/// at least the original distance with a factor-two margin; the
/// constructor verifies non-contraction for every pair and returns an
/// error on any violation.
pub fn build_hst(points: &[Point], space: &MetricSpace, seed: u64) -> Result<Embedding, HstError> {
    if points.is_empty() {
        return Err(HstError::NoPoints);
    }
    for p in points {
        space.validate_point(p)?;
    }

    // Group exact duplicates; the decomposition runs on representatives.
    let mut reps: Vec<usize> = Vec::new();
    let mut group_of = vec![usize::MAX; points.len()];
    for (i, p) in points.iter().enumerate() {
        match reps.iter().position(|&r| points[r] == *p) {
            Some(g) => group_of[i] = g,
            None => {
                group_of[i] = reps.len();
                reps.push(i);
            }
        }
    }
    let k = reps.len();

    if k == 1 {
        // All points coincident: a single-leaf, zero-diameter tree.
        let tree = TreeMetric::new(&[None], &[0.0]).map_err(HstError::from)?;
        let hst = Hst::new(tree, vec![0], 0.0)?;
        return Ok(Embedding {
            points: points.to_vec(),
            hst,
            leaf_of: vec![0; points.len()],
            stats: ExpansionStats { pairs: 0, mean_expansion: 1.0, max_expansion: 1.0 },
        });
    }

    let mut d = vec![0.0; k * k];
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let dist = space.dist(&points[reps[a]], &points[reps[b]])?;
            d[a * k + b] = dist;
            d[b * k + a] = dist;
            dmin = dmin.min(dist);
            dmax = dmax.max(dist);
        }
    }
    debug_assert!(dmin > 0.0, "duplicates were grouped");

    let mut rng = crate::seed::rng(seed);
    let beta: f64 = 1.0 + rng.gen::<f64>();
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(&mut rng);

    // Levels: the root sits at the smallest h with β·2^h·dmin ≥ dmax.
    let mut top = 1u32;
    while beta * (top as f64).exp2() * dmin < dmax {
        top += 1;
    }

    // Node arrays built during the recursive split.
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut lens: Vec<f64> = vec![0.0];
    let mut levels: Vec<u32> = vec![top];
    let mut leaf_of_rep = vec![usize::MAX; k];
    // Edge length from a level-h parent to its children, shared exactly.
    let edge_len: Vec<f64> = (0..=top).map(|h| beta * (h as f64).exp2() * dmin).collect();

    // Iterative split: stack of (node id, level, members).
    let all: Vec<usize> = (0..k).collect();
    let mut stack: Vec<(usize, u32, Vec<usize>)> = vec![(0, top, all)];
    while let Some((node, level, members)) = stack.pop() {
        if members.len() == 1 && level == 0 {
            leaf_of_rep[members[0]] = node;
            continue;
        }
        debug_assert!(level > 0, "singletons must be reached by level 0");
        let radius = beta * ((level - 1) as f64).exp2() * dmin / 2.0;
        let mut unassigned = members;
        for &center in &perm {
            if unassigned.is_empty() {
                break;
            }
            let (mine, rest): (Vec<usize>, Vec<usize>) = unassigned
                .into_iter()
                .partition(|&v| d[v * k + center] <= radius);
            unassigned = rest;
            if mine.is_empty() {
                continue;
            }
            let child = parents.len();
            parents.push(Some(node));
            lens.push(edge_len[level as usize]);
            levels.push(level - 1);
            stack.push((child, level - 1, mine));
        }
        debug_assert!(unassigned.is_empty(), "every member lies in some center's ball");
    }

    let tree = TreeMetric::new(&parents, &lens)?;
    let hst = Hst::new(tree, levels, 0.0)?;

    // Non-contraction check and stretch statistics over distinct pairs.
    let mut sum = 0.0;
    let mut max: f64 = 1.0;
    let mut pairs = 0usize;
    for a in 0..k {
        for b in a + 1..k {
            let orig = d[a * k + b];
            let emb = hst.tree().node_dist(leaf_of_rep[a], leaf_of_rep[b]);
            if emb < orig {
                return Err(HstError::Contraction { tree: emb, original: orig });
            }
            let ratio = emb / orig;
            sum += ratio;
            max = max.max(ratio);
            pairs += 1;
        }
    }

    let leaf_of: Vec<usize> = group_of.iter().map(|&g| leaf_of_rep[g]).collect();
    Ok(Embedding {
        points: points.to_vec(),
        hst,
        leaf_of,
        stats: ExpansionStats {
            pairs,
            mean_expansion: if pairs > 0 { sum / pairs as f64 } else { 1.0 },
            max_expansion: max,
        },
    })
}
