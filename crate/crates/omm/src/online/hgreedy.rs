//! Hierarchical greedy on dyadic grids.
//!
//! The unit cube is cut into a hierarchy of dyadic cells, level `l`
//! holding `2^(l·d)` cells. Serving a request ascends from its finest
//! cell to the smallest enclosing cell that still contains a free server,
//! then descends level by level, at each step entering the occupied
//! subcell whose center is nearest to the request's own cell center
//! (ties to the lowest cell index), and finally takes the lowest-index
//! free server in the reached finest cell. The policy is deterministic.

use super::{OnlineError, OnlinePolicy};
use crate::space::{MetricSpace, Point};

pub struct HierarchicalGreedyPolicy {
    configured_depth: Option<usize>,
    dim: usize,
    depth: usize,
    /// Free-server count per cell, per level (level 0 = whole cube).
    counts: Vec<Vec<u32>>,
    /// Free server indices per finest-level cell, ascending.
    occupants: Vec<Vec<usize>>,
}

impl HierarchicalGreedyPolicy {
    /// `depth = None` picks `ceil(log2(n) / d)` at init.
    pub fn new(depth: Option<usize>) -> Self {
        HierarchicalGreedyPolicy {
            configured_depth: depth,
            dim: 0,
            depth: 0,
            counts: Vec::new(),
            occupants: Vec::new(),
        }
    }

    fn cell_index(&self, coords: &[f64], level: usize) -> usize {
        let k = 1usize << level;
        let mut idx = 0;
        for &x in coords {
            let c = ((x * k as f64) as usize).min(k - 1);
            idx = idx * k + c;
        }
        idx
    }

    /// Per-axis digits of a cell index at `level`.
    fn cell_coords(&self, mut idx: usize, level: usize) -> Vec<usize> {
        let k = 1usize << level;
        let mut out = vec![0usize; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
        out
    }

    fn center_dist2(a: &[usize], b: &[usize], k: usize) -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let dx = (x as f64 + 0.5) / k as f64 - (y as f64 + 0.5) / k as f64;
                dx * dx
            })
            .sum()
    }
}

impl OnlinePolicy for HierarchicalGreedyPolicy {
    fn init(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        n_requests: usize,
        _seed: u64,
    ) -> Result<(), OnlineError> {
        let dim = space.dim().ok_or_else(|| {
            OnlineError::UnsupportedInstance("a Euclidean space for the dyadic grid".into())
        })?;
        if servers.len() < n_requests {
            return Err(OnlineError::NotEnoughServers {
                servers: servers.len(),
                requests: n_requests,
            });
        }
        self.dim = dim;
        self.depth = self.configured_depth.unwrap_or_else(|| {
            let n = n_requests.max(2) as f64;
            ((n.log2() / dim as f64).ceil() as usize).max(1)
        });
        self.counts = (0..=self.depth)
            .map(|l| vec![0u32; 1usize << (l * dim)])
            .collect();
        self.occupants = vec![Vec::new(); 1usize << (self.depth * dim)];
        for (j, s) in servers.iter().enumerate() {
            let coords = s.as_coords().ok_or_else(|| {
                OnlineError::UnsupportedInstance("coordinate server locations".into())
            })?;
            for l in 0..=self.depth {
                let idx = self.cell_index(coords, l);
                self.counts[l][idx] += 1;
            }
            let fin = self.cell_index(coords, self.depth);
            self.occupants[fin].push(j);
        }
        Ok(())
    }

    fn serve(
        &mut self,
        _space: &MetricSpace,
        _servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError> {
        if self.counts.is_empty() {
            return Err(OnlineError::NotInitialized);
        }
        let coords = request
            .as_coords()
            .ok_or_else(|| OnlineError::UnsupportedInstance("coordinate requests".into()))?;
        if self.counts[0][0] == 0 {
            return Err(OnlineError::NoFreeServer);
        }
        // Ascend to the smallest enclosing cell with a free server.
        let mut level = self.depth;
        while self.counts[level][self.cell_index(coords, level)] == 0 {
            level -= 1;
        }
        let mut cell = self.cell_index(coords, level);
        // Descend toward the occupied subcell nearest the request's own.
        for l in level + 1..=self.depth {
            let base = self.cell_coords(cell, l - 1);
            let k = 1usize << l;
            let target = self.cell_coords(self.cell_index(coords, l), l);
            let mut best: Option<(f64, usize)> = None;
            for child_bits in 0..1usize << self.dim {
                let mut child_axes = Vec::with_capacity(self.dim);
                let mut idx = 0usize;
                for (axis, &b) in base.iter().enumerate() {
                    let c = 2 * b + (child_bits >> (self.dim - 1 - axis) & 1);
                    child_axes.push(c);
                    idx = idx * k + c;
                }
                if self.counts[l][idx] == 0 {
                    continue;
                }
                let d2 = Self::center_dist2(&child_axes, &target, k);
                let better = match best {
                    None => true,
                    Some((bd, bi)) => d2 < bd - 1e-15 || ((d2 - bd).abs() <= 1e-15 && idx < bi),
                };
                if better {
                    best = Some((d2, idx));
                }
            }
            cell = best.expect("parent cell counted a free server").1;
        }
        let chosen = self.occupants[cell][0];
        self.occupants[cell].remove(0);
        // Decrement occupancy along the chosen server's chain.
        let mut idx = cell;
        for l in (0..=self.depth).rev() {
            self.counts[l][idx] -= 1;
            if l > 0 {
                let axes = self.cell_coords(idx, l);
                let k = 1usize << (l - 1);
                let mut parent = 0usize;
                for &a in &axes {
                    parent = parent * k + a / 2;
                }
                idx = parent;
            }
        }
        Ok(chosen)
    }
}
