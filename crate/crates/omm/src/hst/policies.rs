//! Greedy subroutines on an HST with servers at leaves.
//!
//! Serving a request at leaf `r` starts from `A(r|S)`: the lowest
//! ancestor of `r` (including `r` itself) whose subtree holds a free
//! server. On an HST every free server under `A(r|S)` is a closest free
//! server, so both subroutines are greedy; they differ in the tie-break:
//!
//! - MNP: uniform over all free servers under `A(r|S)` — probability
//!   `1/|available|` each.
//! - Random-Subtree: walk down from `A(r|S)`, at each node entering a
//!   uniformly random child subtree among those holding a free server,
//!   then uniform at the final leaf — a specific server is chosen with
//!   probability `Π_i 1/w_i` over the branching factors on its path.
//!
//! Both rules are local and non-increasing, which preserves their
//! competitive guarantees when excess servers are added.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::HstError;
use crate::online::{OnlineError, OnlinePolicy};
use crate::space::{MetricSpace, Point, TreeMetric, DIST_TOL};

/// Free-server bookkeeping per subtree: each node counts the free
/// servers beneath it; leaves also track which server indices sit there.
#[derive(Clone, Debug)]
pub struct SubtreeState {
    count: Vec<u32>,
    at_leaf: Vec<Vec<usize>>,
    leaf_of_server: Vec<usize>,
}

impl SubtreeState {
    pub fn new(tree: &TreeMetric, server_leaves: &[usize]) -> Result<Self, HstError> {
        let mut count = vec![0u32; tree.len()];
        let mut at_leaf = vec![Vec::new(); tree.len()];
        for (j, &leaf) in server_leaves.iter().enumerate() {
            if leaf >= tree.len() || !tree.is_leaf(leaf) {
                return Err(HstError::Invalid(format!("server {j} is not on a leaf")));
            }
            at_leaf[leaf].push(j);
            let mut v = leaf;
            loop {
                count[v] += 1;
                match tree.parent(v) {
                    Some(p) => v = p,
                    None => break,
                }
            }
        }
        Ok(SubtreeState { count, at_leaf, leaf_of_server: server_leaves.to_vec() })
    }

    /// Free servers in the subtree rooted at `v`.
    pub fn count(&self, v: usize) -> u32 {
        self.count[v]
    }

    pub fn servers_at(&self, leaf: usize) -> &[usize] {
        &self.at_leaf[leaf]
    }

    /// `A(r|S)`: lowest ancestor of `leaf` (itself included) whose subtree
    /// holds a free server; `None` when no server is free anywhere.
    pub fn lowest_occupied_ancestor(&self, tree: &TreeMetric, leaf: usize) -> Option<usize> {
        let mut v = leaf;
        loop {
            if self.count[v] > 0 {
                return Some(v);
            }
            v = tree.parent(v)?;
        }
    }

    /// The `k`-th free server under `v` in leaf order.
    pub fn kth_in_subtree(&self, tree: &TreeMetric, v: usize, mut k: u32) -> usize {
        debug_assert!(k < self.count[v]);
        let mut node = v;
        while !tree.is_leaf(node) {
            for &c in tree.children(node) {
                if k < self.count[c] {
                    node = c;
                    break;
                }
                k -= self.count[c];
            }
        }
        self.at_leaf[node][k as usize]
    }

    /// Marks a server used, updating counts up to the root.
    pub fn consume(&mut self, tree: &TreeMetric, server: usize) {
        let leaf = self.leaf_of_server[server];
        let pos = self.at_leaf[leaf]
            .iter()
            .position(|&s| s == server)
            .expect("server still free");
        self.at_leaf[leaf].remove(pos);
        let mut v = leaf;
        loop {
            self.count[v] -= 1;
            match tree.parent(v) {
                Some(p) => v = p,
                None => break,
            }
        }
    }
}

fn tree_instance<'a>(
    space: &'a MetricSpace,
    servers: &[Point],
) -> Result<(&'a TreeMetric, Vec<usize>), OnlineError> {
    let tree = space.as_tree().ok_or_else(|| {
        OnlineError::UnsupportedInstance("a tree metric space".into())
    })?;
    if tree.max_leaf_distance_spread() > DIST_TOL {
        return Err(OnlineError::UnsupportedInstance(
            "an HST: equal root-to-leaf distances per subtree".into(),
        ));
    }
    let leaves = servers
        .iter()
        .map(|s| match s.as_node() {
            Some(id) if id < tree.len() && tree.is_leaf(id) => Ok(id),
            _ => Err(OnlineError::UnsupportedInstance("servers on tree leaves".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((tree, leaves))
}

fn request_leaf(tree: &TreeMetric, request: &Point) -> Result<usize, OnlineError> {
    match request.as_node() {
        Some(id) if id < tree.len() && tree.is_leaf(id) => Ok(id),
        _ => Err(OnlineError::UnsupportedInstance("requests on tree leaves".into())),
    }
}

/// Uniform over all free servers under `A(r|S)`.
pub struct MnpPolicy {
    state: Option<SubtreeState>,
    rng: Option<ChaCha8Rng>,
}

impl MnpPolicy {
    pub fn new() -> Self {
        MnpPolicy { state: None, rng: None }
    }
}

impl Default for MnpPolicy {
    fn default() -> Self {
        Self::new()
    }
}

impl OnlinePolicy for MnpPolicy {
    fn init(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        n_requests: usize,
        seed: u64,
    ) -> Result<(), OnlineError> {
        if servers.len() < n_requests {
            return Err(OnlineError::NotEnoughServers {
                servers: servers.len(),
                requests: n_requests,
            });
        }
        let (tree, leaves) = tree_instance(space, servers)?;
        self.state = Some(SubtreeState::new(tree, &leaves).map_err(|e| {
            OnlineError::UnsupportedInstance(e.to_string())
        })?);
        self.rng = Some(crate::seed::rng(seed));
        Ok(())
    }

    fn serve(
        &mut self,
        space: &MetricSpace,
        _servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError> {
        let tree = space.as_tree().ok_or(OnlineError::NotInitialized)?;
        let state = self.state.as_mut().ok_or(OnlineError::NotInitialized)?;
        let rng = self.rng.as_mut().ok_or(OnlineError::NotInitialized)?;
        let leaf = request_leaf(tree, request)?;
        let anchor = state
            .lowest_occupied_ancestor(tree, leaf)
            .ok_or(OnlineError::NoFreeServer)?;
        let k = rng.gen_range(0..state.count(anchor));
        let server = state.kth_in_subtree(tree, anchor, k);
        state.consume(tree, server);
        Ok(server)
    }
}

/// Uniform random descent: from `A(r|S)` repeatedly enter a random
/// occupied child subtree, then pick uniformly at the reached leaf.
pub struct RandomSubtreePolicy {
    state: Option<SubtreeState>,
    rng: Option<ChaCha8Rng>,
}

impl RandomSubtreePolicy {
    pub fn new() -> Self {
        RandomSubtreePolicy { state: None, rng: None }
    }
}

impl Default for RandomSubtreePolicy {
    fn default() -> Self {
        Self::new()
    }
}

impl OnlinePolicy for RandomSubtreePolicy {
    fn init(
        &mut self,
        space: &MetricSpace,
        servers: &[Point],
        n_requests: usize,
        seed: u64,
    ) -> Result<(), OnlineError> {
        if servers.len() < n_requests {
            return Err(OnlineError::NotEnoughServers {
                servers: servers.len(),
                requests: n_requests,
            });
        }
        let (tree, leaves) = tree_instance(space, servers)?;
        self.state = Some(SubtreeState::new(tree, &leaves).map_err(|e| {
            OnlineError::UnsupportedInstance(e.to_string())
        })?);
        self.rng = Some(crate::seed::rng(seed));
        Ok(())
    }

    fn serve(
        &mut self,
        space: &MetricSpace,
        _servers: &[Point],
        request: &Point,
    ) -> Result<usize, OnlineError> {
        let tree = space.as_tree().ok_or(OnlineError::NotInitialized)?;
        let state = self.state.as_mut().ok_or(OnlineError::NotInitialized)?;
        let rng = self.rng.as_mut().ok_or(OnlineError::NotInitialized)?;
        let leaf = request_leaf(tree, request)?;
        let mut v = state
            .lowest_occupied_ancestor(tree, leaf)
            .ok_or(OnlineError::NoFreeServer)?;
        while !tree.is_leaf(v) {
            let occupied: Vec<usize> = tree
                .children(v)
                .iter()
                .copied()
                .filter(|&c| state.count(c) > 0)
                .collect();
            v = occupied[rng.gen_range(0..occupied.len())];
        }
        let here = state.servers_at(v);
        let server = here[rng.gen_range(0..here.len())];
        state.consume(tree, server);
        Ok(server)
    }
}
