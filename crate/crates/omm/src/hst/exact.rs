//! Exact expected cost of a tree policy by enumerating its randomness.
//!
//! States are (free servers per leaf, next arrival); within a leaf,
//! servers are exchangeable, so leaf counts capture the whole state and
//! memoization collapses collocated-server blowup.

use std::collections::HashMap;

use super::HstError;
use crate::space::TreeMetric;

/// Which tree greedy subroutine to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreePolicyKind {
    Mnp,
    RandomSubtree,
}

/// Hard cap on distinct state evaluations per call.
pub const ENUMERATION_BUDGET: usize = 1_000_000;

struct Enumerator<'a> {
    kind: TreePolicyKind,
    tree: &'a TreeMetric,
    /// Dense slot per leaf node, for compact state keys.
    slot_of: HashMap<usize, usize>,
    leaf_of_slot: Vec<usize>,
    requests: &'a [usize],
    memo: HashMap<(Vec<u16>, usize), f64>,
    evals: usize,
}

impl<'a> Enumerator<'a> {
    fn subtree_count(&self, state: &[u16], v: usize) -> u32 {
        // Small instances: walk the subtree directly.
        if self.tree.is_leaf(v) {
            return self.slot_of.get(&v).map_or(0, |&s| state[s] as u32);
        }
        self.tree
            .children(v)
            .iter()
            .map(|&c| self.subtree_count(state, c))
            .sum()
    }

    fn anchor(&self, state: &[u16], leaf: usize) -> usize {
        let mut v = leaf;
        loop {
            if self.subtree_count(state, v) > 0 {
                return v;
            }
            v = self.tree.parent(v).expect("some server is free");
        }
    }

    /// Leaf choice distribution under `anchor` for the configured policy.
    fn leaf_distribution(&self, state: &[u16], anchor: usize) -> Vec<(usize, f64)> {
        match self.kind {
            TreePolicyKind::Mnp => {
                let total = self.subtree_count(state, anchor) as f64;
                let mut out = Vec::new();
                self.collect_mnp(state, anchor, total, &mut out);
                out
            }
            TreePolicyKind::RandomSubtree => {
                let mut out = Vec::new();
                self.collect_random_subtree(state, anchor, 1.0, &mut out);
                out
            }
        }
    }

    fn collect_mnp(&self, state: &[u16], v: usize, total: f64, out: &mut Vec<(usize, f64)>) {
        if self.tree.is_leaf(v) {
            if let Some(&s) = self.slot_of.get(&v) {
                if state[s] > 0 {
                    out.push((s, state[s] as f64 / total));
                }
            }
            return;
        }
        for &c in self.tree.children(v) {
            if self.subtree_count(state, c) > 0 {
                self.collect_mnp(state, c, total, out);
            }
        }
    }

    fn collect_random_subtree(
        &self,
        state: &[u16],
        v: usize,
        prob: f64,
        out: &mut Vec<(usize, f64)>,
    ) {
        if self.tree.is_leaf(v) {
            let s = self.slot_of[&v];
            out.push((s, prob));
            return;
        }
        let occupied: Vec<usize> = self
            .tree
            .children(v)
            .iter()
            .copied()
            .filter(|&c| self.subtree_count(state, c) > 0)
            .collect();
        let w = occupied.len() as f64;
        for c in occupied {
            self.collect_random_subtree(state, c, prob / w, out);
        }
    }

    fn eval(&mut self, state: &mut Vec<u16>, idx: usize) -> Result<f64, HstError> {
        if idx == self.requests.len() {
            return Ok(0.0);
        }
        if let Some(&v) = self.memo.get(&(state.clone(), idx)) {
            return Ok(v);
        }
        self.evals += 1;
        if self.evals > ENUMERATION_BUDGET {
            return Err(HstError::EnumerationBudget(ENUMERATION_BUDGET));
        }
        let r = self.requests[idx];
        let anchor = self.anchor(state, r);
        let choices = self.leaf_distribution(state, anchor);
        debug_assert!(
            (choices.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-9,
            "leaf probabilities sum to one"
        );
        let mut expected = 0.0;
        for (slot, p) in choices {
            let step = self.tree.node_dist(r, self.leaf_of_slot[slot]);
            state[slot] -= 1;
            let rest = self.eval(state, idx + 1)?;
            state[slot] += 1;
            expected += p * (step + rest);
        }
        self.memo.insert((state.clone(), idx), expected);
        Ok(expected)
    }
}

/// Exact expectation of the total cost of serving `request_leaves` in
/// order with `server_leaves` free at the start, enumerating every
/// random choice of the policy's tie-break with its probability.
pub fn exact_expected_cost(
    kind: TreePolicyKind,
    tree: &TreeMetric,
    server_leaves: &[usize],
    request_leaves: &[usize],
) -> Result<f64, HstError> {
    if server_leaves.len() < request_leaves.len() {
        return Err(HstError::Invalid(format!(
            "{} servers cannot serve {} requests",
            server_leaves.len(),
            request_leaves.len()
        )));
    }
    for &leaf in server_leaves.iter().chain(request_leaves) {
        if leaf >= tree.len() || !tree.is_leaf(leaf) {
            return Err(HstError::Invalid(format!("{leaf} is not a leaf node")));
        }
    }
    let mut slot_of = HashMap::new();
    let mut leaf_of_slot = Vec::new();
    for v in 0..tree.len() {
        if tree.is_leaf(v) {
            slot_of.insert(v, leaf_of_slot.len());
            leaf_of_slot.push(v);
        }
    }
    let mut state = vec![0u16; leaf_of_slot.len()];
    for &leaf in server_leaves {
        state[slot_of[&leaf]] += 1;
    }
    let mut e = Enumerator {
        kind,
        tree,
        slot_of,
        leaf_of_slot,
        requests: request_leaves,
        memo: HashMap::new(),
        evals: 0,
    };
    e.eval(&mut state, 0)
}
