//! Rooted tree metrics and hierarchically separated trees.

use super::SpaceError;

const NO_PARENT: usize = usize::MAX;

/// A rooted tree with positive edge lengths; the metric is the
/// shortest-path distance, computed as
/// `dist(u,v) = dist_to_root(u) + dist_to_root(v) − 2·dist_to_root(lca)`.
///
/// LCA queries use binary lifting, O(log |V|) per query.
#[derive(Clone, Debug)]
pub struct TreeMetric {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// Length of the edge to the parent; 0 for the root.
    edge_len: Vec<f64>,
    root: usize,
    /// Hop depth from the root.
    depth: Vec<usize>,
    /// Sum of edge lengths from the root.
    dist_to_root: Vec<f64>,
    /// Binary-lifting ancestor table: `up[k][v]` is the 2^k-th ancestor.
    up: Vec<Vec<usize>>,
}

impl TreeMetric {
    /// Builds a tree from parent links. `parents[i]` is `None` exactly for
    /// the root; `edge_lens[i]` is the length of the edge from `i` to its
    /// parent (ignored for the root) and must be positive.
    pub fn new(parents: &[Option<usize>], edge_lens: &[f64]) -> Result<Self, SpaceError> {
        let n = parents.len();
        if n == 0 {
            return Err(SpaceError::InvalidTree("empty tree".into()));
        }
        if edge_lens.len() != n {
            return Err(SpaceError::InvalidTree("edge length count mismatch".into()));
        }
        let mut root = None;
        let mut parent = vec![NO_PARENT; n];
        let mut children = vec![Vec::new(); n];
        for (i, p) in parents.iter().enumerate() {
            match p {
                None => {
                    if root.replace(i).is_some() {
                        return Err(SpaceError::InvalidTree("multiple roots".into()));
                    }
                }
                Some(p) => {
                    if *p >= n {
                        return Err(SpaceError::InvalidTree(format!(
                            "node {i} has out-of-range parent {p}"
                        )));
                    }
                    let len_ok = edge_lens[i].is_finite() && edge_lens[i] > 0.0;
                    if !len_ok {
                        return Err(SpaceError::InvalidTree(format!(
                            "edge length of node {i} must be > 0, got {}",
                            edge_lens[i]
                        )));
                    }
                    parent[i] = *p;
                    children[*p].push(i);
                }
            }
        }
        let root = root.ok_or_else(|| SpaceError::InvalidTree("no root".into()))?;

        // BFS from the root; also detects cycles / disconnected nodes.
        let mut depth = vec![usize::MAX; n];
        let mut dist_to_root = vec![0.0; n];
        let mut order = Vec::with_capacity(n);
        depth[root] = 0;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &c in &children[u] {
                if depth[c] != usize::MAX {
                    return Err(SpaceError::InvalidTree("cycle detected".into()));
                }
                depth[c] = depth[u] + 1;
                dist_to_root[c] = dist_to_root[u] + edge_lens[c];
                order.push(c);
            }
        }
        if order.len() != n {
            return Err(SpaceError::InvalidTree("tree is not connected".into()));
        }

        let max_depth = depth.iter().copied().max().unwrap_or(0);
        let levels = (usize::BITS - max_depth.leading_zeros()).max(1) as usize;
        let mut up = vec![vec![root; n]; levels];
        for v in 0..n {
            up[0][v] = if parent[v] == NO_PARENT { v } else { parent[v] };
        }
        for k in 1..levels {
            for v in 0..n {
                up[k][v] = up[k - 1][up[k - 1][v]];
            }
        }

        let mut edge_len = edge_lens.to_vec();
        edge_len[root] = 0.0;
        Ok(TreeMetric {
            parent,
            children,
            edge_len,
            root,
            depth,
            dist_to_root,
            up,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_leaf(v)).collect()
    }

    /// Length of the edge from `v` to its parent (0 for the root).
    pub fn edge_len(&self, v: usize) -> f64 {
        self.edge_len[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn dist_to_root(&self, v: usize) -> f64 {
        self.dist_to_root[v]
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth[u] - self.depth[v];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                u = self.up[k][u];
            }
            diff >>= 1;
            k += 1;
        }
        if u == v {
            return u;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][u] != self.up[k][v] {
                u = self.up[k][u];
                v = self.up[k][v];
            }
        }
        self.parent[u]
    }

    /// Shortest-path distance between two nodes.
    pub fn node_dist(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        let a = self.lca(u, v);
        self.dist_to_root[u] + self.dist_to_root[v] - 2.0 * self.dist_to_root[a]
    }

    /// Largest gap between the shortest and longest node-to-descendant-leaf
    /// distance over all internal nodes. Zero exactly when the tree has the
    /// HST separation property.
    pub fn max_leaf_distance_spread(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.len()];
        let mut hi = vec![f64::NEG_INFINITY; self.len()];
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.depth(v)));
        for &v in &order {
            if self.is_leaf(v) {
                lo[v] = 0.0;
                hi[v] = 0.0;
            }
            if let Some(p) = self.parent(v) {
                let e = self.edge_len(v);
                lo[p] = lo[p].min(lo[v] + e);
                hi[p] = hi[p].max(hi[v] + e);
            }
        }
        (0..self.len())
            .filter(|&v| !self.is_leaf(v))
            .map(|v| hi[v] - lo[v])
            .fold(0.0, f64::max)
    }

    /// Parses the text format: one line per node, `id parent_id edge_length`,
    /// with `-1` as the root's parent. Ids must cover `0..n`. Full-line `#`
    /// comments and trailing `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self, SpaceError> {
        let rows = parse_rows(text)?;
        let n = rows.len();
        let mut parents = vec![None; n];
        let mut lens = vec![0.0; n];
        let mut seen = vec![false; n];
        for row in &rows {
            if row.id >= n {
                return Err(SpaceError::InvalidTree(format!(
                    "node id {} out of range for {} nodes",
                    row.id, n
                )));
            }
            if seen[row.id] {
                return Err(SpaceError::InvalidTree(format!("duplicate node id {}", row.id)));
            }
            seen[row.id] = true;
            parents[row.id] = row.parent;
            lens[row.id] = row.len;
        }
        TreeMetric::new(&parents, &lens)
    }

    /// Serializes to the text format parsed by [`TreeMetric::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in 0..self.len() {
            match self.parent(v) {
                None => out.push_str(&format!("{} -1 0\n", v)),
                Some(p) => out.push_str(&format!("{} {} {}\n", v, p, self.edge_len[v])),
            }
        }
        out
    }
}

struct NodeRow {
    id: usize,
    parent: Option<usize>,
    len: f64,
    level: Option<u32>,
}

fn parse_rows(text: &str) -> Result<Vec<NodeRow>, SpaceError> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (data, comment) = match line.split_once('#') {
            Some((d, c)) => (d.trim(), Some(c.trim())),
            None => (line, None),
        };
        let mut it = data.split_whitespace();
        let bad = |what: &str| {
            SpaceError::InvalidTree(format!("line {}: bad {what}: {line:?}", lineno + 1))
        };
        let id: usize = it
            .next()
            .ok_or_else(|| bad("node id"))?
            .parse()
            .map_err(|_| bad("node id"))?;
        let parent_raw: i64 = it
            .next()
            .ok_or_else(|| bad("parent id"))?
            .parse()
            .map_err(|_| bad("parent id"))?;
        let len: f64 = it
            .next()
            .ok_or_else(|| bad("edge length"))?
            .parse()
            .map_err(|_| bad("edge length"))?;
        if it.next().is_some() {
            return Err(bad("extra fields"));
        }
        let parent = if parent_raw < 0 { None } else { Some(parent_raw as usize) };
        let level = comment.and_then(|c| {
            let mut words = c.split_whitespace();
            match (words.next(), words.next()) {
                (Some("level"), Some(l)) => l.parse().ok(),
                _ => None,
            }
        });
        rows.push(NodeRow { id, parent, len, level });
    }
    if rows.is_empty() {
        return Err(SpaceError::InvalidTree("no node lines".into()));
    }
    Ok(rows)
}

/// A hierarchically separated tree: a [`TreeMetric`] together with a level
/// per node, where every internal node is equidistant from all leaves of
/// its subtree.
#[derive(Clone, Debug)]
pub struct Hst {
    tree: TreeMetric,
    level: Vec<u32>,
}

impl Hst {
    /// Wraps a tree whose levels are given explicitly, checking the
    /// separation property: within each subtree, all node-to-descendant-leaf
    /// distances agree (within `tol`; pass `0.0` to require bit equality).
    pub fn new(tree: TreeMetric, level: Vec<u32>, tol: f64) -> Result<Self, SpaceError> {
        if level.len() != tree.len() {
            return Err(SpaceError::InvalidTree("level count mismatch".into()));
        }
        let hst = Hst { tree, level };
        hst.check_separation(tol)?;
        Ok(hst)
    }

    fn check_separation(&self, tol: f64) -> Result<(), SpaceError> {
        let spread = self.tree.max_leaf_distance_spread();
        if spread > tol {
            return Err(SpaceError::InvalidTree(format!(
                "leaf distances within a subtree differ by {spread}"
            )));
        }
        Ok(())
    }

    pub fn tree(&self) -> &TreeMetric {
        &self.tree
    }

    pub fn into_tree(self) -> TreeMetric {
        self.tree
    }

    pub fn level(&self, v: usize) -> u32 {
        self.level[v]
    }

    /// Serializes as the tree text format with a `# level L` comment per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in 0..self.tree.len() {
            match self.tree.parent(v) {
                None => out.push_str(&format!("{} -1 0 # level {}\n", v, self.level[v])),
                Some(p) => out.push_str(&format!(
                    "{} {} {} # level {}\n",
                    v,
                    p,
                    self.tree.edge_len(v),
                    self.level[v]
                )),
            }
        }
        out
    }

    /// Parses the format written by [`Hst::to_text`]. Checks the separation
    /// property with the shared distance tolerance.
    pub fn from_text(text: &str) -> Result<Self, SpaceError> {
        let rows = parse_rows(text)?;
        let n = rows.len();
        let mut parents = vec![None; n];
        let mut lens = vec![0.0; n];
        let mut levels = vec![0u32; n];
        for row in &rows {
            if row.id >= n {
                return Err(SpaceError::InvalidTree(format!("node id {} out of range", row.id)));
            }
            parents[row.id] = row.parent;
            lens[row.id] = row.len;
            levels[row.id] = row
                .level
                .ok_or_else(|| SpaceError::InvalidTree(format!("node {} missing level", row.id)))?;
        }
        let tree = TreeMetric::new(&parents, &lens)?;
        Hst::new(tree, levels, super::DIST_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> TreeMetric {
        TreeMetric::from_text("0 -1 0\n1 0 1\n2 0 1\n3 0 2.5\n").unwrap()
    }

    #[test]
    fn distances_via_lca() {
        let t = star();
        assert_eq!(t.node_dist(1, 2), 2.0);
        assert_eq!(t.node_dist(1, 3), 3.5);
        assert_eq!(t.node_dist(0, 3), 2.5);
        assert_eq!(t.node_dist(2, 2), 0.0);
    }

    #[test]
    fn deep_chain_lca() {
        let mut text = String::from("0 -1 0\n");
        for i in 1..40 {
            text.push_str(&format!("{} {} 1\n", i, i - 1));
        }
        let t = TreeMetric::from_text(&text).unwrap();
        assert_eq!(t.node_dist(0, 39), 39.0);
        assert_eq!(t.lca(35, 17), 17);
    }

    #[test]
    fn round_trip_text() {
        let t = star();
        let again = TreeMetric::from_text(&t.to_text()).unwrap();
        for u in 0..t.len() {
            for v in 0..t.len() {
                assert_eq!(t.node_dist(u, v), again.node_dist(u, v));
            }
        }
    }

    #[test]
    fn rejects_cycles_and_orphans() {
        assert!(TreeMetric::from_text("0 -1 0\n1 2 1\n2 1 1\n").is_err());
        assert!(TreeMetric::from_text("0 -1 0\n1 0 1\n2 -1 0\n").is_err());
        assert!(TreeMetric::from_text("0 -1 0\n1 0 0\n").is_err()); // zero length
    }

    #[test]
    fn hst_property_enforced() {
        // Balanced: root -> two children at distance 2, each with leaves at 1.
        let good = "0 -1 0 # level 2\n1 0 2 # level 1\n2 0 2 # level 1\n3 1 1 # level 0\n4 1 1 # level 0\n5 2 1 # level 0\n";
        let hst = Hst::from_text(good).unwrap();
        assert_eq!(hst.level(0), 2);
        let t = hst.tree();
        assert_eq!(t.node_dist(3, 5), 6.0);

        // Unbalanced leaf distances: rejected.
        let bad = "0 -1 0 # level 2\n1 0 2 # level 1\n2 0 3 # level 1\n";
        assert!(Hst::from_text(bad).is_err());
    }

    #[test]
    fn hst_round_trip() {
        let good = "0 -1 0 # level 2\n1 0 2 # level 1\n2 0 2 # level 1\n3 1 1 # level 0\n4 1 1 # level 0\n5 2 1 # level 0\n";
        let hst = Hst::from_text(good).unwrap();
        let again = Hst::from_text(&hst.to_text()).unwrap();
        assert_eq!(again.level(4), 0);
        assert_eq!(hst.tree().node_dist(3, 4), again.tree().node_dist(3, 4));
        assert_eq!(hst.tree().node_dist(3, 5), again.tree().node_dist(3, 5));
    }
}
