//! Oriented trees: labelled trees with a direction on every edge.
//!
//! Orientations are free — no constraint links one edge's direction to
//! another's. Vertices are `0..n`. The JSON wire form is
//! `{"n": int, "edges": [[tail, head], ...]}`.

mod prufer;
mod shapes;
mod split;
mod stars;

pub use prufer::{
    from_prufer, oriented_from_prufer, planted_nice_tree, random_oriented_tree, to_prufer,
    PruferExchange,
};
pub use shapes::{antidirected_path, directed_path, double_star, in_star, out_star};
pub use split::{nice_split, tree_partition, validate_tree_partition, Subtree, TreePartition};
pub use stars::{
    is_alpha_nice, pendant_cherries, pendant_star_census, validate_certificate,
    NicenessCertificate, PendantStar, StarKind,
};

use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A labelled tree on `0..n` with every edge oriented.
#[derive(Clone, PartialEq, Eq)]
pub struct OrientedTree {
    n: usize,
    /// `(tail, head)` pairs, sorted by the unordered pair `(min, max)`.
    edges: Vec<(usize, usize)>,
    /// Per-vertex `(neighbour, outgoing)` lists, sorted by neighbour.
    adj: Vec<Vec<(usize, bool)>>,
}

impl std::fmt::Debug for OrientedTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OrientedTree(n={}, edges={:?})", self.n, self.edges)
    }
}

impl OrientedTree {
    /// Build from a directed edge list; must form a tree on `0..n`.
    pub fn new(n: usize, edges: impl Into<Vec<(usize, usize)>>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges.into();
        if n == 0 {
            return Err(Error::param("a tree needs at least one vertex"));
        }
        if edges.len() != n - 1 {
            return Err(Error::format(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        edges.sort_by_key(|&(t, h)| (t.min(h), t.max(h)));
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for &(t, h) in &edges {
            if t >= n || h >= n {
                return Err(Error::format(format!("edge ({t},{h}) out of range")));
            }
            if t == h {
                return Err(Error::format(format!("loop at {t}")));
            }
            adj[t].push((h, true));
            adj[h].push((t, false));
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        for (v, row) in adj.iter().enumerate() {
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::format(format!("parallel edges at vertex {v}")));
            }
        }
        let tree = OrientedTree { n, edges, adj };
        // n−1 edges + connected ⇒ acyclic
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &tree.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        if count != n {
            return Err(Error::format(format!(
                "edge list is disconnected: reached {count} of {n} vertices"
            )));
        }
        Ok(tree)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Directed edges, sorted by unordered pair.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbour, outgoing)` pairs of `v`, ascending by neighbour.
    pub fn neighbours(&self, v: usize) -> &[(usize, bool)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.degree(v) == 1
    }

    /// `Some(true)` if `u→v`, `Some(false)` if `v→u`, `None` if not adjacent.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<bool> {
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    /// Degree-1 vertices split by orientation: an in-leaf's edge points away
    /// from it (the leaf is the tail), an out-leaf's edge points towards it.
    pub fn leaf_classes(&self) -> (Vec<usize>, Vec<usize>) {
        let mut in_leaves = Vec::new();
        let mut out_leaves = Vec::new();
        for v in 0..self.n {
            if let [(_, outgoing)] = self.adj[v][..] {
                if outgoing {
                    in_leaves.push(v);
                } else {
                    out_leaves.push(v);
                }
            }
        }
        (in_leaves, out_leaves)
    }

    /// BFS order from `root`, children visited in ascending label order:
    /// every non-root vertex appears after its parent.
    pub fn ancestral_ordering(&self, root: usize) -> Result<Vec<usize>> {
        self.check_vertex(root)?;
        let mut order = Vec::with_capacity(self.n);
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(u, _) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        Ok(order)
    }

    /// Parent of each vertex in the tree rooted at `root` (`None` for the
    /// root itself).
    pub fn parents(&self, root: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(root)?;
        let mut parent = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    stack.push(u);
                }
            }
        }
        Ok(parent)
    }

    /// Distance from `root` to each vertex.
    pub fn depths(&self, root: usize) -> Result<Vec<usize>> {
        let parent = self.parents(root)?;
        let order = self.ancestral_ordering(root)?;
        let mut depth = vec![0usize; self.n];
        for &v in &order {
            if let Some(p) = parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        Ok(depth)
    }

    /// The subtree induced by a connected vertex subset, relabelled to
    /// `0..m` in ascending original-label order. Returns the tree and the
    /// new→old label map.
    pub fn induced(&self, vertices: &[usize]) -> Result<(OrientedTree, Vec<usize>)> {
        let mut keep: Vec<usize> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.len() != vertices.len() {
            return Err(Error::param("induced subtree: duplicate vertices"));
        }
        if keep.is_empty() {
            return Err(Error::param("induced subtree: empty vertex set"));
        }
        if *keep.last().unwrap() >= self.n {
            return Err(Error::param("induced subtree: vertex out of range"));
        }
        let mut new_label = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_label[v] = i;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(t, h)| new_label[t] != usize::MAX && new_label[h] != usize::MAX)
            .map(|&(t, h)| (new_label[t], new_label[h]))
            .collect();
        let tree = OrientedTree::new(keep.len(), edges).map_err(|e| {
            Error::param(format!("vertex set does not induce a subtree: {e}"))
        })?;
        Ok((tree, keep))
    }

    /// Remove named leaves (one in-leaf and/or one out-leaf per anchor),
    /// keeping a record that re-attaches them exactly.
    pub fn strip_leaf_pairs(&self, spec: &[LeafStripSpec]) -> Result<StrippedTree> {
        let mut removed: Vec<RemovedLeaf> = Vec::new();
        let mut gone = vec![false; self.n];
        for s in spec {
            self.check_vertex(s.anchor)?;
            for (leaf, want_in) in [(s.in_leaf, true), (s.out_leaf, false)] {
                let Some(leaf) = leaf else { continue };
                self.check_vertex(leaf)?;
                if !self.is_leaf(leaf) {
                    return Err(Error::param(format!("vertex {leaf} is not a leaf")));
                }
                let Some(outgoing) = self.edge_between(leaf, s.anchor) else {
                    return Err(Error::param(format!(
                        "leaf {leaf} is not adjacent to anchor {}",
                        s.anchor
                    )));
                };
                // in-leaf: edge leaves the leaf
                if outgoing != want_in {
                    return Err(Error::param(format!(
                        "leaf {leaf} at anchor {} is an {}-leaf, spec asked for the other kind",
                        s.anchor,
                        if outgoing { "in" } else { "out" }
                    )));
                }
                if gone[leaf] {
                    return Err(Error::param(format!("leaf {leaf} named twice")));
                }
                gone[leaf] = true;
                removed.push(RemovedLeaf {
                    anchor: s.anchor,
                    leaf,
                    leaf_is_head: !outgoing,
                });
            }
        }
        for r in &removed {
            if gone[r.anchor] {
                return Err(Error::param(format!(
                    "anchor {} is itself being removed",
                    r.anchor
                )));
            }
        }
        let kept: Vec<usize> = (0..self.n).filter(|&v| !gone[v]).collect();
        if kept.is_empty() {
            return Err(Error::param("stripping would remove every vertex"));
        }
        let (tree, kept) = self.induced(&kept)?;
        Ok(StrippedTree { tree, kept, removed, original_n: self.n })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("tree serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::param(format!("vertex {v} out of range for n={}", self.n)))
        }
    }
}

/// Which leaves to strip at one anchor vertex.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeafStripSpec {
    pub anchor: usize,
    /// A leaf adjacent to the anchor whose edge points away from the leaf.
    pub in_leaf: Option<usize>,
    /// A leaf adjacent to the anchor whose edge points towards the leaf.
    pub out_leaf: Option<usize>,
}

/// One stripped leaf, in original labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemovedLeaf {
    pub anchor: usize,
    pub leaf: usize,
    /// True iff the removed edge ran `anchor→leaf` (an out-leaf).
    pub leaf_is_head: bool,
}

/// Result of [`OrientedTree::strip_leaf_pairs`]: the remaining tree
/// (relabelled contiguously), the new→old label map, and the removals.
#[derive(Debug, Clone)]
pub struct StrippedTree {
    pub tree: OrientedTree,
    pub kept: Vec<usize>,
    pub removed: Vec<RemovedLeaf>,
    original_n: usize,
}

impl StrippedTree {
    /// Rebuild the original tree, edge for edge.
    pub fn reattach(&self) -> OrientedTree {
        let mut edges: Vec<(usize, usize)> = self
            .tree
            .edges()
            .iter()
            .map(|&(t, h)| (self.kept[t], self.kept[h]))
            .collect();
        for r in &self.removed {
            edges.push(if r.leaf_is_head { (r.anchor, r.leaf) } else { (r.leaf, r.anchor) });
        }
        OrientedTree::new(self.original_n, edges)
            .expect("re-attaching stripped leaves always restores a tree")
    }
}

impl Serialize for OrientedTree {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            n: usize,
            edges: &'a [(usize, usize)],
        }
        Wire { n: self.n, edges: &self.edges }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OrientedTree {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let w = Wire::deserialize(de)?;
        OrientedTree::new(w.n, w.edges).map_err(D::Error::custom)
    }
}

/// The 6-vertex worked example used across this crate's tests: an A-star at
/// center 1 (leaf 2, attach 1→0) and a B-star at center 3 (out-leaf 4,
/// in-leaf 5, attach 0→3).
#[cfg(test)]
pub(crate) fn six_vertex_fixture() -> OrientedTree {
    OrientedTree::new(6, vec![(1, 0), (1, 2), (0, 3), (3, 4), (5, 3)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn directed_path(n: usize) -> OrientedTree {
        OrientedTree::new(n, (0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn construction_validates_trees() {
        assert!(OrientedTree::new(3, vec![(0, 1), (1, 2)]).is_ok());
        assert!(OrientedTree::new(3, vec![(0, 1)]).is_err()); // too few edges
        assert!(OrientedTree::new(4, vec![(0, 1), (2, 3), (1, 0)]).is_err()); // parallel
        assert!(OrientedTree::new(4, vec![(0, 1), (2, 3), (0, 4)]).is_err()); // range
        assert!(OrientedTree::new(3, vec![(0, 1), (2, 2)]).is_err()); // loop
        // cycle + isolated vertex has n−1 edges but is disconnected
        assert!(OrientedTree::new(4, vec![(0, 1), (1, 2), (2, 0)]).is_err());
    }

    #[test]
    fn leaf_classes_on_paths_and_stars() {
        let (ins, outs) = directed_path(3).leaf_classes();
        assert_eq!((ins, outs), (vec![0], vec![2]));

        // out-star: center 0 with 0→1, 0→2
        let star = OrientedTree::new(3, vec![(0, 1), (0, 2)]).unwrap();
        let (ins, outs) = star.leaf_classes();
        assert_eq!((ins, outs), (vec![], vec![1, 2]));

        // antidirected path 0→1←2: both ends' edges point away from them
        let anti = OrientedTree::new(3, vec![(0, 1), (2, 1)]).unwrap();
        let (ins, outs) = anti.leaf_classes();
        assert_eq!((ins, outs), (vec![0, 2], vec![]));
    }

    #[test]
    fn ancestral_ordering_parents_precede() {
        let t = six_vertex_fixture();
        for root in 0..6 {
            let order = t.ancestral_ordering(root).unwrap();
            assert_eq!(order[0], root);
            let parent = t.parents(root).unwrap();
            let pos: Vec<usize> = {
                let mut p = vec![0; 6];
                for (i, &v) in order.iter().enumerate() {
                    p[v] = i;
                }
                p
            };
            for v in 0..6 {
                if let Some(p) = parent[v] {
                    assert!(pos[p] < pos[v], "parent {p} after child {v} from root {root}");
                }
            }
        }
    }

    #[test]
    fn path_ordering_from_middle() {
        let t = OrientedTree::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(t.ancestral_ordering(1).unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn depths_count_edges_from_root() {
        let t = six_vertex_fixture();
        assert_eq!(t.depths(1).unwrap(), vec![1, 0, 1, 2, 3, 3]);
    }

    #[test]
    fn induced_subtree_relabels() {
        let t = six_vertex_fixture();
        let (sub, map) = t.induced(&[0, 3, 4, 5]).unwrap();
        assert_eq!(map, vec![0, 3, 4, 5]);
        assert_eq!(sub.edges(), &[(0, 1), (1, 2), (3, 1)]);
        assert!(t.induced(&[0, 4]).is_err()); // disconnected
        assert!(t.induced(&[0, 0, 3]).is_err()); // duplicates
    }

    #[test]
    fn strip_and_reattach_roundtrip() {
        let t = six_vertex_fixture();
        let stripped = t
            .strip_leaf_pairs(&[LeafStripSpec { anchor: 3, in_leaf: Some(5), out_leaf: Some(4) }])
            .unwrap();
        assert_eq!(stripped.kept, vec![0, 1, 2, 3]);
        assert_eq!(stripped.tree.edges(), &[(1, 0), (0, 3), (1, 2)]);
        assert_eq!(stripped.reattach(), t);

        // empty spec is the identity
        let id = t.strip_leaf_pairs(&[]).unwrap();
        assert_eq!(id.tree, t);
        assert_eq!(id.reattach(), t);
    }

    #[test]
    fn strip_rejects_bad_specs() {
        let t = six_vertex_fixture();
        // 4 is an out-leaf, not an in-leaf
        assert!(t
            .strip_leaf_pairs(&[LeafStripSpec { anchor: 3, in_leaf: Some(4), out_leaf: None }])
            .is_err());
        // 0 is not a leaf
        assert!(t
            .strip_leaf_pairs(&[LeafStripSpec { anchor: 1, in_leaf: None, out_leaf: Some(0) }])
            .is_err());
        // 5 is not adjacent to anchor 1
        assert!(t
            .strip_leaf_pairs(&[LeafStripSpec { anchor: 1, in_leaf: Some(5), out_leaf: None }])
            .is_err());
        // naming the same leaf twice
        assert!(t
            .strip_leaf_pairs(&[
                LeafStripSpec { anchor: 3, in_leaf: Some(5), out_leaf: None },
                LeafStripSpec { anchor: 3, in_leaf: Some(5), out_leaf: None },
            ])
            .is_err());
    }

    #[test]
    fn json_roundtrip() {
        let t = six_vertex_fixture();
        let s = t.to_json_string();
        assert_eq!(OrientedTree::from_json_str(&s).unwrap(), t);
        assert!(OrientedTree::from_json_str(r#"{"n":3,"edges":[[0,1]]}"#).is_err());
    }
}
