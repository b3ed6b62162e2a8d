//! Embedding engines for oriented trees in tournaments.
//!
//! The module provides one exact engine and several constructive pipelines:
//!
//! * [`backtrack_embed`] — exhaustive backtracking search, usable as an
//!   oracle on small hosts and as the inner engine of the pipelines;
//! * [`perfect_matching`] — bipartite matching between two host vertex sets
//!   along a fixed edge direction, with a Hall-condition witness on failure;
//! * [`greedy_pair_embed`] — embeds a directed pair `(A, B)` of tree parts
//!   into two host sets `(U, W)` component by component;
//! * [`directed_pair_pipeline`] — the staged construction that embeds an
//!   almost-nice tree into an almost-directed pair, finishing with leaf
//!   matchings;
//! * [`balance_clusters`] — equalises uncovered-vertex counts around a cycle
//!   of clusters by spending reserved leaf pairs;
//! * [`cct_pipeline`] — the two-phase spanning construction for hosts
//!   organised as a cycle of cluster tournaments;
//! * [`structure_search`] — the dichotomy search that either extracts an
//!   almost-directed pair or certifies large semidegree on a vertex subset.
//!
//! Throughout, `Err` marks malformed input or an unmet precondition, while a
//! well-formed run that hits a stage whose hypothesis fails for this instance
//! returns `Ok` with a structured [`StageFailure`].

mod backtrack;
mod balance;
mod cct;
mod greedy;
mod matching;
mod pair;
mod structure;

pub use crate::StageFailure;
pub use backtrack::{backtrack_embed, EmbedConstraints, SearchOutcome};
pub use balance::{balance_clusters, BalanceOutcome, BalanceState, PendingPair};
pub use cct::{cct_pipeline, CctParams, ClusterDecomposition};
pub use greedy::{greedy_pair_embed, GreedyPairParams};
pub use matching::{perfect_matching, validate_matching, MatchDirection, MatchingOutcome};
pub use pair::{directed_pair_pipeline, PairDecomposition, PairPipelineParams};
pub use structure::{structure_search, StructureOutcome, StructureParams};

use crate::bitset::VertSet;
use crate::digraph::Tournament;
use crate::otree::OrientedTree;
use crate::{Error, Result};

/// A partial injective map from tree vertices to host vertices.
///
/// `map[v] = Some(h)` means tree vertex `v` is placed on host vertex `h`.
/// The struct itself does not enforce injectivity on every mutation; use
/// [`validate_embedding`] to check a finished map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    map: Vec<Option<usize>>,
}

impl Embedding {
    /// An empty embedding for a tree on `tree_n` vertices.
    pub fn new(tree_n: usize) -> Self {
        Embedding {
            map: vec![None; tree_n],
        }
    }

    /// Number of tree vertices (the domain size).
    pub fn tree_n(&self) -> usize {
        self.map.len()
    }

    /// Host vertex of tree vertex `v`, if placed.
    pub fn get(&self, v: usize) -> Option<usize> {
        self.map.get(v).copied().flatten()
    }

    /// Place tree vertex `v` on host vertex `h`.
    ///
    /// Panics (debug builds) if `v` already has an image; the pipelines
    /// assign each vertex exactly once.
    pub fn set(&mut self, v: usize, h: usize) {
        debug_assert!(self.map[v].is_none(), "tree vertex {v} assigned twice");
        self.map[v] = Some(h);
    }

    /// Remove the image of `v` (used when backtracking).
    pub fn unset(&mut self, v: usize) {
        self.map[v] = None;
    }

    /// True if every tree vertex has an image.
    pub fn is_complete(&self) -> bool {
        self.map.iter().all(|x| x.is_some())
    }

    /// Number of placed vertices.
    pub fn placed_count(&self) -> usize {
        self.map.iter().filter(|x| x.is_some()).count()
    }

    /// Iterator over `(tree_vertex, host_vertex)` pairs in tree-vertex order.
    pub fn assigned(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(v, h)| h.map(|h| (v, h)))
    }

    /// The set of host vertices used, as a set with capacity `host_n`.
    pub fn image(&self, host_n: usize) -> VertSet {
        VertSet::from_iter_n(host_n, self.assigned().map(|(_, h)| h))
    }

    /// CSV serialisation with header `tree_vertex,host_vertex`, one row per
    /// placed vertex in tree-vertex order.
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["tree_vertex", "host_vertex"])
            .map_err(|e| Error::format(format!("csv write failed: {e}")))?;
        for (v, h) in self.assigned() {
            wtr.write_record([v.to_string(), h.to_string()])
                .map_err(|e| Error::format(format!("csv write failed: {e}")))?;
        }
        let bytes = wtr
            .into_inner()
            .map_err(|e| Error::format(format!("csv write failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::format(format!("csv not utf-8: {e}")))
    }
}

/// Validate a complete embedding of `t` into `g`: every tree vertex placed,
/// no two on the same host vertex, and every tree edge `u -> v` carried to a
/// host edge `phi(u) -> phi(v)`.
pub fn validate_embedding(t: &OrientedTree, g: &Tournament, emb: &Embedding) -> Result<()> {
    if emb.tree_n() != t.n() {
        return Err(Error::param(format!(
            "embedding domain has {} vertices but the tree has {}",
            emb.tree_n(),
            t.n()
        )));
    }
    let mut seen = VertSet::empty(g.n());
    for v in 0..t.n() {
        let h = emb
            .get(v)
            .ok_or_else(|| Error::param(format!("tree vertex {v} is not placed")))?;
        if h >= g.n() {
            return Err(Error::param(format!(
                "tree vertex {v} maps to {h}, outside the host (n = {})",
                g.n()
            )));
        }
        if seen.contains(h) {
            return Err(Error::param(format!(
                "host vertex {h} is the image of two tree vertices"
            )));
        }
        seen.insert(h);
    }
    for &(u, v) in t.edges() {
        let (hu, hv) = (emb.get(u).unwrap(), emb.get(v).unwrap());
        if !g.has_edge(hu, hv) {
            return Err(Error::param(format!(
                "tree edge {u} -> {v} maps to {hu} -> {hv}, but the host edge points the other way"
            )));
        }
    }
    Ok(())
}

/// Outcome of a constructive pipeline: a complete validated embedding, or a
/// structured account of the stage that could not proceed on this instance.
#[derive(Debug, Clone)]
pub enum PipelineOutcome {
    Embedded(Embedding),
    Failed(StageFailure),
}

impl PipelineOutcome {
    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            PipelineOutcome::Embedded(e) => Some(e),
            PipelineOutcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&StageFailure> {
        match self {
            PipelineOutcome::Embedded(_) => None,
            PipelineOutcome::Failed(f) => Some(f),
        }
    }

    pub fn is_embedded(&self) -> bool {
        matches!(self, PipelineOutcome::Embedded(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::gen;
    use crate::otree::OrientedTree;

    #[test]
    fn embedding_basics_and_csv() {
        let mut emb = Embedding::new(3);
        assert!(!emb.is_complete());
        emb.set(0, 5);
        emb.set(2, 1);
        assert_eq!(emb.get(0), Some(5));
        assert_eq!(emb.get(1), None);
        assert_eq!(emb.placed_count(), 2);
        emb.set(1, 3);
        assert!(emb.is_complete());
        let csv = emb.to_csv().unwrap();
        assert_eq!(csv, "tree_vertex,host_vertex\n0,5\n1,3\n2,1\n");
        let img = emb.image(8);
        assert_eq!(img.to_vec(), vec![1, 3, 5]);
    }

    #[test]
    fn validation_catches_reversed_edge_and_collision() {
        // Path 0 -> 1 -> 2 in the transitive tournament: 0,1,2 works, 2,1,0
        // reverses every edge.
        let t = OrientedTree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let g = gen::transitive(4);
        let mut good = Embedding::new(3);
        good.set(0, 0);
        good.set(1, 1);
        good.set(2, 2);
        assert!(validate_embedding(&t, &g, &good).is_ok());

        let mut rev = Embedding::new(3);
        rev.set(0, 2);
        rev.set(1, 1);
        rev.set(2, 0);
        assert!(validate_embedding(&t, &g, &rev).is_err());

        let mut coll = Embedding::new(3);
        coll.set(0, 0);
        coll.set(1, 1);
        coll.set(2, 1);
        assert!(validate_embedding(&t, &g, &coll).is_err());

        let mut partial = Embedding::new(3);
        partial.set(0, 0);
        assert!(validate_embedding(&t, &g, &partial).is_err());
    }
}
