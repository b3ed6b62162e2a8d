//! Exhaustive backtracking search for an orientation-preserving embedding.

use std::collections::BTreeMap;

use super::Embedding;
use crate::bitset::VertSet;
use crate::digraph::Tournament;
use crate::otree::OrientedTree;
use crate::{Error, Result};

/// Pins and allowed-set restrictions for [`backtrack_embed`].
///
/// A *pin* fixes a tree vertex to one host vertex; an *allowed set* restricts
/// a tree vertex's candidate host vertices. Unconstrained vertices may use
/// any host vertex.
#[derive(Debug, Clone, Default)]
pub struct EmbedConstraints {
    pins: BTreeMap<usize, usize>,
    allowed: BTreeMap<usize, VertSet>,
}

impl EmbedConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fix tree vertex `tree_vertex` to host vertex `host_vertex`.
    pub fn pin(mut self, tree_vertex: usize, host_vertex: usize) -> Self {
        self.pins.insert(tree_vertex, host_vertex);
        self
    }

    /// Restrict tree vertex `tree_vertex` to images inside `hosts`.
    pub fn allow(mut self, tree_vertex: usize, hosts: VertSet) -> Self {
        self.allowed.insert(tree_vertex, hosts);
        self
    }

    /// Per-tree-vertex candidate sets over the host, after validation.
    fn build_allowed(&self, t: &OrientedTree, g: &Tournament) -> Result<Vec<VertSet>> {
        let mut sets = vec![VertSet::full(g.n()); t.n()];
        for (&v, &h) in &self.pins {
            if v >= t.n() {
                return Err(Error::param(format!(
                    "pin refers to tree vertex {v}, but the tree has {} vertices",
                    t.n()
                )));
            }
            if h >= g.n() {
                return Err(Error::param(format!(
                    "pin maps tree vertex {v} to host vertex {h}, outside the host (n = {})",
                    g.n()
                )));
            }
            sets[v] = VertSet::from_iter_n(g.n(), [h]);
        }
        for (&v, hosts) in &self.allowed {
            if v >= t.n() {
                return Err(Error::param(format!(
                    "allowed set refers to tree vertex {v}, but the tree has {} vertices",
                    t.n()
                )));
            }
            if hosts.capacity() != g.n() {
                return Err(Error::param(format!(
                    "allowed set for tree vertex {v} has capacity {}, host has {} vertices",
                    hosts.capacity(),
                    g.n()
                )));
            }
            sets[v] = sets[v].intersection(hosts);
        }
        Ok(sets)
    }
}

/// Result of a backtracking search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A complete, validated embedding.
    Found(Embedding),
    /// The whole (constrained) search space was traversed; no embedding
    /// exists under the given constraints.
    Exhausted,
    /// The node budget ran out before the search finished; existence is
    /// undecided.
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Embedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, SearchOutcome::Exhausted)
    }
}

struct Searcher<'a> {
    g: &'a Tournament,
    /// Tree vertices in ancestral order from the chosen root.
    order: Vec<usize>,
    /// `link[v] = Some((parent, outgoing))`: `outgoing` is true when the tree
    /// edge is parent -> v, so v must land in the out-neighbourhood of the
    /// parent's image.
    link: Vec<Option<(usize, bool)>>,
    /// Children counts of each tree vertex by edge direction (rooted).
    out_need: Vec<usize>,
    in_need: Vec<usize>,
    allowed: Vec<VertSet>,
    budget: Option<u64>,
    nodes: u64,
    phi: Vec<Option<usize>>,
    free: VertSet,
}

enum Dfs {
    Found,
    Exhausted,
    Budget,
}

impl Searcher<'_> {
    fn dfs(&mut self, depth: usize) -> Dfs {
        if depth == self.order.len() {
            return Dfs::Found;
        }
        let v = self.order[depth];
        let pool = match self.link[v] {
            None => self.allowed[v].intersection(&self.free),
            Some((p, outgoing)) => {
                let hp = self.phi[p].expect("parent precedes child in ancestral order");
                let nbrs = if outgoing {
                    self.g.out_set(hp)
                } else {
                    self.g.in_set(hp)
                };
                self.allowed[v].intersection(&self.free).intersection(nbrs)
            }
        };
        let mut cand: Vec<usize> = pool
            .iter()
            .filter(|&h| {
                // A host vertex must have enough free out-/in-neighbours for
                // the children still to be placed below v.
                self.out_need[v] <= self.g.out_set(h).intersection_len(&self.free)
                    && self.in_need[v] <= self.g.in_set(h).intersection_len(&self.free)
            })
            .collect();
        // Fail-first value order: try well-connected host vertices before
        // poorly connected ones, biased towards the direction v's children
        // need most; ties by ascending label keep the search deterministic.
        cand.sort_by_key(|&h| {
            let (od, id) = (self.g.out_deg(h), self.g.in_deg(h));
            let bias = if self.out_need[v] > self.in_need[v] {
                od
            } else if self.in_need[v] > self.out_need[v] {
                id
            } else {
                od.min(id)
            };
            (std::cmp::Reverse(od.min(id)), std::cmp::Reverse(bias), h)
        });
        for h in cand {
            self.nodes += 1;
            if let Some(b) = self.budget {
                if self.nodes > b {
                    return Dfs::Budget;
                }
            }
            self.phi[v] = Some(h);
            self.free.remove(h);
            match self.dfs(depth + 1) {
                Dfs::Exhausted => {}
                done => {
                    // Leave phi intact on Found so the caller can read it.
                    if matches!(done, Dfs::Budget) {
                        self.free.insert(h);
                        self.phi[v] = None;
                    }
                    return done;
                }
            }
            self.free.insert(h);
            self.phi[v] = None;
        }
        Dfs::Exhausted
    }
}

/// Search for an embedding of `t` into `g` honouring `constraints`, visiting
/// at most `node_budget` assignment attempts (unlimited if `None`).
///
/// The search is complete: with no (or a sufficient) budget, `Exhausted`
/// proves that no constrained embedding exists. Vertices are placed in
/// ancestral order from the most constrained vertex (smallest allowed set,
/// ties to the smallest label), so each placement only needs to respect the
/// single tree edge to its already-placed parent.
pub fn backtrack_embed(
    t: &OrientedTree,
    g: &Tournament,
    constraints: &EmbedConstraints,
    node_budget: Option<u64>,
) -> Result<SearchOutcome> {
    if t.n() > g.n() {
        return Err(Error::param(format!(
            "tree has {} vertices, host only {}",
            t.n(),
            g.n()
        )));
    }
    let allowed = constraints.build_allowed(t, g)?;
    if allowed.iter().any(|s| s.is_empty()) {
        // A pin outside an allowed set (or an empty allowed set) leaves no
        // candidate: the constrained space is empty, not malformed.
        return Ok(SearchOutcome::Exhausted);
    }
    let root = (0..t.n())
        .min_by_key(|&v| (allowed[v].len(), v))
        .expect("tree has at least one vertex");
    let order = t.ancestral_ordering(root)?;
    let parents = t.parents(root)?;
    let mut link = vec![None; t.n()];
    let mut out_need = vec![0usize; t.n()];
    let mut in_need = vec![0usize; t.n()];
    for v in 0..t.n() {
        if let Some(p) = parents[v] {
            // edge_between(p, v) is Some(true) exactly when the edge is p -> v.
            let outgoing = t.edge_between(p, v).expect("parent is adjacent");
            link[v] = Some((p, outgoing));
            if outgoing {
                out_need[p] += 1;
            } else {
                in_need[p] += 1;
            }
        }
    }
    let mut searcher = Searcher {
        g,
        order,
        link,
        out_need,
        in_need,
        allowed,
        budget: node_budget,
        nodes: 0,
        phi: vec![None; t.n()],
        free: VertSet::full(g.n()),
    };
    match searcher.dfs(0) {
        Dfs::Found => {
            let mut emb = Embedding::new(t.n());
            for (v, h) in searcher.phi.iter().enumerate() {
                emb.set(v, h.expect("search completed"));
            }
            super::validate_embedding(t, g, &emb)?;
            Ok(SearchOutcome::Found(emb))
        }
        Dfs::Exhausted => Ok(SearchOutcome::Exhausted),
        Dfs::Budget => Ok(SearchOutcome::BudgetExceeded),
    }
}
