//! Tournaments: complete oriented graphs on labelled vertices `0..n`, with
//! row-bitset adjacency. Everything downstream (embedding, oracles,
//! experiments) runs on this type.
//!
//! Wire forms live in [`encode`]: a binary bit string over the pairs
//! `(i, j)`, `i < j`, in lexicographic order (set bit = `i→j`), a packed hex
//! rendering of that string, and a JSON document carrying either form.

mod canon;
mod density;
mod encode;
pub(crate) mod gen;
mod path;

pub use canon::{
    burnside_iso_count, canonical_code, canonical_codes, is_canonical_code, iso_class_count,
    labelled_count, max_enumerable_order, CODE_ORDER_LIMIT,
};
pub use density::{
    density, edge_count_between, is_mu_almost_directed, regularity_check, super_regularity_check,
    AlmostDirected, RegMode, RegOutcome, RegularityVerdict, RegularityWitness,
    EXHAUSTIVE_SIDE_LIMIT,
};
pub use encode::{pair_count, pair_from_index, pair_index};
pub use gen::{circulant, paley, random_tournament, transitive};
pub use path::{hamiltonian_directed_path, is_directed_hamiltonian_path};

use crate::bitset::VertSet;
use crate::{Error, Result};

/// A tournament on `n` labelled vertices: for every unordered pair exactly
/// one directed edge. Immutable in spirit — the only mutator is
/// [`Tournament::flip_edge`], used to build fixtures.
#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    out: Vec<VertSet>,
    inn: Vec<VertSet>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tournament(n={}, bits={})", self.n, self.to_bit_string())
    }
}

impl Tournament {
    /// Build from a per-pair orientation callback: `beats(i, j)` for `i < j`
    /// answers whether the edge runs `i→j`.
    pub fn from_orientation(n: usize, mut beats: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = vec![VertSet::empty(n); n];
        let mut inn = vec![VertSet::empty(n); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if beats(i, j) {
                    out[i].insert(j);
                    inn[j].insert(i);
                } else {
                    out[j].insert(i);
                    inn[i].insert(j);
                }
            }
        }
        Tournament { n, out, inn }
    }

    /// Build from an explicit edge list; every unordered pair must appear
    /// exactly once, no loops, endpoints in `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let m = pair_count(n);
        if edges.len() != m {
            return Err(Error::format(format!(
                "tournament on {n} vertices needs exactly {m} edges, got {}",
                edges.len()
            )));
        }
        let mut seen = vec![false; m];
        let mut forward = vec![false; m];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::format(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::format(format!("loop at vertex {u}")));
            }
            let (i, j, fwd) = if u < v { (u, v, true) } else { (v, u, false) };
            let p = pair_index(n, i, j);
            if seen[p] {
                return Err(Error::format(format!(
                    "pair {{{i},{j}}} oriented more than once"
                )));
            }
            seen[p] = true;
            forward[p] = fwd;
        }
        Ok(Self::from_orientation(n, |i, j| forward[pair_index(n, i, j)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True iff the edge runs `u→v`.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    pub fn out_set(&self, v: usize) -> &VertSet {
        &self.out[v]
    }

    pub fn in_set(&self, v: usize) -> &VertSet {
        &self.inn[v]
    }

    pub fn out_deg(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_deg(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    /// min(out-degree, in-degree) of `v`.
    pub fn semidegree(&self, v: usize) -> usize {
        self.out_deg(v).min(self.in_deg(v))
    }

    /// Out-degree of `v` into the set `s` (`v` itself is ignored).
    pub fn out_deg_in(&self, v: usize, s: &VertSet) -> usize {
        self.out[v].intersection_len(s)
    }

    /// In-degree of `v` from the set `s`.
    pub fn in_deg_in(&self, v: usize, s: &VertSet) -> usize {
        self.inn[v].intersection_len(s)
    }

    /// min(out, in) of `v` within the set `s`.
    pub fn semideg_in(&self, v: usize, s: &VertSet) -> usize {
        self.out_deg_in(v, s).min(self.in_deg_in(v, s))
    }

    /// All directed edges `(u, v)` with `u→v`, in pair order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).map(move |j| if self.has_edge(i, j) { (i, j) } else { (j, i) })
        })
    }

    /// Reverse the orientation of the edge between `u` and `v` (fixture
    /// construction; e.g. planting reverse edges into a directed pair).
    pub fn flip_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        let (from, to) = if self.has_edge(u, v) { (u, v) } else { (v, u) };
        self.out[from].remove(to);
        self.inn[to].remove(from);
        self.out[to].insert(from);
        self.inn[from].insert(to);
    }

    /// Per-vertex `(out, in, min)` triples.
    pub fn semidegree_profile(&self) -> Vec<(usize, usize, usize)> {
        (0..self.n)
            .map(|v| (self.out_deg(v), self.in_deg(v), self.semidegree(v)))
            .collect()
    }

    /// Vertices of semidegree strictly below `d`, ascending. In any
    /// tournament there are at most `4d−2` of them (checked by tests, and
    /// cheap enough to debug-assert here).
    pub fn low_semidegree_vertices(&self, d: usize) -> Vec<usize> {
        assert!(d >= 1, "threshold must be at least 1");
        let low: Vec<usize> = (0..self.n).filter(|&v| self.semidegree(v) < d).collect();
        debug_assert!(low.len() <= 4 * d - 2, "semidegree bound violated — bug");
        low
    }

    /// Number of vertices of semidegree strictly below `d`.
    pub fn low_semidegree_count(&self, d: usize) -> usize {
        self.low_semidegree_vertices(d).len()
    }

    /// Minimum semidegree over all vertices (`None` for n = 0).
    pub fn min_semidegree(&self) -> Option<usize> {
        (0..self.n).map(|v| self.semidegree(v)).min()
    }

    /// Verify internal consistency: exactly one direction per pair, rows and
    /// reverse rows agree. Cheap; used by tests and after deserialization.
    pub fn validate(&self) -> Result<()> {
        for u in 0..self.n {
            if self.out[u].contains(u) || self.inn[u].contains(u) {
                return Err(Error::format(format!("loop at {u}")));
            }
            for v in (u + 1)..self.n {
                let fwd = self.out[u].contains(v);
                let bwd = self.out[v].contains(u);
                if fwd == bwd {
                    return Err(Error::format(format!(
                        "pair {{{u},{v}}} has {} orientations",
                        if fwd { "two" } else { "no" }
                    )));
                }
                let (from, to) = if fwd { (u, v) } else { (v, u) };
                if !self.inn[to].contains(from) || self.inn[from].contains(to) {
                    return Err(Error::format(format!(
                        "in-rows disagree with out-rows on {{{u},{v}}}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_validates_completeness() {
        let t = Tournament::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(t.has_edge(0, 1) && t.has_edge(1, 2) && t.has_edge(2, 0));
        t.validate().unwrap();

        assert!(Tournament::from_edges(3, &[(0, 1), (1, 2)]).is_err());
        assert!(Tournament::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).is_err());
        assert!(Tournament::from_edges(3, &[(0, 1), (1, 2), (0, 3)]).is_err());
        assert!(Tournament::from_edges(3, &[(0, 0), (1, 2), (0, 2)]).is_err());
    }

    #[test]
    fn degrees_sum_correctly() {
        let t = transitive(6);
        for v in 0..6 {
            assert_eq!(t.out_deg(v) + t.in_deg(v), 5);
        }
        assert_eq!(t.semidegree_profile()[0], (5, 0, 0));
        assert_eq!(t.semidegree_profile()[3], (2, 3, 2));
    }

    #[test]
    fn flip_edge_reverses_orientation() {
        let mut t = transitive(4);
        assert!(t.has_edge(0, 3));
        t.flip_edge(0, 3);
        assert!(t.has_edge(3, 0));
        t.validate().unwrap();
    }

    #[test]
    fn low_semidegree_on_transitive_ten() {
        // rank-i vertex (0-based label i) has semidegree min(i, 9−i); below 2
        // means labels 0, 1, 8, 9
        let t = transitive(10);
        assert_eq!(t.low_semidegree_vertices(2), vec![0, 1, 8, 9]);
        assert_eq!(t.low_semidegree_count(2), 4);
    }

    #[test]
    fn set_restricted_degrees() {
        let t = transitive(6);
        let s = VertSet::from_iter_n(6, [1, 3, 5]);
        assert_eq!(t.out_deg_in(0, &s), 3);
        assert_eq!(t.in_deg_in(0, &s), 0);
        assert_eq!(t.semideg_in(3, &s), 1); // beats 5, loses to 1
    }
}
