//! Equalising uncovered-vertex counts around a cycle of clusters.

use crate::bitset::VertSet;
use crate::digraph::Tournament;
use crate::{Error, Result, StageFailure};

/// A reserved tree leaf pair whose center is already embedded: spending the
/// pair places its in-leaf and out-leaf on two uncovered host vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PendingPair {
    /// Host image of the pair's center.
    pub center_host: usize,
    /// Tree label of the in-leaf (edge leaf -> center).
    pub in_leaf: usize,
    /// Tree label of the out-leaf (edge center -> out-leaf).
    pub out_leaf: usize,
}

/// Mutable state of the balancing loop over `k` clusters arranged in a cycle
/// (cluster `i` is followed by cluster `(i + 1) mod k`).
#[derive(Debug, Clone)]
pub struct BalanceState {
    /// Uncovered host vertices per cluster.
    pub uncovered: Vec<VertSet>,
    /// Reserved subset of each cluster's uncovered vertices; leaves are only
    /// ever placed on reservoir vertices.
    pub reservoir: Vec<VertSet>,
    /// Unspent leaf pairs per cluster, consumed front first.
    pub pending: Vec<Vec<PendingPair>>,
    /// Leaf placements made so far, as `(tree_label, host_vertex)`.
    pub placed: Vec<(usize, usize)>,
    /// Balancing iterations performed.
    pub iterations: u64,
}

impl BalanceState {
    /// Fresh state with empty placement log.
    pub fn new(
        uncovered: Vec<VertSet>,
        reservoir: Vec<VertSet>,
        pending: Vec<Vec<PendingPair>>,
    ) -> Self {
        BalanceState {
            uncovered,
            reservoir,
            pending,
            placed: Vec::new(),
            iterations: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.uncovered.len()
    }

    fn sizes(&self) -> Vec<usize> {
        self.uncovered.iter().map(|s| s.len()).collect()
    }

    fn validate(&self, g: &Tournament) -> Result<()> {
        let k = self.k();
        if k < 2 {
            return Err(Error::param("balancing needs at least 2 clusters"));
        }
        if self.reservoir.len() != k || self.pending.len() != k {
            return Err(Error::param(
                "uncovered, reservoir and pending must all have one entry per cluster",
            ));
        }
        let mut seen = VertSet::empty(g.n());
        for i in 0..k {
            if self.uncovered[i].capacity() != g.n() || self.reservoir[i].capacity() != g.n() {
                return Err(Error::param("cluster sets must have capacity n(G)"));
            }
            if !self.reservoir[i].is_subset_of(&self.uncovered[i]) {
                return Err(Error::param(format!(
                    "reservoir of cluster {i} is not contained in its uncovered set"
                )));
            }
            if seen.intersection_len(&self.uncovered[i]) != 0 {
                return Err(Error::param("uncovered sets must be pairwise disjoint"));
            }
            seen = seen.union(&self.uncovered[i]);
        }
        for (i, pairs) in self.pending.iter().enumerate() {
            for p in pairs {
                if p.center_host >= g.n() {
                    return Err(Error::param(format!(
                        "pending pair in cluster {i} has center host {} outside the host",
                        p.center_host
                    )));
                }
                if seen.contains(p.center_host) {
                    return Err(Error::param(format!(
                        "pending pair in cluster {i} has an uncovered center host {}",
                        p.center_host
                    )));
                }
            }
        }
        let total: usize = self.sizes().iter().sum();
        if total % k != 0 {
            return Err(Error::param(format!(
                "total uncovered count {total} is not divisible by k = {k}"
            )));
        }
        if (total / k) % 2 != 0 {
            return Err(Error::param(format!(
                "average uncovered count {} must be even",
                total / k
            )));
        }
        Ok(())
    }
}

/// Outcome of [`balance_clusters`]: the final state, either with all
/// clusters holding the same (even) number of uncovered vertices, or
/// together with the failure that stopped progress.
#[derive(Debug, Clone)]
pub enum BalanceOutcome {
    Balanced(BalanceState),
    Failed {
        state: BalanceState,
        failure: StageFailure,
    },
}

impl BalanceOutcome {
    pub fn balanced(&self) -> Option<&BalanceState> {
        match self {
            BalanceOutcome::Balanced(s) => Some(s),
            BalanceOutcome::Failed { .. } => None,
        }
    }
}

/// True when `j` lies on the cyclic arc `start, start+1, ..., end` (inclusive).
fn arc_contains(start: usize, end: usize, j: usize) -> bool {
    if start <= end {
        start <= j && j <= end
    } else {
        j >= start || j <= end
    }
}

/// Equalise the uncovered counts `|U_i|` by spending one pending leaf pair in
/// every cluster per iteration.
///
/// Each iteration picks the smallest over-full cluster `r` (`|U_r| >= M + 1`
/// where `M` is the current average) and the smallest under-full cluster `s`,
/// and splits the cycle into arcs `K1 = {s+1, ..., r}` and `K2 = {r+1, ...,
/// s}`. Every cluster `i` places its front pending pair: the out-leaf goes to
/// an out-neighbour of the center's image inside the next cluster's
/// reservoir, and the in-leaf to an in-neighbour inside cluster `i` (for `i`
/// in `K1`) or cluster `i-1` (for `i` in `K2`), all choices distinct and
/// smallest-label first. The consumption pattern removes 3 uncovered vertices
/// at `r`, 1 at `s` and 2 elsewhere, so the average drops by exactly 2, stays
/// even, and the total imbalance `sum_i ||U_i| - M|` drops by exactly 2 per
/// iteration; the loop therefore runs for exactly half the initial imbalance.
pub fn balance_clusters(g: &Tournament, mut state: BalanceState) -> Result<BalanceOutcome> {
    state.validate(g)?;
    let k = state.k();
    loop {
        let sizes = state.sizes();
        let total: usize = sizes.iter().sum();
        let m = total / k;
        if sizes.iter().all(|&x| x == m) {
            return Ok(BalanceOutcome::Balanced(state));
        }
        let r = sizes
            .iter()
            .position(|&x| x >= m + 1)
            .expect("unbalanced state has an over-full cluster");
        let s = sizes
            .iter()
            .position(|&x| x + 1 <= m)
            .expect("unbalanced state has an under-full cluster");
        let k1_start = (s + 1) % k;

        // Choose all 2k leaf hosts before committing anything.
        let mut used = VertSet::empty(g.n());
        let mut choices: Vec<(usize, usize)> = Vec::with_capacity(k); // (x_minus, x_plus) per cluster
        for i in 0..k {
            let Some(pair) = state.pending[i].first().copied() else {
                return Ok(BalanceOutcome::Failed {
                    failure: StageFailure::new(
                        "balance",
                        "a cluster ran out of pending leaf pairs",
                    )
                    .count("cluster", i as i64)
                    .count("iteration", state.iterations as i64),
                    state,
                });
            };
            let p = pair.center_host;
            let next = (i + 1) % k;
            let x_plus = g
                .out_set(p)
                .intersection(&state.reservoir[next])
                .difference(&used)
                .min();
            let Some(x_plus) = x_plus else {
                return Ok(BalanceOutcome::Failed {
                    failure: StageFailure::new(
                        "balance",
                        "no reservoir out-neighbour in the next cluster for a pending center",
                    )
                    .count("cluster", i as i64)
                    .count("iteration", state.iterations as i64)
                    .count("reservoir_next", state.reservoir[next].len() as i64),
                    state,
                });
            };
            used.insert(x_plus);
            let tgt = if arc_contains(k1_start, r, i) {
                i
            } else {
                (i + k - 1) % k
            };
            let x_minus = g
                .in_set(p)
                .intersection(&state.reservoir[tgt])
                .difference(&used)
                .min();
            let Some(x_minus) = x_minus else {
                return Ok(BalanceOutcome::Failed {
                    failure: StageFailure::new(
                        "balance",
                        "no reservoir in-neighbour in the target cluster for a pending center",
                    )
                    .count("cluster", i as i64)
                    .count("target_cluster", tgt as i64)
                    .count("iteration", state.iterations as i64)
                    .count("reservoir_target", state.reservoir[tgt].len() as i64),
                    state,
                });
            };
            used.insert(x_minus);
            choices.push((x_minus, x_plus));
        }

        // Commit: spend one pair per cluster and remove the leaf hosts.
        let mut consumed = vec![0usize; k];
        for i in 0..k {
            let pair = state.pending[i].remove(0);
            let (x_minus, x_plus) = choices[i];
            for x in [x_minus, x_plus] {
                let home = (0..k)
                    .find(|&j| state.uncovered[j].contains(x))
                    .expect("choices come from reservoirs");
                state.uncovered[home].remove(x);
                state.reservoir[home].remove(x);
                consumed[home] += 1;
            }
            state.placed.push((pair.in_leaf, x_minus));
            state.placed.push((pair.out_leaf, x_plus));
        }
        debug_assert_eq!(consumed[r], 3);
        debug_assert_eq!(consumed[s], 1);
        debug_assert!((0..k)
            .filter(|&j| j != r && j != s)
            .all(|j| consumed[j] == 2));
        state.iterations += 1;
    }
}
