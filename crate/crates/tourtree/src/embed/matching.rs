//! Perfect matchings between two host vertex sets along a fixed direction.

use crate::bitset::VertSet;
use crate::digraph::Tournament;
use crate::{Error, Result};

/// Which way the matched edges must point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchDirection {
    /// Matched pairs `(x, y)` must satisfy `x -> y` in the host.
    XToY,
    /// Matched pairs `(x, y)` must satisfy `y -> x` in the host.
    YToX,
}

/// Result of a perfect-matching attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingOutcome {
    /// A perfect matching as `(x, y)` pairs, in ascending `x` order.
    Perfect(Vec<(usize, usize)>),
    /// A witness that no perfect matching exists: a subset of `xs` whose
    /// joint neighbourhood inside `ys` is smaller than the subset.
    HallViolator { subset: VertSet, neighbourhood: VertSet },
}

impl MatchingOutcome {
    pub fn perfect(&self) -> Option<&[(usize, usize)]> {
        match self {
            MatchingOutcome::Perfect(m) => Some(m),
            MatchingOutcome::HallViolator { .. } => None,
        }
    }
}

/// Find a perfect matching of `xs` into `ys` using only host edges pointing
/// in direction `dir`, or report a Hall-condition violator.
///
/// `xs` and `ys` must be disjoint, duplicate-free, equal-length lists of host
/// vertices. The augmenting-path search scans vertices in ascending order, so
/// the result is deterministic. On failure the returned `subset` S satisfies
/// |N(S) ∩ ys| = |S| − 1, certifying that no perfect matching exists.
pub fn perfect_matching(
    g: &Tournament,
    xs: &[usize],
    ys: &[usize],
    dir: MatchDirection,
) -> Result<MatchingOutcome> {
    if xs.len() != ys.len() {
        return Err(Error::param(format!(
            "matching sides differ in size: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let mut seen = VertSet::empty(g.n());
    for &v in xs.iter().chain(ys.iter()) {
        if v >= g.n() {
            return Err(Error::param(format!(
                "matching side contains vertex {v}, outside the host (n = {})",
                g.n()
            )));
        }
        if seen.contains(v) {
            return Err(Error::param(format!(
                "matching sides reuse host vertex {v}"
            )));
        }
        seen.insert(v);
    }

    // Work in index space: adj[i] = sorted indices j with an edge from xs[i]
    // to ys[j] in the required direction.
    let adj: Vec<Vec<usize>> = xs
        .iter()
        .map(|&x| {
            let fwd = match dir {
                MatchDirection::XToY => g.out_set(x),
                MatchDirection::YToX => g.in_set(x),
            };
            ys.iter()
                .enumerate()
                .filter_map(|(j, &y)| fwd.contains(y).then_some(j))
                .collect()
        })
        .collect();

    let m = xs.len();
    let mut match_y: Vec<Option<usize>> = vec![None; m]; // y index -> x index
    let mut match_x: Vec<Option<usize>> = vec![None; m]; // x index -> y index

    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        visited_y: &mut [bool],
        match_y: &mut [Option<usize>],
        match_x: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if !visited_y[j] {
                visited_y[j] = true;
                let free = match match_y[j] {
                    None => true,
                    Some(i2) => augment(i2, adj, visited_y, match_y, match_x),
                };
                if free {
                    match_y[j] = Some(i);
                    match_x[i] = Some(j);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..m {
        let mut visited_y = vec![false; m];
        if !augment(i, &adj, &mut visited_y, &mut match_y, &mut match_x) {
            // Hall violator: the failed x together with the matched partners
            // of every y reached in the final alternating search. Its joint
            // neighbourhood is exactly the visited y's, one fewer than |S|.
            let mut subset = VertSet::empty(g.n());
            let mut neighbourhood = VertSet::empty(g.n());
            subset.insert(xs[i]);
            for (j, &vis) in visited_y.iter().enumerate() {
                if vis {
                    neighbourhood.insert(ys[j]);
                    let owner = match_y[j].expect("visited unmatched y would have augmented");
                    subset.insert(xs[owner]);
                }
            }
            debug_assert_eq!(neighbourhood.len() + 1, subset.len());
            return Ok(MatchingOutcome::HallViolator { subset, neighbourhood });
        }
    }

    let mut pairs: Vec<(usize, usize)> = match_x
        .iter()
        .enumerate()
        .map(|(i, j)| (xs[i], ys[j.expect("all matched")]))
        .collect();
    pairs.sort_unstable();
    Ok(MatchingOutcome::Perfect(pairs))
}

/// Check that `pairs` is a perfect matching of `xs` into `ys` along `dir`.
pub fn validate_matching(
    g: &Tournament,
    xs: &[usize],
    ys: &[usize],
    dir: MatchDirection,
    pairs: &[(usize, usize)],
) -> Result<()> {
    if pairs.len() != xs.len() || pairs.len() != ys.len() {
        return Err(Error::param("matching does not cover both sides"));
    }
    let xset = VertSet::from_iter_n(g.n(), xs.iter().copied());
    let yset = VertSet::from_iter_n(g.n(), ys.iter().copied());
    let mut used_x = VertSet::empty(g.n());
    let mut used_y = VertSet::empty(g.n());
    for &(x, y) in pairs {
        if !xset.contains(x) || !yset.contains(y) {
            return Err(Error::param(format!("pair ({x}, {y}) leaves the sides")));
        }
        if used_x.contains(x) || used_y.contains(y) {
            return Err(Error::param(format!("pair ({x}, {y}) reuses a vertex")));
        }
        used_x.insert(x);
        used_y.insert(y);
        let ok = match dir {
            MatchDirection::XToY => g.has_edge(x, y),
            MatchDirection::YToX => g.has_edge(y, x),
        };
        if !ok {
            return Err(Error::param(format!(
                "pair ({x}, {y}) is not an edge in the required direction"
            )));
        }
    }
    Ok(())
}
