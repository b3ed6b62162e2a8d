//! Greedy embedding of a directed pair of tree parts into two host sets.

use super::backtrack::{backtrack_embed, EmbedConstraints, SearchOutcome};
use super::{Embedding, PipelineOutcome};
use crate::bitset::VertSet;
use crate::digraph::Tournament;
use crate::otree::OrientedTree;
use crate::{Error, Result, StageFailure};

/// Parameters for [`greedy_pair_embed`].
#[derive(Debug, Clone)]
pub struct GreedyPairParams {
    /// Required slack on each side: `|U| >= |A| + margin` and
    /// `|W| >= |B| + margin` must hold before the search starts.
    pub margin: usize,
    /// If set, every vertex of `U` may have at most this many in-neighbours
    /// in `W`, and every vertex of `W` at most this many out-neighbours in
    /// `U` (checked up front).
    pub max_reverse: Option<usize>,
    /// Backtracking budget per component (assignment attempts).
    pub node_budget: Option<u64>,
}

impl Default for GreedyPairParams {
    fn default() -> Self {
        GreedyPairParams {
            margin: 0,
            max_reverse: None,
            node_budget: Some(2_000_000),
        }
    }
}

/// Embed the tree `t`, split into a directed pair `(a, b)` (every tree edge
/// between the parts points from `a` to `b`), into disjoint host sets
/// `(u, w)`, mapping `a` into `u` and `b` into `w`.
///
/// The forest `T[a] ∪ T[b]` is embedded component by component in ancestral
/// order of the contracted tree (components as nodes, cross edges as edges),
/// rooted at the component containing tree vertex 0. Each component goes into
/// its side's remaining free vertices, with the single vertex attached to an
/// already-embedded component additionally restricted to the appropriate
/// neighbourhood of its anchor's image. Components are solved exactly by
/// backtracking, so a stage failure means the component genuinely does not
/// fit the remaining free set (or the budget ran out).
pub fn greedy_pair_embed(
    t: &OrientedTree,
    a: &[usize],
    b: &[usize],
    g: &Tournament,
    u: &VertSet,
    w: &VertSet,
    params: &GreedyPairParams,
) -> Result<PipelineOutcome> {
    let n = t.n();
    // side[v] = 0 for a, 1 for b; together they must partition the tree.
    let mut side = vec![usize::MAX; n];
    for (tag, list) in [(0usize, a), (1usize, b)] {
        for &v in list {
            if v >= n {
                return Err(Error::param(format!(
                    "part contains vertex {v}, but the tree has {n} vertices"
                )));
            }
            if side[v] != usize::MAX {
                return Err(Error::param(format!(
                    "tree vertex {v} appears in both parts (or twice in one)"
                )));
            }
            side[v] = tag;
        }
    }
    if let Some(miss) = side.iter().position(|&s| s == usize::MAX) {
        return Err(Error::param(format!(
            "tree vertex {miss} is in neither part"
        )));
    }
    if u.capacity() != g.n() || w.capacity() != g.n() {
        return Err(Error::param("host sets must have capacity n(G)"));
    }
    if u.intersection_len(w) != 0 {
        return Err(Error::param("host sets U and W must be disjoint"));
    }
    for &(x, y) in t.edges() {
        if side[x] == 1 && side[y] == 0 {
            return Err(Error::param(format!(
                "(a, b) is not a directed pair: tree edge {x} -> {y} points from b to a"
            )));
        }
    }
    if u.len() < a.len() + params.margin {
        return Err(Error::param(format!(
            "|U| = {} is below |A| + margin = {}",
            u.len(),
            a.len() + params.margin
        )));
    }
    if w.len() < b.len() + params.margin {
        return Err(Error::param(format!(
            "|W| = {} is below |B| + margin = {}",
            w.len(),
            b.len() + params.margin
        )));
    }
    if let Some(cap) = params.max_reverse {
        for v in u.iter() {
            let rev = g.in_deg_in(v, w);
            if rev > cap {
                return Err(Error::param(format!(
                    "vertex {v} of U has {rev} in-neighbours in W, above the cap {cap}"
                )));
            }
        }
        for v in w.iter() {
            let rev = g.out_deg_in(v, u);
            if rev > cap {
                return Err(Error::param(format!(
                    "vertex {v} of W has {rev} out-neighbours in U, above the cap {cap}"
                )));
            }
        }
    }

    // Components of the forest obtained by keeping same-side tree edges.
    let mut comp = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for v0 in 0..n {
        if comp[v0] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut stack = vec![v0];
        let mut members = Vec::new();
        comp[v0] = id;
        while let Some(x) = stack.pop() {
            members.push(x);
            for &(y, _) in t.neighbours(x) {
                if side[y] == side[x] && comp[y] == usize::MAX {
                    comp[y] = id;
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }

    // Contracted tree on components, via the cross edges. Each cross edge
    // (x, y) records, for whichever endpoint's component is entered later,
    // the anchor on the other side.
    let mut cross_adj: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); components.len()];
    for &(x, y) in t.edges() {
        if side[x] != side[y] {
            cross_adj[comp[x]].push((comp[y], x, y));
            cross_adj[comp[y]].push((comp[x], x, y));
        }
    }

    // Ancestral (BFS) order of components from the one containing vertex 0;
    // children in ascending order of their smallest vertex.
    let root = comp[0];
    let mut order: Vec<usize> = Vec::with_capacity(components.len());
    // connector[c] = (anchor tree vertex in the parent component, local tree
    // vertex in c, true when the edge is anchor -> local).
    let mut connector: Vec<Option<(usize, usize, bool)>> = vec![None; components.len()];
    let mut visited = vec![false; components.len()];
    visited[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        order.push(c);
        let mut children: Vec<(usize, usize, usize)> = cross_adj[c]
            .iter()
            .copied()
            .filter(|&(d, _, _)| !visited[d])
            .collect();
        children.sort_by_key(|&(d, _, _)| components[d][0]);
        for (d, x, y) in children {
            if visited[d] {
                continue; // two cross edges to one component cannot happen in a tree
            }
            visited[d] = true;
            let (anchor, local) = if comp[x] == c { (x, y) } else { (y, x) };
            // edge_between(anchor, local) = Some(true) iff anchor -> local.
            let outgoing = t.edge_between(anchor, local).expect("cross edge endpoints");
            connector[d] = Some((anchor, local, outgoing));
            queue.push_back(d);
        }
    }
    debug_assert_eq!(order.len(), components.len());

    let mut emb = Embedding::new(n);
    let mut free = [u.clone(), w.clone()];
    for &c in &order {
        let members = &components[c];
        let s = side[members[0]];
        let (sub, back) = t.induced(members)?;
        // back[new] = old; invert for constraint lookup.
        let mut new_of = std::collections::HashMap::new();
        for (new, &old) in back.iter().enumerate() {
            new_of.insert(old, new);
        }
        let mut cons = EmbedConstraints::new();
        for new in 0..sub.n() {
            cons = cons.allow(new, free[s].clone());
        }
        if let Some((anchor, local, outgoing)) = connector[c] {
            let ha = emb.get(anchor).expect("parent component already embedded");
            let nbrs = if outgoing { g.out_set(ha) } else { g.in_set(ha) };
            let local_new = new_of[&local];
            cons = cons.allow(local_new, free[s].intersection(nbrs));
        }
        match backtrack_embed(&sub, g, &cons, params.node_budget)? {
            SearchOutcome::Found(sub_emb) => {
                for (new, h) in sub_emb.assigned() {
                    emb.set(back[new], h);
                    free[s].remove(h);
                }
            }
            outcome => {
                let detail = match outcome {
                    SearchOutcome::Exhausted => {
                        "component does not embed in the remaining free vertices of its side"
                    }
                    _ => "node budget exhausted while embedding a component",
                };
                return Ok(PipelineOutcome::Failed(
                    StageFailure::new("greedy-pair-embed", detail)
                        .count("component_min_vertex", members[0] as i64)
                        .count("component_size", members.len() as i64)
                        .count("side", s as i64)
                        .count("free_on_side", free[s].len() as i64),
                ));
            }
        }
    }

    super::validate_embedding(t, g, &emb)?;
    Ok(PipelineOutcome::Embedded(emb))
}
