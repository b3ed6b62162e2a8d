//! Splitting a tree two ways: `tree_partition` cuts it into two subtrees
//! sharing one vertex with a balanced spread of a marked set, and
//! `nice_split` produces a directed pair of vertex classes.

use super::OrientedTree;
use crate::{Error, Result};

/// A subtree in the labels of its parent tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subtree {
    /// Vertices, ascending.
    pub vertices: Vec<usize>,
    /// Oriented edges, a subset of the parent tree's.
    pub edges: Vec<(usize, usize)>,
}

impl Subtree {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Materialize as a standalone tree plus the new→old label map.
    pub fn to_tree(&self, parent: &OrientedTree) -> Result<(OrientedTree, Vec<usize>)> {
        parent.induced(&self.vertices)
    }

    fn from_vertices(t: &OrientedTree, mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        let edges: Vec<(usize, usize)> = t
            .edges()
            .iter()
            .filter(|&&(a, b)| {
                vertices.binary_search(&a).is_ok() && vertices.binary_search(&b).is_ok()
            })
            .copied()
            .collect();
        Subtree { vertices, edges }
    }
}

/// Two edge-disjoint subtrees covering the tree and meeting in one vertex,
/// with `t1` the smaller side. Both contain at least a third of the marked
/// set.
#[derive(Debug, Clone)]
pub struct TreePartition {
    pub t1: Subtree,
    pub t2: Subtree,
    pub shared: usize,
}

/// Split `t` into two subtrees sharing one vertex so that each side holds
/// at least `|L|/3` vertices of the marked set `L`.
///
/// Construction: call a neighbour `u` of `v` heavy when the component of
/// `T−v` containing `u` holds at least `|L|/3` marked vertices. An edge
/// heavy in both directions splits the tree at one endpoint. Otherwise some
/// vertex has no heavy neighbour, and a prefix of its components (every one
/// light) can be grouped to land in the `[|L|/3, 2|L|/3]` window.
pub fn tree_partition(t: &OrientedTree, marked: &[usize]) -> Result<TreePartition> {
    let n = t.n();
    let mut is_marked = vec![false; n];
    for &v in marked {
        if v >= n {
            return Err(Error::param(format!("marked vertex {v} out of range")));
        }
        if is_marked[v] {
            return Err(Error::param(format!("marked vertex {v} repeated")));
        }
        is_marked[v] = true;
    }
    let ell = marked.len();
    if ell == 0 {
        return Err(Error::param("the marked set must be nonempty"));
    }
    if ell == 1 || n == 1 {
        // the whole tree versus the single-vertex subtree at a marked vertex
        let lv = marked[0];
        let t1 = Subtree { vertices: vec![lv], edges: vec![] };
        let t2 = Subtree::from_vertices(t, (0..n).collect());
        return Ok(TreePartition { t1, t2, shared: lv });
    }

    // marked count of every edge-side: root at 0, down[v] = marked count of
    // v's rooted subtree; the side of an edge away from the root is down[],
    // the side towards the root is ell − down[]
    let parent = t.parents(0)?;
    let order = t.ancestral_ordering(0)?;
    let mut down = vec![0usize; n];
    for &v in order.iter().rev() {
        down[v] += is_marked[v] as usize;
        if let Some(p) = parent[v] {
            down[p] += down[v];
        }
    }
    // marked count of the component of `u` in T − v, for a neighbour u of v
    let side_count = |v: usize, u: usize| -> usize {
        if parent[u] == Some(v) {
            down[u]
        } else {
            debug_assert_eq!(parent[v], Some(u));
            ell - down[v]
        }
    };
    let heavy = |v: usize, u: usize| 3 * side_count(v, u) >= ell;

    // doubly-heavy edge: split there, sharing the smaller endpoint
    for &(a, b) in t.edges() {
        let (a, b) = (a.min(b), a.max(b));
        if heavy(b, a) && heavy(a, b) {
            // the component of b in T−a plus a (the cut edge comes along,
            // both endpoints being present) versus the component of a in T−b
            let comp_b = component_without(t, b, a);
            let comp_a = component_without(t, a, b);
            let mut with_a = comp_b;
            with_a.push(a);
            let t1 = Subtree::from_vertices(t, with_a);
            let t2 = Subtree::from_vertices(t, comp_a);
            return Ok(order_partition(t1, t2, a));
        }
    }

    // otherwise: smallest vertex with no heavy neighbour
    let v = (0..n)
        .find(|&v| t.neighbours(v).iter().all(|&(u, _)| !heavy(v, u)))
        .expect("without a doubly-heavy edge some vertex has no heavy neighbour");
    // components of T−v, ordered by smallest contained label (BFS from each
    // neighbour in ascending order yields exactly that)
    let comps: Vec<Vec<usize>> = t
        .neighbours(v)
        .iter()
        .map(|&(u, _)| component_without(t, u, v))
        .collect();
    // greedy prefix: stop as soon as the prefix side (plus v) holds ≥ ℓ/3
    // marked vertices; every component is light, so the prefix cannot
    // overshoot past 2ℓ/3 and the suffix side keeps ≥ ℓ/3
    let mut prefix_marked = is_marked[v] as usize;
    let mut prefix: Vec<usize> = vec![v];
    let mut rest: Vec<usize> = vec![v];
    let mut split_done = 0usize;
    for comp in &comps {
        if 3 * prefix_marked >= ell {
            rest.extend(comp.iter().copied());
        } else {
            prefix_marked += comp.iter().filter(|&&w| is_marked[w]).count();
            prefix.extend(comp.iter().copied());
            split_done += 1;
        }
    }
    debug_assert!(split_done < comps.len() || 3 * (ell - (prefix_marked - is_marked[v] as usize)) >= ell);
    let t1 = Subtree::from_vertices(t, prefix);
    let t2 = Subtree::from_vertices(t, rest);
    Ok(order_partition(t1, t2, v))
}

/// Smaller side first; on equal sizes the lexicographically smaller vertex
/// list.
fn order_partition(t1: Subtree, t2: Subtree, shared: usize) -> TreePartition {
    let keep = t1.len() < t2.len() || (t1.len() == t2.len() && t1.vertices <= t2.vertices);
    if keep {
        TreePartition { t1, t2, shared }
    } else {
        TreePartition { t1: t2, t2: t1, shared }
    }
}

/// Vertices of the component of `start` in `T − removed`.
fn component_without(t: &OrientedTree, start: usize, removed: usize) -> Vec<usize> {
    let mut seen = vec![false; t.n()];
    seen[removed] = true;
    seen[start] = true;
    let mut stack = vec![start];
    let mut comp = vec![start];
    while let Some(w) = stack.pop() {
        for &(x, _) in t.neighbours(w) {
            if !seen[x] {
                seen[x] = true;
                comp.push(x);
                stack.push(x);
            }
        }
    }
    comp
}

/// Check every invariant of a tree partition: vertex cover, edge partition,
/// single shared vertex, both sides connected subtrees, and the `|L|/3`
/// floor on each side.
pub fn validate_tree_partition(
    t: &OrientedTree,
    marked: &[usize],
    part: &TreePartition,
) -> Result<()> {
    let ell = marked.len();
    for (name, sub) in [("t1", &part.t1), ("t2", &part.t2)] {
        if !sub.contains(part.shared) {
            return Err(Error::format(format!("{name} misses the shared vertex")));
        }
        if sub.len() >= 2 {
            // connectivity + edge-count check via the induced constructor
            let (tree, map) = sub.to_tree(t)?;
            let mapped: Vec<(usize, usize)> = tree
                .edges()
                .iter()
                .map(|&(a, b)| (map[a], map[b]))
                .collect();
            let mut got = sub.edges.clone();
            got.sort_unstable_by_key(|&(a, b)| (a.min(b), a.max(b)));
            if mapped != got {
                return Err(Error::format(format!("{name} edge set mismatch")));
            }
        } else if !sub.edges.is_empty() {
            return Err(Error::format(format!("{name} has edges but one vertex")));
        }
        let marked_inside = marked.iter().filter(|&&v| sub.contains(v)).count();
        if 3 * marked_inside < ell {
            return Err(Error::format(format!(
                "{name} holds {marked_inside} marked vertices, below {ell}/3"
            )));
        }
    }
    // vertex cover and uniqueness of the shared vertex
    let mut count = vec![0u8; t.n()];
    for sub in [&part.t1, &part.t2] {
        for &v in &sub.vertices {
            count[v] += 1;
        }
    }
    for (v, &c) in count.iter().enumerate() {
        let want = if v == part.shared { 2 } else { 1 };
        if c != want {
            return Err(Error::format(format!(
                "vertex {v} appears {c} times across the partition"
            )));
        }
    }
    // edge partition
    let mut all_edges: Vec<(usize, usize)> =
        part.t1.edges.iter().chain(&part.t2.edges).copied().collect();
    all_edges.sort_unstable_by_key(|&(a, b)| (a.min(b), a.max(b)));
    if all_edges != t.edges() {
        return Err(Error::format("subtree edges do not partition the tree".to_string()));
    }
    if part.t1.len() > part.t2.len()
        || (part.t1.len() == part.t2.len() && part.t1.vertices > part.t2.vertices)
    {
        return Err(Error::format("t1 must be the smaller side".to_string()));
    }
    Ok(())
}

/// Split the vertex set into a directed pair `(A, B)` of given sizes:
/// `|A| = a`, `|B| = b`, no edge from `B` to `A`, with every given
/// in-subtree inside `A` and every out-subtree inside `B`.
///
/// Seed `A` with the in-subtrees, then repeatedly add the smallest vertex
/// outside `A` and the out-subtrees whose in-neighbours all lie in `A`.
/// In-subtrees receive no outside edges except their outgoing attach edge,
/// and out-subtrees send none out, so such a vertex always exists while
/// `|A| < a`.
pub fn nice_split(
    t: &OrientedTree,
    in_subtrees: &[Vec<usize>],
    out_subtrees: &[Vec<usize>],
    a: usize,
    b: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = t.n();
    if a + b != n {
        return Err(Error::param(format!("a + b = {} must equal n = {n}", a + b)));
    }
    let mut claimed = vec![false; n];
    let mut in_a = vec![false; n];
    let mut banned = vec![false; n];
    let mut total_in = 0usize;
    let mut total_out = 0usize;
    for (vertices, is_in) in in_subtrees
        .iter()
        .map(|s| (s, true))
        .chain(out_subtrees.iter().map(|s| (s, false)))
    {
        validate_pendant_subtree(t, vertices, is_in)?;
        for &v in vertices {
            if claimed[v] {
                return Err(Error::param(format!("subtrees overlap at vertex {v}")));
            }
            claimed[v] = true;
            if is_in {
                in_a[v] = true;
                total_in += 1;
            } else {
                banned[v] = true;
                total_out += 1;
            }
        }
    }
    if a < total_in {
        return Err(Error::param(format!(
            "a = {a} is below the {total_in} in-subtree vertices"
        )));
    }
    if b < total_out {
        return Err(Error::param(format!(
            "b = {b} is below the {total_out} out-subtree vertices"
        )));
    }

    let mut size_a = total_in;
    while size_a < a {
        let next = (0..n).find(|&v| {
            !in_a[v]
                && !banned[v]
                && t.neighbours(v)
                    .iter()
                    .all(|&(u, outgoing)| outgoing || in_a[u])
        });
        let Some(v) = next else {
            return Err(Error::param(
                "no eligible vertex to grow A — subtree preconditions violated".to_string(),
            ));
        };
        in_a[v] = true;
        size_a += 1;
    }
    let set_a: Vec<usize> = (0..n).filter(|&v| in_a[v]).collect();
    let set_b: Vec<usize> = (0..n).filter(|&v| !in_a[v]).collect();
    // the pair must be directed: no edge from B into A
    debug_assert!(t
        .edges()
        .iter()
        .all(|&(tail, head)| !(in_a[head] && !in_a[tail])));
    Ok((set_a, set_b))
}

/// A pendant subtree hangs off the rest by exactly one edge; for an
/// in-subtree that edge leaves it, for an out-subtree it enters.
fn validate_pendant_subtree(t: &OrientedTree, vertices: &[usize], is_in: bool) -> Result<()> {
    if vertices.is_empty() {
        return Err(Error::param("empty subtree in split specification"));
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != vertices.len() {
        return Err(Error::param("subtree lists a vertex twice"));
    }
    if sorted.len() < t.n() {
        t.induced(&sorted)?; // connectivity check
    } else {
        return Err(Error::param("a pendant subtree cannot be the whole tree"));
    }
    let mut boundary = Vec::new();
    for &v in &sorted {
        for &(u, outgoing) in t.neighbours(v) {
            if sorted.binary_search(&u).is_err() {
                boundary.push(outgoing);
            }
        }
    }
    match boundary.as_slice() {
        [outgoing] => {
            if *outgoing != is_in {
                Err(Error::param(format!(
                    "attach edge of {:?} points the wrong way for an {}-subtree",
                    sorted,
                    if is_in { "in" } else { "out" }
                )))
            } else {
                Ok(())
            }
        }
        _ => Err(Error::param(format!(
            "subtree {sorted:?} has {} boundary edges, need exactly 1",
            boundary.len()
        ))),
    }
}
