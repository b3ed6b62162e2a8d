//! Ground-truth containment by exhaustive search: unavoidability sweeps
//! over every tournament of a tree's order, the smallest guaranteed host
//! size, the double-star blocker construction, and a census of all small
//! oriented trees.
//!
//! Sweeps run over canonical isomorphism-class representatives (one
//! backtracking search per class instead of per labelled tournament) and
//! always report the first avoiding class in ascending code order, so
//! parallel and sequential runs agree. A sampled mode covers orders too
//! large to enumerate; it can exhibit an avoiding witness but never
//! certifies unavoidability.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::digraph::{canonical_codes, circulant, random_tournament, Tournament};
use crate::embed::{backtrack_embed, EmbedConstraints, SearchOutcome};
use crate::exec::{map_indexed, ExecMode};
use crate::otree::{double_star, pendant_star_census, OrientedTree};
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Does `g` contain a copy of `t`? Exact, by unbudgeted backtracking.
pub fn contains_copy(t: &OrientedTree, g: &Tournament) -> Result<bool> {
    if t.n() > g.n() {
        return Ok(false);
    }
    match backtrack_embed(t, g, &EmbedConstraints::new(), None)? {
        SearchOutcome::Found(_) => Ok(true),
        SearchOutcome::Exhausted => Ok(false),
        SearchOutcome::BudgetExceeded => unreachable!("no node budget was set"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnavoidabilityVerdict {
    /// Every tournament on `host_size` vertices contains the tree.
    Unavoidable,
    /// Some tournament on `host_size` vertices contains no copy.
    Avoidable,
    /// Sampled mode only: no avoiding tournament was found, which proves
    /// nothing about the ones not sampled.
    NoCounterexampleFound,
}

/// Outcome of an unavoidability sweep at a fixed host order.
#[derive(Debug, Clone)]
pub struct UnavoidabilityReport {
    pub host_size: usize,
    pub verdict: UnavoidabilityVerdict,
    /// An avoiding tournament when the verdict is `Avoidable`; re-checked
    /// to contain no copy before being returned.
    pub witness: Option<Tournament>,
}

/// The first canonical representative on `n` vertices containing no copy
/// of `t`, in ascending code order, or `None` when every class contains
/// one. The scan parallelizes over classes; the winner is order-fixed.
fn first_avoider(t: &OrientedTree, n: usize, mode: ExecMode) -> Result<Option<Tournament>> {
    let codes = canonical_codes(n, mode, false)?;
    let outcomes = map_indexed(mode, codes.len(), |i| {
        let g = Tournament::from_code(n, codes[i]);
        contains_copy(t, &g)
    });
    for (i, contained) in outcomes.into_iter().enumerate() {
        if !contained? {
            return Ok(Some(Tournament::from_code(n, codes[i])));
        }
    }
    Ok(None)
}

/// Exhaustive unavoidability of `t` among tournaments of its own order:
/// sweep every isomorphism class with backtracking and return the first
/// avoiding tournament as witness, if any. Orders above the enumeration
/// limit are refused; use [`is_unavoidable_sampled`] there.
pub fn is_unavoidable(t: &OrientedTree, mode: ExecMode) -> Result<UnavoidabilityReport> {
    let n = t.n();
    let witness = first_avoider(t, n, mode)?;
    if let Some(g) = &witness {
        debug_assert!(!contains_copy(t, g)?);
    }
    Ok(UnavoidabilityReport {
        host_size: n,
        verdict: if witness.is_some() {
            UnavoidabilityVerdict::Avoidable
        } else {
            UnavoidabilityVerdict::Unavoidable
        },
        witness,
    })
}

/// One-sided sampled sweep for orders too large to enumerate: test
/// `samples` seeded random tournaments on `|t|` vertices. Finding an
/// avoider is conclusive (`Avoidable`, with the witness); finding none is
/// reported as exactly that, never as unavoidability.
pub fn is_unavoidable_sampled(
    t: &OrientedTree,
    samples: u64,
    seed: u64,
) -> Result<UnavoidabilityReport> {
    let n = t.n();
    for s in 0..samples {
        let g = random_tournament(n, derive_seed(seed, s));
        if !contains_copy(t, &g)? {
            return Ok(UnavoidabilityReport {
                host_size: n,
                verdict: UnavoidabilityVerdict::Avoidable,
                witness: Some(g),
            });
        }
    }
    Ok(UnavoidabilityReport {
        host_size: n,
        verdict: UnavoidabilityVerdict::NoCounterexampleFound,
        witness: None,
    })
}

/// Result of a brute-force search for the smallest guaranteed host size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GBound {
    /// The smallest order at which every tournament contains the tree.
    Exactly(usize),
    /// Every checked order up to the cap has an avoiding tournament.
    GreaterThan(usize),
}

/// Smallest `N <= n_max` such that every tournament on `N` vertices
/// contains `t`, by exhaustive sweeps at each order from `|t|` upward.
/// Containment at order `N` implies it at `N + 1` (restrict any larger
/// tournament to `N` vertices), so the first all-containing order is the
/// answer. Orders above the enumeration limit are refused.
pub fn g_bruteforce(t: &OrientedTree, n_max: usize, mode: ExecMode) -> Result<GBound> {
    for n in t.n()..=n_max {
        if first_avoider(t, n, mode)?.is_none() {
            return Ok(GBound::Exactly(n));
        }
    }
    Ok(GBound::GreaterThan(n_max))
}

/// A double-star tree together with a tournament that blocks it.
#[derive(Debug, Clone)]
pub struct DoubleStarFixture {
    pub tree: OrientedTree,
    pub blocker: Tournament,
}

/// The rotational regular tournament on an odd number of vertices:
/// `i` beats the next `(m−1)/2` labels cyclically.
fn regular_rotational(m: usize) -> Result<Tournament> {
    if m == 1 {
        return Ok(Tournament::from_orientation(1, |_, _| true));
    }
    let offsets: Vec<usize> = (1..=m / 2).collect();
    circulant(m, &offsets)
}

/// Build the double-star tree on `a + b + c` vertices together with its
/// blocker: parts `A`, `B`, `C` of sizes `2a−1`, `b−1`, `2c−1`, regular
/// tournaments on `A` and `C`, a transitive `B`, and all remaining edges
/// directed from `A` to `B`, from `B` to `C`, or from `A` to `C`. Each
/// vertex of `A` has only `a−1` in-neighbours and each vertex of `C` only
/// `c−1` out-neighbours, while `|B| < b`, so the blocker contains no copy
/// of the tree even though it has `2(a+b+c) − b − 3` vertices; the
/// returned blocker is re-verified copy-free by exhaustive backtracking.
pub fn double_star_fixture(a: usize, b: usize, c: usize) -> Result<DoubleStarFixture> {
    let tree = double_star(a, b, c)?;
    let (sa, sb) = (2 * a - 1, b - 1);
    let sc = 2 * c - 1;
    let n = sa + sb + sc;
    let reg_a = regular_rotational(sa)?;
    let reg_c = regular_rotational(sc)?;
    let part = |v: usize| {
        if v < sa {
            0
        } else if v < sa + sb {
            1
        } else {
            2
        }
    };
    let blocker = Tournament::from_orientation(n, |i, j| match (part(i), part(j)) {
        (0, 0) => reg_a.has_edge(i, j),
        (2, 2) => reg_c.has_edge(i - sa - sb, j - sa - sb),
        (1, 1) => true,
        (pi, pj) => pi < pj,
    });
    if contains_copy(&tree, &blocker)? {
        return Err(Error::format(
            "double-star blocker unexpectedly contains the tree",
        ));
    }
    Ok(DoubleStarFixture { tree, blocker })
}

/// One isomorphism class of oriented trees, classified.
#[derive(Debug, Clone)]
pub struct CensusEntry {
    /// The class representative, relabelled to its canonical form.
    pub tree: OrientedTree,
    /// Canonical edge list as a stable id string, e.g. `"0>1;2>1"`.
    pub canonical_id: String,
    /// Largest niceness rate the tree certifies.
    pub alpha_max: f64,
    pub report: UnavoidabilityReport,
}

/// Canonical form of an oriented tree: the lexicographically smallest
/// sorted edge list over all relabelings. Factorial in `n` — meant for the
/// census orders only.
fn canonical_tree_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut img: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        img.sort_unstable();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
        // next permutation in lexicographic order
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best.unwrap_or_default()
}

/// Every oriented tree on `n <= 6` vertices up to isomorphism, classified
/// by unavoidability at its own order and by its niceness ceiling.
/// Enumeration: all labelled trees from Prüfer sequences, each edge
/// oriented both ways, deduplicated by canonical form. Entries are sorted
/// by canonical edge list, so runs and execution modes agree exactly.
pub fn oriented_tree_census(n: usize, mode: ExecMode) -> Result<Vec<CensusEntry>> {
    if n < 1 || n > 6 {
        return Err(Error::param(format!(
            "census covers 1 <= n <= 6, got {n}"
        )));
    }
    let mut classes: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    if n == 1 {
        classes.insert(Vec::new());
    } else {
        let seqs = if n == 2 { 1 } else { n.pow(n as u32 - 2) };
        for s in 0..seqs {
            let mut code = s;
            let seq: Vec<usize> = (0..n - 2)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect();
            let shape = crate::otree::from_prufer(&seq)?;
            for orient in 0u32..1 << (n - 1) {
                let edges: Vec<(usize, usize)> = shape
                    .iter()
                    .enumerate()
                    .map(|(i, &(u, v))| if orient >> i & 1 == 0 { (u, v) } else { (v, u) })
                    .collect();
                classes.insert(canonical_tree_edges(n, &edges));
            }
        }
    }
    let reps: Vec<Vec<(usize, usize)>> = classes.into_iter().collect();
    let entries = map_indexed(mode, reps.len(), |i| -> Result<CensusEntry> {
        let tree = OrientedTree::new(n, reps[i].clone())?;
        let report = is_unavoidable(&tree, ExecMode::Sequential)?;
        let canonical_id = reps[i]
            .iter()
            .map(|&(u, v)| format!("{u}>{v}"))
            .collect::<Vec<_>>()
            .join(";");
        Ok(CensusEntry {
            alpha_max: pendant_star_census(&tree).alpha_max,
            tree,
            canonical_id,
            report,
        })
    });
    entries.into_iter().collect()
}

/// Census as CSV with columns
/// `n,tree_canonical_id,edges,alpha_max,verdict,witness_bits`
/// (`witness_bits` empty for unavoidable trees).
pub fn census_to_csv(entries: &[CensusEntry]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "tree_canonical_id",
        "edges",
        "alpha_max",
        "verdict",
        "witness_bits",
    ])?;
    for e in entries {
        let verdict = match e.report.verdict {
            UnavoidabilityVerdict::Unavoidable => "unavoidable",
            UnavoidabilityVerdict::Avoidable => "avoidable",
            UnavoidabilityVerdict::NoCounterexampleFound => "no-counterexample-found",
        };
        let witness = e
            .report
            .witness
            .as_ref()
            .map(|g| g.to_hex_bits())
            .unwrap_or_default();
        w.write_record([
            e.tree.n().to_string(),
            e.canonical_id.clone(),
            (e.tree.n() - 1).to_string(),
            format!("{}", e.alpha_max),
            verdict.to_string(),
            witness,
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::canonical_code;
    use crate::otree::{antidirected_path, directed_path, out_star};

    #[test]
    fn directed_paths_are_unavoidable() {
        for n in 2..=5 {
            let t = directed_path(n).unwrap();
            let r = is_unavoidable(&t, ExecMode::Sequential).unwrap();
            assert_eq!(r.verdict, UnavoidabilityVerdict::Unavoidable, "n={n}");
        }
    }

    #[test]
    fn antidirected_path_on_three_is_blocked_by_the_cycle() {
        let t = antidirected_path(3).unwrap();
        let r = is_unavoidable(&t, ExecMode::Sequential).unwrap();
        assert_eq!(r.verdict, UnavoidabilityVerdict::Avoidable);
        let w = r.witness.unwrap();
        let cycle = circulant(3, &[1]).unwrap();
        assert_eq!(canonical_code(&w), canonical_code(&cycle));
        assert!(!contains_copy(&t, &w).unwrap());
    }

    #[test]
    fn out_star_on_three_is_avoidable_with_cycle_witness() {
        // the out-star needs a vertex of out-degree 2; the 3-cycle has none
        let t = out_star(3).unwrap();
        let r = is_unavoidable(&t, ExecMode::Sequential).unwrap();
        assert_eq!(r.verdict, UnavoidabilityVerdict::Avoidable);
        let w = r.witness.unwrap();
        assert_eq!(
            canonical_code(&w),
            canonical_code(&circulant(3, &[1]).unwrap())
        );
    }

    #[test]
    fn g_values_for_small_shapes() {
        // out-star on 3: blocked at 3 by the cycle, forced at 4
        let s = out_star(3).unwrap();
        assert_eq!(
            g_bruteforce(&s, 7, ExecMode::Sequential).unwrap(),
            GBound::Exactly(4)
        );
        // unavoidable tree: the bound equals its order
        let p = directed_path(4).unwrap();
        assert_eq!(
            g_bruteforce(&p, 7, ExecMode::Sequential).unwrap(),
            GBound::Exactly(4)
        );
        // antidirected path on 5: avoidable at 5, forced at 6
        let q = antidirected_path(5).unwrap();
        assert_eq!(
            g_bruteforce(&q, 7, ExecMode::auto()).unwrap(),
            GBound::Exactly(6)
        );
        // cap below the answer reports a lower bound
        assert_eq!(
            g_bruteforce(&q, 5, ExecMode::Sequential).unwrap(),
            GBound::GreaterThan(5)
        );
    }

    #[test]
    fn sampled_mode_never_claims_unavoidability() {
        let t = directed_path(9).unwrap();
        let r = is_unavoidable_sampled(&t, 50, 11).unwrap();
        assert_eq!(r.verdict, UnavoidabilityVerdict::NoCounterexampleFound);
        assert!(r.witness.is_none());

        // the out-star on 3 is avoided by the 3-cycle, which random
        // sampling finds quickly (2 of the 8 labelled tournaments)
        let s = out_star(3).unwrap();
        let r = is_unavoidable_sampled(&s, 50, 11).unwrap();
        assert_eq!(r.verdict, UnavoidabilityVerdict::Avoidable);
        assert!(!contains_copy(&s, &r.witness.unwrap()).unwrap());
    }

    #[test]
    fn double_star_blockers_verify() {
        // a=c=2, b=2: tree on 6, blocker on 2a+b+2c-3 = 7 vertices
        let f = double_star_fixture(2, 2, 2).unwrap();
        assert_eq!(f.tree.n(), 6);
        assert_eq!(f.blocker.n(), 7);
        assert!(!contains_copy(&f.tree, &f.blocker).unwrap());

        // degenerate a=b=c=1: the directed path on 3, blocker on 2
        let f = double_star_fixture(1, 1, 1).unwrap();
        assert_eq!(f.tree.n(), 3);
        assert_eq!(f.blocker.n(), 2);

        // one vertex more than the blocker suffices in every sample
        let f = double_star_fixture(2, 2, 2).unwrap();
        for s in 0..50 {
            let g = random_tournament(8, derive_seed(77, s));
            assert!(contains_copy(&f.tree, &g).unwrap(), "sample {s}");
        }
    }

    #[test]
    fn census_counts_and_verdicts() {
        // class counts of oriented trees by order: 1, 1, 3, 8, 27, 91
        for (n, want) in [(1usize, 1usize), (2, 1), (3, 3), (4, 8), (5, 27), (6, 91)] {
            let rows = oriented_tree_census(n, ExecMode::auto()).unwrap();
            assert_eq!(rows.len(), want, "n={n}");
        }

        let rows = oriented_tree_census(3, ExecMode::Sequential).unwrap();
        // exactly one unavoidable class at n=3: the directed path
        let unavoidable: Vec<_> = rows
            .iter()
            .filter(|e| e.report.verdict == UnavoidabilityVerdict::Unavoidable)
            .collect();
        assert_eq!(unavoidable.len(), 1);
        assert_eq!(
            canonical_tree_edges(3, unavoidable[0].tree.edges()),
            canonical_tree_edges(3, directed_path(3).unwrap().edges())
        );
        // every avoidable row carries a verified witness
        for e in &rows {
            if e.report.verdict == UnavoidabilityVerdict::Avoidable {
                let w = e.report.witness.as_ref().unwrap();
                assert!(!contains_copy(&e.tree, w).unwrap());
            }
        }
    }

    #[test]
    fn census_runs_are_mode_independent() {
        let a = oriented_tree_census(4, ExecMode::Sequential).unwrap();
        let b = oriented_tree_census(4, ExecMode::Parallel).unwrap();
        assert_eq!(census_to_csv(&a).unwrap(), census_to_csv(&b).unwrap());
        let csv = census_to_csv(&a).unwrap();
        assert!(csv.starts_with("n,tree_canonical_id,edges,alpha_max,verdict,witness_bits"));
        assert_eq!(csv.lines().count(), 9); // header + 8 classes
    }

    #[test]
    fn census_rejects_large_orders() {
        assert!(oriented_tree_census(7, ExecMode::Sequential).is_err());
    }

    #[test]
    fn unavoidable_trees_have_g_equal_to_their_order() {
        // consistency between the sweep and the bound search
        let rows = oriented_tree_census(4, ExecMode::auto()).unwrap();
        for e in rows {
            let g = g_bruteforce(&e.tree, 4, ExecMode::Sequential).unwrap();
            match e.report.verdict {
                UnavoidabilityVerdict::Unavoidable => {
                    assert_eq!(g, GBound::Exactly(4));
                }
                _ => assert_eq!(g, GBound::GreaterThan(4)),
            }
        }
    }
}
