//! Randomized cluster allocation of tree vertices.
//!
//! Vertices are walked in an ancestral ordering. The root lands in cluster 1.
//! The canonical cluster of a child is its parent's cluster stepped forward
//! (parent→child edge) or backward (child→parent edge) by one, wrapping
//! within `1..=k`. Vertices at odd depth are always allocated canonically;
//! vertices at even depth flip a fair coin between the canonical cluster and
//! their parent's. The module also verifies the semi-canonical property of
//! such allocations and computes the exact distribution of a fair binomial
//! modulo `k`, which governs where a deep vertex lands.

use crate::otree::OrientedTree;
use crate::rng::rng_from_seed;
use crate::{Error, Result};
use num_bigint::BigUint;
use rand::Rng;

/// Largest `n` accepted by [`binom_residue_distribution`]; the exact-count
/// dynamic program grows quadratically in `n`, so larger inputs are refused
/// rather than left to crawl.
pub const BINOM_RESIDUE_LIMIT: usize = 100_000;

/// One cluster step within `1..=k`: forward wraps `k → 1`, backward `1 → k`.
fn canonical_cluster(parent_cluster: usize, parent_to_child: bool, k: usize) -> usize {
    if parent_to_child {
        if parent_cluster == k {
            1
        } else {
            parent_cluster + 1
        }
    } else if parent_cluster == 1 {
        k
    } else {
        parent_cluster - 1
    }
}

/// An assignment of every tree vertex to one of `k` clusters (`1..=k`),
/// rooted at a chosen vertex, remembering the ancestral ordering used and,
/// per vertex, whether it took its canonical cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    cluster_of: Vec<usize>,
    k: usize,
    root: usize,
    order: Vec<usize>,
    canonical: Vec<bool>,
}

impl Allocation {
    /// Wrap a hand-built cluster assignment, deriving the ancestral order
    /// and the canonical flags from the tree.
    pub fn from_clusters(
        t: &OrientedTree,
        root: usize,
        k: usize,
        cluster_of: Vec<usize>,
    ) -> Result<Allocation> {
        if k < 2 {
            return Err(Error::param(format!("k = {k} clusters, need at least 2")));
        }
        if cluster_of.len() != t.n() {
            return Err(Error::param(format!(
                "{} cluster entries for {} vertices",
                cluster_of.len(),
                t.n()
            )));
        }
        let order = t.ancestral_ordering(root)?;
        let parent = t.parents(root)?;
        for (v, &c) in cluster_of.iter().enumerate() {
            if c < 1 || c > k {
                return Err(Error::param(format!(
                    "vertex {v} in cluster {c}, outside 1..={k}"
                )));
            }
        }
        if cluster_of[root] != 1 {
            return Err(Error::param(format!(
                "root {root} must sit in cluster 1, found {}",
                cluster_of[root]
            )));
        }
        let canonical = (0..t.n())
            .map(|v| match parent[v] {
                None => true,
                Some(p) => {
                    let forward = t.edge_between(p, v) == Some(true);
                    cluster_of[v] == canonical_cluster(cluster_of[p], forward, k)
                }
            })
            .collect();
        Ok(Allocation {
            cluster_of,
            k,
            root,
            order,
            canonical,
        })
    }

    pub fn n(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Cluster of `v`, in `1..=k`.
    pub fn cluster(&self, v: usize) -> usize {
        self.cluster_of[v]
    }

    pub fn clusters(&self) -> &[usize] {
        &self.cluster_of
    }

    /// The ancestral ordering the allocation walked.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Whether `v` sits in its canonical cluster (true for the root).
    pub fn chose_canonical(&self, v: usize) -> bool {
        self.canonical[v]
    }

    /// CSV rows `vertex,cluster,parent,canonical` in vertex order; the root
    /// row has an empty parent field.
    pub fn to_csv(&self, t: &OrientedTree) -> Result<String> {
        let parent = t.parents(self.root)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["vertex", "cluster", "parent", "canonical"])?;
        for v in 0..self.cluster_of.len() {
            w.write_record([
                v.to_string(),
                self.cluster_of[v].to_string(),
                parent[v].map(|p| p.to_string()).unwrap_or_default(),
                self.canonical[v].to_string(),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::format(format!("csv flush: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }
}

/// Allocate the vertices of `t` to `k` clusters.
///
/// Walks the BFS ancestral ordering from `root`; the root takes cluster 1,
/// odd-depth vertices take their canonical cluster, and even-depth non-root
/// vertices flip a fair coin between the canonical cluster and their
/// parent's. Coins are drawn only at those even-depth vertices, in ordering
/// order, so equal `(t, root, k, seed)` always reproduce the allocation.
pub fn allocate(t: &OrientedTree, root: usize, k: usize, seed: u64) -> Result<Allocation> {
    if k < 2 {
        return Err(Error::param(format!("k = {k} clusters, need at least 2")));
    }
    let order = t.ancestral_ordering(root)?;
    let parent = t.parents(root)?;
    let depth = t.depths(root)?;
    let mut rng = rng_from_seed(seed);
    let mut cluster_of = vec![0usize; t.n()];
    let mut canonical = vec![true; t.n()];
    for &v in &order {
        let Some(p) = parent[v] else {
            cluster_of[v] = 1;
            continue;
        };
        let forward = t.edge_between(p, v) == Some(true);
        let canon = canonical_cluster(cluster_of[p], forward, k);
        let take_canon = depth[v] % 2 == 1 || rng.gen_bool(0.5);
        cluster_of[v] = if take_canon { canon } else { cluster_of[p] };
        canonical[v] = take_canon;
    }
    Ok(Allocation {
        cluster_of,
        k,
        root,
        order,
        canonical,
    })
}

/// A way an allocation fails to be semi-canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemiCanonicalViolation {
    /// A non-root vertex allocated neither canonically nor to its parent's
    /// cluster.
    NeitherCanonicalNorParent {
        vertex: usize,
        cluster: usize,
        canonical: usize,
        parent_cluster: usize,
    },
    /// A neighbour of the root allocated non-canonically.
    RootNeighbourNotCanonical {
        vertex: usize,
        cluster: usize,
        canonical: usize,
    },
    /// A connected monochromatic component larger than the tree's maximum
    /// degree.
    OversizedComponent {
        cluster: usize,
        vertices: Vec<usize>,
        limit: usize,
    },
}

impl std::fmt::Display for SemiCanonicalViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SemiCanonicalViolation::NeitherCanonicalNorParent {
                vertex,
                cluster,
                canonical,
                parent_cluster,
            } => write!(
                f,
                "vertex {vertex} in cluster {cluster}, neither canonical ({canonical}) nor its parent's ({parent_cluster})"
            ),
            SemiCanonicalViolation::RootNeighbourNotCanonical {
                vertex,
                cluster,
                canonical,
            } => write!(
                f,
                "root neighbour {vertex} in cluster {cluster} instead of canonical {canonical}"
            ),
            SemiCanonicalViolation::OversizedComponent {
                cluster,
                vertices,
                limit,
            } => write!(
                f,
                "cluster {cluster} holds a connected component of {} vertices {vertices:?}, above the maximum degree {limit}",
                vertices.len()
            ),
        }
    }
}

/// Result of the semi-canonical check: empty means the property holds.
#[derive(Debug, Clone)]
pub struct SemiCanonicalReport {
    pub violations: Vec<SemiCanonicalViolation>,
}

impl SemiCanonicalReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the three clauses of the semi-canonical property:
/// (i) every non-root vertex sits in its canonical cluster or its parent's;
/// (ii) every neighbour of the root sits in its canonical cluster;
/// (iii) within each cluster, every connected component of the induced
/// forest has at most as many vertices as the tree's maximum degree.
pub fn is_semi_canonical(t: &OrientedTree, alloc: &Allocation) -> Result<SemiCanonicalReport> {
    if alloc.cluster_of.len() != t.n() {
        return Err(Error::param(format!(
            "allocation covers {} vertices, tree has {}",
            alloc.cluster_of.len(),
            t.n()
        )));
    }
    let parent = t.parents(alloc.root)?;
    let mut violations = Vec::new();
    for v in 0..t.n() {
        let Some(p) = parent[v] else { continue };
        let forward = t.edge_between(p, v) == Some(true);
        let canon = canonical_cluster(alloc.cluster_of[p], forward, alloc.k);
        let c = alloc.cluster_of[v];
        if c != canon && c != alloc.cluster_of[p] {
            violations.push(SemiCanonicalViolation::NeitherCanonicalNorParent {
                vertex: v,
                cluster: c,
                canonical: canon,
                parent_cluster: alloc.cluster_of[p],
            });
        }
        if p == alloc.root && c != canon {
            violations.push(SemiCanonicalViolation::RootNeighbourNotCanonical {
                vertex: v,
                cluster: c,
                canonical: canon,
            });
        }
    }
    let limit = t.max_degree();
    let mut seen = vec![false; t.n()];
    for v in 0..t.n() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let mut comp = vec![v];
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            for &(u, _) in t.neighbours(w) {
                if !seen[u] && alloc.cluster_of[u] == alloc.cluster_of[v] {
                    seen[u] = true;
                    comp.push(u);
                    stack.push(u);
                }
            }
        }
        if comp.len() > limit {
            comp.sort_unstable();
            violations.push(SemiCanonicalViolation::OversizedComponent {
                cluster: alloc.cluster_of[v],
                vertices: comp,
                limit,
            });
        }
    }
    Ok(SemiCanonicalReport { violations })
}

/// Per-cluster counts of the vertices of `s` (index `r` holds cluster
/// `r + 1`). `s` must list distinct vertices of the allocated tree.
pub fn allocation_histogram(alloc: &Allocation, s: &[usize]) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; alloc.k];
    let mut seen = vec![false; alloc.cluster_of.len()];
    for &v in s {
        if v >= alloc.cluster_of.len() {
            return Err(Error::param(format!("vertex {v} out of range")));
        }
        if seen[v] {
            return Err(Error::param(format!("vertex {v} listed twice")));
        }
        seen[v] = true;
        counts[alloc.cluster_of[v] - 1] += 1;
    }
    Ok(counts)
}

/// Exact distribution of `B(n, 1/2) mod k`: entry `r` is the probability
/// that a fair binomial on `n` trials lands in residue class `r`.
///
/// Computed by an exact subset-count dynamic program over residues
/// (`count'[r] = count[r] + count[r-1 mod k]`), then divided by `2^n` in
/// floating point from the top 64 bits, so every entry is a correctly
/// rounded quotient up to one part in `2^53`.
pub fn binom_residue_distribution(n: usize, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if n > BINOM_RESIDUE_LIMIT {
        return Err(Error::refused(format!(
            "n = {n} exceeds the exact-arithmetic limit {BINOM_RESIDUE_LIMIT}"
        )));
    }
    let mut counts = vec![BigUint::from(0u32); k];
    counts[0] = BigUint::from(1u32);
    for _ in 0..n {
        counts = (0..k)
            .map(|r| &counts[r] + &counts[(r + k - 1) % k])
            .collect();
    }
    Ok(counts.iter().map(|c| ratio_to_pow2(c, n)).collect())
}

/// `value / 2^n` as a double, from the top 64 bits of `value`.
fn ratio_to_pow2(value: &BigUint, n: usize) -> f64 {
    let bits = value.bits();
    if bits == 0 {
        return 0.0;
    }
    let shift = bits.saturating_sub(64);
    let top = (value >> shift).iter_u64_digits().next().unwrap_or(0);
    (top as f64) * (2f64).powi(shift as i32 - n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::otree::random_oriented_tree;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn directed_path(n: usize) -> OrientedTree {
        OrientedTree::new(n, (0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn binom_fixed_examples() {
        assert_eq!(binom_residue_distribution(4, 2).unwrap(), vec![0.5, 0.5]);
        assert_eq!(
            binom_residue_distribution(2, 3).unwrap(),
            vec![0.25, 0.5, 0.25]
        );
        assert_eq!(binom_residue_distribution(0, 3).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(binom_residue_distribution(9, 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn binom_matches_direct_summation() {
        for n in 0..=16usize {
            // Pascal row of C(n, j)
            let mut row = vec![1u64];
            for _ in 0..n {
                let mut next = vec![1u64];
                for w in row.windows(2) {
                    next.push(w[0] + w[1]);
                }
                next.push(1);
                row = next;
            }
            let total = (1u64 << n) as f64;
            for k in 1..=6usize {
                let got = binom_residue_distribution(n, k).unwrap();
                assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for r in 0..k {
                    let direct: f64 = row
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j % k == r)
                        .map(|(_, &c)| c as f64 / total)
                        .sum();
                    assert!(
                        (got[r] - direct).abs() < 1e-12,
                        "n={n} k={k} r={r}: {} vs {direct}",
                        got[r]
                    );
                }
            }
        }
    }

    #[test]
    fn binom_large_is_near_uniform() {
        // at n = 10^4 every residue class mod 7 sits within 4/sqrt(n) = 0.04
        // of 1/7 (the true gap is far smaller; the band is the contract)
        let dist = binom_residue_distribution(10_000, 7).unwrap();
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (r, &p) in dist.iter().enumerate() {
            assert!((p - 1.0 / 7.0).abs() < 0.04, "residue {r}: {p}");
        }
    }

    #[test]
    fn binom_guards_inputs() {
        assert!(matches!(
            binom_residue_distribution(5, 0),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            binom_residue_distribution(BINOM_RESIDUE_LIMIT + 1, 5),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn allocate_path_trace() {
        // 0→1→2 rooted at 0, k=3: vertex 1 at odd depth is forced to
        // cluster 2; vertex 2 flips between cluster 2 (parent's) and 3
        let t = directed_path(3);
        let mut took = [0usize; 2];
        for seed in 0..2000 {
            let a = allocate(&t, 0, 3, seed).unwrap();
            assert_eq!(a.cluster(0), 1);
            assert_eq!(a.cluster(1), 2);
            assert!(a.chose_canonical(0) && a.chose_canonical(1));
            match a.cluster(2) {
                2 => {
                    assert!(!a.chose_canonical(2));
                    took[0] += 1;
                }
                3 => {
                    assert!(a.chose_canonical(2));
                    took[1] += 1;
                }
                c => panic!("vertex 2 in cluster {c}"),
            }
        }
        assert!(took[0] > 800 && took[1] > 800, "coin counts {took:?}");
    }

    #[test]
    fn allocate_canonical_respects_edge_direction() {
        // parent→child edge steps forward: root 1, edge 1→0, k=4
        let t = OrientedTree::new(2, vec![(1, 0)]).unwrap();
        let a = allocate(&t, 1, 4, 7).unwrap();
        assert_eq!((a.cluster(1), a.cluster(0)), (1, 2));
        // child→parent edge steps backward, wrapping 1 → k
        let t = OrientedTree::new(2, vec![(0, 1)]).unwrap();
        let a = allocate(&t, 1, 4, 7).unwrap();
        assert_eq!((a.cluster(1), a.cluster(0)), (1, 4));
    }

    #[test]
    fn allocate_is_deterministic() {
        let t = random_oriented_tree(60, 11).unwrap();
        let a = allocate(&t, 3, 5, 999).unwrap();
        let b = allocate(&t, 3, 5, 999).unwrap();
        assert_eq!(a, b);
        let c = allocate(&t, 3, 5, 1000).unwrap();
        assert_ne!(a.clusters(), c.clusters(), "distinct seeds should differ here");
    }

    #[test]
    fn allocate_rejects_bad_parameters() {
        let t = directed_path(3);
        assert!(allocate(&t, 0, 1, 5).is_err());
        assert!(allocate(&t, 9, 3, 5).is_err());
    }

    #[test]
    fn allocate_outputs_are_semi_canonical() {
        let mut rng = rng_from_seed(42);
        for trial in 0..300u64 {
            let n = rng.gen_range(2..200);
            let t = random_oriented_tree(n, 7_000 + trial).unwrap();
            let root = rng.gen_range(0..n);
            let k = [2usize, 3, 7][trial as usize % 3];
            let a = allocate(&t, root, k, trial).unwrap();
            let report = is_semi_canonical(&t, &a).unwrap();
            assert!(
                report.holds(),
                "trial {trial}: {}",
                report.violations[0]
            );
        }
    }

    #[test]
    fn root_neighbour_in_root_cluster_fails_clause_two() {
        let t = directed_path(3);
        let a = Allocation::from_clusters(&t, 0, 3, vec![1, 1, 2]).unwrap();
        let report = is_semi_canonical(&t, &a).unwrap();
        assert_eq!(
            report.violations,
            vec![SemiCanonicalViolation::RootNeighbourNotCanonical {
                vertex: 1,
                cluster: 1,
                canonical: 2,
            }]
        );
    }

    #[test]
    fn monochromatic_run_fails_clause_three() {
        // a path has maximum degree 2; four vertices of cluster 2 in a row
        // form an oversized component while clauses (i) and (ii) still hold
        let t = directed_path(5);
        let a = Allocation::from_clusters(&t, 0, 3, vec![1, 2, 2, 2, 2]).unwrap();
        let report = is_semi_canonical(&t, &a).unwrap();
        assert_eq!(
            report.violations,
            vec![SemiCanonicalViolation::OversizedComponent {
                cluster: 2,
                vertices: vec![1, 2, 3, 4],
                limit: 2,
            }]
        );
    }

    #[test]
    fn stray_cluster_fails_clause_one() {
        let t = directed_path(3);
        let a = Allocation::from_clusters(&t, 0, 4, vec![1, 2, 4]).unwrap();
        let report = is_semi_canonical(&t, &a).unwrap();
        assert_eq!(
            report.violations,
            vec![SemiCanonicalViolation::NeitherCanonicalNorParent {
                vertex: 2,
                cluster: 4,
                canonical: 3,
                parent_cluster: 2,
            }]
        );
    }

    #[test]
    fn from_clusters_validates() {
        let t = directed_path(3);
        assert!(Allocation::from_clusters(&t, 0, 3, vec![2, 2, 3]).is_err()); // root not in 1
        assert!(Allocation::from_clusters(&t, 0, 3, vec![1, 0, 2]).is_err()); // cluster 0
        assert!(Allocation::from_clusters(&t, 0, 3, vec![1, 4, 2]).is_err()); // cluster > k
        assert!(Allocation::from_clusters(&t, 0, 3, vec![1, 2]).is_err()); // wrong length
        assert!(Allocation::from_clusters(&t, 0, 1, vec![1, 1, 1]).is_err()); // k too small
    }

    #[test]
    fn histogram_counts_subsets() {
        let t = directed_path(6);
        let a = allocate(&t, 0, 3, 123).unwrap();
        assert_eq!(allocation_histogram(&a, &[]).unwrap(), vec![0, 0, 0]);
        let full: Vec<usize> = (0..6).collect();
        let h = allocation_histogram(&a, &full).unwrap();
        assert_eq!(h.iter().sum::<usize>(), 6);
        for v in 0..6 {
            let single = allocation_histogram(&a, &[v]).unwrap();
            assert_eq!(single[a.cluster(v) - 1], 1);
        }
        assert!(allocation_histogram(&a, &[9]).is_err());
        assert!(allocation_histogram(&a, &[1, 1]).is_err());
    }

    #[test]
    fn csv_export_layout() {
        let t = directed_path(3);
        let a = Allocation::from_clusters(&t, 0, 3, vec![1, 2, 3]).unwrap();
        assert_eq!(
            a.to_csv(&t).unwrap(),
            "vertex,cluster,parent,canonical\n0,1,,true\n1,2,0,true\n2,3,1,true\n"
        );
    }

    #[test]
    fn long_path_endpoint_is_near_uniform() {
        // directed path with 1000 edges, k=5: the endpoint's cluster is
        // 1 + 500 + B(500, 1/2) mod 5, which is uniform to far below any
        // empirical resolution; check total variation against both the
        // exact composition and the uniform law
        let d = 1000usize;
        let k = 5usize;
        let trials = 10_000u64;
        let t = directed_path(d + 1);
        let mut counts = vec![0usize; k];
        for seed in 0..trials {
            let a = allocate(&t, 0, k, seed).unwrap();
            counts[a.cluster(d) - 1] += 1;
        }
        let forced = d.div_ceil(2) % k;
        let coin_dist = binom_residue_distribution(d / 2, k).unwrap();
        let tv_exact: f64 = (0..k)
            .map(|r| {
                let exact = coin_dist[(r + k - forced) % k];
                (counts[r] as f64 / trials as f64 - exact).abs()
            })
            .sum::<f64>()
            / 2.0;
        let tv_uniform: f64 = (0..k)
            .map(|r| (counts[r] as f64 / trials as f64 - 1.0 / k as f64).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv_exact < 0.03, "TV to exact law {tv_exact}, counts {counts:?}");
        assert!(tv_uniform < 0.05, "TV to uniform {tv_uniform}, counts {counts:?}");
    }
}
