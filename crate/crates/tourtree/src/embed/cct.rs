//! Spanning embedding into a host organised as a cycle of cluster
//! tournaments.
//!
//! The host's vertex set is split into `k` clusters arranged in a cycle,
//! with dense forward edges from each cluster to the next, plus a small
//! exceptional set outside every cluster. The pipeline partitions the tree
//! at a shared vertex, embeds the first part so that it covers the whole
//! exceptional set while using every cluster near-uniformly, then embeds
//! the second part into the uncovered remainder: reserve leaf pairs, embed
//! the pruned tree under cluster constraints, equalise the leftover counts
//! with [`balance_clusters`], and finish with `2k` perfect matchings.
//!
//! A spanning embedding must fill every cluster exactly, so the two
//! phases' cluster occupancies have to complement each other — and the
//! random-walk allocations spread far too wide for independently chosen
//! draws to do so at this scale. The pipeline therefore draws a pool of
//! allocations for each phase and searches over pairs: covering draws are
//! ranked by how many remainder backbones fit in the room they leave, and
//! for each such pair an exact search decides which reserved leaf pairs
//! stay stripped (two slots pending in their center's cluster) versus
//! reattach at clusters their allocation coins permit, making the residual
//! slack vanish cluster by cluster.

use std::collections::HashMap;

use rand::seq::SliceRandom;

use super::backtrack::{backtrack_embed, EmbedConstraints, SearchOutcome};
use super::balance::{balance_clusters, BalanceOutcome, BalanceState, PendingPair};
use super::matching::{perfect_matching, MatchDirection, MatchingOutcome};
use super::pair::ceil_rate;
use super::{validate_embedding, Embedding, PipelineOutcome};
use crate::allocation::{allocate, Allocation};
use crate::bitset::VertSet;
use crate::digraph::{regularity_check, RegMode, RegularityVerdict};
use crate::digraph::Tournament;
use crate::otree::{is_alpha_nice, tree_partition, LeafStripSpec, OrientedTree, StrippedTree};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result, StageFailure};

/// A host split into `k` disjoint clusters arranged in a cycle, plus the
/// exceptional set of all remaining vertices. The density target `d` and
/// tolerance `eps` describe the intended regularity of each forward pair
/// `(V_i, V_{i+1})`; the decomposition stores them but never assumes them —
/// [`ClusterDecomposition::check_regularity`] verifies on demand.
#[derive(Debug, Clone)]
pub struct ClusterDecomposition {
    clusters: Vec<VertSet>,
    exceptional: VertSet,
    pub d: f64,
    pub eps: f64,
}

impl ClusterDecomposition {
    /// Validate and build: at least two pairwise-disjoint nonempty clusters
    /// over a host of `host_n` vertices; everything else is exceptional.
    pub fn new(host_n: usize, clusters: Vec<VertSet>, d: f64, eps: f64) -> Result<Self> {
        if clusters.len() < 2 {
            return Err(Error::param(format!(
                "a cluster cycle needs at least 2 clusters, got {}",
                clusters.len()
            )));
        }
        let mut seen = VertSet::empty(host_n);
        for (i, c) in clusters.iter().enumerate() {
            if c.capacity() != host_n {
                return Err(Error::param(format!(
                    "cluster {i} has capacity {}, host has {host_n} vertices",
                    c.capacity()
                )));
            }
            if c.is_empty() {
                return Err(Error::param(format!("cluster {i} is empty")));
            }
            if seen.intersection_len(c) != 0 {
                return Err(Error::param(format!(
                    "cluster {i} overlaps an earlier cluster"
                )));
            }
            seen = seen.union(c);
        }
        let exceptional = VertSet::full(host_n).difference(&seen);
        Ok(ClusterDecomposition {
            clusters,
            exceptional,
            d,
            eps,
        })
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[VertSet] {
        &self.clusters
    }

    /// Cluster by cyclic index (`0..k`).
    pub fn cluster(&self, i: usize) -> &VertSet {
        &self.clusters[i]
    }

    /// Host vertices belonging to no cluster.
    pub fn exceptional(&self) -> &VertSet {
        &self.exceptional
    }

    /// Check `(d, eps)`-regularity of every forward pair `(V_i, V_{i+1})`
    /// around the cycle, returning one verdict per pair.
    pub fn check_regularity(
        &self,
        g: &Tournament,
        mode: &RegMode,
    ) -> Result<Vec<RegularityVerdict>> {
        let k = self.k();
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            out.push(regularity_check(
                g,
                &self.clusters[i],
                &self.clusters[(i + 1) % k],
                self.d,
                self.eps,
                mode,
            )?);
        }
        Ok(out)
    }
}

/// Parameters of [`cct_pipeline`].
#[derive(Debug, Clone)]
pub struct CctParams {
    /// Niceness rate the tree must certify. `alpha = 0` switches to the
    /// degenerate single-phase mode: no leaf-pair machinery is required of
    /// the tree, but the exceptional set must be empty.
    pub alpha: f64,
    /// Leaf-pair reservation rate per phase.
    pub beta: f64,
    /// Redraw budget for the random half-splits feeding the final
    /// matchings.
    pub retry_budget: u32,
    /// How many cluster allocations each phase draws into its pool. The
    /// pipeline searches over pairs of draws, so the pool size trades
    /// quadratically more joint candidates against prep time.
    pub alloc_retry_budget: u32,
    /// Node budget handed to each inner backtracking search.
    pub node_budget: Option<u64>,
    pub seed: u64,
}

impl Default for CctParams {
    fn default() -> Self {
        CctParams {
            alpha: 1.0 / 250.0,
            beta: 0.05,
            retry_budget: 32,
            alloc_retry_budget: 128,
            node_budget: Some(5_000_000),
            seed: 0,
        }
    }
}

type Stage<T> = std::result::Result<T, StageFailure>;
/// `(tree vertex, host vertex)` assignments in the original tree's labels.
type Placements = Vec<(usize, usize)>;

/// One side of the tree partition, materialised as a standalone tree.
struct SideTree {
    tree: OrientedTree,
    /// Side label → original tree label.
    back: Vec<usize>,
    /// Root in side labels (the shared partition vertex, or 0 in the
    /// degenerate mode).
    root: usize,
}

/// Leaf-pair donors of `tree`: vertices owning at least one in-leaf and one
/// out-leaf, excluding `banned` in any role. Returns
/// `(center, in_leaf, out_leaf)` with the smallest leaf of each kind,
/// ascending by center.
fn leaf_pair_donors(tree: &OrientedTree, banned: Option<usize>) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for c in 0..tree.n() {
        if Some(c) == banned || tree.is_leaf(c) {
            continue;
        }
        let mut best_in = None;
        let mut best_out = None;
        for &(u, outgoing) in tree.neighbours(c) {
            if Some(u) == banned || !tree.is_leaf(u) {
                continue;
            }
            // outgoing = true means c→u, so u is an out-leaf of c
            if outgoing {
                if best_out.is_none() {
                    best_out = Some(u);
                }
            } else if best_in.is_none() {
                best_in = Some(u);
            }
        }
        if let (Some(i), Some(o)) = (best_in, best_out) {
            out.push((c, i, o));
        }
    }
    out
}

/// The host vertex of cluster 1 best connected for anchoring the shared
/// tree vertex: maximise the worst of in-degree from the last cluster,
/// out-degree into the second cluster, and semidegree inside cluster 1;
/// ties go to the smallest label.
fn anchor_vertex(g: &Tournament, decomp: &ClusterDecomposition) -> usize {
    let k = decomp.k();
    let v1 = decomp.cluster(0);
    let v2 = decomp.cluster(1 % k);
    let vk = decomp.cluster(k - 1);
    v1.iter()
        .max_by_key(|&x| {
            let score = g
                .in_deg_in(x, vk)
                .min(g.out_deg_in(x, v2))
                .min(g.semideg_in(x, v1));
            (score, std::cmp::Reverse(x))
        })
        .expect("clusters are nonempty")
}

/// A covering-phase allocation draw that passed the capacity screen: the
/// cluster of every pruned-tree vertex and stripped pair, plus the exact
/// per-cluster usage the embedding and absorption will produce if they
/// succeed.
struct Phase1Candidate {
    j: u32,
    alloc: Allocation,
    c_i: Vec<usize>,
    pair_cluster: Vec<usize>,
    use_i: Vec<usize>,
}

/// Everything the covering phase fixes before the joint search: the
/// stripped tree, the chosen leaf pairs, the exceptional vertices to
/// absorb, the near-uniformity band, and the screened candidate draws,
/// ordered by their peak planned usage.
struct Phase1Prep {
    stripped: StrippedTree,
    root1p: usize,
    chosen: Vec<(usize, usize, usize)>,
    b_list: Vec<usize>,
    band: Option<(f64, f64)>,
    candidates: Vec<Phase1Candidate>,
}

/// Prepare the covering side: strip leaf pairs (at least one per
/// exceptional vertex), then draw and screen every allocation attempt.
/// A draw's exact usage is predictable: every tree vertex takes one slot,
/// and a stripped pair takes two slots in its center's cluster — one if
/// the pair is scheduled to absorb an exceptional vertex, since that leaf
/// lands outside the clusters. Absorption pairs exceptional vertices with
/// stripped pairs in (cluster, center) order, so which pairs contribute a
/// single slot is known before embedding.
fn phase1_prepare(
    side: &SideTree,
    decomp: &ClusterDecomposition,
    params: &CctParams,
) -> Result<Stage<Phase1Prep>> {
    let k = decomp.k();
    let t1 = &side.tree;
    let n1 = t1.n();
    let b_list = decomp.exceptional.to_vec();
    let b = b_list.len();

    let donors = leaf_pair_donors(t1, Some(side.root));
    let want = ceil_rate(params.beta, n1).saturating_sub(1).max(b);
    let t1_count = want.min(donors.len());
    if t1_count < b {
        return Ok(Err(StageFailure::new(
            "phase1-stars",
            "too few leaf-pair donors in the covering subtree to absorb the exceptional set",
        )
        .count("donors", donors.len() as i64)
        .count("exceptional", b as i64)));
    }
    let chosen: Vec<(usize, usize, usize)> = donors[..t1_count].to_vec();
    let spec: Vec<LeafStripSpec> = chosen
        .iter()
        .map(|&(c, il, ol)| LeafStripSpec {
            anchor: c,
            in_leaf: Some(il),
            out_leaf: Some(ol),
        })
        .collect();
    let stripped = t1.strip_leaf_pairs(&spec)?;
    let root1p = stripped
        .kept
        .binary_search(&side.root)
        .expect("the shared vertex is never stripped");

    // Near-uniform usage band: with so few vertices the band is generous,
    // but it is still checked. A side too small for ln(ln(n1)) to be
    // positive gets no band at all.
    let denom = (n1 as f64).ln().ln();
    let scale = (n1 - b) as f64;
    let band = if denom > 0.0 {
        Some((
            scale * (1.0 / k as f64 - 2.0 / denom),
            scale * (1.0 / k as f64 + 2.0 / denom),
        ))
    } else {
        None
    };

    let mut candidates = Vec::new();
    for j in 0..params.alloc_retry_budget {
        let alloc = allocate(&stripped.tree, root1p, k, derive_seed(params.seed, j as u64))?;
        let mut c_i = vec![0usize; k];
        for x in 0..stripped.tree.n() {
            c_i[alloc.cluster(x) - 1] += 1;
        }
        let mut pair_cluster = Vec::with_capacity(chosen.len());
        for &(c, _, _) in &chosen {
            let cp = stripped.kept.binary_search(&c).expect("centers are kept");
            pair_cluster.push(alloc.cluster(cp) - 1);
        }
        let mut order: Vec<usize> = (0..chosen.len()).collect();
        order.sort_by_key(|&s| (pair_cluster[s], chosen[s].0));
        let mut use_i = c_i.clone();
        for (rank, &s) in order.iter().enumerate() {
            use_i[pair_cluster[s]] += if rank < b { 1 } else { 2 };
        }
        if (0..k).any(|i| use_i[i] > decomp.cluster(i).len()) {
            continue;
        }
        candidates.push(Phase1Candidate {
            j,
            alloc,
            c_i,
            pair_cluster,
            use_i,
        });
    }
    if candidates.is_empty() {
        return Ok(Err(StageFailure::new(
            "phase1-embed",
            "no covering allocation fits the cluster capacities",
        )
        .count("attempts", params.alloc_retry_budget as i64)));
    }
    candidates.sort_by_key(|c| (*c.use_i.iter().max().expect("k >= 2"), c.j));

    Ok(Ok(Phase1Prep {
        stripped,
        root1p,
        chosen,
        b_list,
        band,
        candidates,
    }))
}

/// Embed the covering side under one candidate draw: pin the shared vertex
/// to `v`, embed the pruned tree inside its allocated clusters, absorb the
/// exceptional set with the stripped pairs, and check near-uniform usage.
fn phase1_embed(
    side: &SideTree,
    g: &Tournament,
    decomp: &ClusterDecomposition,
    params: &CctParams,
    v: usize,
    prep: &Phase1Prep,
    cand: &Phase1Candidate,
) -> Result<Stage<Placements>> {
    let b = prep.b_list.len();
    let stripped = &prep.stripped;
    let t1p = &stripped.tree;

    let mut cons = EmbedConstraints::new().pin(prep.root1p, v);
    for x in 0..t1p.n() {
        cons = cons.allow(x, decomp.cluster(cand.alloc.cluster(x) - 1).clone());
    }
    let emb = match backtrack_embed(t1p, g, &cons, params.node_budget)? {
        SearchOutcome::Found(e) => e,
        SearchOutcome::Exhausted => {
            return Ok(Err(StageFailure::new(
                "phase1-embed",
                "cluster-constrained search exhausted without an embedding",
            )
            .count("attempt", cand.j as i64)));
        }
        SearchOutcome::BudgetExceeded => {
            return Ok(Err(StageFailure::new(
                "phase1-embed",
                "cluster-constrained search ran out of nodes",
            )
            .count("attempt", cand.j as i64)));
        }
    };

    // Absorb the exceptional set: pair the b smallest-sorted exceptional
    // vertices with the stripped pairs in (cluster, center) order. The
    // edge between the exceptional vertex q and the center's image
    // decides which leaf lands on q; the other leaf takes the smallest
    // free neighbour of the right orientation inside the center's own
    // cluster. Leftover pairs put both leaves in the center's cluster.
    let mut order: Vec<usize> = (0..prep.chosen.len()).collect();
    order.sort_by_key(|&s| (cand.pair_cluster[s], prep.chosen[s].0));
    let mut covered = emb.image(g.n());
    let mut used_i = cand.c_i.clone();
    let mut leaf_placements: Placements = Vec::with_capacity(2 * prep.chosen.len());
    let mut stuck = false;
    for (rank, &s) in order.iter().enumerate() {
        let (c, il, ol) = prep.chosen[s];
        let ci = cand.pair_cluster[s];
        let cp = stripped.kept.binary_search(&c).expect("centers are kept");
        let hp = emb.get(cp).expect("embedding is complete");
        let vi = decomp.cluster(ci);
        let mut place_in = |set: &VertSet, covered: &mut VertSet| -> Option<usize> {
            let pick = set.intersection(vi).difference(covered).min()?;
            covered.insert(pick);
            used_i[ci] += 1;
            Some(pick)
        };
        let (in_host, out_host) = if rank < b {
            let q = prep.b_list[rank];
            if g.has_edge(q, hp) {
                // q beats the center's image: q hosts the in-leaf
                let Some(o) = place_in(g.out_set(hp), &mut covered) else {
                    stuck = true;
                    break;
                };
                (q, o)
            } else {
                let Some(i) = place_in(g.in_set(hp), &mut covered) else {
                    stuck = true;
                    break;
                };
                (i, q)
            }
        } else {
            let Some(i) = place_in(g.in_set(hp), &mut covered) else {
                stuck = true;
                break;
            };
            let Some(o) = place_in(g.out_set(hp), &mut covered) else {
                stuck = true;
                break;
            };
            (i, o)
        };
        leaf_placements.push((il, in_host));
        leaf_placements.push((ol, out_host));
    }
    if stuck {
        return Ok(Err(StageFailure::new(
            "phase1-embed",
            "no free companion vertex for a stripped leaf in its center's cluster",
        )
        .count("attempt", cand.j as i64)));
    }
    debug_assert_eq!(used_i, cand.use_i);
    if let Some((lo, hi)) = prep.band {
        if used_i
            .iter()
            .any(|&u| (u as f64) < lo || (u as f64) > hi)
        {
            return Ok(Err(StageFailure::new(
                "phase1-embed",
                "cluster usage left the near-uniform band",
            )
            .count("attempt", cand.j as i64)));
        }
    }

    let mut placements: Placements = Vec::with_capacity(side.tree.n());
    for (x, h) in emb.assigned() {
        placements.push((side.back[stripped.kept[x]], h));
    }
    for &(leaf, h) in &leaf_placements {
        placements.push((side.back[leaf], h));
    }
    Ok(Ok(placements))
}

/// How many nodes each exact reattachment search may expand.
const TOKEN_NODE_BUDGET: usize = 200_000;

/// Exact cover search over donor token profiles. Donor `d` places two
/// tokens per profile: keeping its pair stripped leaves both its uncovered
/// slots in its center's cluster, while any reattachment option puts one
/// slot at each leaf's cluster, consumed by the embedding itself. A choice
/// of profiles works iff the token count in every cluster equals `h[i]`,
/// the slack between the cluster's uncovered capacity and the backbone's
/// load. Profiles are tried in listed order — strip first — so solutions
/// favour larger pending reserves. Returns one solution as indices into
/// each donor's profile list, or `None` when the space (or `node_budget`)
/// is exhausted.
fn token_dfs(tokens: &[Vec<(usize, usize)>], h: &[usize], node_budget: usize) -> Option<Vec<usize>> {
    let n = tokens.len();
    let k = h.len();
    // reach[d][i]: the most tokens donors d.. can still put in cluster i.
    let mut reach = vec![vec![0usize; k]; n + 1];
    for d in (0..n).rev() {
        for i in 0..k {
            let best = tokens[d]
                .iter()
                .map(|&(a, b)| usize::from(a == i) + usize::from(b == i))
                .max()
                .expect("every donor has at least the strip profile");
            reach[d][i] = reach[d + 1][i] + best;
        }
    }
    fn go(
        d: usize,
        tokens: &[Vec<(usize, usize)>],
        rem: &mut [usize],
        reach: &[Vec<usize>],
        choice: &mut [usize],
        node_budget: &mut usize,
    ) -> bool {
        if *node_budget == 0 {
            return false;
        }
        *node_budget -= 1;
        if d == tokens.len() {
            return rem.iter().all(|&r| r == 0);
        }
        if rem.iter().zip(&reach[d]).any(|(&r, &cap)| r > cap) {
            return false;
        }
        for (pi, &(a, b)) in tokens[d].iter().enumerate() {
            if a == b {
                if rem[a] < 2 {
                    continue;
                }
                rem[a] -= 2;
            } else {
                if rem[a] < 1 || rem[b] < 1 {
                    continue;
                }
                rem[a] -= 1;
                rem[b] -= 1;
            }
            choice[d] = pi;
            if go(d + 1, tokens, rem, reach, choice, node_budget) {
                return true;
            }
            if a == b {
                rem[a] += 2;
            } else {
                rem[a] += 1;
                rem[b] += 1;
            }
        }
        false
    }
    let mut rem: Vec<usize> = h.to_vec();
    let mut choice = vec![0usize; n];
    let mut budget = node_budget;
    if go(0, tokens, &mut rem, &reach, &mut choice, &mut budget) {
        Some(choice)
    } else {
        None
    }
}

/// One remainder-phase allocation draw of the fully-stripped tree: the
/// cluster of every backbone vertex, the per-cluster load, and each
/// donor's reattachment profiles. `profiles[d][0]` is always `None` (keep
/// the pair stripped); `profiles[d][pi] = Some((a, b))` reattaches the
/// in-leaf into cluster `a` and the out-leaf into cluster `b`. `tokens`
/// mirrors `profiles` as the two clusters whose uncovered slots each
/// option consumes.
struct Phase2Draw {
    j: u32,
    clusters: Vec<usize>,
    cpp: Vec<usize>,
    profiles: Vec<Vec<Option<(usize, usize)>>>,
    tokens: Vec<Vec<(usize, usize)>>,
}

/// The remainder side with every leaf-pair donor stripped, plus its pool
/// of allocation draws. Which pairs actually stay stripped is decided per
/// draw by the exact reattachment search; a reattached leaf re-enters the
/// tree with a cluster its allocation coin could have produced. The
/// in-leaf's edge points at its parent, so its canonical cluster is the
/// center's minus one; the out-leaf's is the center's plus one; and an
/// even-depth leaf may instead inherit the center's own cluster.
struct Phase2Prep {
    donors: Vec<(usize, usize, usize)>,
    stripped: StrippedTree,
    draws: Vec<Phase2Draw>,
}

fn prepare_phase2(side: &SideTree, k: usize, params: &CctParams) -> Result<Phase2Prep> {
    let t2 = &side.tree;
    let donors = leaf_pair_donors(t2, Some(side.root));
    let spec: Vec<LeafStripSpec> = donors
        .iter()
        .map(|&(c, il, ol)| LeafStripSpec {
            anchor: c,
            in_leaf: Some(il),
            out_leaf: Some(ol),
        })
        .collect();
    let stripped = t2.strip_leaf_pairs(&spec)?;
    let root2p = stripped
        .kept
        .binary_search(&side.root)
        .expect("the shared vertex is never stripped");
    let depth = t2.depths(side.root)?;

    let mut draws = Vec::with_capacity(params.alloc_retry_budget as usize);
    for j in 0..params.alloc_retry_budget {
        let alloc = allocate(
            &stripped.tree,
            root2p,
            k,
            derive_seed(params.seed, 1_000 + j as u64),
        )?;
        let clusters: Vec<usize> = (0..stripped.tree.n())
            .map(|x| alloc.cluster(x) - 1)
            .collect();
        let mut cpp = vec![0usize; k];
        for &c in &clusters {
            cpp[c] += 1;
        }
        let mut profiles = Vec::with_capacity(donors.len());
        let mut tokens = Vec::with_capacity(donors.len());
        for &(c, il, ol) in &donors {
            let cp = stripped.kept.binary_search(&c).expect("centers are kept");
            let cc = clusters[cp];
            let mut in_opts = vec![(cc + k - 1) % k];
            if depth[il] % 2 == 0 {
                in_opts.push(cc);
            }
            let mut out_opts = vec![(cc + 1) % k];
            if depth[ol] % 2 == 0 {
                out_opts.push(cc);
            }
            let mut ps: Vec<Option<(usize, usize)>> = vec![None];
            let mut ts = vec![(cc, cc)];
            for &a in &in_opts {
                for &b in &out_opts {
                    ps.push(Some((a, b)));
                    ts.push((a, b));
                }
            }
            profiles.push(ps);
            tokens.push(ts);
        }
        draws.push(Phase2Draw {
            j,
            clusters,
            cpp,
            profiles,
            tokens,
        });
    }
    Ok(Phase2Prep {
        donors,
        stripped,
        draws,
    })
}

/// Complete the remainder phase for one draw and one reattachment choice:
/// rebuild the partially-stripped tree, embed it with backbone vertices in
/// their drawn clusters and reattached leaves in their chosen ones, spend
/// surplus pending pairs to equalise the counts, run the balancing loop,
/// and finish with `2k` perfect matchings onto random halves of what is
/// left. The exact token match guarantees the embedding leaves precisely
/// two uncovered vertices per pending pair in its center's cluster, so the
/// balancing loop starts already balanced.
#[allow(clippy::too_many_arguments)]
fn phase2_complete(
    side: &SideTree,
    g: &Tournament,
    decomp: &ClusterDecomposition,
    params: &CctParams,
    pin: Option<usize>,
    u_star: &[VertSet],
    prep: &Phase2Prep,
    draw: &Phase2Draw,
    choice: &[usize],
) -> Result<Stage<Placements>> {
    let k = decomp.k();
    let t2 = &side.tree;
    let s2 = &prep.stripped;

    let mut keep_cluster: HashMap<usize, usize> = HashMap::new();
    let mut strip_spec: Vec<LeafStripSpec> = Vec::new();
    let mut pending_raw: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (d, &(c, il, ol)) in prep.donors.iter().enumerate() {
        let cp = s2.kept.binary_search(&c).expect("centers are kept");
        let cc = draw.clusters[cp];
        match draw.profiles[d][choice[d]] {
            None => {
                strip_spec.push(LeafStripSpec {
                    anchor: c,
                    in_leaf: Some(il),
                    out_leaf: Some(ol),
                });
                pending_raw.push((cc, c, il, ol));
            }
            Some((a, b)) => {
                keep_cluster.insert(il, a);
                keep_cluster.insert(ol, b);
            }
        }
    }
    let partial = t2.strip_leaf_pairs(&strip_spec)?;
    let t2p = &partial.tree;
    let root2p = partial
        .kept
        .binary_search(&side.root)
        .expect("the shared vertex is never stripped");

    let mut cons = EmbedConstraints::new();
    if let Some(vh) = pin {
        cons = cons.pin(root2p, vh);
    }
    for x in 0..t2p.n() {
        let lbl = partial.kept[x];
        let ci = match s2.kept.binary_search(&lbl) {
            Ok(p) => draw.clusters[p],
            Err(_) => *keep_cluster
                .get(&lbl)
                .expect("kept non-backbone vertices are reattached leaves"),
        };
        cons = cons.allow(x, u_star[ci].clone());
    }
    let emb = match backtrack_embed(t2p, g, &cons, params.node_budget)? {
        SearchOutcome::Found(e) => e,
        SearchOutcome::Exhausted => {
            return Ok(Err(StageFailure::new(
                "phase2-embed",
                "cluster-constrained search exhausted without an embedding",
            )
            .count("attempt", draw.j as i64)));
        }
        SearchOutcome::BudgetExceeded => {
            return Ok(Err(StageFailure::new(
                "phase2-embed",
                "cluster-constrained search ran out of nodes",
            )
            .count("attempt", draw.j as i64)));
        }
    };

    let mut placements: Placements = Vec::with_capacity(side.tree.n());
    for (x, h) in emb.assigned() {
        placements.push((side.back[partial.kept[x]], h));
    }

    // Group the pending pairs by cluster, in original tree labels.
    let mut pending: Vec<Vec<PendingPair>> = vec![Vec::new(); k];
    for &(cc, c, il, ol) in &pending_raw {
        let cp = partial.kept.binary_search(&c).expect("centers are kept");
        pending[cc].push(PendingPair {
            center_host: emb.get(cp).expect("embedding is complete"),
            in_leaf: side.back[il],
            out_leaf: side.back[ol],
        });
    }
    for ps in pending.iter_mut() {
        ps.sort_by_key(|p| p.center_host);
    }
    let w_i: Vec<usize> = pending.iter().map(|ps| ps.len()).collect();
    let w_min = *w_i.iter().min().expect("k >= 2");

    // Spend surplus pairs (from the back of each list) to bring every
    // cluster down to w_min pending pairs, placing both leaves on
    // uncovered vertices of the pair's own cluster.
    let mut covered = emb.image(g.n());
    debug_assert!((0..k).all(|i| u_star[i].difference(&covered).len() == 2 * w_i[i]));
    let mut stuck = false;
    for i in 0..k {
        for _ in 0..(w_i[i] - w_min) {
            let p = pending[i].pop().expect("surplus is at most the count");
            let free = u_star[i].difference(&covered);
            let Some(x_in) = g.in_set(p.center_host).intersection(&free).min() else {
                stuck = true;
                break;
            };
            covered.insert(x_in);
            let free = u_star[i].difference(&covered);
            let Some(x_out) = g.out_set(p.center_host).intersection(&free).min() else {
                stuck = true;
                break;
            };
            covered.insert(x_out);
            placements.push((p.in_leaf, x_in));
            placements.push((p.out_leaf, x_out));
        }
        if stuck {
            break;
        }
    }
    if stuck {
        return Ok(Err(StageFailure::new(
            "phase2-leaf-pairs",
            "no uncovered neighbour for an equalising leaf pair in its own cluster",
        )
        .count("attempt", draw.j as i64)));
    }

    let uncovered: Vec<VertSet> = (0..k).map(|i| u_star[i].difference(&covered)).collect();
    debug_assert!(uncovered.iter().all(|u| u.len() == 2 * w_min));
    let state = BalanceState::new(uncovered.clone(), uncovered, pending);
    let st = match balance_clusters(g, state)? {
        BalanceOutcome::Balanced(st) => st,
        BalanceOutcome::Failed { failure, .. } => return Ok(Err(failure)),
    };
    let w_f = st.pending[0].len();
    debug_assert!(st.pending.iter().all(|ps| ps.len() == w_f));
    debug_assert!(st.uncovered.iter().all(|u| u.len() == 2 * w_f));

    // Final matchings: split each cluster's leftover into two random
    // halves; the in-leaves of cluster i's pending pairs match into the
    // previous cluster's minus-half, the out-leaves into the next
    // cluster's plus-half.
    let centers: Vec<Vec<usize>> = st
        .pending
        .iter()
        .map(|ps| ps.iter().map(|p| p.center_host).collect())
        .collect();
    let by_center: HashMap<usize, (usize, usize)> = st
        .pending
        .iter()
        .flatten()
        .map(|p| (p.center_host, (p.in_leaf, p.out_leaf)))
        .collect();
    let half_seed = derive_seed(params.seed, 100_000 + draw.j as u64);
    let mut matched: Option<Placements> = None;
    for h in 0..params.retry_budget.max(1) {
        let mut rng = rng_from_seed(derive_seed(half_seed, h as u64));
        let mut minus = Vec::with_capacity(k);
        let mut plus = Vec::with_capacity(k);
        for i in 0..k {
            let mut members = st.uncovered[i].to_vec();
            members.shuffle(&mut rng);
            let rest = members.split_off(w_f);
            minus.push(members);
            plus.push(rest);
        }
        let mut extra: Placements = Vec::with_capacity(2 * k * w_f);
        let mut perfect = true;
        for i in 0..k {
            let prev = (i + k - 1) % k;
            let next = (i + 1) % k;
            match perfect_matching(g, &minus[prev], &centers[i], MatchDirection::XToY)? {
                MatchingOutcome::Perfect(pairs) => {
                    for (x, c) in pairs {
                        extra.push((by_center[&c].0, x));
                    }
                }
                MatchingOutcome::HallViolator { .. } => {
                    perfect = false;
                    break;
                }
            }
            match perfect_matching(g, &centers[i], &plus[next], MatchDirection::XToY)? {
                MatchingOutcome::Perfect(pairs) => {
                    for (c, y) in pairs {
                        extra.push((by_center[&c].1, y));
                    }
                }
                MatchingOutcome::HallViolator { .. } => {
                    perfect = false;
                    break;
                }
            }
        }
        if perfect {
            matched = Some(extra);
            break;
        }
    }
    let Some(extra) = matched else {
        return Ok(Err(StageFailure::new(
            "phase2-matching",
            "no half-split admitted all 2k perfect matchings",
        )
        .count("attempt", draw.j as i64)
        .count("pairs-per-cluster", w_f as i64)));
    };
    placements.extend(st.placed.iter().copied());
    placements.extend(extra);
    Ok(Ok(placements))
}

/// Scan the remainder draws against the uncovered clusters: a draw whose
/// backbone fits is paired with an exact reattachment choice that makes
/// the leftover slots exactly two per pending pair, then completed.
/// Returns the first completed placement set, or the most informative
/// failure seen.
fn run_phase2_joint(
    side: &SideTree,
    g: &Tournament,
    decomp: &ClusterDecomposition,
    params: &CctParams,
    pin: Option<usize>,
    u_star: &[VertSet],
    prep: &Phase2Prep,
) -> Result<Stage<Placements>> {
    let k = decomp.k();
    let m: Vec<usize> = u_star.iter().map(|s| s.len()).collect();
    let mut fits = 0usize;
    let mut hits = 0usize;
    let mut last: Option<StageFailure> = None;
    for draw in &prep.draws {
        if (0..k).any(|i| draw.cpp[i] > m[i]) {
            continue;
        }
        fits += 1;
        let h: Vec<usize> = (0..k).map(|i| m[i] - draw.cpp[i]).collect();
        let Some(choice) = token_dfs(&draw.tokens, &h, TOKEN_NODE_BUDGET) else {
            continue;
        };
        hits += 1;
        match phase2_complete(side, g, decomp, params, pin, u_star, prep, draw, &choice)? {
            Ok(p) => return Ok(Ok(p)),
            Err(sf) => last = Some(sf),
        }
    }
    Ok(Err(last.unwrap_or_else(|| {
        StageFailure::new(
            "phase2-allocation",
            "no remainder draw admits an exact reattachment into the uncovered clusters",
        )
        .count("draws", prep.draws.len() as i64)
        .count("capacity-fit", fits as i64)
        .count("token-hits", hits as i64)
    })))
}

/// Embed a spanning copy of `t` into a host organised as a cycle of
/// clusters (see the module docs for the construction). Parameter errors
/// are `Err`; instances where some stage runs out of room or retries yield
/// `Ok(Failed(..))` naming the stage.
pub fn cct_pipeline(
    t: &OrientedTree,
    g: &Tournament,
    decomp: &ClusterDecomposition,
    params: &CctParams,
) -> Result<PipelineOutcome> {
    if t.n() != g.n() {
        return Err(Error::param(format!(
            "spanning embedding needs |T| = |G|, got {} and {}",
            t.n(),
            g.n()
        )));
    }
    if decomp.cluster(0).capacity() != g.n() {
        return Err(Error::param(format!(
            "decomposition is over {} vertices, host has {}",
            decomp.cluster(0).capacity(),
            g.n()
        )));
    }
    if !(0.0..1.0).contains(&params.alpha) || !(0.0..1.0).contains(&params.beta) {
        return Err(Error::param(format!(
            "alpha and beta must lie in [0, 1), got {} and {}",
            params.alpha, params.beta
        )));
    }
    if params.alloc_retry_budget == 0 {
        return Err(Error::param("alloc_retry_budget must be at least 1"));
    }
    let k = decomp.k();

    if params.alpha == 0.0 {
        // Degenerate single-phase mode: the whole tree runs through the
        // remainder machinery over the full clusters. Nothing covers the
        // exceptional set, so it must be empty.
        if !decomp.exceptional().is_empty() {
            return Err(Error::param(
                "alpha = 0 skips the covering phase, so the exceptional set must be empty",
            ));
        }
        let side = SideTree {
            tree: t.clone(),
            back: (0..t.n()).collect(),
            root: 0,
        };
        let prep2 = prepare_phase2(&side, k, params)?;
        let u_star: Vec<VertSet> = (0..k).map(|i| decomp.cluster(i).clone()).collect();
        return match run_phase2_joint(&side, g, decomp, params, None, &u_star, &prep2)? {
            Ok(placements) => {
                let mut emb = Embedding::new(t.n());
                for &(tv, h) in &placements {
                    emb.set(tv, h);
                }
                validate_embedding(t, g, &emb)?;
                Ok(PipelineOutcome::Embedded(emb))
            }
            Err(sf) => Ok(PipelineOutcome::Failed(sf)),
        };
    }

    let (nice, cert) = is_alpha_nice(t, params.alpha)?;
    if !nice {
        return Err(Error::param(format!(
            "tree is not alpha-nice for alpha = {} (max rate {})",
            params.alpha, cert.alpha_max
        )));
    }
    let marked: Vec<usize> = leaf_pair_donors(t, None).iter().map(|&(c, _, _)| c).collect();
    if marked.is_empty() {
        return Err(Error::param(
            "tree has no vertex with both an in-leaf and an out-leaf",
        ));
    }
    let part = tree_partition(t, &marked)?;
    let r = part.shared;
    let v = anchor_vertex(g, decomp);
    let vcl = (0..k)
        .find(|&i| decomp.cluster(i).contains(v))
        .expect("the anchor lies in a cluster");

    let (t1_tree, back1) = part.t1.to_tree(t)?;
    let root1 = back1.binary_search(&r).expect("shared vertex is in T1");
    let side1 = SideTree {
        tree: t1_tree,
        back: back1,
        root: root1,
    };
    let (t2_tree, back2) = part.t2.to_tree(t)?;
    let root2 = back2.binary_search(&r).expect("shared vertex is in T2");
    let side2 = SideTree {
        tree: t2_tree,
        back: back2,
        root: root2,
    };

    let prep1 = match phase1_prepare(&side1, decomp, params)? {
        Ok(p) => p,
        Err(sf) => return Ok(PipelineOutcome::Failed(sf)),
    };
    let prep2 = prepare_phase2(&side2, k, params)?;

    // Rank covering draws by how many remainder backbones fit in the room
    // they leave; the anchor's cluster gets one slot back because the
    // shared vertex lands on the anchor in both phases.
    let mut order: Vec<(usize, usize)> = prep1
        .candidates
        .iter()
        .enumerate()
        .map(|(ci, cand)| {
            let usable = prep2
                .draws
                .iter()
                .filter(|q| {
                    (0..k).all(|i| {
                        q.cpp[i] + cand.use_i[i]
                            <= decomp.cluster(i).len() + usize::from(i == vcl)
                    })
                })
                .count();
            (usable, ci)
        })
        .collect();
    order.sort_by_key(|&(usable, ci)| (std::cmp::Reverse(usable), ci));

    let mut last = StageFailure::new(
        "phase2-allocation",
        "no covering draw leaves the remainder draws enough room",
    )
    .count("covering-draws", prep1.candidates.len() as i64)
    .count("remainder-draws", prep2.draws.len() as i64);
    for &(usable, ci) in &order {
        if usable == 0 {
            break;
        }
        let cand = &prep1.candidates[ci];
        let placements1 = match phase1_embed(&side1, g, decomp, params, v, &prep1, cand)? {
            Ok(p) => p,
            Err(sf) => {
                last = sf;
                continue;
            }
        };
        // Uncovered remainder per cluster; the anchor stays available to
        // both phases so the shared vertex can land on it twice
        // consistently.
        let mut covered1 = VertSet::empty(g.n());
        for &(_, h) in &placements1 {
            covered1.insert(h);
        }
        let u_star: Vec<VertSet> = (0..k)
            .map(|i| {
                let mut u = decomp.cluster(i).difference(&covered1);
                if decomp.cluster(i).contains(v) {
                    u.insert(v);
                }
                u
            })
            .collect();
        debug_assert!((0..k).all(|i| u_star[i].len()
            == decomp.cluster(i).len() - cand.use_i[i] + usize::from(i == vcl)));
        match run_phase2_joint(&side2, g, decomp, params, Some(v), &u_star, &prep2)? {
            Ok(placements2) => {
                let mut emb = Embedding::new(t.n());
                for &(tv, h) in placements1.iter().chain(placements2.iter()) {
                    match emb.get(tv) {
                        None => emb.set(tv, h),
                        Some(prev) => debug_assert_eq!(
                            prev, h,
                            "only the shared vertex is placed twice, at the same host"
                        ),
                    }
                }
                validate_embedding(t, g, &emb)?;
                return Ok(PipelineOutcome::Embedded(emb));
            }
            Err(sf) => {
                last = sf;
                continue;
            }
        }
    }
    Ok(PipelineOutcome::Failed(last))
}
