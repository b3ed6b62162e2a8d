//! The staged spanning construction for almost-directed pairs.

use rand::seq::index::sample;

use super::greedy::{greedy_pair_embed, GreedyPairParams};
use super::matching::{perfect_matching, MatchDirection, MatchingOutcome};
use super::{Embedding, PipelineOutcome};
use crate::bitset::VertSet;
use crate::digraph::is_mu_almost_directed;
use crate::digraph::Tournament;
use crate::otree::{is_alpha_nice, pendant_star_census, PendantStar};
use crate::otree::{nice_split, LeafStripSpec, OrientedTree};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result, StageFailure};

/// A host partitioned into an almost-directed pair `(U, W)`: at most
/// `mu * |U| * |W|` edges run from `W` back to `U`.
#[derive(Debug, Clone)]
pub struct PairDecomposition {
    pub u: VertSet,
    pub w: VertSet,
    pub mu: f64,
}

impl PairDecomposition {
    /// Validate that `(u, w)` partitions the host's vertices and is
    /// `mu`-almost-directed, then store it.
    pub fn new(g: &Tournament, u: VertSet, w: VertSet, mu: f64) -> Result<Self> {
        if u.capacity() != g.n() || w.capacity() != g.n() {
            return Err(Error::param("pair sides must have capacity n(G)"));
        }
        if u.intersection_len(&w) != 0 || u.len() + w.len() != g.n() {
            return Err(Error::param(
                "pair sides must partition the host vertex set",
            ));
        }
        if u.is_empty() || w.is_empty() {
            return Err(Error::param("pair sides must both be nonempty"));
        }
        let verdict = is_mu_almost_directed(g, &u, &w, mu)?;
        if !verdict.holds {
            return Err(Error::param(format!(
                "(U, W) is not {mu}-almost-directed: {} reverse edges exceed the allowance {:.3}",
                verdict.reverse_edges, verdict.threshold
            )));
        }
        Ok(PairDecomposition { u, w, mu })
    }
}

/// Parameters of [`directed_pair_pipeline`].
#[derive(Debug, Clone)]
pub struct PairPipelineParams {
    /// Niceness demanded of the tree (`alpha = 0` skips the check; the tree
    /// must then supply enough pendant stars on its own).
    pub alpha: f64,
    /// Leaf-pair reservation rate: `t = ceil(beta * n)` stars of each kind
    /// are stripped and completed by matchings.
    pub beta: f64,
    /// Low-semidegree threshold and reservation rate for the helper set `Y`.
    pub psi: f64,
    /// Minimum side-size rate: both `|U|` and `|W|` must be at least
    /// `nu * n`.
    pub nu: f64,
    /// Attempts at drawing the random helper set `Y` (and re-running the
    /// downstream stages) before giving up.
    pub retry_budget: u32,
    /// Backtracking budget per forest component in the greedy stage.
    pub node_budget: Option<u64>,
    /// Master seed for the random draws.
    pub seed: u64,
}

impl Default for PairPipelineParams {
    fn default() -> Self {
        PairPipelineParams {
            alpha: 1.0 / 250.0,
            beta: 0.05,
            psi: 0.02,
            nu: 0.2,
            retry_budget: 32,
            node_budget: Some(5_000_000),
            seed: 0,
        }
    }
}

/// `ceil(rate * n)` computed with a tolerance so that rates that are exact
/// fractions of `n` do not round up through floating-point noise.
pub(super) fn ceil_rate(rate: f64, n: usize) -> usize {
    let v = (rate * n as f64 - 1e-9).ceil();
    if v <= 0.0 {
        0
    } else {
        v as usize
    }
}

/// The stripped level of a selected star: which leaves the pipeline removed
/// and must place itself.
#[derive(Debug, Clone, Copy)]
struct SelectedStar {
    center: usize,
    in_leaf: Option<usize>,
    out_leaf: Option<usize>,
}

fn smallest_leaf(t: &OrientedTree, star: &PendantStar, incoming: bool) -> Option<usize> {
    star.leaves
        .iter()
        .copied()
        .find(|&l| t.edge_between(l, star.center) == Some(incoming))
}

/// Embed the spanning tree `t` into `g` across the almost-directed pair
/// `pair`, covering every host vertex.
///
/// Stages: identify the exceptional set `Z` of vertices with too many
/// reverse edges; set aside the low-semidegree set `X` and a random helper
/// set `Y` on the `W` side; reserve `t = ceil(beta n)` pendant out-star /
/// in-star pairs plus one extra in-star per `Z` vertex and strip one leaf
/// from each; split the stripped tree into a directed pair sized to the
/// remaining hosts and embed it component-wise; cover `Z` by the extra
/// stars' leaf pairs, using `Y` for the partner leaf; finish by placing the
/// remaining stripped leaves through two perfect matchings. Spanning counts:
/// with `z = |Z|`, the stripped tree's sides hold `|U| - t - |Z ∩ U|` and
/// `|W| - t - z - |Z ∩ W|` vertices, so after the cover step exactly `t`
/// vertices per side remain for the matchings.
pub fn directed_pair_pipeline(
    t: &OrientedTree,
    g: &Tournament,
    pair: &PairDecomposition,
    params: &PairPipelineParams,
) -> Result<PipelineOutcome> {
    let n = t.n();
    if n != g.n() {
        return Err(Error::param(format!(
            "spanning construction needs |T| = |G|, got {} and {}",
            n,
            g.n()
        )));
    }
    if pair.u.capacity() != g.n()
        || pair.w.capacity() != g.n()
        || pair.u.intersection_len(&pair.w) != 0
        || pair.u.len() + pair.w.len() != g.n()
    {
        return Err(Error::param("pair does not partition this host"));
    }
    for (name, val) in [
        ("alpha", params.alpha),
        ("beta", params.beta),
        ("psi", params.psi),
    ] {
        if !(0.0..=1.0).contains(&val) {
            return Err(Error::param(format!("{name} must lie in [0,1], got {val}")));
        }
    }
    if !(params.nu > 0.0 && params.nu <= 0.5) {
        return Err(Error::param(format!(
            "nu must lie in (0, 0.5], got {}",
            params.nu
        )));
    }
    if params.retry_budget == 0 {
        return Err(Error::param("retry budget must be at least 1"));
    }
    let min_side = ceil_rate(params.nu, n);
    if pair.u.len() < min_side || pair.w.len() < min_side {
        return Err(Error::param(format!(
            "side sizes {} and {} fall below nu*n = {min_side}",
            pair.u.len(),
            pair.w.len()
        )));
    }
    if params.alpha > 0.0 {
        let (nice, cert) = is_alpha_nice(t, params.alpha)?;
        if !nice {
            return Err(Error::param(format!(
                "tree is not alpha-nice for alpha = {}: alpha_max = {:.6}",
                params.alpha, cert.alpha_max
            )));
        }
    }

    let t_count = ceil_rate(params.beta, n);

    // Exceptional vertices: too many reverse edges. The threshold floor of 1
    // makes mu = 0 demand literally no reverse edge at an exempt vertex.
    let thr_u = f64::max(pair.mu.sqrt() * pair.w.len() as f64, 1.0);
    let thr_w = f64::max(pair.mu.sqrt() * pair.u.len() as f64, 1.0);
    let z_u = VertSet::from_iter_n(
        n,
        pair.u
            .iter()
            .filter(|&v| g.in_deg_in(v, &pair.w) as f64 >= thr_u),
    );
    let z_w = VertSet::from_iter_n(
        n,
        pair.w
            .iter()
            .filter(|&v| g.out_deg_in(v, &pair.u) as f64 >= thr_w),
    );
    let z = z_u.len() + z_w.len();
    let degenerate = t_count == 0 && z == 0;

    // Low-semidegree set X inside W0 = W \ Z, and the helper-set size.
    let w0 = pair.w.difference(&z_w);
    let x_set = if degenerate {
        VertSet::empty(n)
    } else {
        VertSet::from_iter_n(
            n,
            w0.iter()
                .filter(|&v| (g.semideg_in(v, &w0) as f64) < params.psi * n as f64),
        )
    };
    let y_size = if degenerate {
        0
    } else {
        ceil_rate(params.psi, n)
    };

    // Spanning counts for the stripped tree, and the capacity pre-check:
    // the W side keeps |W| - |Z∩W| - |X| - |Y| free vertices, which must
    // cover b = |W| - t - z - |Z∩W|, i.e. |X| + |Y| <= t + z.
    let a_target = pair.u.len() as i64 - t_count as i64 - z_u.len() as i64;
    let b_target = pair.w.len() as i64 - t_count as i64 - z as i64 - z_w.len() as i64;
    if a_target < 0 || b_target < 0 || x_set.len() + y_size > t_count + z {
        return Ok(PipelineOutcome::Failed(
            StageFailure::new(
                "capacity",
                "reserved sets leave too few host vertices for the stripped tree",
            )
            .count("a_target", a_target)
            .count("b_target", b_target)
            .count("x_size", x_set.len() as i64)
            .count("y_size", y_size as i64)
            .count("t", t_count as i64)
            .count("z", z as i64),
        ));
    }
    let (a_target, b_target) = (a_target as usize, b_target as usize);

    // Reserve t out-stars (kind A) and t + z in-stars (kind B), smallest
    // first by total size then center, and pick the leaves to strip.
    let census = pendant_star_census(t);
    let (have_a, have_b) = census.star_counts();
    if have_a < t_count || have_b < t_count + z {
        return Ok(PipelineOutcome::Failed(
            StageFailure::new(
                "star-reservation",
                "the tree has too few pendant stars for the reservation",
            )
            .count("a_needed", t_count as i64)
            .count("a_available", have_a as i64)
            .count("b_needed", (t_count + z) as i64)
            .count("b_available", have_b as i64),
        ));
    }
    let mut a_stars = census.a_stars.clone();
    let mut b_stars = census.b_stars.clone();
    a_stars.sort_by_key(|s| (s.leaves.len(), s.center));
    b_stars.sort_by_key(|s| (s.leaves.len(), s.center));
    a_stars.truncate(t_count);
    b_stars.truncate(t_count + z);

    let mut specs: Vec<LeafStripSpec> = Vec::with_capacity(t_count + t_count + z);
    let mut a_sel: Vec<SelectedStar> = Vec::with_capacity(t_count);
    let mut b_sel: Vec<SelectedStar> = Vec::with_capacity(t_count + z);
    for s in &a_stars {
        let out_leaf = smallest_leaf(t, s, false).expect("kind A has an out-leaf");
        specs.push(LeafStripSpec {
            anchor: s.center,
            in_leaf: None,
            out_leaf: Some(out_leaf),
        });
        a_sel.push(SelectedStar {
            center: s.center,
            in_leaf: None,
            out_leaf: Some(out_leaf),
        });
    }
    for (i, s) in b_stars.iter().enumerate() {
        let in_leaf = smallest_leaf(t, s, true).expect("kind B has an in-leaf");
        let out_leaf = if i < t_count {
            None
        } else {
            Some(smallest_leaf(t, s, false).expect("kind B has an out-leaf"))
        };
        specs.push(LeafStripSpec {
            anchor: s.center,
            in_leaf: Some(in_leaf),
            out_leaf,
        });
        b_sel.push(SelectedStar {
            center: s.center,
            in_leaf: Some(in_leaf),
            out_leaf,
        });
    }
    let stripped = t.strip_leaf_pairs(&specs)?;
    let tp = &stripped.tree;
    debug_assert_eq!(tp.n(), a_target + b_target);
    let mut new_of = vec![usize::MAX; n];
    for (new, &old) in stripped.kept.iter().enumerate() {
        new_of[old] = new;
    }

    // Stripped stars, in new labels, as forced subtrees for the split: the
    // out-stars' remainders must join the U side, the in-stars' the W side.
    let to_new = |s: &SelectedStar, star: &PendantStar| -> Vec<usize> {
        let mut sub = vec![new_of[star.center]];
        sub.extend(
            star.leaves
                .iter()
                .filter(|&&l| Some(l) != s.in_leaf && Some(l) != s.out_leaf)
                .map(|&l| new_of[l]),
        );
        sub
    };
    let in_subtrees: Vec<Vec<usize>> = a_sel
        .iter()
        .zip(&a_stars)
        .map(|(s, star)| to_new(s, star))
        .collect();
    let out_subtrees: Vec<Vec<usize>> = b_sel
        .iter()
        .zip(&b_stars)
        .map(|(s, star)| to_new(s, star))
        .collect();
    let split = match nice_split(tp, &in_subtrees, &out_subtrees, a_target, b_target) {
        Ok(split) => split,
        Err(e) => {
            return Ok(PipelineOutcome::Failed(
                StageFailure::new("nice-split", e.to_string())
                    .count("a_target", a_target as i64)
                    .count("b_target", b_target as i64),
            ));
        }
    };
    let (a_side, b_side) = split;

    // The greedy stage's reverse-edge caps hold by construction of Z; the
    // ceiling keeps them valid when the thresholds are fractional.
    let cap = f64::max(thr_u, thr_w).ceil() as usize;
    let greedy_params = GreedyPairParams {
        margin: 0,
        max_reverse: Some(cap),
        node_budget: params.node_budget,
    };
    let u_prime = pair.u.difference(&z_u);
    let y_pool: Vec<usize> = w0.difference(&x_set).to_vec();
    let q_list: Vec<usize> = z_u.union(&z_w).to_vec();

    let mut last_failure =
        StageFailure::new("y-selection", "no helper-set draw met the degree condition")
            .count("attempts", params.retry_budget as i64);
    'attempt: for attempt in 0..params.retry_budget {
        // Draw Y uniformly from W0 \ X and check the cover-degree condition:
        // every unreserved W-vertex needs semidegree at least z into Y. The
        // cover stage consumes at most z - 1 helpers before its last pick,
        // so this is exactly the bound that keeps it from running dry.
        let mut rng = rng_from_seed(derive_seed(params.seed, attempt as u64));
        let y = if y_size == 0 {
            VertSet::empty(n)
        } else {
            if y_pool.len() < y_size {
                return Ok(PipelineOutcome::Failed(
                    StageFailure::new("capacity", "helper set cannot fit beside X")
                        .count("pool", y_pool.len() as i64)
                        .count("y_size", y_size as i64),
                ));
            }
            VertSet::from_iter_n(
                n,
                sample(&mut rng, y_pool.len(), y_size)
                    .iter()
                    .map(|i| y_pool[i]),
            )
        };
        let w_prime = w0.difference(&x_set).difference(&y);
        if !degenerate {
            let short = w_prime.iter().find(|&v| g.semideg_in(v, &y) < z);
            if let Some(v) = short {
                last_failure = StageFailure::new(
                    "y-selection",
                    "a W-side vertex has too little semidegree into the helper set",
                )
                .count("vertex", v as i64)
                .count("semidegree", g.semideg_in(v, &y) as i64)
                .count("needed", z as i64)
                .count("attempt", attempt as i64);
                continue 'attempt;
            }
        }

        let outcome = greedy_pair_embed(tp, &a_side, &b_side, g, &u_prime, &w_prime, &greedy_params)?;
        let partial = match outcome {
            PipelineOutcome::Embedded(e) => e,
            PipelineOutcome::Failed(f) => {
                last_failure = f;
                continue 'attempt;
            }
        };
        // Lift to the original tree's labels.
        let mut emb = Embedding::new(n);
        for (new, h) in partial.assigned() {
            emb.set(stripped.kept[new], h);
        }

        // Cover Z: pair the j-th exceptional vertex with the j-th extra
        // in-star. The star's center already sits in W'; whichever of the
        // stripped leaf pair matches the edge direction to q takes q, the
        // other takes a helper vertex from Y.
        let mut y_used = VertSet::empty(n);
        for (j, &q) in q_list.iter().enumerate() {
            let star = &b_sel[t_count + j];
            let w_host = emb.get(star.center).expect("centers are embedded");
            let (in_leaf, out_leaf) = (star.in_leaf.unwrap(), star.out_leaf.unwrap());
            let partner = if g.has_edge(q, w_host) {
                emb.set(in_leaf, q);
                g.out_set(w_host).intersection(&y).difference(&y_used).min()
            } else {
                emb.set(out_leaf, q);
                g.in_set(w_host).intersection(&y).difference(&y_used).min()
            };
            let Some(p) = partner else {
                last_failure = StageFailure::new(
                    "z-cover",
                    "no unused helper vertex adjacent to a cover star's center",
                )
                .count("cover_index", j as i64)
                .count("z", z as i64)
                .count("helpers_left", (y.len() - y_used.len()) as i64);
                continue 'attempt;
            };
            y_used.insert(p);
            if g.has_edge(q, w_host) {
                emb.set(out_leaf, p);
            } else {
                emb.set(in_leaf, p);
            }
        }

        // Two perfect matchings place the remaining stripped leaves: the
        // out-stars' out-leaves go from their centers' images into the
        // uncovered W vertices, the in-stars' in-leaves come from the
        // uncovered U vertices into their centers' images.
        let covered = emb.image(n);
        let q_minus: Vec<usize> = pair.u.difference(&covered).to_vec();
        let q_plus: Vec<usize> = pair.w.difference(&covered).to_vec();
        assert_eq!(q_minus.len(), t_count, "uncovered-U count is forced");
        assert_eq!(q_plus.len(), t_count, "uncovered-W count is forced");
        let p_minus: Vec<usize> = a_sel
            .iter()
            .map(|s| emb.get(s.center).expect("centers are embedded"))
            .collect();
        let p_plus: Vec<usize> = b_sel[..t_count]
            .iter()
            .map(|s| emb.get(s.center).expect("centers are embedded"))
            .collect();

        match perfect_matching(g, &p_minus, &q_plus, MatchDirection::XToY)? {
            MatchingOutcome::Perfect(pairs) => {
                for (x_host, y_host) in pairs {
                    let i = p_minus
                        .iter()
                        .position(|&p| p == x_host)
                        .expect("matching stays on the sides");
                    emb.set(a_sel[i].out_leaf.unwrap(), y_host);
                }
            }
            MatchingOutcome::HallViolator { subset, .. } => {
                last_failure = StageFailure::new(
                    "final-matching",
                    "no perfect matching from the out-star centers onto uncovered W",
                )
                .count("violator_size", subset.len() as i64)
                .count("t", t_count as i64);
                continue 'attempt;
            }
        }
        match perfect_matching(g, &q_minus, &p_plus, MatchDirection::XToY)? {
            MatchingOutcome::Perfect(pairs) => {
                for (x_host, y_host) in pairs {
                    let i = p_plus
                        .iter()
                        .position(|&p| p == y_host)
                        .expect("matching stays on the sides");
                    emb.set(b_sel[i].in_leaf.unwrap(), x_host);
                }
            }
            MatchingOutcome::HallViolator { subset, .. } => {
                last_failure = StageFailure::new(
                    "final-matching",
                    "no perfect matching from uncovered U onto the in-star centers",
                )
                .count("violator_size", subset.len() as i64)
                .count("t", t_count as i64);
                continue 'attempt;
            }
        }

        super::validate_embedding(t, g, &emb)?;
        return Ok(PipelineOutcome::Embedded(emb));
    }
    Ok(PipelineOutcome::Failed(last_failure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::otree::planted_nice_tree;
    use rand::Rng;

    /// Host with random tournaments inside U = {0..u_n} and W = {u_n..n},
    /// every cross edge forward except the listed `(w, u)` reversals.
    fn planted_host(u_n: usize, w_n: usize, reversed: &[(usize, usize)], seed: u64) -> Tournament {
        let mut rng = rng_from_seed(seed);
        Tournament::from_orientation(u_n + w_n, |i, j| {
            // Callback sees i < j, so a cross pair always has i in U.
            if i < u_n && j >= u_n {
                !reversed.contains(&(j, i))
            } else {
                rng.gen_bool(0.5)
            }
        })
    }

    fn sides(u_n: usize, n: usize) -> (VertSet, VertSet) {
        (
            VertSet::from_iter_n(n, 0..u_n),
            VertSet::from_iter_n(n, u_n..n),
        )
    }

    #[test]
    fn planted_instance_embeds_spanning() {
        let t = planted_nice_tree(60, 4, 4, 11).unwrap();
        let g = planted_host(30, 30, &[], 12);
        let (u, w) = sides(30, 60);
        let pair = PairDecomposition::new(&g, u.clone(), w.clone(), 0.0).unwrap();
        let out = directed_pair_pipeline(&t, &g, &pair, &PairPipelineParams::default()).unwrap();
        let emb = out.embedding().expect("planted instance embeds");
        assert!(emb.is_complete());
        assert_eq!(emb.image(60).len(), 60);
    }

    #[test]
    fn exceptional_u_vertex_is_covered_by_an_extra_star() {
        // Vertex 0 of U receives 12 reverse edges, putting it over the
        // threshold sqrt(mu)*|W| = 10, so Z ∩ U = {0}: the spanning counts
        // must subtract the extra U vertex the cover stage consumes.
        let reversed: Vec<(usize, usize)> = (50..62).map(|w| (w, 0)).collect();
        let t = planted_nice_tree(100, 12, 13, 21).unwrap();
        let g = planted_host(50, 50, &reversed, 22);
        let (u, w) = sides(50, 100);
        let pair = PairDecomposition::new(&g, u, w, 0.04).unwrap();
        let params = PairPipelineParams {
            alpha: 1.0 / 250.0,
            beta: 0.12,
            psi: 0.08,
            nu: 0.2,
            retry_budget: 32,
            node_budget: Some(5_000_000),
            seed: 5,
        };
        let out = directed_pair_pipeline(&t, &g, &pair, &params).unwrap();
        let emb = out.embedding().expect("cover stage handles Z inside U");
        assert!(emb.is_complete());
    }

    #[test]
    fn oversized_helper_reservation_fails_capacity() {
        // psi = 0.3 wants a 12-vertex helper set, far beyond the t + z = 2
        // slack the matching stage returns, so the capacity pre-check stops
        // the run before any search.
        let t = planted_nice_tree(40, 3, 3, 31).unwrap();
        let g = planted_host(20, 20, &[], 32);
        let (u, w) = sides(20, 40);
        let pair = PairDecomposition::new(&g, u, w, 0.0).unwrap();
        let params = PairPipelineParams {
            psi: 0.3,
            ..PairPipelineParams::default()
        };
        let out = directed_pair_pipeline(&t, &g, &pair, &params).unwrap();
        let f = out.failure().expect("helper reservation cannot fit");
        assert_eq!(f.stage, "capacity");
    }

    #[test]
    fn non_nice_tree_is_a_precondition_error() {
        // A directed path has no pendant out-star and no qualifying in-star,
        // so any alpha > 0 is unattainable.
        let t = OrientedTree::new(24, (0..23).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let g = planted_host(12, 12, &[], 41);
        let (u, w) = sides(12, 24);
        let pair = PairDecomposition::new(&g, u, w, 0.0).unwrap();
        let err = directed_pair_pipeline(&t, &g, &pair, &PairPipelineParams::default());
        assert!(err.is_err());
    }

    #[test]
    fn hamilton_path_spans_a_perfect_directed_pair() {
        // mu = 0, beta = 0, alpha = 0: no reservations at all; the split
        // puts the first 12 path vertices on U and the rest on W, and the
        // component embeddings find Hamilton paths of both side tournaments.
        let t = OrientedTree::new(24, (0..23).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let g = planted_host(12, 12, &[], 42);
        let (u, w) = sides(12, 24);
        let pair = PairDecomposition::new(&g, u.clone(), w.clone(), 0.0).unwrap();
        let params = PairPipelineParams {
            alpha: 0.0,
            beta: 0.0,
            ..PairPipelineParams::default()
        };
        let out = directed_pair_pipeline(&t, &g, &pair, &params).unwrap();
        let emb = out.embedding().expect("Hamilton path spans the pair");
        for v in 0..12 {
            assert!(u.contains(emb.get(v).unwrap()));
        }
        for v in 12..24 {
            assert!(w.contains(emb.get(v).unwrap()));
        }
    }

    #[test]
    fn undersized_sides_and_size_mismatch_are_errors() {
        let t = planted_nice_tree(24, 2, 2, 51).unwrap();
        let g = planted_host(12, 12, &[], 52);
        let (u, w) = sides(12, 24);
        let pair = PairDecomposition::new(&g, u, w, 0.0).unwrap();
        // Tree size != host size.
        let small = planted_nice_tree(20, 2, 2, 53).unwrap();
        assert!(
            directed_pair_pipeline(&small, &g, &pair, &PairPipelineParams::default()).is_err()
        );
        // A 4-vertex U side falls below the default floor ceil(0.2*24) = 5.
        let lop = planted_host(4, 20, &[], 54);
        let (u4, w20) = sides(4, 24);
        let lop_pair = PairDecomposition::new(&lop, u4, w20, 0.0).unwrap();
        assert!(
            directed_pair_pipeline(&t, &lop, &lop_pair, &PairPipelineParams::default()).is_err()
        );
    }

    #[test]
    fn pair_decomposition_validates_partition_and_mu() {
        let g = planted_host(10, 10, &[(10, 0), (11, 0)], 61);
        let n = 20;
        let (u, w) = sides(10, n);
        // Two reverse edges against an allowance of 0: rejected.
        assert!(PairDecomposition::new(&g, u.clone(), w.clone(), 0.0).is_err());
        // Allowance 2/100: accepted.
        assert!(PairDecomposition::new(&g, u.clone(), w.clone(), 0.02).is_ok());
        // Overlapping or non-covering sides: rejected.
        let overlap = VertSet::from_iter_n(n, 9..n);
        assert!(PairDecomposition::new(&g, u.clone(), overlap, 0.5).is_err());
        let short = VertSet::from_iter_n(n, 10..n - 1);
        assert!(PairDecomposition::new(&g, u, short, 0.5).is_err());
    }
}
