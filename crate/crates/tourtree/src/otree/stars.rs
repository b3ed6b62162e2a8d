//! Pendant cherries, pendant star census, and niceness certification.
//!
//! A pendant cherry is a path on three vertices whose two ends are leaves
//! of the whole tree and whose center has exactly one neighbour outside the
//! triple (attachment at the center). A pendant star is a vertex all of
//! whose neighbours but exactly one are leaves, together with those leaves;
//! its kind depends on the attach edge's direction and which leaf
//! orientations appear inside:
//!
//! - kind A: attach edge points away from the star, and some star leaf is
//!   an out-leaf of the tree;
//! - kind B: attach edge points into the star, and the star leaves include
//!   both an in-leaf and an out-leaf.
//!
//! A tree is α-nice when ⌈αn⌉ disjoint stars of each kind exist; stars at
//! distinct centers are automatically disjoint, so the census is a valid
//! certificate (a lower bound on the best possible star packing).

use super::OrientedTree;
use crate::{Error, Result};
use serde::Serialize;

/// All pendant cherries `(center, leaf, leaf)` with `leaf < leaf`,
/// ascending by center then leaf pair.
pub fn pendant_cherries(t: &OrientedTree) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for c in 0..t.n() {
        // exactly one neighbour outside the triple means degree 3
        if t.degree(c) != 3 {
            continue;
        }
        let leaves: Vec<usize> = t
            .neighbours(c)
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| t.is_leaf(u))
            .collect();
        for i in 0..leaves.len() {
            for j in (i + 1)..leaves.len() {
                out.push((c, leaves[i], leaves[j]));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StarKind {
    A,
    B,
}

/// A maximal pendant star: `center` plus every leaf neighbour, attached to
/// the rest of the tree by a single edge.
#[derive(Debug, Clone, Serialize)]
pub struct PendantStar {
    pub center: usize,
    /// The center's leaf neighbours, ascending.
    pub leaves: Vec<usize>,
    /// `(tail, head)` of the unique edge between the star and the rest.
    pub attach_edge: (usize, usize),
    pub kind: StarKind,
}

/// Disjoint star families witnessing α-niceness up to `alpha_max`.
#[derive(Debug, Clone, Serialize)]
pub struct NicenessCertificate {
    pub a_stars: Vec<PendantStar>,
    pub b_stars: Vec<PendantStar>,
    /// `min(#A, #B) / n`: the tree is α-nice exactly for ⌈αn⌉ ≤ min(#A, #B).
    pub alpha_max: f64,
}

impl NicenessCertificate {
    pub fn star_counts(&self) -> (usize, usize) {
        (self.a_stars.len(), self.b_stars.len())
    }
}

/// Scan every maximal pendant star and classify it. A tree that is itself a
/// star has no attach edge and yields an empty certificate.
pub fn pendant_star_census(t: &OrientedTree) -> NicenessCertificate {
    let mut a_stars = Vec::new();
    let mut b_stars = Vec::new();
    for center in 0..t.n() {
        let mut leaves = Vec::new();
        let mut non_leaf = Vec::new();
        for &(u, _) in t.neighbours(center) {
            if t.is_leaf(u) {
                leaves.push(u);
            } else {
                non_leaf.push(u);
            }
        }
        // a pendant star needs at least one leaf and exactly one outside
        // neighbour (zero outside neighbours = the whole tree is a star)
        if leaves.is_empty() || non_leaf.len() != 1 {
            continue;
        }
        let rest = non_leaf[0];
        let out_of_star = t.edge_between(center, rest).expect("adjacent");
        let has_out_leaf = leaves
            .iter()
            .any(|&u| t.edge_between(center, u) == Some(true));
        let has_in_leaf = leaves
            .iter()
            .any(|&u| t.edge_between(u, center) == Some(true));
        if out_of_star && has_out_leaf {
            a_stars.push(PendantStar {
                center,
                leaves,
                attach_edge: (center, rest),
                kind: StarKind::A,
            });
        } else if !out_of_star && has_in_leaf && has_out_leaf {
            b_stars.push(PendantStar {
                center,
                leaves,
                attach_edge: (rest, center),
                kind: StarKind::B,
            });
        }
    }
    let alpha_max = a_stars.len().min(b_stars.len()) as f64 / t.n() as f64;
    NicenessCertificate { a_stars, b_stars, alpha_max }
}

/// Is the tree α-nice? True iff the census finds at least ⌈αn⌉ stars of
/// each kind; the certificate is returned either way.
pub fn is_alpha_nice(t: &OrientedTree, alpha: f64) -> Result<(bool, NicenessCertificate)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let cert = pendant_star_census(t);
    let s = (alpha * t.n() as f64 - 1e-9).ceil().max(1.0) as usize;
    let (na, nb) = cert.star_counts();
    Ok((na.min(nb) >= s, cert))
}

/// Independent re-validation of a certificate against the tree: star
/// shapes, kind conditions, and pairwise disjointness. Used by tests to
/// keep the census honest.
pub fn validate_certificate(t: &OrientedTree, cert: &NicenessCertificate) -> Result<()> {
    let mut used = vec![false; t.n()];
    for star in cert.a_stars.iter().chain(&cert.b_stars) {
        if star.leaves.is_empty() {
            return Err(Error::format(format!("star at {} has no leaves", star.center)));
        }
        for &v in star.leaves.iter().chain(std::iter::once(&star.center)) {
            if v >= t.n() {
                return Err(Error::format(format!("star vertex {v} out of range")));
            }
            if used[v] {
                return Err(Error::format(format!("vertex {v} appears in two stars")));
            }
            used[v] = true;
        }
        let mut has_in = false;
        let mut has_out = false;
        for &leaf in &star.leaves {
            if !t.is_leaf(leaf) {
                return Err(Error::format(format!("{leaf} is not a leaf of the tree")));
            }
            match t.edge_between(star.center, leaf) {
                Some(true) => has_out = true,
                Some(false) => has_in = true,
                None => {
                    return Err(Error::format(format!(
                        "leaf {leaf} not adjacent to center {}",
                        star.center
                    )))
                }
            }
        }
        let (tail, head) = star.attach_edge;
        if t.edge_between(tail, head) != Some(true) {
            return Err(Error::format(format!(
                "attach edge ({tail},{head}) is not an edge of the tree"
            )));
        }
        match star.kind {
            StarKind::A => {
                if tail != star.center {
                    return Err(Error::format(
                        "kind-A attach edge must leave the star".to_string(),
                    ));
                }
                if !has_out {
                    return Err(Error::format("kind-A star needs an out-leaf".to_string()));
                }
            }
            StarKind::B => {
                if head != star.center {
                    return Err(Error::format(
                        "kind-B attach edge must enter the star".to_string(),
                    ));
                }
                if !(has_in && has_out) {
                    return Err(Error::format(
                        "kind-B star needs an in-leaf and an out-leaf".to_string(),
                    ));
                }
            }
        }
        // removing the star must leave the rest connected: the star's only
        // boundary edge is the attach edge
        for &v in star.leaves.iter().chain(std::iter::once(&star.center)) {
            for &(u, _) in t.neighbours(v) {
                let inside =
                    u == star.center || star.leaves.binary_search(&u).is_ok();
                let is_attach = (v, u) == (star.center, if tail == star.center { head } else { tail });
                if !inside && !is_attach {
                    return Err(Error::format(format!(
                        "star at {} has a second boundary edge ({v},{u})",
                        star.center
                    )));
                }
            }
        }
    }
    Ok(())
}
