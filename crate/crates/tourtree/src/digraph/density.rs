//! Density, almost-directedness, and regularity between disjoint vertex
//! sets of a tournament.
//!
//! Density follows the one-way convention: `d(X, Y)` counts only `X→Y`
//! edges over `|X||Y|`. A pair is μ-almost-directed when at most a μ
//! fraction of its slots run backwards. A pair is (d, ε)-regular when every
//! subset pair above the ε-size floor has density within ε of d; the
//! exhaustive checker is ground truth for sides up to 16, the sampled
//! checker probes uniformly random qualifying subset pairs and can refute
//! (a found witness is a proof) but never certify.

use super::Tournament;
use crate::bitset::VertSet;
use crate::rng::rng_from_seed;
use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;

/// Exhaustive regularity enumerates `2^|X|` subsets; refuse beyond this.
pub const EXHAUSTIVE_SIDE_LIMIT: usize = 16;

/// Comparisons against the ε band use this slack so exact-boundary
/// densities count as within the band.
const BAND_TOL: f64 = 1e-9;

fn check_pair(t: &Tournament, x: &VertSet, y: &VertSet) -> Result<()> {
    if x.capacity() != t.n() || y.capacity() != t.n() {
        return Err(Error::param(format!(
            "vertex sets sized for order {} / {}, tournament has order {}",
            x.capacity(),
            y.capacity(),
            t.n()
        )));
    }
    if x.intersection_len(y) != 0 {
        return Err(Error::param("X and Y must be disjoint"));
    }
    Ok(())
}

/// Number of edges running `X → Y`.
pub fn edge_count_between(t: &Tournament, x: &VertSet, y: &VertSet) -> usize {
    x.iter().map(|u| t.out_deg_in(u, y)).sum()
}

/// `d(X, Y) = e(X→Y) / (|X||Y|)`. Both sides must be nonempty and disjoint.
pub fn density(t: &Tournament, x: &VertSet, y: &VertSet) -> Result<f64> {
    check_pair(t, x, y)?;
    let (p, q) = (x.len(), y.len());
    if p == 0 || q == 0 {
        return Err(Error::param("density needs nonempty sides"));
    }
    Ok(edge_count_between(t, x, y) as f64 / (p * q) as f64)
}

/// Outcome of the μ-almost-directed test for a pair `(X, Y)`.
#[derive(Debug, Clone, Serialize)]
pub struct AlmostDirected {
    pub holds: bool,
    /// Exact number of edges running `Y → X`.
    pub reverse_edges: usize,
    /// The allowance `μ·|X||Y|` the count was compared against.
    pub threshold: f64,
}

/// `(X, Y)` is μ-almost-directed iff `e(Y→X) ≤ μ|X||Y|`.
pub fn is_mu_almost_directed(
    t: &Tournament,
    x: &VertSet,
    y: &VertSet,
    mu: f64,
) -> Result<AlmostDirected> {
    check_pair(t, x, y)?;
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::param(format!("mu must lie in [0,1], got {mu}")));
    }
    let reverse_edges = edge_count_between(t, y, x);
    let threshold = mu * (x.len() * y.len()) as f64;
    Ok(AlmostDirected {
        holds: reverse_edges as f64 <= threshold + BAND_TOL,
        reverse_edges,
        threshold,
    })
}

/// How to run a regularity check.
#[derive(Debug, Clone)]
pub enum RegMode {
    /// Enumerate every qualifying subset pair (sides ≤ 16). Can certify.
    Exhaustive,
    /// Test `samples` uniformly random qualifying subset pairs. Can refute
    /// with a witness; a clean run is only a sampled pass.
    Sampled { samples: u32, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegOutcome {
    Certified,
    Refuted,
    SampledPass,
    SampledFail,
}

/// A subset pair whose density escapes the ε band.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityWitness {
    pub x_sub: Vec<usize>,
    pub y_sub: Vec<usize>,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityVerdict {
    pub outcome: RegOutcome,
    /// Present exactly when the outcome is `Refuted`.
    pub witness: Option<RegularityWitness>,
    /// Density of the full pair `(X, Y)`.
    pub density: f64,
    /// Sample budget consumed; `None` for exhaustive runs.
    pub samples_used: Option<u32>,
}

impl RegularityVerdict {
    pub fn is_refuted(&self) -> bool {
        self.outcome == RegOutcome::Refuted
    }
}

/// Smallest subset size meeting the floor `size ≥ eps·side`, at least 1.
fn size_floor(eps: f64, side: usize) -> usize {
    let f = (eps * side as f64 - BAND_TOL).ceil();
    (f.max(1.0)) as usize
}

fn validate_reg_params(d: f64, eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::param(format!("density target must lie in [0,1], got {d}")));
    }
    if eps <= 0.0 {
        return Err(Error::param(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Check (d, ε)-regularity of the pair `(X, Y)`: every `X′ ⊆ X`, `Y′ ⊆ Y`
/// with `|X′| ≥ ε|X|`, `|Y′| ≥ ε|Y|` must satisfy `|d(X′,Y′) − d| ≤ ε`.
pub fn regularity_check(
    t: &Tournament,
    x: &VertSet,
    y: &VertSet,
    d: f64,
    eps: f64,
    mode: &RegMode,
) -> Result<RegularityVerdict> {
    check_pair(t, x, y)?;
    validate_reg_params(d, eps)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::param("regularity needs nonempty sides"));
    }
    let overall = density(t, x, y)?;
    match mode {
        RegMode::Exhaustive => exhaustive_check(t, x, y, d, eps, overall),
        RegMode::Sampled { samples, seed } => {
            sampled_check(t, x, y, d, eps, overall, *samples, *seed)
        }
    }
}

/// Regularity plus the per-vertex floors: each `x ∈ X` needs out-degree
/// into `Y` at least `(d−ε)|Y|`, each `y ∈ Y` in-degree from `X` at least
/// `(d−ε)|X|`. A floor violation refutes with the single vertex against the
/// whole other side as witness.
pub fn super_regularity_check(
    t: &Tournament,
    x: &VertSet,
    y: &VertSet,
    d: f64,
    eps: f64,
    mode: &RegMode,
) -> Result<RegularityVerdict> {
    check_pair(t, x, y)?;
    validate_reg_params(d, eps)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::param("regularity needs nonempty sides"));
    }
    let overall = density(t, x, y)?;
    let floor_x = (d - eps) * y.len() as f64;
    for u in x.iter() {
        let deg = t.out_deg_in(u, y);
        if (deg as f64) < floor_x - BAND_TOL {
            return Ok(RegularityVerdict {
                outcome: RegOutcome::Refuted,
                witness: Some(RegularityWitness {
                    x_sub: vec![u],
                    y_sub: y.to_vec(),
                    density: deg as f64 / y.len() as f64,
                }),
                density: overall,
                samples_used: None,
            });
        }
    }
    let floor_y = (d - eps) * x.len() as f64;
    for v in y.iter() {
        let deg = t.in_deg_in(v, x);
        if (deg as f64) < floor_y - BAND_TOL {
            return Ok(RegularityVerdict {
                outcome: RegOutcome::Refuted,
                witness: Some(RegularityWitness {
                    x_sub: x.to_vec(),
                    y_sub: vec![v],
                    density: deg as f64 / x.len() as f64,
                }),
                density: overall,
                samples_used: None,
            });
        }
    }
    regularity_check(t, x, y, d, eps, mode)
}

/// Exhaustive sweep. For each subset `X′` the extreme densities over `Y′`
/// of each size are reached by taking the vertices of largest (resp.
/// smallest) in-degree from `X′`, so sorting those degrees once per `X′`
/// covers every `Y′` without enumerating them.
fn exhaustive_check(
    t: &Tournament,
    x: &VertSet,
    y: &VertSet,
    d: f64,
    eps: f64,
    overall: f64,
) -> Result<RegularityVerdict> {
    let xs = x.to_vec();
    let ys = y.to_vec();
    let (p, q) = (xs.len(), ys.len());
    if p > EXHAUSTIVE_SIDE_LIMIT || q > EXHAUSTIVE_SIDE_LIMIT {
        return Err(Error::refused(format!(
            "exhaustive regularity on sides {p} x {q}: limit is {EXHAUSTIVE_SIDE_LIMIT} per side"
        )));
    }
    // in_mask[k] = positions of X whose vertex beats ys[k]
    let in_mask: Vec<u32> = ys
        .iter()
        .map(|&v| {
            xs.iter()
                .enumerate()
                .filter(|&(_, &u)| t.has_edge(u, v))
                .fold(0u32, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let x_min = size_floor(eps, p);
    let y_min = size_floor(eps, q);
    let lo_band = d - eps - BAND_TOL;
    let hi_band = d + eps + BAND_TOL;

    let mut degs: Vec<(usize, usize)> = Vec::with_capacity(q); // (in-degree from X′, label)
    for xmask in 1u32..1 << p {
        let xsize = xmask.count_ones() as usize;
        if xsize < x_min {
            continue;
        }
        degs.clear();
        for k in 0..q {
            degs.push(((in_mask[k] & xmask).count_ones() as usize, ys[k]));
        }
        // ascending by (degree, label): prefix sums give the minimum-density
        // Y′ of each size, suffix-style reversal the maximum
        degs.sort_unstable();
        let mut prefix_min = 0usize;
        let mut prefix_max = 0usize;
        for s in 1..=q {
            prefix_min += degs[s - 1].0;
            prefix_max += degs[q - s].0;
            if s < y_min {
                continue;
            }
            let denom = (xsize * s) as f64;
            for (sum, pick_largest) in [(prefix_min, false), (prefix_max, true)] {
                let dens = sum as f64 / denom;
                if dens < lo_band || dens > hi_band {
                    let mut y_sub: Vec<usize> = if pick_largest {
                        degs[q - s..].iter().map(|&(_, v)| v).collect()
                    } else {
                        degs[..s].iter().map(|&(_, v)| v).collect()
                    };
                    y_sub.sort_unstable();
                    let x_sub: Vec<usize> = (0..p)
                        .filter(|i| xmask >> i & 1 == 1)
                        .map(|i| xs[i])
                        .collect();
                    return Ok(RegularityVerdict {
                        outcome: RegOutcome::Refuted,
                        witness: Some(RegularityWitness { x_sub, y_sub, density: dens }),
                        density: overall,
                        samples_used: None,
                    });
                }
            }
        }
    }
    Ok(RegularityVerdict {
        outcome: RegOutcome::Certified,
        witness: None,
        density: overall,
        samples_used: None,
    })
}

/// Draw a uniformly random subset meeting the size floor: independent fair
/// coins per vertex, rejecting draws below the floor.
fn draw_qualifying(
    rng: &mut impl Rng,
    side: &[usize],
    floor: usize,
    n: usize,
) -> Result<VertSet> {
    for _ in 0..100_000 {
        let mut s = VertSet::empty(n);
        let mut size = 0;
        for &v in side {
            if rng.gen_bool(0.5) {
                s.insert(v);
                size += 1;
            }
        }
        if size >= floor {
            return Ok(s);
        }
    }
    Err(Error::refused(format!(
        "rejection sampling cannot hit subsets of size >= {floor} from a side of {}; \
         lower eps or use the exhaustive mode",
        side.len()
    )))
}

#[allow(clippy::too_many_arguments)]
fn sampled_check(
    t: &Tournament,
    x: &VertSet,
    y: &VertSet,
    d: f64,
    eps: f64,
    overall: f64,
    samples: u32,
    seed: u64,
) -> Result<RegularityVerdict> {
    let xs = x.to_vec();
    let ys = y.to_vec();
    let x_min = size_floor(eps, xs.len());
    let y_min = size_floor(eps, ys.len());
    let mut rng = rng_from_seed(seed);
    for used in 1..=samples {
        let xp = draw_qualifying(&mut rng, &xs, x_min, t.n())?;
        let yp = draw_qualifying(&mut rng, &ys, y_min, t.n())?;
        let dens = density(t, &xp, &yp)?;
        if dens < d - eps - BAND_TOL || dens > d + eps + BAND_TOL {
            // a sampled witness is still a proof of irregularity
            return Ok(RegularityVerdict {
                outcome: RegOutcome::Refuted,
                witness: Some(RegularityWitness {
                    x_sub: xp.to_vec(),
                    y_sub: yp.to_vec(),
                    density: dens,
                }),
                density: overall,
                samples_used: Some(used),
            });
        }
    }
    Ok(RegularityVerdict {
        outcome: RegOutcome::SampledPass,
        witness: None,
        density: overall,
        samples_used: Some(samples),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{random_tournament, transitive};
    use super::*;

    fn halves(n: usize) -> (VertSet, VertSet) {
        (
            VertSet::from_iter_n(n, 0..n / 2),
            VertSet::from_iter_n(n, n / 2..n),
        )
    }

    #[test]
    fn density_on_transitive_halves() {
        let t = transitive(10);
        let (top, bottom) = halves(10);
        assert_eq!(density(&t, &top, &bottom).unwrap(), 1.0);
        assert_eq!(density(&t, &bottom, &top).unwrap(), 0.0);
    }

    #[test]
    fn density_rejects_bad_sets() {
        let t = transitive(6);
        let a = VertSet::from_iter_n(6, [0, 1, 2]);
        let b = VertSet::from_iter_n(6, [2, 3]);
        assert!(density(&t, &a, &b).is_err()); // overlap
        assert!(density(&t, &a, &VertSet::empty(6)).is_err());
    }

    #[test]
    fn random_density_near_half() {
        let t = random_tournament(200, 11);
        let (x, y) = halves(200);
        let d = density(&t, &x, &y).unwrap();
        assert!((d - 0.5).abs() < 0.05, "density {d} strays from 1/2");
    }

    #[test]
    fn almost_directed_thresholds() {
        let mut t = transitive(20);
        let (top, bottom) = halves(20);
        // a directed pair is 0-almost-directed
        let r = is_mu_almost_directed(&t, &top, &bottom, 0.0).unwrap();
        assert!(r.holds);
        assert_eq!(r.reverse_edges, 0);
        // flip three cross edges backwards: holds iff mu >= 3/100
        t.flip_edge(0, 10);
        t.flip_edge(1, 11);
        t.flip_edge(2, 12);
        let r = is_mu_almost_directed(&t, &top, &bottom, 0.03).unwrap();
        assert!(r.holds && r.reverse_edges == 3);
        assert!(!is_mu_almost_directed(&t, &top, &bottom, 0.029).unwrap().holds);
        // the fully reversed pair fails for any mu < 1
        let r = is_mu_almost_directed(&t, &bottom, &top, 0.96).unwrap();
        assert!(!r.holds && r.reverse_edges == 97);
        assert!(is_mu_almost_directed(&t, &bottom, &top, 1.0).unwrap().holds);
    }

    #[test]
    fn complete_and_empty_pairs_are_regular() {
        let t = transitive(16);
        let (top, bottom) = halves(16);
        let v = regularity_check(&t, &top, &bottom, 1.0, 0.1, &RegMode::Exhaustive).unwrap();
        assert_eq!(v.outcome, RegOutcome::Certified);
        assert_eq!(v.density, 1.0);
        let v = regularity_check(&t, &bottom, &top, 0.0, 0.1, &RegMode::Exhaustive).unwrap();
        assert_eq!(v.outcome, RegOutcome::Certified);
    }

    #[test]
    fn transitive_halves_are_irregular_at_half() {
        // inside one half of a transitive tournament, top-vs-top subsets
        // are all-one or all-zero; d=0.5 cannot hold
        let t = transitive(12);
        let x = VertSet::from_iter_n(12, 0..6);
        let y = VertSet::from_iter_n(12, 6..12);
        let v = regularity_check(&t, &x, &y, 0.5, 0.2, &RegMode::Exhaustive).unwrap();
        assert_eq!(v.outcome, RegOutcome::Refuted);
        let w = v.witness.expect("refutation carries a witness");
        // the witness must actually violate the band
        let xw = VertSet::from_iter_n(12, w.x_sub.iter().copied());
        let yw = VertSet::from_iter_n(12, w.y_sub.iter().copied());
        let dens = density(&t, &xw, &yw).unwrap();
        assert_eq!(dens, w.density);
        assert!((dens - 0.5).abs() > 0.2);
    }

    #[test]
    fn exhaustive_refuses_oversized_sides() {
        let t = random_tournament(40, 1);
        let x = VertSet::from_iter_n(40, 0..20);
        let y = VertSet::from_iter_n(40, 20..40);
        assert!(matches!(
            regularity_check(&t, &x, &y, 0.5, 0.3, &RegMode::Exhaustive),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn sampled_mode_refutes_with_checkable_witness() {
        let t = transitive(40);
        let x = VertSet::from_iter_n(40, 0..20);
        let y = VertSet::from_iter_n(40, 20..40);
        // (top, bottom) has density exactly 1; target 0.5 band 0.2 refutes
        // on the first sample
        let v = regularity_check(
            &t,
            &x,
            &y,
            0.5,
            0.2,
            &RegMode::Sampled { samples: 50, seed: 3 },
        )
        .unwrap();
        assert_eq!(v.outcome, RegOutcome::Refuted);
        assert_eq!(v.samples_used, Some(1));
        assert!(v.witness.is_some());
    }

    #[test]
    fn sampled_mode_passes_plausible_pairs() {
        let t = random_tournament(60, 5);
        let x = VertSet::from_iter_n(60, 0..30);
        let y = VertSet::from_iter_n(60, 30..60);
        let v = regularity_check(
            &t,
            &x,
            &y,
            0.5,
            0.25,
            &RegMode::Sampled { samples: 200, seed: 7 },
        )
        .unwrap();
        assert_eq!(v.outcome, RegOutcome::SampledPass);
        assert_eq!(v.samples_used, Some(200));
    }

    #[test]
    fn super_regularity_needs_degree_floors() {
        // random 12+12 split at d=0.5, eps=0.45: the subset condition holds
        // overwhelmingly often, but one vertex with a weak out-row breaks
        // super-regularity
        let t = random_tournament(24, 2026);
        let x = VertSet::from_iter_n(24, 0..12);
        let y = VertSet::from_iter_n(24, 12..24);
        let plain = regularity_check(&t, &x, &y, 0.5, 0.45, &RegMode::Exhaustive).unwrap();
        assert_eq!(plain.outcome, RegOutcome::Certified);

        let mut weak = t.clone();
        // strip vertex 0 of every out-edge into Y: floor (d−eps)|Y| = 0.6
        for v in 12..24 {
            if weak.has_edge(0, v) {
                weak.flip_edge(0, v);
            }
        }
        let sup = super_regularity_check(&weak, &x, &y, 0.5, 0.45, &RegMode::Exhaustive).unwrap();
        assert_eq!(sup.outcome, RegOutcome::Refuted);
        let w = sup.witness.unwrap();
        assert_eq!(w.x_sub, vec![0]);
    }
}
