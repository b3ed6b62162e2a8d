//! Seeded Monte Carlo experiments over uniform random trees: pendant-cherry
//! counts, niceness rates with cherry-orientation frequencies, maximum-degree
//! growth, and allocation balance. Each experiment samples labelled trees via
//! uniform Prüfer sequences, derives one RNG stream per trial from a master
//! seed, and aggregates in trial order, so sequential and parallel runs emit
//! byte-identical CSV. A JSON manifest captures everything needed to replay a
//! run bit-for-bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::allocation::allocate;
use crate::exec::{map_indexed, ExecMode};
use crate::otree::{is_alpha_nice, random_oriented_tree, OrientedTree};
use crate::rng::derive_seed;
use crate::{Error, Result, FORMAT_VERSION};

/// Everything needed to replay an experiment run: the experiment name, its
/// parameters, the master seed, and the code/format versions that produced
/// the artifact. Running the same manifest reproduces the CSV byte-for-byte.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentManifest {
    pub name: String,
    /// Parameters by name (`n`, `trials`, `k`, `alpha`, ...). A sorted map,
    /// so serialization order is stable.
    pub params: BTreeMap<String, serde_json::Value>,
    pub master_seed: u64,
    pub code_version: String,
    pub format_version: u32,
    /// Output path the artifact is (or is to be) written to.
    pub output: String,
}

impl ExperimentManifest {
    pub fn new(name: &str, master_seed: u64, output: &str) -> Self {
        ExperimentManifest {
            name: name.to_string(),
            params: BTreeMap::new(),
            master_seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            format_version: FORMAT_VERSION,
            output: output.to_string(),
        }
    }

    pub fn set_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn usize_param(&self, key: &str) -> Result<usize> {
        self.params
            .get(key)
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .ok_or_else(|| {
                Error::param(format!(
                    "experiment `{}` needs an unsigned integer parameter `{key}`",
                    self.name
                ))
            })
    }

    fn f64_param(&self, key: &str) -> Result<f64> {
        self.params.get(key).and_then(|v| v.as_f64()).ok_or_else(|| {
            Error::param(format!(
                "experiment `{}` needs a numeric parameter `{key}`",
                self.name
            ))
        })
    }

    /// Run the experiment this manifest describes and return its CSV. The
    /// execution mode is not part of the manifest: results are identical
    /// across modes, `mode` only chooses how trials are scheduled.
    pub fn run(&self, mode: ExecMode) -> Result<String> {
        let trials = self.usize_param("trials")?;
        let n = self.usize_param("n")?;
        match self.name.as_str() {
            "cherry" => cherry_experiment(n, trials, self.master_seed, mode)?.to_csv(),
            "niceness" => {
                let alpha = self.f64_param("alpha")?;
                niceness_experiment(n, alpha, trials, self.master_seed, mode)?.to_csv()
            }
            "degree" => degree_experiment(n, trials, self.master_seed, mode)?.to_csv(),
            "allocation" => {
                let k = self.usize_param("k")?;
                allocation_experiment(n, k, trials, self.master_seed, mode)?.to_csv()
            }
            other => Err(Error::param(format!(
                "unknown experiment `{other}` (expected cherry, niceness, degree, or allocation)"
            ))),
        }
    }
}

/// Mean, sample standard deviation, and standard error of a sample,
/// accumulated in index order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
}

fn summarize(values: &[f64]) -> TrialSummary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let sd = var.sqrt();
    TrialSummary {
        trials: n,
        mean,
        sd,
        se: sd / (n as f64).sqrt(),
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    Ok(())
}

fn check_order(n: usize, least: usize) -> Result<()> {
    if n < least {
        return Err(Error::param(format!("n = {n}, need at least {least}")));
    }
    Ok(())
}

/// Run `trials` independent seeded trials in index order (possibly in
/// parallel) and collect their outputs.
fn run_trials<T: Send>(
    mode: ExecMode,
    trials: usize,
    seed: u64,
    trial: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    map_indexed(mode, trials, |i| trial(derive_seed(seed, i as u64)))
        .into_iter()
        .collect()
}

/// Pendant-cherry census of one oriented tree. A pendant cherry is a path on
/// three vertices whose two endpoints are leaves of the tree and whose
/// centre has exactly one neighbour outside the path; the tree hangs off the
/// centre. A cherry is kind A when its attachment edge leaves the cherry and
/// at least one endpoint is an out-leaf (a fair orientation gives each
/// cherry probability 3/8), and kind B when the attachment edge enters the
/// cherry and the endpoints are one in-leaf and one out-leaf (probability
/// 1/4). No cherry is both.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CherryCounts {
    pub total: usize,
    pub kind_a: usize,
    pub kind_b: usize,
}

/// Count and classify the pendant cherries of `t`. Each degree-3 vertex
/// contributes one cherry per unordered pair of leaf neighbours, attached
/// through its remaining neighbour.
pub fn classify_pendant_cherries(t: &OrientedTree) -> CherryCounts {
    let mut counts = CherryCounts::default();
    for b in 0..t.n() {
        if t.degree(b) != 3 {
            continue;
        }
        let nb = t.neighbours(b);
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, a_out) = nb[i];
                let (c, c_out) = nb[j];
                if t.degree(a) != 1 || t.degree(c) != 1 {
                    continue;
                }
                let (_, x_out) = nb[3 - i - j];
                counts.total += 1;
                // a_out / c_out say the edge points from the centre into the
                // leaf, which makes that endpoint an out-leaf of the tree
                if x_out && (a_out || c_out) {
                    counts.kind_a += 1;
                }
                if !x_out && (a_out ^ c_out) {
                    counts.kind_b += 1;
                }
            }
        }
    }
    counts
}

/// Exact expected number of pendant cherries in a uniform labelled tree on
/// `n >= 4` vertices: `C(n,3) * (3/n^2) * (1 - 3/n)^(n-4)`, which converges
/// to `(e^-3 / 2) n`.
pub fn cherry_expectation_exact(n: usize) -> f64 {
    let nf = n as f64;
    let triples = nf * (nf - 1.0) * (nf - 2.0) / 6.0;
    triples * 3.0 / (nf * nf) * (1.0 - 3.0 / nf).powi(n as i32 - 4)
}

/// The limit density of pendant cherries per vertex, `e^-3 / 2`.
pub const CHERRY_DENSITY: f64 = 0.024893534183931972;

/// Per-trial pendant-cherry counts over uniform labelled trees, with the
/// ratio of the observed mean to the asymptotic prediction `(e^-3 / 2) n`.
#[derive(Debug, Clone)]
pub struct CherryResult {
    pub n: usize,
    pub seed: u64,
    pub counts: Vec<usize>,
    pub summary: TrialSummary,
    /// `summary.mean / ((e^-3 / 2) n)`.
    pub ratio_to_asymptotic: f64,
}

/// Sample `trials` uniform labelled trees on `n >= 4` vertices and count
/// pendant cherries in each. The intended regime is `n >= 10` with at least
/// a hundred trials; smaller `n` is allowed so the estimator can be checked
/// against exhaustive enumeration.
pub fn cherry_experiment(
    n: usize,
    trials: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<CherryResult> {
    check_order(n, 4)?;
    check_trials(trials)?;
    let counts = run_trials(mode, trials, seed, |s| {
        let t = random_oriented_tree(n, s)?;
        Ok(classify_pendant_cherries(&t).total)
    })?;
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let summary = summarize(&values);
    Ok(CherryResult {
        n,
        seed,
        ratio_to_asymptotic: summary.mean / (CHERRY_DENSITY * n as f64),
        counts,
        summary,
    })
}

impl CherryResult {
    /// One row per trial plus a summary row carrying the aggregate columns.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "trial", "cherries", "mean", "sd", "se", "ratio_to_asymptotic"])?;
        for (i, c) in self.counts.iter().enumerate() {
            w.write_record([
                "trial",
                &i.to_string(),
                &c.to_string(),
                "",
                "",
                "",
                "",
            ])?;
        }
        w.write_record([
            "summary",
            "",
            "",
            &self.summary.mean.to_string(),
            &self.summary.sd.to_string(),
            &self.summary.se.to_string(),
            &self.ratio_to_asymptotic.to_string(),
        ])?;
        finish_csv(w)
    }
}

/// One niceness trial: whether the sampled tree was nice, and its cherry
/// census.
#[derive(Debug, Clone, Copy)]
pub struct NicenessTrial {
    pub nice: bool,
    pub cherries: CherryCounts,
}

/// Fraction of uniform random oriented trees that are alpha-nice, together
/// with the empirical kind-A and kind-B frequencies among all sampled
/// pendant cherries.
#[derive(Debug, Clone)]
pub struct NicenessResult {
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub rows: Vec<NicenessTrial>,
    pub nice_fraction: f64,
    /// Pooled frequency of kind-A cherries (expected 3/8); NaN when no
    /// cherries were sampled.
    pub kind_a_frequency: f64,
    /// Pooled frequency of kind-B cherries (expected 1/4); NaN when no
    /// cherries were sampled.
    pub kind_b_frequency: f64,
}

/// Sample uniform labelled oriented trees on `n >= 4` vertices (uniform
/// undirected tree, then a fair coin per edge) and measure the alpha-nice
/// fraction and the cherry-orientation frequencies. The intended regime is
/// `n >= 100`; smaller `n` is allowed for exhaustive cross-checks.
pub fn niceness_experiment(
    n: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<NicenessResult> {
    check_order(n, 4)?;
    check_trials(trials)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let rows = run_trials(mode, trials, seed, |s| {
        let t = random_oriented_tree(n, s)?;
        Ok(NicenessTrial {
            nice: is_alpha_nice(&t, alpha)?.0,
            cherries: classify_pendant_cherries(&t),
        })
    })?;
    let nice = rows.iter().filter(|r| r.nice).count();
    let total: usize = rows.iter().map(|r| r.cherries.total).sum();
    let kind_a: usize = rows.iter().map(|r| r.cherries.kind_a).sum();
    let kind_b: usize = rows.iter().map(|r| r.cherries.kind_b).sum();
    Ok(NicenessResult {
        n,
        alpha,
        seed,
        nice_fraction: nice as f64 / trials as f64,
        kind_a_frequency: kind_a as f64 / total as f64,
        kind_b_frequency: kind_b as f64 / total as f64,
        rows,
    })
}

impl NicenessResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "kind",
            "trial",
            "nice",
            "cherries",
            "kind_a",
            "kind_b",
            "nice_fraction",
            "kind_a_frequency",
            "kind_b_frequency",
        ])?;
        for (i, r) in self.rows.iter().enumerate() {
            w.write_record([
                "trial",
                &i.to_string(),
                if r.nice { "1" } else { "0" },
                &r.cherries.total.to_string(),
                &r.cherries.kind_a.to_string(),
                &r.cherries.kind_b.to_string(),
                "",
                "",
                "",
            ])?;
        }
        w.write_record([
            "summary",
            "",
            "",
            "",
            "",
            "",
            &self.nice_fraction.to_string(),
            &self.kind_a_frequency.to_string(),
            &self.kind_b_frequency.to_string(),
        ])?;
        finish_csv(w)
    }
}

/// Maximum-degree distribution over uniform labelled trees, with the mean
/// ratio to `ln n / ln ln n`.
#[derive(Debug, Clone)]
pub struct DegreeResult {
    pub n: usize,
    pub seed: u64,
    pub max_degrees: Vec<usize>,
    pub summary: TrialSummary,
    /// Mean of `max_degree * ln ln n / ln n` over the trials. The limit is 1
    /// but convergence is slow (like 1 / ln ln n): at desk scales the ratio
    /// sits well above 1 and drifts down, around 1.9 at n = 10^5.
    pub mean_ratio: f64,
}

/// Sample uniform labelled trees on `n >= 3` vertices and record each
/// maximum degree. The intended regime is `n >= 1000`.
pub fn degree_experiment(
    n: usize,
    trials: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<DegreeResult> {
    check_order(n, 3)?;
    check_trials(trials)?;
    let max_degrees = run_trials(mode, trials, seed, |s| {
        Ok(random_oriented_tree(n, s)?.max_degree())
    })?;
    let values: Vec<f64> = max_degrees.iter().map(|&d| d as f64).collect();
    let summary = summarize(&values);
    let scale = (n as f64).ln().ln() / (n as f64).ln();
    Ok(DegreeResult {
        n,
        seed,
        mean_ratio: summary.mean * scale,
        max_degrees,
        summary,
    })
}

impl DegreeResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "trial", "max_degree", "mean", "sd", "se", "mean_ratio"])?;
        for (i, d) in self.max_degrees.iter().enumerate() {
            w.write_record(["trial", &i.to_string(), &d.to_string(), "", "", "", ""])?;
        }
        w.write_record([
            "summary",
            "",
            "",
            &self.summary.mean.to_string(),
            &self.summary.sd.to_string(),
            &self.summary.se.to_string(),
            &self.mean_ratio.to_string(),
        ])?;
        finish_csv(w)
    }
}

/// One allocation trial: the worst per-cluster deviation of the cluster
/// share from `1/k`, and whether every cluster stayed within the
/// `1 / ln ln n` band.
#[derive(Debug, Clone, Copy)]
pub struct AllocationTrial {
    pub max_abs_deviation: f64,
    pub within_band: bool,
}

/// Per-cluster balance of the allocation walk over uniform random oriented
/// trees rooted at vertex 0.
#[derive(Debug, Clone)]
pub struct AllocationResult {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<AllocationTrial>,
    pub mean_max_deviation: f64,
    /// Fraction of trials in which every cluster's share of the vertices
    /// lay within `1/k ± 1/ln ln n`.
    pub fraction_within: f64,
}

/// Allocate `trials` uniform random oriented trees on `n >= 3` vertices
/// into `k >= 1` clusters and measure how far cluster sizes stray from
/// `n/k`. With `k = 1` every vertex lands in the single cluster and the
/// deviation is identically zero.
pub fn allocation_experiment(
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<AllocationResult> {
    check_order(n, 3)?;
    check_trials(trials)?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let band = 1.0 / (n as f64).ln().ln();
    let rows = run_trials(mode, trials, seed, |s| {
        if k == 1 {
            return Ok(AllocationTrial {
                max_abs_deviation: 0.0,
                within_band: true,
            });
        }
        let t = random_oriented_tree(n, derive_seed(s, 0))?;
        let alloc = allocate(&t, 0, k, derive_seed(s, 1))?;
        let mut counts = vec![0usize; k];
        for &c in alloc.clusters() {
            counts[c - 1] += 1;
        }
        let max_abs_deviation = counts
            .iter()
            .map(|&c| (c as f64 / n as f64 - 1.0 / k as f64).abs())
            .fold(0.0, f64::max);
        Ok(AllocationTrial {
            max_abs_deviation,
            within_band: max_abs_deviation <= band,
        })
    })?;
    let devs: Vec<f64> = rows.iter().map(|r| r.max_abs_deviation).collect();
    let within = rows.iter().filter(|r| r.within_band).count();
    Ok(AllocationResult {
        n,
        k,
        seed,
        mean_max_deviation: summarize(&devs).mean,
        fraction_within: within as f64 / trials as f64,
        rows,
    })
}

impl AllocationResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "kind",
            "trial",
            "max_abs_deviation",
            "within_band",
            "mean_max_deviation",
            "fraction_within",
        ])?;
        for (i, r) in self.rows.iter().enumerate() {
            w.write_record([
                "trial",
                &i.to_string(),
                &r.max_abs_deviation.to_string(),
                if r.within_band { "1" } else { "0" },
                "",
                "",
            ])?;
        }
        w.write_record([
            "summary",
            "",
            "",
            "",
            &self.mean_max_deviation.to_string(),
            &self.fraction_within.to_string(),
        ])?;
        finish_csv(w)
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::binom_residue_distribution;
    use crate::otree::{directed_path, oriented_from_prufer};

    #[test]
    fn cherry_classifier_on_fixtures() {
        // path on 4: no degree-3 vertex, no cherries
        let p = directed_path(4).unwrap();
        assert_eq!(classify_pendant_cherries(&p), CherryCounts::default());

        // centre 1 with leaves 0, 2 and attachment 1 -> 3: leaf 0 is an
        // out-leaf (1 -> 0)? no: edge 0 -> 1 makes 0 an in-leaf; 1 -> 2
        // makes 2 an out-leaf. attachment leaves the cherry, one endpoint
        // out: kind A
        let t = OrientedTree::new(5, vec![(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let c = classify_pendant_cherries(&t);
        assert_eq!((c.total, c.kind_a, c.kind_b), (1, 1, 0));

        // same shape, attachment edge reversed (3 -> 1) and endpoints one
        // in-leaf one out-leaf: kind B
        let t = OrientedTree::new(5, vec![(0, 1), (1, 2), (3, 1), (3, 4)]).unwrap();
        let c = classify_pendant_cherries(&t);
        assert_eq!((c.total, c.kind_a, c.kind_b), (1, 0, 1));

        // star on 4: three cherries, one per pair of leaves
        let t = OrientedTree::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(classify_pendant_cherries(&t).total, 3);
    }

    #[test]
    fn cherry_estimator_matches_exhaustive_enumeration_at_n4() {
        // exact expectation over all 16 labelled trees on 4 vertices:
        // 4 stars with 3 cherries each, 12 paths with none
        let mut total = 0usize;
        for s in 0..16 {
            let t = oriented_from_prufer(&[s / 4, s % 4], &[true; 3]).unwrap();
            total += classify_pendant_cherries(&t).total;
        }
        let exact = total as f64 / 16.0;
        assert_eq!(exact, 0.75);
        assert!((cherry_expectation_exact(4) - exact).abs() < 1e-12);

        let r = cherry_experiment(4, 4000, 2024, ExecMode::auto()).unwrap();
        assert!(
            (r.summary.mean - exact).abs() <= 3.0 * r.summary.se,
            "mean {} vs exact {exact} (se {})",
            r.summary.mean,
            r.summary.se
        );
    }

    #[test]
    fn cherry_mean_tracks_the_asymptotic_density() {
        let r = cherry_experiment(1000, 300, 7, ExecMode::auto()).unwrap();
        assert!(
            r.ratio_to_asymptotic > 0.95 && r.ratio_to_asymptotic < 1.05,
            "ratio {}",
            r.ratio_to_asymptotic
        );
    }

    #[test]
    fn experiments_validate_parameters() {
        assert!(cherry_experiment(3, 10, 0, ExecMode::Sequential).is_err());
        assert!(cherry_experiment(10, 0, 0, ExecMode::Sequential).is_err());
        assert!(niceness_experiment(100, 0.0, 10, 0, ExecMode::Sequential).is_err());
        assert!(degree_experiment(2, 10, 0, ExecMode::Sequential).is_err());
        assert!(allocation_experiment(100, 0, 10, 0, ExecMode::Sequential).is_err());
    }

    #[test]
    fn niceness_estimator_matches_exhaustive_enumeration_at_n5() {
        // exact nice fraction over all 125 * 16 labelled oriented trees
        let alpha = 0.2; // ceil(0.2 * 5) = 1 star of each kind required
        let mut nice = 0usize;
        let mut seen = 0usize;
        for s in 0..125 {
            let seq = [s / 25, s / 5 % 5, s % 5];
            for o in 0..16u32 {
                let orient: Vec<bool> = (0..4).map(|i| o >> i & 1 == 1).collect();
                let t = oriented_from_prufer(&seq, &orient).unwrap();
                nice += usize::from(is_alpha_nice(&t, alpha).unwrap().0);
                seen += 1;
            }
        }
        let exact = nice as f64 / seen as f64;

        let trials = 4000;
        let r = niceness_experiment(5, alpha, trials, 99, ExecMode::auto()).unwrap();
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (r.nice_fraction - exact).abs() <= 3.0 * se,
            "fraction {} vs exact {exact}",
            r.nice_fraction
        );
    }

    #[test]
    fn cherry_orientation_frequencies_match_their_probabilities() {
        // each pendant cherry is kind A with probability exactly 3/8 and
        // kind B with probability exactly 1/4 under fair edge orientation
        let r = niceness_experiment(200, 0.001, 1500, 5, ExecMode::auto()).unwrap();
        let total: usize = r.rows.iter().map(|t| t.cherries.total).sum();
        assert!(total > 5000, "sampled {total} cherries");
        assert!(
            (r.kind_a_frequency - 0.375).abs() < 0.02,
            "kind A {}",
            r.kind_a_frequency
        );
        assert!(
            (r.kind_b_frequency - 0.25).abs() < 0.02,
            "kind B {}",
            r.kind_b_frequency
        );
    }

    #[test]
    fn most_random_trees_are_nice_at_moderate_order() {
        let r = niceness_experiment(1000, 1.0 / 250.0, 200, 3, ExecMode::auto()).unwrap();
        assert!(r.nice_fraction >= 0.95, "fraction {}", r.nice_fraction);
    }

    #[test]
    fn degree_ratio_sits_in_the_measured_desk_scale_band() {
        let r = degree_experiment(10_000, 150, 12, ExecMode::auto()).unwrap();
        assert!(
            r.mean_ratio > 1.6 && r.mean_ratio < 2.2,
            "mean ratio {}",
            r.mean_ratio
        );
        // trees on >= 3 vertices always have an internal vertex
        assert!(r.max_degrees.iter().all(|&d| d >= 2));
        // exact mean at n=4: stars have degree 3, paths 2, so 9/4
        let small = degree_experiment(4, 3000, 8, ExecMode::auto()).unwrap();
        assert!(
            (small.summary.mean - 2.25).abs() <= 3.0 * small.summary.se,
            "mean {}",
            small.summary.mean
        );
    }

    #[test]
    fn allocation_balance_over_random_trees() {
        let r = allocation_experiment(2000, 10, 50, 21, ExecMode::auto()).unwrap();
        assert_eq!(r.fraction_within, 1.0);
        assert!(r.mean_max_deviation < 0.1, "mean dev {}", r.mean_max_deviation);

        // single cluster: every vertex in cluster 1, deviation identically 0
        let r = allocation_experiment(100, 1, 5, 0, ExecMode::Sequential).unwrap();
        assert!(r.rows.iter().all(|t| t.max_abs_deviation == 0.0));
        assert_eq!(r.fraction_within, 1.0);
    }

    #[test]
    fn path_endpoint_cluster_matches_the_exact_residue_distribution() {
        // directed path with 1000 edges rooted at its start, k = 5: odd
        // depths advance deterministically (500 forced steps) and even
        // depths flip fair coins (500 of them), so the endpoint cluster is
        // 1 + (500 + B(500, 1/2) mod 5). Compare empirical frequencies
        // against the exact distribution in total variation.
        let k = 5usize;
        let t = directed_path(1001).unwrap();
        let exact_binom = binom_residue_distribution(500, k).unwrap();
        let exact: Vec<f64> = (0..k)
            .map(|c| exact_binom[(c + k - 500 % k) % k])
            .collect();
        let seeds = 10_000u64;
        let mut freq = vec![0.0; k];
        for s in 0..seeds {
            let alloc = allocate(&t, 0, k, derive_seed(904, s)).unwrap();
            // cluster c corresponds to residue c - 1
            freq[alloc.cluster(1000) - 1] += 1.0 / seeds as f64;
        }
        let tv = 0.5
            * exact
                .iter()
                .zip(&freq)
                .map(|(e, f)| (e - f).abs())
                .sum::<f64>();
        assert!(tv <= 0.05, "total variation {tv}");
    }

    #[test]
    fn manifests_replay_byte_identically() {
        let m = ExperimentManifest::new("cherry", 42, "out/cherries.csv")
            .set_param("n", 50)
            .set_param("trials", 200);
        let a = m.run(ExecMode::Sequential).unwrap();
        let b = m.run(ExecMode::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("kind,trial,cherries"));
        assert_eq!(a.lines().count(), 202); // header + trials + summary

        let round = ExperimentManifest::from_json_str(&m.to_json_string().unwrap()).unwrap();
        assert_eq!(round, m);
        assert_eq!(round.run(ExecMode::auto()).unwrap(), a);
    }

    #[test]
    fn manifests_validate_names_and_parameters() {
        let m = ExperimentManifest::new("cherry", 1, "x.csv").set_param("n", 50);
        assert!(m.run(ExecMode::Sequential).is_err()); // missing trials
        let m = ExperimentManifest::new("spectra", 1, "x.csv")
            .set_param("n", 50)
            .set_param("trials", 10);
        assert!(m.run(ExecMode::Sequential).is_err()); // unknown name
        let m = ExperimentManifest::new("niceness", 1, "x.csv")
            .set_param("n", 50)
            .set_param("trials", 10);
        assert!(m.run(ExecMode::Sequential).is_err()); // missing alpha
        let m = m.set_param("alpha", 0.01);
        assert!(m.run(ExecMode::Sequential).is_ok());
    }

    #[test]
    fn every_experiment_emits_trial_rows_and_one_summary_row() {
        for (name, extra) in [
            ("cherry", None),
            ("niceness", Some(("alpha", serde_json::json!(0.01)))),
            ("degree", None),
            ("allocation", Some(("k", serde_json::json!(4)))),
        ] {
            let mut m = ExperimentManifest::new(name, 9, "x.csv")
                .set_param("n", 60)
                .set_param("trials", 25);
            if let Some((key, value)) = extra {
                m = m.set_param(key, value);
            }
            let csv = m.run(ExecMode::auto()).unwrap();
            assert_eq!(csv.lines().count(), 27, "{name}");
            assert_eq!(csv.matches("\nsummary,").count(), 1, "{name}");
        }
    }
}
