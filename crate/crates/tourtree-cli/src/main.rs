//! Command-line front end: generate trees and tournaments, analyze and
//! allocate trees, embed trees into tournaments, sweep unavoidability,
//! search host structure, and run seeded Monte Carlo experiments.
//!
//! Exit codes: 0 on success, 1 when a multi-stage construction reports a
//! structured stage failure (the failure JSON is the output), 2 on usage
//! errors such as unknown flags, bad parameters, or malformed input files.
//! Every run with `--out` writes a `<out>.run.json` provenance record with
//! parameters, seed, timestamps, and SHA-256 digests of inputs and outputs.

mod fixtures;
mod record;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use record::RunRecord;
use tourtree::allocation::allocate;
use tourtree::digraph::{random_tournament, Tournament};
use tourtree::embed::{
    backtrack_embed, cct_pipeline, directed_pair_pipeline, structure_search, CctParams,
    ClusterDecomposition, EmbedConstraints, PairDecomposition, PairPipelineParams,
    PipelineOutcome, SearchOutcome, StructureOutcome, StructureParams,
};
use tourtree::exec::ExecMode;
use tourtree::experiments::ExperimentManifest;
use tourtree::oracle::{
    census_to_csv, g_bruteforce, is_unavoidable, is_unavoidable_sampled, oriented_tree_census,
    GBound, UnavoidabilityReport, UnavoidabilityVerdict,
};
use tourtree::otree::{
    is_alpha_nice, pendant_star_census, planted_nice_tree, random_oriented_tree, OrientedTree,
};
use tourtree::bitset::VertSet;
use tourtree::StageFailure;

fn version_string() -> &'static str {
    Box::leak(
        format!(
            "{} (format version {})",
            env!("CARGO_PKG_VERSION"),
            tourtree::FORMAT_VERSION
        )
        .into_boxed_str(),
    )
}

#[derive(Parser)]
#[command(name = "tourtree", version = version_string(), about = "Oriented trees in tournaments: generators, analyzers, embedders, and experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Master seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output here (and a `<out>.run.json` provenance record
    /// alongside); default is stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each subcommand has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON file with engine or search parameters (keys depend on the
    /// subcommand; unknown keys are rejected).
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Worker threads for sweeps and trials; 1 forces sequential execution.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// Exact backtracking search (any tree/host sizes that fit the budget).
    Backtrack,
    /// Spanning pipeline across an almost-directed pair found by the
    /// structure search.
    PipelinePair,
    /// Spanning pipeline across a cycle of clusters given in --clusters.
    PipelineCct,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an oriented tree: uniform random, planted-star, or a named
    /// fixture (path-directed-N, path-antidirected-N, out-star-N,
    /// in-star-N, double-star-A-B-C).
    GenTree {
        /// Order of a random tree (uniform Prüfer sequence plus fair coin
        /// orientations).
        #[arg(long)]
        n: Option<usize>,
        /// Named fixture instead of a random tree.
        #[arg(long, conflicts_with = "n")]
        fixture: Option<String>,
        /// Graft this many pendant out-stars onto the random backbone.
        #[arg(long, requires = "n")]
        a_stars: Option<usize>,
        /// Graft this many pendant in-stars (each holding an out-leaf).
        #[arg(long, requires = "n")]
        b_stars: Option<usize>,
    },
    /// Generate a tournament: uniform random or a named fixture
    /// (transitive-N, circulant-N, paley-Q).
    GenTournament {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        fixture: Option<String>,
    },
    /// Report a tree's degree and leaf statistics, pendant-star census, and
    /// (with --alpha) its niceness verdict.
    AnalyzeTree {
        /// Tree file or fixture name.
        #[arg(long)]
        tree: String,
        /// Niceness rate to test, in (0, 1].
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Run the allocation walk on a tree: clusters 1..=k, root fixed to
    /// cluster 1, children canonical or lazy by coin.
    Allocate {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
    /// Embed a tree into a tournament; exits 1 with a stage-failure report
    /// when the chosen engine cannot place it.
    Embed {
        #[arg(long)]
        tree: String,
        /// Host file or fixture name.
        #[arg(long)]
        host: String,
        #[arg(long, value_enum, default_value_t = Engine::Backtrack)]
        engine: Engine,
        /// Pair file for --engine pipeline-pair: JSON with fields `u`, `w`
        /// (disjoint vertex lists covering the host) and `mu`. Without it
        /// the pair is discovered by the structure search.
        #[arg(long)]
        pair: Option<PathBuf>,
        /// Cluster file for --engine pipeline-cct: JSON with fields `d`,
        /// `eps`, and `clusters` (a list of disjoint vertex lists).
        #[arg(long)]
        clusters: Option<PathBuf>,
        /// Node budget for the backtracking engine.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Decide whether every tournament of the tree's order contains it:
    /// exhaustive over isomorphism classes up to order 7, sampled beyond.
    Unavoidable {
        #[arg(long)]
        tree: String,
        /// Check this many seeded random hosts instead of sweeping
        /// exhaustively (required for trees on more than 7 vertices).
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Smallest host order at which the tree becomes unavoidable, by
    /// exhaustive sweeps up to --n-max.
    GValue {
        #[arg(long)]
        tree: String,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
    },
    /// Classify every oriented tree on n <= 6 vertices up to isomorphism:
    /// niceness ceiling, unavoidability verdict, avoider witness.
    Census {
        #[arg(long)]
        n: usize,
    },
    /// Partition a host into an almost-directed pair or certify a dense
    /// core (parameters eta, gamma via --params).
    Structure {
        #[arg(long)]
        host: String,
    },
    /// Run a seeded Monte Carlo experiment (cherry, niceness, degree,
    /// allocation) or replay a manifest byte-for-byte.
    Experiment {
        /// Experiment name; alternatively replay with --manifest.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Niceness rate (niceness experiment only).
        #[arg(long)]
        alpha: Option<f64>,
        /// Cluster count (allocation experiment only).
        #[arg(long)]
        k: Option<usize>,
        /// Replay this manifest file instead of building one from flags.
        #[arg(long, conflicts_with_all = ["name", "n", "trials", "alpha", "k"])]
        manifest: Option<PathBuf>,
    },
}

/// What a successful dispatch hands back: the payload to emit, extra
/// artifacts to write next to it, and whether this is a structured domain
/// failure (exit 1) rather than a result (exit 0).
struct Outcome {
    payload: String,
    extras: Vec<(PathBuf, String)>,
    domain_failure: bool,
}

impl Outcome {
    fn success(payload: String) -> Self {
        Outcome {
            payload,
            extras: Vec::new(),
            domain_failure: false,
        }
    }
    fn failure(sf: &StageFailure) -> Result<Self> {
        Ok(Outcome {
            payload: pretty(&serde_json::to_value(sf)?),
            extras: Vec::new(),
            domain_failure: true,
        })
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    });
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Two-column key/value CSV used when a report-style command is asked for
/// CSV output.
fn kv_csv(rows: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(k);
        out.push(',');
        out.push_str(v);
        out.push('\n');
    }
    out
}

fn exec_mode(jobs: Option<usize>) -> Result<ExecMode> {
    match jobs {
        None => Ok(ExecMode::auto()),
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Ok(ExecMode::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // ignore AlreadyInitialized: the pool can only be sized once
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(ExecMode::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(ExecMode::Sequential),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mode = exec_mode(cli.jobs)?;
    let mut rec = RunRecord::start(subcommand_name(&cli.cmd), cli.seed);
    rec.param("seed", cli.seed);
    if let Some(j) = cli.jobs {
        rec.param("jobs", j);
    }
    let params_file = read_params_file(cli.params.as_deref(), &mut rec)?;
    let format = cli.format.unwrap_or(default_format(&cli.cmd));
    rec.param(
        "format",
        match format {
            Format::Json => "json",
            Format::Csv => "csv",
        },
    );

    let outcome = dispatch(&cli, mode, format, params_file, &mut rec)?;
    emit(rec, cli.out.as_deref(), &outcome)?;
    Ok(outcome.domain_failure)
}

fn subcommand_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::GenTree { .. } => "gen-tree",
        Cmd::GenTournament { .. } => "gen-tournament",
        Cmd::AnalyzeTree { .. } => "analyze-tree",
        Cmd::Allocate { .. } => "allocate",
        Cmd::Embed { .. } => "embed",
        Cmd::Unavoidable { .. } => "unavoidable",
        Cmd::GValue { .. } => "g-value",
        Cmd::Census { .. } => "census",
        Cmd::Structure { .. } => "structure",
        Cmd::Experiment { .. } => "experiment",
    }
}

fn default_format(cmd: &Cmd) -> Format {
    match cmd {
        Cmd::Allocate { .. } | Cmd::Embed { .. } | Cmd::Census { .. } | Cmd::Experiment { .. } => {
            Format::Csv
        }
        _ => Format::Json,
    }
}

fn emit(mut rec: RunRecord, out: Option<&Path>, outcome: &Outcome) -> Result<()> {
    match out {
        None => print!("{}", outcome.payload),
        Some(path) => {
            fs::write(path, &outcome.payload)
                .with_context(|| format!("writing {}", path.display()))?;
            rec.output(path, outcome.payload.as_bytes());
            for (extra, body) in &outcome.extras {
                fs::write(extra, body).with_context(|| format!("writing {}", extra.display()))?;
                rec.output(extra, body.as_bytes());
            }
            rec.write_alongside(path)?;
        }
    }
    Ok(())
}

fn read_params_file(
    path: Option<&Path>,
    rec: &mut RunRecord,
) -> Result<BTreeMap<String, Value>> {
    let Some(path) = path else {
        return Ok(BTreeMap::new());
    };
    let bytes =
        fs::read(path).with_context(|| format!("reading params file {}", path.display()))?;
    rec.input(path, &bytes);
    let map: BTreeMap<String, Value> = serde_json::from_slice(&bytes)
        .with_context(|| format!("params file {} must hold a JSON object", path.display()))?;
    rec.param("params_file", Value::Object(map.clone().into_iter().collect()));
    Ok(map)
}

/// Pull a float parameter out of a params map, or keep the default.
fn take_f64(map: &mut BTreeMap<String, Value>, key: &str, default: f64) -> Result<f64> {
    match map.remove(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| anyhow!("parameter `{key}` must be a number, got {v}")),
    }
}

fn take_u32(map: &mut BTreeMap<String, Value>, key: &str, default: u32) -> Result<u32> {
    match map.remove(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|n| n as u32)
            .ok_or_else(|| anyhow!("parameter `{key}` must be an unsigned integer, got {v}")),
    }
}

fn take_budget(
    map: &mut BTreeMap<String, Value>,
    key: &str,
    default: Option<u64>,
) -> Result<Option<u64>> {
    match map.remove(key) {
        None => Ok(default),
        Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| anyhow!("parameter `{key}` must be an unsigned integer or null, got {v}")),
    }
}

fn reject_leftovers(map: &BTreeMap<String, Value>, context: &str) -> Result<()> {
    if let Some(key) = map.keys().next() {
        bail!("unknown parameter `{key}` for {context}");
    }
    Ok(())
}

/// Resolve a tree argument: fixture name first, file path otherwise.
fn load_tree(spec: &str, rec: &mut RunRecord) -> Result<OrientedTree> {
    rec.param("tree", spec);
    if let Some(t) = fixtures::tree_fixture(spec) {
        return t;
    }
    let bytes = fs::read(spec)
        .with_context(|| format!("`{spec}` is neither a tree fixture name nor a readable file"))?;
    rec.input(Path::new(spec), &bytes);
    let text = std::str::from_utf8(&bytes).context("tree file is not UTF-8")?;
    OrientedTree::from_json_str(text).with_context(|| format!("parsing tree file `{spec}`"))
}

/// Resolve a tournament argument: fixture name first, file path otherwise.
fn load_tournament(spec: &str, key: &str, rec: &mut RunRecord) -> Result<Tournament> {
    rec.param(key, spec);
    if let Some(g) = fixtures::tournament_fixture(spec) {
        return g;
    }
    let bytes = fs::read(spec).with_context(|| {
        format!("`{spec}` is neither a tournament fixture name nor a readable file")
    })?;
    rec.input(Path::new(spec), &bytes);
    let text = std::str::from_utf8(&bytes).context("tournament file is not UTF-8")?;
    Tournament::from_json_str(text).with_context(|| format!("parsing tournament file `{spec}`"))
}

fn edge_csv(edges: impl Iterator<Item = (usize, usize)>) -> String {
    let mut out = String::from("from,to\n");
    for (u, v) in edges {
        out.push_str(&format!("{u},{v}\n"));
    }
    out
}

fn dispatch(
    cli: &Cli,
    mode: ExecMode,
    format: Format,
    mut params_file: BTreeMap<String, Value>,
    rec: &mut RunRecord,
) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.cmd {
        Cmd::GenTree {
            n,
            fixture,
            a_stars,
            b_stars,
        } => {
            reject_leftovers(&params_file, "gen-tree")?;
            let tree = match (n, fixture) {
                (Some(n), None) => match (a_stars, b_stars) {
                    (None, None) => random_oriented_tree(*n, seed)?,
                    (Some(a), Some(b)) => {
                        rec.param("a_stars", *a);
                        rec.param("b_stars", *b);
                        planted_nice_tree(*n, *a, *b, seed)?
                    }
                    _ => bail!("--a-stars and --b-stars must be given together"),
                },
                (None, Some(f)) => fixtures::tree_fixture(f)
                    .ok_or_else(|| anyhow!("unknown tree fixture `{f}`"))??,
                _ => bail!("gen-tree needs exactly one of --n or --fixture"),
            };
            if let Some(n) = n {
                rec.param("n", *n);
            }
            if let Some(f) = fixture {
                rec.param("fixture", f.as_str());
            }
            Ok(Outcome::success(match format {
                Format::Json => tree.to_json_string() + "\n",
                Format::Csv => edge_csv(tree.edges().iter().copied()),
            }))
        }

        Cmd::GenTournament { n, fixture } => {
            reject_leftovers(&params_file, "gen-tournament")?;
            let g = match (n, fixture) {
                (Some(n), None) => {
                    rec.param("n", *n);
                    random_tournament(*n, seed)
                }
                (None, Some(f)) => {
                    rec.param("fixture", f.as_str());
                    fixtures::tournament_fixture(f)
                        .ok_or_else(|| anyhow!("unknown tournament fixture `{f}`"))??
                }
                _ => bail!("gen-tournament needs exactly one of --n or --fixture"),
            };
            Ok(Outcome::success(match format {
                Format::Json => g.to_json_string() + "\n",
                Format::Csv => edge_csv(g.edges()),
            }))
        }

        Cmd::AnalyzeTree { tree, alpha } => {
            reject_leftovers(&params_file, "analyze-tree")?;
            let t = load_tree(tree, rec)?;
            let cert = pendant_star_census(&t);
            let (na, nb) = cert.star_counts();
            let (in_leaves, out_leaves) = t.leaf_classes();
            let mut report = json!({
                "n": t.n(),
                "edges": t.n() - 1,
                "max_degree": t.max_degree(),
                "in_leaves": in_leaves.len(),
                "out_leaves": out_leaves.len(),
                "a_stars": na,
                "b_stars": nb,
                "alpha_max": cert.alpha_max,
            });
            if let Some(alpha) = alpha {
                rec.param("alpha", *alpha);
                let (nice, _) = is_alpha_nice(&t, *alpha)?;
                report["alpha"] = json!(alpha);
                report["nice"] = json!(nice);
            }
            Ok(Outcome::success(match format {
                Format::Json => pretty(&report),
                Format::Csv => {
                    let obj = report.as_object().unwrap();
                    kv_csv(
                        &obj.iter()
                            .map(|(k, v)| (k.as_str(), v.to_string()))
                            .collect::<Vec<_>>(),
                    )
                }
            }))
        }

        Cmd::Allocate { tree, k, root } => {
            reject_leftovers(&params_file, "allocate")?;
            let t = load_tree(tree, rec)?;
            rec.param("k", *k);
            rec.param("root", *root);
            let alloc = allocate(&t, *root, *k, seed)?;
            Ok(Outcome::success(match format {
                Format::Csv => alloc.to_csv(&t)?,
                Format::Json => pretty(&json!({
                    "k": alloc.k(),
                    "root": alloc.root(),
                    "clusters": alloc.clusters(),
                })),
            }))
        }

        Cmd::Embed {
            tree,
            host,
            engine,
            pair,
            clusters,
            budget,
        } => {
            let t = load_tree(tree, rec)?;
            let g = load_tournament(host, "host", rec)?;
            rec.param(
                "engine",
                match engine {
                    Engine::Backtrack => "backtrack",
                    Engine::PipelinePair => "pipeline-pair",
                    Engine::PipelineCct => "pipeline-cct",
                },
            );
            if clusters.is_some() && *engine != Engine::PipelineCct {
                bail!("--clusters only applies to --engine pipeline-cct");
            }
            if pair.is_some() && *engine != Engine::PipelinePair {
                bail!("--pair only applies to --engine pipeline-pair");
            }
            let aux = EmbedAux {
                pair: pair.as_deref(),
                clusters: clusters.as_deref(),
                budget: *budget,
            };
            let outcome = run_embed(engine, &t, &g, seed, aux, &mut params_file, rec)?;
            match outcome {
                PipelineOutcome::Embedded(emb) => Ok(Outcome::success(match format {
                    Format::Csv => emb.to_csv()?,
                    Format::Json => pretty(&json!({
                        "placements": emb.assigned().map(|(v, h)| [v, h]).collect::<Vec<_>>(),
                    })),
                })),
                PipelineOutcome::Failed(sf) => Outcome::failure(&sf),
            }
        }

        Cmd::Unavoidable { tree, samples } => {
            reject_leftovers(&params_file, "unavoidable")?;
            let t = load_tree(tree, rec)?;
            let report = match samples {
                Some(s) => {
                    rec.param("samples", *s);
                    is_unavoidable_sampled(&t, *s, seed)?
                }
                None => is_unavoidable(&t, mode).context(
                    "exhaustive sweeps cover trees on at most 7 vertices; \
                     pass --samples N to check seeded random hosts instead",
                )?,
            };
            Ok(Outcome::success(render_report(&report, format)))
        }

        Cmd::GValue { tree, n_max } => {
            reject_leftovers(&params_file, "g-value")?;
            let t = load_tree(tree, rec)?;
            rec.param("n_max", *n_max);
            let bound = g_bruteforce(&t, *n_max, mode)?;
            let report = match bound {
                GBound::Exactly(n) => json!({
                    "tree_order": t.n(), "searched_up_to": n_max, "exactly": n,
                }),
                GBound::GreaterThan(m) => json!({
                    "tree_order": t.n(), "searched_up_to": n_max, "greater_than": m,
                }),
            };
            Ok(Outcome::success(match format {
                Format::Json => pretty(&report),
                Format::Csv => kv_csv(
                    &report
                        .as_object()
                        .unwrap()
                        .iter()
                        .map(|(k, v)| (k.as_str(), v.to_string()))
                        .collect::<Vec<_>>(),
                ),
            }))
        }

        Cmd::Census { n } => {
            reject_leftovers(&params_file, "census")?;
            rec.param("n", *n);
            let entries = oriented_tree_census(*n, mode)?;
            Ok(Outcome::success(match format {
                Format::Csv => census_to_csv(&entries)?,
                Format::Json => {
                    let rows: Vec<Value> = entries
                        .iter()
                        .map(|e| {
                            json!({
                                "n": e.tree.n(),
                                "canonical_id": e.canonical_id,
                                "alpha_max": e.alpha_max,
                                "verdict": verdict_str(e.report.verdict),
                                "witness_bits": e.report.witness.as_ref().map(|w| w.to_hex_bits()),
                            })
                        })
                        .collect();
                    pretty(&Value::Array(rows))
                }
            }))
        }

        Cmd::Structure { host } => {
            let g = load_tournament(host, "host", rec)?;
            let params = StructureParams {
                eta: take_f64(&mut params_file, "eta", StructureParams::default().eta)?,
                gamma: take_f64(&mut params_file, "gamma", StructureParams::default().gamma)?,
            };
            reject_leftovers(&params_file, "structure")?;
            rec.param("eta", params.eta);
            rec.param("gamma", params.gamma);
            let report = match structure_search(&g, &params)? {
                StructureOutcome::AlmostDirected {
                    a,
                    b,
                    reverse_edges,
                    mu,
                } => json!({
                    "outcome": "almost-directed",
                    "a": a.to_vec(), "b": b.to_vec(),
                    "reverse_edges": reverse_edges, "mu": mu,
                }),
                StructureOutcome::Dense {
                    x,
                    y,
                    z,
                    min_semidegree,
                } => json!({
                    "outcome": "dense",
                    "x": x.to_vec(), "y": y.to_vec(), "z": z.to_vec(),
                    "min_semidegree": min_semidegree,
                }),
            };
            Ok(Outcome::success(match format {
                Format::Json => pretty(&report),
                Format::Csv => kv_csv(
                    &report
                        .as_object()
                        .unwrap()
                        .iter()
                        .map(|(k, v)| (k.as_str(), v.to_string()))
                        .collect::<Vec<_>>(),
                ),
            }))
        }

        Cmd::Experiment {
            name,
            n,
            trials,
            alpha,
            k,
            manifest,
        } => {
            reject_leftovers(&params_file, "experiment")?;
            if format == Format::Json {
                bail!("experiments emit CSV; drop --format json");
            }
            let m = match manifest {
                Some(path) => {
                    let bytes = fs::read(path)
                        .with_context(|| format!("reading manifest {}", path.display()))?;
                    rec.input(path, &bytes);
                    let text = std::str::from_utf8(&bytes).context("manifest is not UTF-8")?;
                    ExperimentManifest::from_json_str(text)
                        .with_context(|| format!("parsing manifest {}", path.display()))?
                }
                None => {
                    let name = name
                        .as_deref()
                        .ok_or_else(|| anyhow!("experiment needs --name or --manifest"))?;
                    let n = n.ok_or_else(|| anyhow!("experiment `{name}` needs --n"))?;
                    let trials =
                        trials.ok_or_else(|| anyhow!("experiment `{name}` needs --trials"))?;
                    let out_name = cli
                        .out
                        .as_ref()
                        .map(|p| p.display().to_string())
                        .unwrap_or_else(|| "-".to_string());
                    let mut m = ExperimentManifest::new(name, seed, &out_name)
                        .set_param("n", n)
                        .set_param("trials", trials);
                    if let Some(a) = alpha {
                        m = m.set_param("alpha", *a);
                    }
                    if let Some(k) = k {
                        m = m.set_param("k", *k);
                    }
                    m
                }
            };
            for (key, value) in &m.params {
                rec.param(key, value.clone());
            }
            rec.param("experiment", m.name.as_str());
            let csv = m.run(mode)?;
            let mut outcome = Outcome::success(csv);
            if let Some(out) = &cli.out {
                let mut manifest_path = out.as_os_str().to_owned();
                manifest_path.push(".manifest.json");
                outcome
                    .extras
                    .push((PathBuf::from(manifest_path), m.to_json_string()? + "\n"));
            }
            Ok(outcome)
        }
    }
}

fn verdict_str(v: UnavoidabilityVerdict) -> &'static str {
    match v {
        UnavoidabilityVerdict::Unavoidable => "unavoidable",
        UnavoidabilityVerdict::Avoidable => "avoidable",
        UnavoidabilityVerdict::NoCounterexampleFound => "no-counterexample-found",
    }
}

fn render_report(report: &UnavoidabilityReport, format: Format) -> String {
    let witness_bits = report.witness.as_ref().map(|w| w.to_hex_bits());
    match format {
        Format::Json => pretty(&json!({
            "host_size": report.host_size,
            "verdict": verdict_str(report.verdict),
            "witness": report.witness.as_ref().map(|w| {
                serde_json::from_str::<Value>(&w.to_json_string()).expect("tournament json")
            }),
        })),
        Format::Csv => kv_csv(&[
            ("host_size", report.host_size.to_string()),
            ("verdict", verdict_str(report.verdict).to_string()),
            ("witness_bits", witness_bits.unwrap_or_default()),
        ]),
    }
}

/// Engine-specific embed inputs that live outside the params file.
struct EmbedAux<'a> {
    pair: Option<&'a Path>,
    clusters: Option<&'a Path>,
    budget: Option<u64>,
}

fn run_embed(
    engine: &Engine,
    t: &OrientedTree,
    g: &Tournament,
    seed: u64,
    aux: EmbedAux<'_>,
    params_file: &mut BTreeMap<String, Value>,
    rec: &mut RunRecord,
) -> Result<PipelineOutcome> {
    match engine {
        Engine::Backtrack => {
            reject_leftovers(params_file, "the backtrack engine")?;
            if let Some(b) = aux.budget {
                rec.param("budget", b);
            }
            match backtrack_embed(t, g, &EmbedConstraints::new(), aux.budget)? {
                SearchOutcome::Found(emb) => Ok(PipelineOutcome::Embedded(emb)),
                SearchOutcome::Exhausted => Ok(PipelineOutcome::Failed(StageFailure::new(
                    "backtrack",
                    "the host contains no copy of the tree",
                ))),
                SearchOutcome::BudgetExceeded => Ok(PipelineOutcome::Failed(
                    StageFailure::new("backtrack", "node budget exhausted before a verdict")
                        .count("budget", aux.budget.unwrap_or(0) as i64),
                )),
            }
        }

        Engine::PipelinePair => {
            if aux.budget.is_some() {
                bail!("--budget only applies to --engine backtrack (use the params file key `node_budget`)");
            }
            let structure = StructureParams {
                eta: take_f64(params_file, "eta", StructureParams::default().eta)?,
                gamma: take_f64(params_file, "gamma", StructureParams::default().gamma)?,
            };
            let defaults = PairPipelineParams::default();
            let params = PairPipelineParams {
                alpha: take_f64(params_file, "alpha", defaults.alpha)?,
                beta: take_f64(params_file, "beta", defaults.beta)?,
                psi: take_f64(params_file, "psi", defaults.psi)?,
                nu: take_f64(params_file, "nu", defaults.nu)?,
                retry_budget: take_u32(params_file, "retry_budget", defaults.retry_budget)?,
                node_budget: take_budget(params_file, "node_budget", defaults.node_budget)?,
                seed,
            };
            reject_leftovers(params_file, "the pipeline-pair engine")?;
            let pair = match aux.pair {
                Some(path) => {
                    let bytes = fs::read(path)
                        .with_context(|| format!("reading pair file {}", path.display()))?;
                    rec.input(path, &bytes);
                    let spec: PairFile = serde_json::from_slice(&bytes).with_context(|| {
                        format!(
                            "pair file {} must be JSON with fields `u`, `w`, `mu`",
                            path.display()
                        )
                    })?;
                    PairDecomposition::new(
                        g,
                        VertSet::from_iter_n(g.n(), spec.u.iter().copied()),
                        VertSet::from_iter_n(g.n(), spec.w.iter().copied()),
                        spec.mu,
                    )?
                }
                None => match structure_search(g, &structure)? {
                    StructureOutcome::AlmostDirected {
                        a,
                        b,
                        reverse_edges: _,
                        mu,
                    } => PairDecomposition::new(g, a, b, mu)?,
                    StructureOutcome::Dense { y, .. } => {
                        return Ok(PipelineOutcome::Failed(
                            StageFailure::new(
                                "structure",
                                "no almost-directed pair at these thresholds: the core stayed dense",
                            )
                            .count("core", y.len() as i64),
                        ))
                    }
                },
            };
            Ok(directed_pair_pipeline(t, g, &pair, &params)?)
        }

        Engine::PipelineCct => {
            if aux.budget.is_some() {
                bail!("--budget only applies to --engine backtrack (use the params file key `node_budget`)");
            }
            let path = aux
                .clusters
                .ok_or_else(|| anyhow!("--engine pipeline-cct needs --clusters FILE"))?;
            let bytes = fs::read(path)
                .with_context(|| format!("reading clusters file {}", path.display()))?;
            rec.input(path, &bytes);
            let spec: ClustersFile = serde_json::from_slice(&bytes).with_context(|| {
                format!(
                    "clusters file {} must be JSON with fields `d`, `eps`, `clusters`",
                    path.display()
                )
            })?;
            let sets: Vec<VertSet> = spec
                .clusters
                .iter()
                .map(|c| VertSet::from_iter_n(g.n(), c.iter().copied()))
                .collect();
            let decomp = ClusterDecomposition::new(g.n(), sets, spec.d, spec.eps)?;
            let defaults = CctParams::default();
            let params = CctParams {
                alpha: take_f64(params_file, "alpha", defaults.alpha)?,
                beta: take_f64(params_file, "beta", defaults.beta)?,
                retry_budget: take_u32(params_file, "retry_budget", defaults.retry_budget)?,
                alloc_retry_budget: take_u32(
                    params_file,
                    "alloc_retry_budget",
                    defaults.alloc_retry_budget,
                )?,
                node_budget: take_budget(params_file, "node_budget", defaults.node_budget)?,
                seed,
            };
            reject_leftovers(params_file, "the pipeline-cct engine")?;
            Ok(cct_pipeline(t, g, &decomp, &params)?)
        }
    }
}

#[derive(serde::Deserialize)]
struct ClustersFile {
    d: f64,
    eps: f64,
    clusters: Vec<Vec<usize>>,
}

#[derive(serde::Deserialize)]
struct PairFile {
    u: Vec<usize>,
    w: Vec<usize>,
    mu: f64,
}
