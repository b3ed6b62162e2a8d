//! Success-rate probe for the cluster-cycle pipeline over planted
//! instances. Run: cargo run -p tourtree --release --example cct_rate

use tourtree::bitset::VertSet;
use tourtree::digraph::Tournament;
use tourtree::embed::{cct_pipeline, CctParams, ClusterDecomposition, PipelineOutcome};
use tourtree::otree::planted_nice_tree;
use tourtree::rng::rng_from_seed;

use rand::Rng;

fn cyclic_host(k: usize, m: usize, forward_p: f64, seed: u64) -> (Tournament, ClusterDecomposition) {
    let n = k * m;
    let mut rng = rng_from_seed(seed);
    let g = Tournament::from_orientation(n, |i, j| {
        let (ci, cj) = (i / m, j / m);
        if ci == cj {
            rng.gen_bool(0.5)
        } else if (ci + 1) % k == cj {
            rng.gen_bool(forward_p)
        } else if (cj + 1) % k == ci {
            !rng.gen_bool(forward_p)
        } else {
            rng.gen_bool(0.5)
        }
    });
    let clusters: Vec<VertSet> = (0..k)
        .map(|c| VertSet::from_iter_n(n, (c * m)..(c * m + m)))
        .collect();
    let decomp = ClusterDecomposition::new(n, clusters, forward_p, 0.1).unwrap();
    (g, decomp)
}

fn main() {
    let trials = 40u64;
    let mut ok = 0usize;
    let start = std::time::Instant::now();
    for inst in 0..trials {
        let (g, decomp) = cyclic_host(6, 40, 0.9, 10_000 + inst);
        let t = planted_nice_tree(240, 1, 30, 20_000 + inst).unwrap();
        let params = CctParams {
            seed: inst,
            ..CctParams::default()
        };
        match cct_pipeline(&t, &g, &decomp, &params).unwrap() {
            PipelineOutcome::Embedded(_) => ok += 1,
            PipelineOutcome::Failed(f) => {
                eprintln!("inst {inst}: FAILED at {} ({})", f.stage, f.detail);
            }
        }
    }
    eprintln!(
        "{ok}/{trials} embedded in {:.1}s",
        start.elapsed().as_secs_f64()
    );
}
