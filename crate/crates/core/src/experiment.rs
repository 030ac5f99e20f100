//! End-to-end runs: simulate from a graphon and score the recovered tree, or
//! cluster an observed network.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    column_distance_matrix, estimate, estimation_errors, EdgeProbEstimate, NeighborhoodStats, SmoothingConfig, Variant,
};
use crate::graphon::StepGraphon;
use crate::ground_truth::{merge_distortion, merge_heights_at, step_mergeon, BlockMergeMatrix};
use crate::io;
use crate::linkage::{build_dendrogram, merge_estimate, Dendrogram, MergeMatrix};
use crate::matrix::SquareMatrix;
use crate::sampling::{edge_probabilities, sample_graph, sample_latents, split_seed, Adjacency, EdgeProbMatrix, LatentSample};

pub const PAPER_SYNTHETIC: &str = "paper-synthetic";

/// Three diagonal groups at 0.7 on `[0,1/3)`, `[1/3,2/3)`, `[2/3,1]`. The
/// first two touch through a small square of value 0.5 straddling `1/3`
/// (width 1/24 on each side); everything else is 0.1.
///
/// Blocks: 0 and 1 form group 1, 2 and 3 group 2, 4 is group 3.
pub fn paper_synthetic_graphon() -> StepGraphon {
    let third = 1.0 / 3.0;
    let w = 1.0 / 24.0;
    let group = [0, 0, 1, 1, 2];
    let values = (0..5)
        .map(|a| {
            (0..5)
                .map(|b| {
                    if group[a] == group[b] {
                        0.7
                    } else if (a, b) == (1, 2) || (a, b) == (2, 1) {
                        0.5
                    } else {
                        0.1
                    }
                })
                .collect()
        })
        .collect();
    StepGraphon::from_rows(vec![0.0, third - w, third, third + w, 2.0 * third, 1.0], values)
        .expect("built-in graphon is valid")
}

/// Latent group (0, 1 or 2) of a point under [`paper_synthetic_graphon`].
pub fn paper_synthetic_group(x: f64) -> usize {
    if x < 1.0 / 3.0 {
        0
    } else if x < 2.0 / 3.0 {
        1
    } else {
        2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphonSource {
    Named(String),
    Inline(StepGraphon),
}

impl GraphonSource {
    pub fn resolve(&self) -> Result<StepGraphon> {
        match self {
            GraphonSource::Named(name) if name == PAPER_SYNTHETIC => Ok(paper_synthetic_graphon()),
            GraphonSource::Named(name) => Err(Error::Invalid(format!("unknown built-in graphon `{name}`"))),
            GraphonSource::Inline(w) => Ok(w.clone()),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graphon: GraphonSource,
    pub n_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub variant: Variant,
    pub output_dir: PathBuf,
    /// When false, `wall_time_ms` is written as 0 so reruns are byte-identical.
    #[serde(default = "default_true")]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.seeds.is_empty() {
            return Err(Error::Invalid("n_grid and seeds must be non-empty".into()));
        }
        SmoothingConfig::new(self.c, self.variant)?;
        self.graphon.resolve()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub seed: u64,
    pub merge_distortion: f64,
    pub max_norm_error: f64,
    pub mse: f64,
    pub wall_time_ms: u64,
}

/// Everything produced by one simulated run.
#[derive(Clone, Debug)]
pub struct SyntheticRun {
    pub latents: LatentSample,
    pub probabilities: EdgeProbMatrix,
    pub adjacency: Adjacency,
    pub estimate: EdgeProbEstimate,
    pub stats: NeighborhoodStats,
    pub merges: MergeMatrix,
    pub dendrogram: Dendrogram,
    pub true_merges: SquareMatrix<f64>,
    pub record: RunRecord,
}

/// Seed of the run with sample size `n` under master seed `seed`.
pub fn run_seed(seed: u64, n: usize) -> u64 {
    split_seed(seed, n as u64)
}

/// Samples a graph from `w`, estimates, clusters and scores it against the
/// exact mergeon `truth` at the latent points.
pub fn simulate_run(w: &StepGraphon, truth: &BlockMergeMatrix, n: usize, seed: u64, cfg: &SmoothingConfig) -> Result<SyntheticRun> {
    let start = Instant::now();
    let run = run_seed(seed, n);
    let latents = sample_latents(n, split_seed(run, 0))?;
    let probabilities = edge_probabilities(w, &latents)?;
    let adjacency = sample_graph(&probabilities, split_seed(run, 1));
    let (estimate, stats) = estimate(&adjacency, cfg)?;
    let merges = merge_estimate(estimate.entries())?;
    let dendrogram = build_dendrogram(&merges);
    let true_merges = merge_heights_at(truth, w.partition(), &latents.points)?;
    let induced = merges.hierarchy().induced_heights(&true_merges)?;
    let errors = estimation_errors(&estimate, &probabilities)?;
    let record = RunRecord {
        n,
        seed,
        merge_distortion: merge_distortion(&true_merges, &induced)?,
        max_norm_error: errors.max_norm,
        mse: errors.mse,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    Ok(SyntheticRun {
        latents,
        probabilities,
        adjacency,
        estimate,
        stats,
        merges,
        dendrogram,
        true_merges,
        record,
    })
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub runs_csv: PathBuf,
    pub dendrogram_dir: PathBuf,
}

pub fn records_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["n", "seed", "merge_distortion", "max_norm_error", "mse", "wall_time_ms"])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Runs every `(n, seed)` pair, writing `runs.csv` (ordered by `n` then
/// seed) and one dendrogram JSON per run. Completed runs are written even
/// when a later run fails; the first failure is then returned.
pub fn run_synthetic_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let w = cfg.graphon.resolve()?;
    let truth = step_mergeon(&w);
    let smoothing = SmoothingConfig::new(cfg.c, cfg.variant)?;
    let mut jobs: Vec<(usize, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    jobs.sort_unstable();
    jobs.dedup();

    let results: Vec<Result<(RunRecord, String)>> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let run = simulate_run(&w, &truth, n, seed, &smoothing)?;
            let mut record = run.record;
            if !cfg.record_wall_time {
                record.wall_time_ms = 0;
            }
            Ok((record, run.dendrogram.to_json()))
        })
        .collect();

    let dendrogram_dir = cfg.output_dir.join("dendrograms");
    std::fs::create_dir_all(&dendrogram_dir)?;
    let mut records = Vec::new();
    let mut first_err = None;
    for result in results {
        match result {
            Ok((record, tree)) => {
                let name = format!("n{}_seed{}.json", record.n, record.seed);
                std::fs::write(dendrogram_dir.join(name), tree)?;
                records.push(record);
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let runs_csv = cfg.output_dir.join("runs.csv");
    std::fs::write(&runs_csv, records_csv(&records)?)?;
    match first_err {
        Some(e) => Err(e),
        None => Ok(ExperimentOutput {
            records,
            runs_csv,
            dendrogram_dir,
        }),
    }
}

/// How an observed network is turned into a similarity matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetMethod {
    Smoothing(Variant),
    /// Single linkage on negated Euclidean distances between adjacency
    /// columns.
    Baseline,
}

impl std::str::FromStr for DatasetMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(DatasetMethod::Baseline),
            other => Ok(DatasetMethod::Smoothing(other.parse()?)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DatasetClustering {
    pub dendrogram: Dendrogram,
    pub nodes: usize,
    pub edges: usize,
    /// Only for smoothing methods.
    pub stats: Option<NeighborhoodStats>,
}

/// Node labels plus adjacency for a `.gml` file or a plain edge list.
pub fn load_network(path: &Path) -> Result<(Adjacency, Vec<String>)> {
    let is_gml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gml"));
    if is_gml {
        let g = io::load_gml_subset(path)?;
        Ok((g.adjacency, g.labels))
    } else {
        let a = io::load_edge_list(path)?;
        let labels = (0..a.n()).map(|i| i.to_string()).collect();
        Ok((a, labels))
    }
}

pub fn cluster_network(a: &Adjacency, labels: Vec<String>, c: f64, method: DatasetMethod) -> Result<DatasetClustering> {
    let (similarity, stats) = match method {
        DatasetMethod::Smoothing(variant) => {
            let (p, stats) = estimate(a, &SmoothingConfig::new(c, variant)?)?;
            (p.entries().clone(), Some(stats))
        }
        DatasetMethod::Baseline => {
            let d = column_distance_matrix(a)?;
            (SquareMatrix::from_fn(d.n(), |i, j| -d[(i, j)]), None)
        }
    };
    let dendrogram = build_dendrogram(&merge_estimate(&similarity)?).with_labels(labels)?;
    Ok(DatasetClustering {
        dendrogram,
        nodes: a.n(),
        edges: a.edge_count(),
        stats,
    })
}

pub fn run_dataset_clustering(path: impl AsRef<Path>, c: f64, method: DatasetMethod) -> Result<DatasetClustering> {
    let (a, labels) = load_network(path.as_ref())?;
    cluster_network(&a, labels, c, method)
}
