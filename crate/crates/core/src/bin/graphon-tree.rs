use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use graphon_tree::estimator::{estimate, SmoothingConfig, Variant};
use graphon_tree::experiment::{self, DatasetMethod, ExperimentConfig};
use graphon_tree::ground_truth::{cluster_tree_of, merge_distortion, step_mergeon, BlockMergeMatrix, ClusterTree};
use graphon_tree::io;
use graphon_tree::linkage::{build_dendrogram, merge_estimate, ExportFormat};
use graphon_tree::sampling::{edge_probabilities, sample_graph, sample_latents, split_seed};
use graphon_tree::Result;

#[derive(Parser)]
#[command(name = "graphon-tree", version, about = "Graphon cluster trees from networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Step graphon utilities.
    Graphon {
        #[command(subcommand)]
        action: GraphonAction,
    },
    /// Sample a W-random graph; prints an edge list (or dense CSV).
    Sample {
        /// Step graphon JSON file, or `paper-synthetic`.
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "edges", value_parser = ["edges", "csv"])]
        format: String,
        /// Also write the latent positions here, one per line.
        #[arg(long)]
        latents: Option<PathBuf>,
    },
    /// Smooth an observed network into an edge-probability CSV.
    Estimate {
        /// Edge list, or a `.gml` file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value = "modified")]
        variant: Variant,
    },
    /// Single-linkage dendrogram of a similarity CSV.
    Cluster {
        #[arg(long)]
        phat: PathBuf,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
    },
    /// Exact mergeon and cluster tree of a step graphon.
    Mergeon {
        #[arg(long)]
        graphon: String,
    },
    /// Merge distortion between two merge-height CSVs.
    Distortion {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        est: PathBuf,
    },
    /// Simulation studies.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Observed networks.
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
}

#[derive(Subcommand)]
enum GraphonAction {
    /// Check a step graphon JSON file against its invariants.
    Validate { path: String },
}

#[derive(Subcommand)]
enum ExperimentAction {
    Synthetic {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum DatasetAction {
    /// Estimate, cluster and export a labelled dendrogram.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "C")]
        c: f64,
        /// `modified`, `original` or `baseline`.
        #[arg(long, default_value = "modified")]
        variant: DatasetMethod,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
        /// Write `dendrogram.json` and `dendrogram.nwk` here instead of
        /// printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_graphon(source: &str) -> Result<graphon_tree::graphon::StepGraphon> {
    if source == experiment::PAPER_SYNTHETIC {
        return Ok(experiment::paper_synthetic_graphon());
    }
    graphon_tree::graphon::StepGraphon::from_json(&std::fs::read_to_string(source)?)
}

#[derive(Serialize)]
struct MergeonReport<'a> {
    breakpoints: &'a [f64],
    #[serde(flatten)]
    merges: &'a BlockMergeMatrix,
    cluster_tree: ClusterTree,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Graphon {
            action: GraphonAction::Validate { path },
        } => {
            let w = load_graphon(&path)?;
            println!("ok: {} blocks", w.num_blocks());
        }
        Command::Sample {
            graphon,
            n,
            seed,
            format,
            latents,
        } => {
            let w = load_graphon(&graphon)?;
            let s = sample_latents(n, split_seed(seed, 0))?;
            let a = sample_graph(&edge_probabilities(&w, &s)?, split_seed(seed, 1));
            if let Some(path) = latents {
                let text: String = s.points.iter().map(|x| format!("{x}\n")).collect();
                std::fs::write(path, text)?;
            }
            match format.as_str() {
                "csv" => print!("{}", io::write_adjacency_csv(&a)),
                _ => print!("{}", io::write_edge_list(&a)),
            }
        }
        Command::Estimate { input, c, variant } => {
            let (a, _) = experiment::load_network(&input)?;
            let (p, stats) = estimate(&a, &SmoothingConfig::new(c, variant)?)?;
            eprintln!(
                "h = {:.6}, neighbourhood size min {} mean {:.2} max {}",
                stats.h, stats.min_size, stats.mean_size, stats.max_size
            );
            print!("{}", io::write_matrix_csv(p.entries()));
        }
        Command::Cluster { phat, format } => {
            let sim = io::load_matrix_csv(&phat)?;
            println!("{}", build_dendrogram(&merge_estimate(&sim)?).export(format));
        }
        Command::Mergeon { graphon } => {
            let w = load_graphon(&graphon)?;
            let merges = step_mergeon(&w);
            let report = MergeonReport {
                breakpoints: w.partition().breakpoints(),
                cluster_tree: cluster_tree_of(&merges),
                merges: &merges,
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Distortion { truth, est } => {
            let d = merge_distortion(&io::load_matrix_csv(&truth)?, &io::load_matrix_csv(&est)?)?;
            println!("{d}");
        }
        Command::Experiment {
            action: ExperimentAction::Synthetic { config },
        } => {
            let cfg = ExperimentConfig::from_json(&std::fs::read_to_string(&config)?)?;
            let out = experiment::run_synthetic_experiment(&cfg)?;
            eprintln!("{} runs written to {}", out.records.len(), out.runs_csv.display());
        }
        Command::Dataset {
            action:
                DatasetAction::Cluster {
                    input,
                    c,
                    variant,
                    format,
                    out,
                },
        } => {
            let result = experiment::run_dataset_clustering(&input, c, variant)?;
            eprintln!("{} nodes, {} edges", result.nodes, result.edges);
            if let Some(s) = result.stats {
                eprintln!(
                    "h = {:.6}, neighbourhood size min {} mean {:.2} max {}",
                    s.h, s.min_size, s.mean_size, s.max_size
                );
            }
            match out {
                Some(dir) => write_dataset_outputs(&dir, &result.dendrogram)?,
                None => println!("{}", result.dendrogram.export(format)),
            }
        }
    }
    Ok(())
}

fn write_dataset_outputs(dir: &Path, d: &graphon_tree::linkage::Dendrogram) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("dendrogram.json"), d.to_json())?;
    std::fs::write(dir.join("dendrogram.nwk"), d.to_newick())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

