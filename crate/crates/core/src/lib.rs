//! Hierarchical clustering of networks through the graphon cluster tree.
//!
//! A network is modelled as a W-random graph: each node gets a latent
//! position uniform on `[0,1]`, and nodes `i`, `j` are joined with probability
//! `W(x_i, x_j)`. The clusters of `W` at level `λ` are the maximal sets that
//! stay connected when only regions with `W ≥ λ` are kept; across all levels
//! they form the graphon cluster tree, and the *mergeon* records the level at
//! which any two points first share a cluster.
//!
//! The crate covers the whole loop:
//!
//! * [`graphon`]: piecewise-constant graphons, block partitions and
//!   measure-preserving relabelings.
//! * [`ground_truth`]: the exact mergeon and cluster tree of a step graphon,
//!   and merge distortion for scoring a recovered hierarchy.
//! * [`sampling`]: latent positions, edge probabilities, sampled graphs and
//!   exact graph probabilities for tiny graphs.
//! * [`estimator`]: neighbourhood smoothing, where each ordered node pair
//!   `(i, j)` gets its own neighbourhood built without node `j`.
//! * [`linkage`]: max-min merge estimates, single-linkage dendrograms and
//!   flat cuts.
//! * [`experiment`]: simulation and dataset pipelines.
//!
//! ```
//! use graphon_tree::prelude::*;
//!
//! let w = paper_synthetic_graphon();
//! let truth = step_mergeon(&w);
//! let run = simulate_run(&w, &truth, 48, 7, &SmoothingConfig::modified(0.5).unwrap()).unwrap();
//! assert_eq!(run.dendrogram.n(), 48);
//! ```

pub mod error;
pub mod estimator;
pub mod experiment;
pub mod graphon;
pub mod ground_truth;
pub mod io;
pub mod linkage;
pub mod matrix;
pub mod sampling;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::estimator::{
        column_distance_matrix, deleted_square_entry, estimate, estimate_modified, estimate_original,
        estimation_errors, neighborhood_of_pair, pair_distance_dj, EdgeProbEstimate, SmoothingConfig,
        SquaredAdjacency, Variant,
    };
    pub use crate::experiment::{
        paper_synthetic_graphon, run_dataset_clustering, run_synthetic_experiment, simulate_run, DatasetMethod,
        ExperimentConfig, RunRecord,
    };
    pub use crate::graphon::{BlockPartition, MeasurePreservingMap, StepGraphon};
    pub use crate::ground_truth::{
        cluster_tree_of, discretization_oracle, merge_distortion, mergeon_eval, step_mergeon, BlockMergeMatrix,
        ClusterTree, Hierarchy,
    };
    pub use crate::linkage::{build_dendrogram, clusters_at_level, merge_estimate, Dendrogram, MergeMatrix};
    pub use crate::matrix::SquareMatrix;
    pub use crate::sampling::{
        edge_probabilities, exact_graph_probability, rho_dense_check, sample_graph, sample_latents, Adjacency,
        EdgeProbMatrix, LatentSample,
    };
}
