// Simulate from the three-group graphon over a grid of sizes and seeds and
// score each recovered tree by merge distortion.

use graphon_tree::experiment::GraphonSource;
use graphon_tree::prelude::*;

pub fn run_example() -> graphon_tree::Result<()> {
    let out_dir = std::env::temp_dir().join(format!("graphon-tree-example-{}", std::process::id()));
    let cfg = ExperimentConfig {
        graphon: GraphonSource::Named("paper-synthetic".into()),
        n_grid: vec![32, 64],
        seeds: vec![1, 2, 3],
        c: 0.5,
        variant: Variant::Modified,
        output_dir: out_dir.clone(),
        record_wall_time: true,
    };
    let out = run_synthetic_experiment(&cfg)?;
    for r in &out.records {
        println!(
            "n = {:3} seed {}: distortion {:.3}, max error {:.3}, {} ms",
            r.n, r.seed, r.merge_distortion, r.max_norm_error, r.wall_time_ms
        );
    }
    println!("results in {}", out.runs_csv.display());
    std::fs::remove_dir_all(out_dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    run_example()
}
