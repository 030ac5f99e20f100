// Estimate edge probabilities by neighbourhood smoothing and compare both
// variants against the true probabilities.

use graphon_tree::prelude::*;

pub fn run_example() -> graphon_tree::Result<()> {
    let w = StepGraphon::from_rows(
        vec![0.0, 0.25, 0.5, 1.0],
        vec![vec![0.8, 0.3, 0.1], vec![0.3, 0.7, 0.1], vec![0.1, 0.1, 0.6]],
    )?;
    let latents = sample_latents(120, 5)?;
    let p = edge_probabilities(&w, &latents)?;
    let a = sample_graph(&p, 6);

    for variant in [Variant::Modified, Variant::Original] {
        let cfg = SmoothingConfig::new(1.0, variant)?;
        let (phat, stats) = estimate(&a, &cfg)?;
        let err = estimation_errors(&phat, &p)?;
        println!(
            "{variant:?}: h = {:.4}, neighbourhoods {}..{}, max error {:.3}, mse {:.4}",
            stats.h, stats.min_size, stats.max_size, err.max_norm, err.mse
        );
    }

    let sq = SquaredAdjacency::new(&a);
    println!(
        "common neighbours of 0 and 1: {}, ignoring node 2: {}",
        sq.count(0, 1),
        sq.deleted_count(2, 0, 1)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    run_example()
}
