// Exact mergeon and cluster tree of a step graphon, cross-checked against a
// brute-force discretization.

use graphon_tree::prelude::*;

pub fn run_example() -> graphon_tree::Result<()> {
    let w = paper_synthetic_graphon();
    let merges = step_mergeon(&w);
    println!("block merge levels:");
    for row in merges.levels().to_rows() {
        println!("  {row:?}");
    }
    for entry in &cluster_tree_of(&merges).entries {
        println!("level {:.1}: block clusters {:?}", entry.level, entry.clusters);
    }
    println!("M(0.1, 0.5) = {}", mergeon_eval(&merges, w.partition(), 0.1, 0.5)?);
    println!("M(0.1, 0.9) = {}", mergeon_eval(&merges, w.partition(), 0.1, 0.9)?);
    assert_eq!(discretization_oracle(&w, 3)?, merges);
    Ok(())
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    run_example()
}
