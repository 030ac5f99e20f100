// Max-min merge estimates, a single-linkage dendrogram, flat cuts and
// export to JSON and Newick.

use graphon_tree::prelude::*;

pub fn run_example() -> graphon_tree::Result<()> {
    let sim = SquareMatrix::from_rows(vec![
        vec![0.0, 0.9, 0.2, 0.1, 0.1],
        vec![0.9, 0.0, 0.6, 0.1, 0.1],
        vec![0.2, 0.6, 0.0, 0.3, 0.1],
        vec![0.1, 0.1, 0.3, 0.0, 0.8],
        vec![0.1, 0.1, 0.1, 0.8, 0.0],
    ])?;
    let merges = merge_estimate(&sim)?;
    println!("merge level of 0 and 2: {}", merges.get(0, 2));

    let labels = ["ant", "bee", "cat", "dog", "eel"].map(String::from).to_vec();
    let tree = build_dendrogram(&merges).with_labels(labels)?;
    for level in merges.levels() {
        println!("cut at {level}: {:?}", tree.cut(level));
    }
    println!("{}", tree.to_newick());
    let json = tree.to_json();
    println!("{json}");
    assert_eq!(Dendrogram::from_json(&json)?, tree);
    Ok(())
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    run_example()
}
