// Draw a W-random graph and compute exact graph probabilities for a tiny
// one.

use graphon_tree::prelude::*;

pub fn run_example() -> graphon_tree::Result<()> {
    let w = paper_synthetic_graphon();
    let latents = sample_latents(200, 17)?;
    let p = edge_probabilities(&w, &latents)?;
    let a = sample_graph(&p, 18);
    let expected: f64 = (0..200).flat_map(|i| (i + 1..200).map(move |j| (i, j))).map(|(i, j)| p.get(i, j)).sum();
    println!("{} edges sampled, {expected:.1} expected", a.edge_count());

    let partition = w.partition().refine(0.04)?;
    println!("0.5-dense on the 0.04-refinement: {}", rho_dense_check(&latents, &partition, 0.5)?);

    let triangle = Adjacency::complete(3);
    let path = Adjacency::from_edges(3, [(0, 1), (1, 2)])?;
    println!("P(triangle) = {:.6}", exact_graph_probability(&w, &triangle)?);
    println!("P(path 0-1-2) = {:.6}", exact_graph_probability(&w, &path)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    run_example()
}
