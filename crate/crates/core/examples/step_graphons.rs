// Build a step graphon, evaluate it, refine its partition and relabel it
// with a measure-preserving map.

use graphon_tree::prelude::*;

pub fn run_example() -> graphon_tree::Result<()> {
    let w = StepGraphon::from_rows(vec![0.0, 0.5, 1.0], vec![vec![0.8, 0.2], vec![0.2, 0.6]])?;
    println!("W(0.1, 0.9) = {}", w.eval(0.1, 0.9)?);
    println!("W(0.7, 0.9) = {}", w.eval(0.7, 0.9)?);

    let fine = w.partition().refine(0.1)?;
    println!("0.1-refinement: {:?}", fine.breakpoints());

    let phi = MeasurePreservingMap::stretch_mod(2)?;
    let relabeled = w.pullback(phi);
    println!("relabeled by x -> 2x mod 1: {}", relabeled.to_json());
    for (x, y) in [(0.1, 0.3), (0.3, 0.6), (0.6, 0.9)] {
        assert_eq!(relabeled.eval(x, y)?, w.eval(phi.apply(x), phi.apply(y))?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    run_example()
}
