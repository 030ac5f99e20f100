//! Slow reference implementations that follow the definitions literally.
//! They share no code with the crate's fast paths beyond data types.
#![allow(dead_code)]

use graphon_tree::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dense(a: &Adjacency) -> Vec<Vec<i64>> {
    (0..a.n()).map(|i| a.row(i).iter().map(|&v| v as i64).collect()).collect()
}

fn square(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                out[i][k] += m[i][l] * m[l][k];
            }
        }
    }
    out
}

/// `A` with row and column `j` set to zero.
pub fn zero_row_col(a: &Adjacency, j: usize) -> Vec<Vec<i64>> {
    let mut m = dense(a);
    for t in 0..m.len() {
        m[j][t] = 0;
        m[t][j] = 0;
    }
    m
}

/// `(∂_j A)^2` by explicit zeroing and a cubic product.
pub fn deleted_square(a: &Adjacency, j: usize) -> Vec<Vec<i64>> {
    square(&zero_row_col(a, j))
}

fn quantile_radius(mut d: Vec<i64>, h: f64) -> i64 {
    d.sort();
    let r = ((h * d.len() as f64).ceil() as usize).max(1).min(d.len());
    d[r - 1]
}

fn bandwidth(c: f64, n: usize) -> f64 {
    c * ((n as f64).ln() / n as f64).sqrt()
}

/// `n * d_j(i, i2)` straight from the deleted square.
pub fn naive_scaled_dj(sq: &[Vec<i64>], i: usize, i2: usize, j: usize) -> i64 {
    (0..sq.len())
        .filter(|&k| k != i && k != i2 && k != j)
        .map(|k| (sq[i][k] - sq[i2][k]).abs())
        .max()
        .unwrap_or(0)
}

pub fn naive_modified(a: &Adjacency, c: f64) -> SquareMatrix<f64> {
    let n = a.n();
    let h = bandwidth(c, n);
    let mut half = vec![vec![0.0; n]; n];
    for j in 0..n {
        let sq = deleted_square(a, j);
        for i in 0..n {
            if i == j {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&t| t != i && t != j).collect();
            let d: Vec<i64> = others.iter().map(|&t| naive_scaled_dj(&sq, i, t, j)).collect();
            let q = quantile_radius(d.clone(), h);
            let nb: Vec<usize> = others.iter().zip(&d).filter(|(_, &x)| x <= q).map(|(&t, _)| t).collect();
            half[i][j] = nb.iter().map(|&t| a.get(t, j) as f64).sum::<f64>() / nb.len() as f64;
        }
    }
    SquareMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { 0.5 * (half[i][j] + half[j][i]) })
}

pub fn naive_original(a: &Adjacency, c: f64) -> SquareMatrix<f64> {
    let n = a.n();
    let h = bandwidth(c, n);
    let sq = square(&dense(a));
    let dist = |i: usize, t: usize| -> i64 {
        (0..n)
            .filter(|&k| k != i && k != t)
            .map(|k| (sq[i][k] - sq[t][k]).abs())
            .max()
            .unwrap_or(0)
    };
    let nbs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&t| t != i).collect();
            let d: Vec<i64> = others.iter().map(|&t| dist(i, t)).collect();
            let q = quantile_radius(d.clone(), h);
            others.into_iter().zip(d).filter(|&(_, x)| x <= q).map(|(t, _)| t).collect()
        })
        .collect();
    let smooth = |i: usize, j: usize| -> f64 {
        let used: Vec<usize> = nbs[i].iter().copied().filter(|&t| t != j).collect();
        if used.is_empty() {
            a.get(i, j) as f64
        } else {
            used.iter().map(|&t| a.get(t, j) as f64).sum::<f64>() / used.len() as f64
        }
    };
    SquareMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { 0.5 * (smooth(i, j) + smooth(j, i)) })
}

/// Max over all simple paths of the minimum similarity along the path.
pub fn brute_force_merge(sim: &SquareMatrix<f64>, i: usize, j: usize) -> f64 {
    fn go(sim: &SquareMatrix<f64>, at: usize, goal: usize, used: &mut [bool], bottleneck: f64) -> f64 {
        if at == goal {
            return bottleneck;
        }
        let mut best = f64::NEG_INFINITY;
        for next in 0..sim.n() {
            if !used[next] {
                used[next] = true;
                best = best.max(go(sim, next, goal, used, bottleneck.min(sim[(at, next)])));
                used[next] = false;
            }
        }
        best
    }
    let mut used = vec![false; sim.n()];
    used[i] = true;
    go(sim, i, j, &mut used, f64::INFINITY)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix<f64> {
    let raw: Vec<f64> = (0..n * n).map(|_| (rng.gen_range(0..=20) as f64) / 20.0).collect();
    SquareMatrix::from_fn(n, |i, j| {
        let (a, b) = (i.min(j), i.max(j));
        raw[a * n + b]
    })
}

/// Step graphon with up to `max_blocks` dyadic blocks and values on the
/// grid {0, 0.1, ..., 1}.
pub fn random_step_graphon(rng: &mut ChaCha8Rng, max_blocks: usize) -> StepGraphon {
    let k = rng.gen_range(1..=max_blocks);
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < k - 1 {
        cuts.insert(rng.gen_range(1..64u32));
    }
    let mut b = vec![0.0];
    b.extend(cuts.into_iter().map(|c| c as f64 / 64.0));
    b.push(1.0);
    let raw: Vec<f64> = (0..k * k).map(|_| rng.gen_range(0..=10) as f64 / 10.0).collect();
    let values = SquareMatrix::from_fn(k, |a, c| raw[a.min(c) * k + a.max(c)]);
    StepGraphon::new(BlockPartition::new(b).unwrap(), values).unwrap()
}

pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Adjacency {
    sample_graph(&EdgeProbMatrix::new(SquareMatrix::filled(n, p)).unwrap(), seed)
}

/// Documented 8-node fixtures: two loose communities, a star-plus-path and
/// a near-bipartite graph.
pub fn eight_node_fixtures() -> Vec<Adjacency> {
    let lists: [&[(usize, usize)]; 3] = [
        &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (5, 7), (6, 7), (3, 4)],
        &[(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (5, 6), (6, 7), (2, 7)],
        &[(0, 4), (0, 5), (1, 5), (1, 6), (2, 6), (2, 7), (3, 7), (3, 4), (0, 1), (6, 7)],
    ];
    let mut out: Vec<Adjacency> = lists.iter().map(|e| Adjacency::from_edges(8, e.iter().copied()).unwrap()).collect();
    for seed in 0..5 {
        out.push(erdos_renyi(8, 0.45, 1000 + seed));
    }
    out
}
