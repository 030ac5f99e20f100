//! Edge-probability estimation from a single adjacency matrix by
//! neighborhood smoothing.
//!
//! Column distances are computed from the integer common-neighbour matrix
//! `S = A^2`. The modified estimator needs, for every node `j`, distances in
//! the graph with node `j` deleted. Deleting `j` changes a single entry of
//! `S` by a rank-1 term, `(∂_j A)^2[i][k] = S[i][k] - A[i][j] A[j][k]`, so
//! those distances are read off `S` without ever forming `∂_j A`.
//!
//! All distances stay integer (scaled by `n`) until they are reported, which
//! makes tie handling exact and the output independent of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::sampling::{Adjacency, EdgeProbMatrix};

/// Smallest graph the per-pair estimator accepts.
pub const MIN_NODES_MODIFIED: usize = 4;
/// Smallest graph the per-node estimator accepts.
pub const MIN_NODES_ORIGINAL: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// One neighbourhood per ordered pair `(i, j)`, blind to node `j`.
    Modified,
    /// One neighbourhood per node.
    Original,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modified" => Ok(Variant::Modified),
            "original" => Ok(Variant::Original),
            other => Err(Error::Invalid(format!("unknown estimator variant `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    /// Neighbourhood constant; the quantile is `c * sqrt(ln n / n)`.
    pub c: f64,
    pub variant: Variant,
}

impl SmoothingConfig {
    pub fn new(c: f64, variant: Variant) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Invalid(format!("neighbourhood constant must be positive, got {c}")));
        }
        Ok(Self { c, variant })
    }

    pub fn modified(c: f64) -> Result<Self> {
        Self::new(c, Variant::Modified)
    }

    pub fn original(c: f64) -> Result<Self> {
        Self::new(c, Variant::Original)
    }

    /// Quantile level `h = c sqrt(ln n / n)`; must land in `(0, 1)`.
    pub fn quantile(&self, n: usize) -> Result<f64> {
        bandwidth(self.c, n)
    }
}

/// `c * sqrt(ln n / n)` with the natural log, checked to lie in `(0, 1)`.
pub fn bandwidth(c: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let h = c * (nf.ln() / nf).sqrt();
    if h > 0.0 && h < 1.0 {
        Ok(h)
    } else {
        Err(Error::Domain(format!("quantile h = {h} for n = {n} is outside (0, 1)")))
    }
}

/// Number of smallest distances whose maximum sets the neighbourhood radius.
pub fn neighborhood_rank(h: f64, candidates: usize) -> usize {
    ((h * candidates as f64).ceil() as usize).clamp(1, candidates.max(1))
}

/// Smoothed edge probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProbEstimate {
    entries: SquareMatrix<f64>,
}

impl EdgeProbEstimate {
    /// Validates symmetry and range, and zeroes the diagonal.
    pub fn new(mut entries: SquareMatrix<f64>) -> Result<Self> {
        if entries.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Invalid("estimates must lie in [0, 1]".into()));
        }
        if !entries.is_symmetric() {
            return Err(Error::Invalid("estimates must be symmetric".into()));
        }
        for i in 0..entries.n() {
            entries[(i, i)] = 0.0;
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &SquareMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }
}

/// Neighbourhood sizes observed while estimating.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodStats {
    pub h: f64,
    pub min_size: usize,
    pub max_size: usize,
    pub mean_size: f64,
}

/// Adjacency rows and the common-neighbour matrix `S = A^2`, both widened
/// to `i32` for the distance scans.
#[derive(Clone, Debug)]
pub struct SquaredAdjacency {
    n: usize,
    adj: Vec<i32>,
    sq: Vec<i32>,
}

impl SquaredAdjacency {
    pub fn new(a: &Adjacency) -> Self {
        let n = a.n();
        let adj: Vec<i32> = a.entries().as_slice().iter().map(|&v| v as i32).collect();
        let mut sq = vec![0i32; n * n];
        for i in 0..n {
            let row_i = &adj[i * n..(i + 1) * n];
            for k in i..n {
                let row_k = &adj[k * n..(k + 1) * n];
                let c: i32 = row_i.iter().zip(row_k).map(|(x, y)| x * y).sum();
                sq[i * n + k] = c;
                sq[k * n + i] = c;
            }
        }
        Self { n, adj, sq }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn adj_row(&self, i: usize) -> &[i32] {
        &self.adj[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    fn sq_row(&self, i: usize) -> &[i32] {
        &self.sq[i * self.n..(i + 1) * self.n]
    }

    /// Common neighbours of `i` and `k`.
    #[inline]
    pub fn count(&self, i: usize, k: usize) -> i32 {
        self.sq[i * self.n + k]
    }

    /// Common neighbours of `i` and `k` once node `j` is deleted.
    pub fn deleted_count(&self, j: usize, i: usize, k: usize) -> Result<i32> {
        let n = self.n;
        if i >= n || j >= n || k >= n {
            return Err(Error::Domain(format!("index out of range for {n} nodes")));
        }
        if i == j || k == j {
            return Err(Error::Domain("deleted node must differ from both indices".into()));
        }
        Ok(self.count(i, k) - self.adj[i * n + j] * self.adj[j * n + k])
    }

    /// `n` times `d_j(i, i2)`: the largest gap between the deleted-graph
    /// common-neighbour rows of `i` and `i2` over columns `k ∉ {i, i2, j}`.
    fn scaled_pair_distance(&self, i: usize, i2: usize, j: usize) -> i32 {
        let n = self.n;
        let c = self.adj[i * n + j] - self.adj[i2 * n + j];
        max_abs_gap(self.sq_row(i), self.sq_row(i2), self.adj_row(j), c, [i, i2, j])
    }
}

/// `max_k |a[k] - b[k] - c * x[k]|` over `k` outside `skip`.
#[inline]
fn max_abs_gap(a: &[i32], b: &[i32], x: &[i32], c: i32, mut skip: [usize; 3]) -> i32 {
    skip.sort_unstable();
    let n = a.len();
    let mut best = 0i32;
    let mut start = 0usize;
    for stop in skip.into_iter().chain(std::iter::once(n)) {
        if stop > start {
            let seg = start..stop;
            let m = a[seg.clone()]
                .iter()
                .zip(&b[seg.clone()])
                .zip(&x[seg])
                .fold(0i32, |m, ((&p, &q), &r)| m.max((p - q - c * r).abs()));
            best = best.max(m);
        }
        start = start.max(stop + 1);
    }
    best
}

/// `[(∂_j A)^2 / n]_{ik}` from the precomputed common-neighbour matrix.
pub fn deleted_square_entry(sq: &SquaredAdjacency, j: usize, i: usize, k: usize) -> Result<f64> {
    Ok(sq.deleted_count(j, i, k)? as f64 / sq.n() as f64)
}

fn check_distinct(n: usize, idx: &[usize]) -> Result<()> {
    if let Some(&bad) = idx.iter().find(|&&x| x >= n) {
        return Err(Error::Domain(format!("node {bad} out of range for {n} nodes")));
    }
    for (p, a) in idx.iter().enumerate() {
        if idx[p + 1..].contains(a) {
            return Err(Error::Domain(format!("indices {idx:?} must be distinct")));
        }
    }
    Ok(())
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Invalid(format!("need at least {min} nodes, got {n}")));
    }
    Ok(())
}

/// Distance `d_j(i, i2)` between nodes `i` and `i2` in the graph without `j`.
pub fn pair_distance_dj(a: &Adjacency, i: usize, i2: usize, j: usize) -> Result<f64> {
    check_size(a.n(), MIN_NODES_MODIFIED)?;
    check_distinct(a.n(), &[i, i2, j])?;
    let sq = SquaredAdjacency::new(a);
    Ok(sq.scaled_pair_distance(i, i2, j) as f64 / a.n() as f64)
}

/// Nodes whose `d_j` distance to `i` is within the `h`-quantile; never
/// contains `i` or `j`, ties at the radius are included.
pub fn neighborhood_of_pair(a: &Adjacency, i: usize, j: usize, h: f64) -> Result<Vec<usize>> {
    let n = a.n();
    check_size(n, MIN_NODES_MODIFIED)?;
    check_distinct(n, &[i, j])?;
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("quantile h = {h} is outside (0, 1)")));
    }
    let sq = SquaredAdjacency::new(a);
    let dist: Vec<(usize, i32)> = (0..n)
        .filter(|&t| t != i && t != j)
        .map(|t| (t, sq.scaled_pair_distance(i, t, j)))
        .collect();
    let mut vals: Vec<i32> = dist.iter().map(|&(_, d)| d).collect();
    let radius = radius(&mut vals, h);
    Ok(dist.into_iter().filter(|&(_, d)| d <= radius).map(|(t, _)| t).collect())
}

fn radius(vals: &mut [i32], h: f64) -> i32 {
    let r = neighborhood_rank(h, vals.len());
    *vals.select_nth_unstable(r - 1).1
}

#[derive(Clone, Copy, Default)]
struct SizeTally {
    min: usize,
    max: usize,
    sum: usize,
    count: usize,
}

impl SizeTally {
    fn push(&mut self, size: usize) {
        self.min = if self.count == 0 { size } else { self.min.min(size) };
        self.max = self.max.max(size);
        self.sum += size;
        self.count += 1;
    }

    fn merge(mut self, other: SizeTally) -> SizeTally {
        if other.count > 0 {
            self.min = if self.count == 0 { other.min } else { self.min.min(other.min) };
            self.max = self.max.max(other.max);
            self.sum += other.sum;
            self.count += other.count;
        }
        self
    }

    fn stats(&self, h: f64) -> NeighborhoodStats {
        NeighborhoodStats {
            h,
            min_size: self.min,
            max_size: self.max,
            mean_size: self.sum as f64 / self.count.max(1) as f64,
        }
    }
}

/// For every `i`, the maximum over `k ∉ {i, i2}` of `|S[i][k] - S[i2][k]|`,
/// keeping the two best columns so one more column can be excluded later.
struct TopGaps {
    n: usize,
    best: Vec<(i32, usize, i32)>,
}

impl TopGaps {
    fn new(sq: &SquaredAdjacency) -> Self {
        let n = sq.n;
        let best = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, i2) = (idx / n, idx % n);
                if i >= i2 {
                    return (0, usize::MAX, 0);
                }
                let (a, b) = (sq.sq_row(i), sq.sq_row(i2));
                let (mut first, mut arg, mut second) = (-1i32, usize::MAX, -1i32);
                for k in 0..n {
                    if k == i || k == i2 {
                        continue;
                    }
                    let g = (a[k] - b[k]).abs();
                    if g > first {
                        second = first;
                        first = g;
                        arg = k;
                    } else if g > second {
                        second = g;
                    }
                }
                (first.max(0), arg, second.max(0))
            })
            .collect();
        Self { n, best }
    }

    /// Max gap between rows `i` and `i2` with column `skip` also excluded.
    #[inline]
    fn without(&self, i: usize, i2: usize, skip: usize) -> i32 {
        let (i, i2) = (i.min(i2), i.max(i2));
        let (first, arg, second) = self.best[i * self.n + i2];
        if arg == skip {
            second
        } else {
            first
        }
    }

    #[inline]
    fn get(&self, i: usize, i2: usize) -> i32 {
        let (i, i2) = (i.min(i2), i.max(i2));
        self.best[i * self.n + i2].0
    }
}

/// Per-ordered-pair neighbourhood smoothing.
///
/// `P̂[i][j]` averages `A[i'][j]` over the neighbourhood of `i` built
/// without node `j`, and `A[i][j']` over the neighbourhood of `j` built
/// without node `i`, then takes the mean of the two.
pub fn estimate_modified(a: &Adjacency, cfg: &SmoothingConfig) -> Result<EdgeProbEstimate> {
    estimate_modified_with_stats(a, cfg).map(|(p, _)| p)
}

pub fn estimate_modified_with_stats(a: &Adjacency, cfg: &SmoothingConfig) -> Result<(EdgeProbEstimate, NeighborhoodStats)> {
    let n = a.n();
    check_size(n, MIN_NODES_MODIFIED)?;
    let h = cfg.quantile(n)?;
    let sq = SquaredAdjacency::new(a);
    let top = TopGaps::new(&sq);

    // half[j][i] = mean of A[i'][j] over the neighbourhood of i without j
    let columns: Vec<(Vec<f64>, SizeTally)> = (0..n)
        .into_par_iter()
        .map(|j| smooth_column(&sq, &top, j, h))
        .collect();

    let mut tally = SizeTally::default();
    for (_, t) in &columns {
        tally = tally.merge(*t);
    }
    let entries = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            0.5 * (columns[j].0[i] + columns[i].0[j])
        }
    });
    Ok((EdgeProbEstimate { entries }, tally.stats(h)))
}

fn smooth_column(sq: &SquaredAdjacency, top: &TopGaps, j: usize, h: f64) -> (Vec<f64>, SizeTally) {
    let n = sq.n;
    let adj_j = sq.adj_row(j);
    let mut dist = vec![0i32; n * n];
    for i in 0..n {
        if i == j {
            continue;
        }
        for i2 in i + 1..n {
            if i2 == j {
                continue;
            }
            let d = if adj_j[i] == adj_j[i2] {
                top.without(i, i2, j)
            } else {
                sq.scaled_pair_distance(i, i2, j)
            };
            dist[i * n + i2] = d;
            dist[i2 * n + i] = d;
        }
    }

    let mut out = vec![0.0; n];
    let mut tally = SizeTally::default();
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        if i == j {
            continue;
        }
        let row = &dist[i * n..(i + 1) * n];
        vals.clear();
        vals.extend((0..n).filter(|&t| t != i && t != j).map(|t| row[t]));
        let r = radius(&mut vals, h);
        let (mut size, mut hits) = (0usize, 0i32);
        for t in 0..n {
            if t != i && t != j && row[t] <= r {
                size += 1;
                hits += adj_j[t];
            }
        }
        tally.push(size);
        out[i] = hits as f64 / size as f64;
    }
    (out, tally)
}

/// Per-node neighbourhood smoothing: distances use the full graph and each
/// node has a single neighbourhood drawn from all other nodes.
pub fn estimate_original(a: &Adjacency, cfg: &SmoothingConfig) -> Result<EdgeProbEstimate> {
    estimate_original_with_stats(a, cfg).map(|(p, _)| p)
}

pub fn estimate_original_with_stats(a: &Adjacency, cfg: &SmoothingConfig) -> Result<(EdgeProbEstimate, NeighborhoodStats)> {
    let n = a.n();
    check_size(n, MIN_NODES_ORIGINAL)?;
    let h = cfg.quantile(n)?;
    let sq = SquaredAdjacency::new(a);
    let top = TopGaps::new(&sq);

    let mut tally = SizeTally::default();
    let mut neighborhoods = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        vals.clear();
        vals.extend((0..n).filter(|&t| t != i).map(|t| top.get(i, t)));
        let r = radius(&mut vals, h);
        let nb: Vec<usize> = (0..n).filter(|&t| t != i && top.get(i, t) <= r).collect();
        tally.push(nb.len());
        neighborhoods.push(nb);
    }
    // smoothed[i][j] = mean of A[i'][j] over i' in N_i, skipping i' = j
    // whose unsampled self-edge carries no information; a neighbourhood of
    // just {j} falls back to the observed edge.
    let smoothed = SquareMatrix::from_fn(n, |i, j| {
        let (hits, size) = neighborhoods[i]
            .iter()
            .filter(|&&t| t != j)
            .fold((0u32, 0u32), |(h, s), &t| (h + a.get(t, j) as u32, s + 1));
        if size == 0 {
            a.get(i, j) as f64
        } else {
            hits as f64 / size as f64
        }
    });
    let entries = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            0.5 * (smoothed[(i, j)] + smoothed[(j, i)])
        }
    });
    Ok((EdgeProbEstimate { entries }, tally.stats(h)))
}

/// Dispatches on `cfg.variant`.
pub fn estimate(a: &Adjacency, cfg: &SmoothingConfig) -> Result<(EdgeProbEstimate, NeighborhoodStats)> {
    match cfg.variant {
        Variant::Modified => estimate_modified_with_stats(a, cfg),
        Variant::Original => estimate_original_with_stats(a, cfg),
    }
}

/// Euclidean distance between adjacency columns.
pub fn column_distance_matrix(a: &Adjacency) -> Result<SquareMatrix<f64>> {
    let n = a.n();
    check_size(n, 2)?;
    Ok(SquareMatrix::from_fn(n, |i, j| {
        let diff = a.row(i).iter().zip(a.row(j)).filter(|(x, y)| x != y).count();
        (diff as f64).sqrt()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationErrors {
    pub max_norm: f64,
    pub mse: f64,
}

/// Max-norm and mean squared error over off-diagonal entries (MSE divides
/// by `n^2`).
pub fn estimation_errors(phat: &EdgeProbEstimate, p: &EdgeProbMatrix) -> Result<EstimationErrors> {
    let n = phat.n();
    if p.n() != n {
        return Err(Error::Dimension { expected: n, found: p.n() });
    }
    let max_norm = phat.entries().max_off_diagonal(p.entries(), |a, b| (a - b).abs());
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = phat.get(i, j) - p.get(i, j);
                sum += d * d;
            }
        }
    }
    Ok(EstimationErrors {
        max_norm,
        mse: sum / (n * n).max(1) as f64,
    })
}
