//! W-random graphs: latent positions, edge probabilities and adjacency
//! matrices, all driven by explicit 64-bit seeds.
//!
//! Every random draw goes through [`rng_from_seed`] (ChaCha8). Independent
//! runs derive their seeds with [`split_seed`], so a run's output depends
//! only on `(master_seed, run_index)` and never on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{BlockPartition, StepGraphon};
use crate::matrix::SquareMatrix;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `(master, index)`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentSample {
    pub points: Vec<f64>,
    pub seed: u64,
}

impl LatentSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` independent uniforms on `[0, 1)`.
pub fn sample_latents(n: usize, seed: u64) -> Result<LatentSample> {
    if n == 0 {
        return Err(Error::Invalid("sample size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let points = (0..n).map(|_| rng.gen::<f64>()).collect();
    Ok(LatentSample { points, seed })
}

/// Latent edge probabilities `P[i][j] = W(x_i, x_j)`, zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProbMatrix {
    entries: SquareMatrix<f64>,
}

impl EdgeProbMatrix {
    pub fn new(mut entries: SquareMatrix<f64>) -> Result<Self> {
        if entries.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Invalid("edge probabilities must lie in [0, 1]".into()));
        }
        if !entries.is_symmetric() {
            return Err(Error::Invalid("edge probabilities must be symmetric".into()));
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

pub fn edge_probabilities(w: &StepGraphon, sample: &LatentSample) -> Result<EdgeProbMatrix> {
    let blocks = sample
        .points
        .iter()
        .map(|&x| w.partition().locate(x))
        .collect::<Result<Vec<_>>>()?;
    let n = blocks.len();
    let entries = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            w.block_value(blocks[i], blocks[j])
        }
    });
    Ok(EdgeProbMatrix { entries })
}

/// Simple undirected graph as a dense 0/1 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    entries: SquareMatrix<u8>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Self {
            entries: SquareMatrix::filled(n, 0),
        }
    }

    pub fn complete(n: usize) -> Self {
        Self {
            entries: SquareMatrix::from_fn(n, |i, j| u8::from(i != j)),
        }
    }

    /// Duplicate edges are idempotent; self-loops and out-of-range ids fail.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut a = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop on node {u}")));
            }
            a.entries[(u, v)] = 1;
            a.entries[(v, u)] = 1;
        }
        Ok(a)
    }

    pub fn from_matrix(entries: SquareMatrix<u8>) -> Result<Self> {
        if entries.as_slice().iter().any(|&v| v > 1) {
            return Err(Error::Invalid("adjacency entries must be 0 or 1".into()));
        }
        if !entries.is_symmetric() {
            return Err(Error::Invalid("adjacency must be symmetric".into()));
        }
        if (0..entries.n()).any(|i| entries[(i, i)] != 0) {
            return Err(Error::Invalid("adjacency must have a zero diagonal".into()));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.n()
    }

    pub fn entries(&self) -> &SquareMatrix<u8> {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[(i, j)]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        self.entries.row(i)
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| (i + 1..n).filter(move |&j| self.get(i, j) == 1).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// The same graph with node `i` renamed to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Adjacency {
        let n = self.n();
        let mut out = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[(perm[i], perm[j])] = self.get(i, j);
            }
        }
        out
    }
}

/// One Bernoulli draw per unordered pair `i < j`, in row-major order.
pub fn sample_graph(p: &EdgeProbMatrix, seed: u64) -> Adjacency {
    let n = p.n();
    let mut rng = rng_from_seed(seed);
    let mut a = Adjacency::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p.get(i, j) {
                a.entries[(i, j)] = 1;
                a.entries[(j, i)] = 1;
            }
        }
    }
    a
}

pub const MAX_EXACT_NODES: usize = 8;
const MAX_EXACT_ASSIGNMENTS: u64 = 1 << 27;

/// Probability that the W-random graph on `n` labeled nodes equals `a`,
/// summing over every assignment of nodes to blocks.
pub fn exact_graph_probability(w: &StepGraphon, a: &Adjacency) -> Result<f64> {
    let n = a.n();
    let k = w.num_blocks();
    if n > MAX_EXACT_NODES {
        return Err(Error::TooLarge(format!(
            "exact enumeration supports at most {MAX_EXACT_NODES} nodes, got {n}"
        )));
    }
    if (k as u64).checked_pow(n as u32).map_or(true, |c| c > MAX_EXACT_ASSIGNMENTS) {
        return Err(Error::TooLarge(format!("{k}^{n} block assignments is too many")));
    }
    let measure: Vec<f64> = (0..k).map(|b| w.partition().block_len(b)).collect();
    let mut assign = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut term: f64 = assign.iter().map(|&b| measure[b]).product();
        for i in 0..n {
            for j in i + 1..n {
                let v = w.block_value(assign[i], assign[j]);
                term *= if a.get(i, j) == 1 { v } else { 1.0 - v };
            }
        }
        total += term;
        // odometer over k^n assignments
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(total);
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

/// Whether every block `B` receives more than `(1 - rho) |B| n` of the points.
pub fn rho_dense_check(sample: &LatentSample, partition: &BlockPartition, rho: f64) -> Result<bool> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    let n = sample.len() as f64;
    let counts = partition.counts(&sample.points)?;
    Ok(counts
        .iter()
        .enumerate()
        .all(|(b, &c)| c as f64 / n > (1.0 - rho) * partition.block_len(b)))
}
