//! Exact cluster trees and mergeons of step graphons, plus the merge
//! distortion used to score an estimated hierarchy against them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{BlockPartition, StepGraphon};
use crate::matrix::SquareMatrix;

/// Merge level of every pair of blocks. Off-diagonal entries are the level
/// at which two blocks first share a cluster; the diagonal is the highest
/// level at which a block is itself connected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockMergeRepr", into = "BlockMergeRepr")]
pub struct BlockMergeMatrix {
    levels: SquareMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct BlockMergeRepr {
    levels: Vec<Vec<f64>>,
}

impl TryFrom<BlockMergeRepr> for BlockMergeMatrix {
    type Error = Error;

    fn try_from(r: BlockMergeRepr) -> Result<Self> {
        BlockMergeMatrix::new(SquareMatrix::from_rows(r.levels)?)
    }
}

impl From<BlockMergeMatrix> for BlockMergeRepr {
    fn from(m: BlockMergeMatrix) -> Self {
        BlockMergeRepr {
            levels: m.levels.to_rows(),
        }
    }
}

impl BlockMergeMatrix {
    /// Validates symmetry, range, the max-min ultrametric inequality and
    /// diagonal dominance.
    pub fn new(levels: SquareMatrix<f64>) -> Result<Self> {
        let k = levels.n();
        if k == 0 {
            return Err(Error::Invalid("merge matrix must have at least one block".into()));
        }
        if levels.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Invalid("merge levels must lie in [0, 1]".into()));
        }
        if !levels.is_symmetric() {
            return Err(Error::Invalid("merge levels must be symmetric".into()));
        }
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                if levels[(a, a)] < levels[(a, b)] {
                    return Err(Error::Invalid(format!(
                        "diagonal level of block {a} is below its merge with block {b}"
                    )));
                }
                for c in 0..k {
                    if c != a && c != b && levels[(a, b)] < levels[(a, c)].min(levels[(c, b)]) {
                        return Err(Error::Invalid(format!(
                            "ultrametric inequality fails for blocks {a}, {b} via {c}"
                        )));
                    }
                }
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &SquareMatrix<f64> {
        &self.levels
    }

    pub fn num_blocks(&self) -> usize {
        self.levels.n()
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.levels[(a, b)]
    }

    /// Distinct levels, descending.
    pub fn distinct_levels(&self) -> Vec<f64> {
        let mut v = self.levels.as_slice().to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v.dedup();
        v
    }
}

/// The exact mergeon of a step graphon at block resolution.
///
/// Between blocks this is the widest-path (bottleneck) value over the block
/// graph; within a block it is the best of the block's own value and any
/// two-step excursion through another block.
pub fn step_mergeon(w: &StepGraphon) -> BlockMergeMatrix {
    let k = w.num_blocks();
    let mut best = SquareMatrix::from_fn(k, |a, b| w.block_value(a, b));
    for c in 0..k {
        for a in 0..k {
            if a == c {
                continue;
            }
            let via = best[(a, c)];
            for b in 0..k {
                if b == a || b == c {
                    continue;
                }
                let cand = via.min(best[(c, b)]);
                if cand > best[(a, b)] {
                    best[(a, b)] = cand;
                }
            }
        }
    }
    for a in 0..k {
        let excursion = (0..k)
            .filter(|&c| c != a)
            .map(|c| w.block_value(a, c))
            .fold(w.block_value(a, a), f64::max);
        best[(a, a)] = excursion;
    }
    BlockMergeMatrix::new(best).expect("widest paths form a valid merge matrix")
}

/// Definition-level reference for [`step_mergeon`]: split every block into
/// `atoms_per_block` equal atoms, run single linkage on the complete graph of
/// atoms weighted by the graphon at atom midpoints, and read block-level
/// merge heights back off the atom dendrogram.
pub fn discretization_oracle(w: &StepGraphon, atoms_per_block: usize) -> Result<BlockMergeMatrix> {
    if atoms_per_block < 2 {
        return Err(Error::Domain("discretization needs at least 2 atoms per block".into()));
    }
    let k = w.num_blocks();
    let m = atoms_per_block;
    let reps: Vec<f64> = (0..k)
        .flat_map(|a| {
            let (lo, hi) = w.partition().block(a);
            (0..m).map(move |t| lo + (hi - lo) * (t as f64 + 0.5) / m as f64)
        })
        .collect();
    let atoms = reps.len();

    let mut edges = Vec::with_capacity(atoms * (atoms - 1) / 2);
    for u in 0..atoms {
        for v in u + 1..atoms {
            edges.push((w.eval(reps[u], reps[v])?, u, v));
        }
    }
    edges.sort_by(|x, y| y.0.total_cmp(&x.0));

    // Kruskal in descending weight order; when two components join, every
    // cross pair gets the joining weight as its merge height.
    let mut component: Vec<usize> = (0..atoms).collect();
    let mut members: Vec<Vec<usize>> = (0..atoms).map(|u| vec![u]).collect();
    let mut height = SquareMatrix::filled(atoms, f64::NAN);
    for (weight, u, v) in edges {
        let (cu, cv) = (component[u], component[v]);
        if cu == cv {
            continue;
        }
        let absorbed = std::mem::take(&mut members[cv]);
        for &x in &members[cu] {
            for &y in &absorbed {
                height[(x, y)] = weight;
                height[(y, x)] = weight;
            }
        }
        for &y in &absorbed {
            component[y] = cu;
        }
        members[cu].extend(absorbed);
    }

    let levels = SquareMatrix::from_fn(k, |a, b| {
        if a == b {
            height[(a * m, a * m + 1)]
        } else {
            height[(a * m, b * m)]
        }
    });
    BlockMergeMatrix::new(levels)
}

/// Clusters (as sorted block-index sets) at one level of a cluster tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterLevel {
    pub level: f64,
    pub clusters: Vec<Vec<usize>>,
}

/// Block-resolution cluster tree; entries sorted by descending level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub entries: Vec<ClusterLevel>,
}

impl ClusterTree {
    /// Replaces every cluster `C` of a tree over original blocks by the set
    /// of blocks whose image under `origin` lies in `C`.
    pub fn pull_back_blocks(&self, origin: &[usize]) -> ClusterTree {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let mut clusters: Vec<Vec<usize>> = e
                    .clusters
                    .iter()
                    .map(|c| (0..origin.len()).filter(|t| c.contains(&origin[*t])).collect())
                    .collect();
                clusters.sort();
                ClusterLevel {
                    level: e.level,
                    clusters,
                }
            })
            .collect();
        ClusterTree { entries }
    }

    /// True if every cluster at a level is contained in exactly one cluster
    /// at the next lower level, and clusters at each level are disjoint.
    pub fn is_hierarchical(&self) -> bool {
        let disjoint = self.entries.iter().all(|e| {
            let mut all: Vec<usize> = e.clusters.iter().flatten().copied().collect();
            let len = all.len();
            all.sort_unstable();
            all.dedup();
            all.len() == len
        });
        disjoint
            && self.entries.windows(2).all(|w| {
                w[0].clusters.iter().all(|c| {
                    w[1]
                        .clusters
                        .iter()
                        .filter(|d| c.iter().all(|x| d.contains(x)))
                        .count()
                        == 1
                })
            })
    }
}

/// Connected components of `{a : L[a][a] >= level}` joined by edges with
/// `L[a][b] >= level`, sorted.
pub(crate) fn level_components(k: usize, level: f64, get: impl Fn(usize, usize) -> f64) -> Vec<Vec<usize>> {
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if seen[start] || get(start, start) < level {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for b in 0..k {
                if !seen[b] && get(b, b) >= level && get(a, b) >= level {
                    seen[b] = true;
                    comp.push(b);
                    stack.push(b);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn cluster_tree_of(levels: &BlockMergeMatrix) -> ClusterTree {
    let k = levels.num_blocks();
    let entries = levels
        .distinct_levels()
        .into_iter()
        .map(|level| ClusterLevel {
            level,
            clusters: level_components(k, level, |a, b| levels.get(a, b)),
        })
        .collect();
    ClusterTree { entries }
}

pub fn mergeon_eval(levels: &BlockMergeMatrix, partition: &BlockPartition, x: f64, y: f64) -> Result<f64> {
    if partition.num_blocks() != levels.num_blocks() {
        return Err(Error::Dimension {
            expected: levels.num_blocks(),
            found: partition.num_blocks(),
        });
    }
    Ok(levels.get(partition.locate(x)?, partition.locate(y)?))
}

/// True merge heights between sample points, read off the mergeon.
pub fn merge_heights_at(levels: &BlockMergeMatrix, partition: &BlockPartition, points: &[f64]) -> Result<SquareMatrix<f64>> {
    let blocks = points
        .iter()
        .map(|&x| partition.locate(x))
        .collect::<Result<Vec<_>>>()?;
    if partition.num_blocks() != levels.num_blocks() {
        return Err(Error::Dimension {
            expected: levels.num_blocks(),
            found: partition.num_blocks(),
        });
    }
    Ok(SquareMatrix::from_fn(points.len(), |i, j| levels.get(blocks[i], blocks[j])))
}

/// A laminar family of clusters over sample indices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy {
    n: usize,
    clusters: Vec<Vec<usize>>,
}

impl Hierarchy {
    /// Clusters must be non-empty, in range and pairwise nested or disjoint.
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut clusters: Vec<Vec<usize>> = clusters
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        clusters.sort();
        clusters.dedup();
        for c in &clusters {
            if c.is_empty() || c.iter().any(|&x| x >= n) {
                return Err(Error::Invalid("clusters must be non-empty and within 0..n".into()));
            }
        }
        for (i, a) in clusters.iter().enumerate() {
            for b in &clusters[i + 1..] {
                let shared = a.iter().filter(|x| b.binary_search(x).is_ok()).count();
                if shared != 0 && shared != a.len() && shared != b.len() {
                    return Err(Error::Invalid("clusters must be nested or disjoint".into()));
                }
            }
        }
        Ok(Self { n, clusters })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    fn smallest_common(&self, i: usize, j: usize) -> Option<&Vec<usize>> {
        self.clusters
            .iter()
            .filter(|c| c.binary_search(&i).is_ok() && c.binary_search(&j).is_ok())
            .min_by_key(|c| c.len())
    }

    /// Merge height of `i` and `j` induced by `mvals`: the smallest value of
    /// `mvals` over distinct pairs inside the smallest cluster holding both.
    pub fn induced_merge_height(&self, mvals: &SquareMatrix<f64>, i: usize, j: usize) -> Result<f64> {
        if mvals.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: mvals.n(),
            });
        }
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Domain(format!("need distinct sample indices, got {i} and {j}")));
        }
        let c = self
            .smallest_common(i, j)
            .ok_or_else(|| Error::Invalid(format!("no cluster contains both {i} and {j}")))?;
        Ok(min_pair(c, mvals))
    }

    /// Induced merge heights for every pair at once; diagonal is NaN.
    pub fn induced_heights(&self, mvals: &SquareMatrix<f64>) -> Result<SquareMatrix<f64>> {
        if mvals.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: mvals.n(),
            });
        }
        let mut order: Vec<&Vec<usize>> = self.clusters.iter().filter(|c| c.len() > 1).collect();
        order.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let mut out = SquareMatrix::filled(self.n, f64::NAN);
        // Larger clusters first, so the smallest containing cluster writes last.
        for c in order {
            let h = min_pair(c, mvals);
            for &u in c {
                for &v in c {
                    if u != v {
                        out[(u, v)] = h;
                    }
                }
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && out[(i, j)].is_nan() {
                    return Err(Error::Invalid(format!("no cluster contains both {i} and {j}")));
                }
            }
        }
        Ok(out)
    }
}

fn min_pair(c: &[usize], mvals: &SquareMatrix<f64>) -> f64 {
    let mut h = f64::INFINITY;
    for (a, &u) in c.iter().enumerate() {
        for &v in &c[a + 1..] {
            h = h.min(mvals[(u, v)]).min(mvals[(v, u)]);
        }
    }
    h
}

/// Largest absolute off-diagonal difference.
pub fn merge_distortion(mvals: &SquareMatrix<f64>, mhat: &SquareMatrix<f64>) -> Result<f64> {
    if mvals.n() != mhat.n() {
        return Err(Error::Dimension {
            expected: mvals.n(),
            found: mhat.n(),
        });
    }
    if mvals.n() < 2 {
        return Err(Error::Invalid("merge distortion needs at least two samples".into()));
    }
    Ok(mvals.max_off_diagonal(mhat, |a, b| (a - b).abs()))
}
