//! Piecewise-constant graphons on `[0,1]`.
//!
//! Blocks are half-open intervals `[b_{i-1}, b_i)`, except the last block
//! which also contains `1`. Breakpoints are compared exactly, so callers that
//! need exact geometry (pullbacks, refinement) should use dyadic breakpoints
//! such as `0.25` or `0.375` which `f64` represents without rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

fn check_unit(x: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {x} is outside [0, 1]")))
    }
}

/// Ordered partition of `[0,1]` into intervals of positive length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BlockPartition {
    breakpoints: Vec<f64>,
}

impl BlockPartition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Invalid(
                "a block partition needs at least the breakpoints 0 and 1".into(),
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::Invalid(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid(format!(
                "breakpoints must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { breakpoints })
    }

    /// `k` blocks of length `1/k`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("a partition needs at least one block".into()));
        }
        let mut b: Vec<f64> = (0..k).map(|i| i as f64 / k as f64).collect();
        b.push(1.0);
        Self::new(b)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_blocks(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Endpoints `(lo, hi)` of block `i` (0-based).
    pub fn block(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn block_len(&self, i: usize) -> f64 {
        let (lo, hi) = self.block(i);
        hi - lo
    }

    /// 0-based index of the block containing `x`.
    pub fn locate(&self, x: f64) -> Result<usize> {
        check_unit(x, "x")?;
        let k = self.num_blocks();
        Ok(self.breakpoints[1..k].partition_point(|&b| b <= x))
    }

    /// Splits every block of length `L` into `max(1, ceil(L / (2 delta)))`
    /// equal pieces, so each piece has length in `[delta, 2 delta]`.
    pub fn refine(&self, delta: f64) -> Result<BlockPartition> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("delta must be positive, got {delta}")));
        }
        let mut out = vec![0.0];
        for i in 0..self.num_blocks() {
            let (lo, hi) = self.block(i);
            let len = hi - lo;
            if len < delta {
                return Err(Error::Infeasible(format!(
                    "block {i} has length {len} < delta = {delta}"
                )));
            }
            let pieces = ((len / (2.0 * delta)).ceil() as usize).max(1);
            for t in 1..pieces {
                out.push(lo + len * t as f64 / pieces as f64);
            }
            out.push(hi);
        }
        BlockPartition::new(out)
    }

    /// Number of sample points falling in each block.
    pub fn counts(&self, points: &[f64]) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.num_blocks()];
        for &x in points {
            counts[self.locate(x)?] += 1;
        }
        Ok(counts)
    }
}

impl TryFrom<Vec<f64>> for BlockPartition {
    type Error = Error;

    fn try_from(b: Vec<f64>) -> Result<Self> {
        Self::new(b)
    }
}

impl From<BlockPartition> for Vec<f64> {
    fn from(p: BlockPartition) -> Vec<f64> {
        p.breakpoints
    }
}

/// A graphon that is constant on each product of blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepGraphonRepr", into = "StepGraphonRepr")]
pub struct StepGraphon {
    partition: BlockPartition,
    values: SquareMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepGraphonRepr {
    breakpoints: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<StepGraphonRepr> for StepGraphon {
    type Error = Error;

    fn try_from(r: StepGraphonRepr) -> Result<Self> {
        StepGraphon::new(BlockPartition::new(r.breakpoints)?, SquareMatrix::from_rows(r.values)?)
    }
}

impl From<StepGraphon> for StepGraphonRepr {
    fn from(w: StepGraphon) -> Self {
        StepGraphonRepr {
            breakpoints: w.partition.breakpoints,
            values: w.values.to_rows(),
        }
    }
}

impl StepGraphon {
    pub fn new(partition: BlockPartition, values: SquareMatrix<f64>) -> Result<Self> {
        let k = partition.num_blocks();
        if values.n() != k {
            return Err(Error::Dimension {
                expected: k,
                found: values.n(),
            });
        }
        if let Some(v) = values.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Invalid(format!("graphon value {v} is outside [0, 1]")));
        }
        if !values.is_symmetric() {
            return Err(Error::Invalid("graphon values must be symmetric".into()));
        }
        Ok(Self { partition, values })
    }

    pub fn from_rows(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(BlockPartition::new(breakpoints)?, SquareMatrix::from_rows(values)?)
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        Self::from_rows(vec![0.0, 1.0], vec![vec![alpha]])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("step graphons always serialize")
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn values(&self) -> &SquareMatrix<f64> {
        &self.values
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    /// Value on the block pair `(a, b)`.
    #[inline]
    pub fn block_value(&self, a: usize, b: usize) -> f64 {
        self.values[(a, b)]
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(y, "y")?;
        let a = self.partition.locate(x)?;
        let b = self.partition.locate(y)?;
        Ok(self.values[(a, b)])
    }

    /// The relabeled graphon `(x, y) -> W(phi(x), phi(y))`.
    pub fn pullback(&self, phi: MeasurePreservingMap) -> StepGraphon {
        self.pullback_with_blocks(phi).0
    }

    /// Like [`pullback`](Self::pullback), also returning for every block of
    /// the result the block of `self` it maps onto.
    pub fn pullback_with_blocks(&self, phi: MeasurePreservingMap) -> (StepGraphon, Vec<usize>) {
        let k = self.num_blocks();
        match phi {
            MeasurePreservingMap::Identity => (self.clone(), (0..k).collect()),
            MeasurePreservingMap::StretchMod(m) => {
                let m = m as usize;
                let b = self.partition.breakpoints();
                let mut bp = Vec::with_capacity(m * k + 1);
                for copy in 0..m {
                    for &lo in &b[..k] {
                        bp.push((copy as f64 + lo) / m as f64);
                    }
                }
                bp.push(1.0);
                let origin: Vec<usize> = (0..m * k).map(|t| t % k).collect();
                let values =
                    SquareMatrix::from_fn(m * k, |s, t| self.values[(origin[s], origin[t])]);
                let partition = BlockPartition::new(bp)
                    .expect("stretched breakpoints of a valid partition are increasing");
                (StepGraphon { partition, values }, origin)
            }
        }
    }
}

/// Measure-preserving maps of `[0,1]` used to relabel graphons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurePreservingMap {
    Identity,
    /// `x -> (m x) mod 1`.
    StretchMod(u32),
}

impl MeasurePreservingMap {
    pub fn stretch_mod(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("stretch factor must be positive".into()));
        }
        Ok(MeasurePreservingMap::StretchMod(m))
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            MeasurePreservingMap::Identity => x,
            MeasurePreservingMap::StretchMod(m) => {
                let y = m as f64 * x;
                y - y.floor()
            }
        }
    }

    /// Preimage of `[lo, hi)` as a list of disjoint intervals.
    pub fn preimage(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        match *self {
            MeasurePreservingMap::Identity => vec![(lo, hi)],
            MeasurePreservingMap::StretchMod(m) => {
                let m = m as f64;
                (0..m as u32)
                    .map(|i| ((i as f64 + lo) / m, (i as f64 + hi) / m))
                    .collect()
            }
        }
    }

    pub fn preimage_len(&self, lo: f64, hi: f64) -> f64 {
        self.preimage(lo, hi).iter().map(|(a, b)| b - a).sum()
    }
}
