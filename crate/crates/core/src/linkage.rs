//! Single linkage on a similarity matrix.
//!
//! The merge estimate of `i` and `j` is the best bottleneck similarity over
//! all paths joining them. It equals the bottleneck of the unique path in a
//! maximum spanning tree, which is how it is computed here (dense Prim,
//! `O(n^2)`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_truth::Hierarchy;
use crate::matrix::SquareMatrix;

/// Max-min merge levels of a similarity matrix. The diagonal is fixed at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MergeMatrix {
    entries: SquareMatrix<f64>,
}

impl MergeMatrix {
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

    /// Distinct off-diagonal levels, descending.
    pub fn levels(&self) -> Vec<f64> {
        let n = self.n();
        let mut v: Vec<f64> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v.dedup();
        v
    }

    /// Every cluster at every level, plus the singletons.
    pub fn hierarchy(&self) -> Hierarchy {
        let n = self.n();
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for level in self.levels() {
            clusters.extend(
                clusters_at_level(self, level)
                    .into_iter()
                    .filter(|c| c.len() > 1),
            );
        }
        Hierarchy::new(n, clusters).expect("level sets of a merge matrix are nested")
    }
}

fn check_similarity(sim: &SquareMatrix<f64>) -> Result<()> {
    if sim.n() < 2 {
        return Err(Error::Invalid("single linkage needs at least two nodes".into()));
    }
    if sim.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("similarities must be finite".into()));
    }
    if !sim.is_symmetric() {
        return Err(Error::Invalid("similarity matrix must be symmetric".into()));
    }
    Ok(())
}

/// Maximum spanning tree by dense Prim from node 0. Ties go to the lowest
/// index. Returns `(parent, child, weight)` in insertion order.
fn max_spanning_tree(sim: &SquareMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let n = sim.n();
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::NEG_INFINITY; n];
    let mut parent = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for v in 1..n {
        key[v] = sim[(0, v)];
    }
    for _ in 1..n {
        let mut next = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (next == usize::MAX || key[v] > key[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push((parent[next], next, key[next]));
        for v in 0..n {
            if !in_tree[v] && sim[(next, v)] > key[v] {
                key[v] = sim[(next, v)];
                parent[v] = next;
            }
        }
    }
    edges
}

/// `M̂[i][j]` = max over paths from `i` to `j` of the smallest similarity on
/// the path.
pub fn merge_estimate(sim: &SquareMatrix<f64>) -> Result<MergeMatrix> {
    check_similarity(sim)?;
    let n = sim.n();
    let mut adjacent: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (u, v, w) in max_spanning_tree(sim) {
        adjacent[u].push((v, w));
        adjacent[v].push((u, w));
    }
    let mut entries = SquareMatrix::filled(n, 1.0);
    let mut stack = Vec::with_capacity(n);
    for source in 0..n {
        // walk the tree carrying the bottleneck from the source
        stack.push((source, usize::MAX, f64::INFINITY));
        while let Some((u, from, bottleneck)) = stack.pop() {
            if u != source {
                entries[(source, u)] = bottleneck;
            }
            for &(v, w) in &adjacent[u] {
                if v != from {
                    stack.push((v, u, bottleneck.min(w)));
                }
            }
        }
    }
    Ok(MergeMatrix { entries })
}

/// Connected components of `{i, j}` edges with `M[i][j] >= level`; every node
/// appears in exactly one cluster. Clusters are sorted and ordered by their
/// smallest member.
pub fn clusters_at_level(m: &MergeMatrix, level: f64) -> Vec<Vec<usize>> {
    let n = m.n();
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j) >= level {
                sets.union(i, j);
            }
        }
    }
    sets.groups()
}

#[derive(Clone, Debug)]
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the new root, or `None` if already joined.
    fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(ra)
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }
}

/// One agglomeration step. Node ids below `n` are leaves; merge `t` creates
/// node `n + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub level: f64,
}

/// Binary single-linkage tree with optional leaf labels.
#[derive(Clone, Debug)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
    labels: Option<Vec<String>>,
}

/// Nested form used for JSON export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Leaf {
        leaf: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Internal {
        left: Box<TreeNode>,
        right: Box<TreeNode>,
        level: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Newick,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "newick" => Ok(ExportFormat::Newick),
            other => Err(Error::Invalid(format!("unknown dendrogram format `{other}`"))),
        }
    }
}

/// Agglomerates along a maximum spanning tree of `m` in descending level
/// order. Equal levels are processed by smallest endpoint first, and the
/// cluster holding the smaller node index becomes the left child.
pub fn build_dendrogram(m: &MergeMatrix) -> Dendrogram {
    let n = m.n();
    let mut edges: Vec<(f64, usize, usize)> = max_spanning_tree(&m.entries)
        .into_iter()
        .map(|(u, v, w)| (w, u.min(v), u.max(v)))
        .collect();
    edges.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut sets = DisjointSet::new(n);
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut min_member: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for (level, u, v) in edges {
        let (ru, rv) = (sets.find(u), sets.find(v));
        let (lo, hi) = if min_member[ru] <= min_member[rv] { (ru, rv) } else { (rv, ru) };
        merges.push(Merge {
            left: node_of[lo],
            right: node_of[hi],
            level,
        });
        let root = sets.union(u, v).expect("spanning tree edges join distinct components");
        node_of[root] = n + merges.len() - 1;
        min_member[root] = min_member[lo];
    }
    Dendrogram {
        n,
        merges,
        labels: None,
    }
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    fn root(&self) -> Option<usize> {
        match self.n {
            0 => None,
            1 => Some(0),
            n => Some(n + self.merges.len() - 1),
        }
    }

    fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < self.n {
                out.push(x);
            } else {
                let m = self.merges[x - self.n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    /// Leaves in left-to-right display order.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.root().map(|r| self.leaves_under(r)).unwrap_or_default()
    }

    /// Clusters obtained by keeping only merges at level `>= level`.
    pub fn cut(&self, level: f64) -> Vec<Vec<usize>> {
        let mut sets = DisjointSet::new(self.n);
        // any leaf of each subtree stands in for it
        let mut rep: Vec<usize> = (0..self.n).collect();
        for m in &self.merges {
            let (a, b) = (rep[m.left], rep[m.right]);
            rep.push(a);
            if m.level >= level {
                sets.union(a, b);
            }
        }
        sets.groups()
    }

    /// Leaf sets of every subtree.
    pub fn hierarchy(&self) -> Hierarchy {
        let mut clusters: Vec<Vec<usize>> = (0..self.n).map(|i| vec![i]).collect();
        for t in 0..self.merges.len() {
            clusters.push(self.leaves_under(self.n + t));
        }
        Hierarchy::new(self.n, clusters).expect("subtrees of a binary tree are nested")
    }

    pub fn to_tree(&self) -> Option<TreeNode> {
        self.root().map(|r| self.subtree(r))
    }

    fn subtree(&self, node: usize) -> TreeNode {
        if node < self.n {
            TreeNode::Leaf {
                leaf: node,
                label: self.labels.as_ref().map(|l| l[node].clone()),
            }
        } else {
            let m = self.merges[node - self.n];
            TreeNode::Internal {
                left: Box::new(self.subtree(m.left)),
                right: Box::new(self.subtree(m.right)),
                level: m.level,
            }
        }
    }

    /// Rebuilds a dendrogram from its nested form. Leaves must be exactly
    /// `0..n`.
    pub fn from_tree(tree: &TreeNode) -> Result<Self> {
        let mut merges = Vec::new();
        let mut leaves = Vec::new();
        // first pass: collect leaves to learn n
        fn collect(t: &TreeNode, leaves: &mut Vec<(usize, Option<String>)>) {
            match t {
                TreeNode::Leaf { leaf, label } => leaves.push((*leaf, label.clone())),
                TreeNode::Internal { left, right, .. } => {
                    collect(left, leaves);
                    collect(right, leaves);
                }
            }
        }
        collect(tree, &mut leaves);
        let n = leaves.len();
        let mut seen = vec![false; n];
        for (leaf, _) in &leaves {
            if *leaf >= n || std::mem::replace(&mut seen[*leaf], true) {
                return Err(Error::Invalid("dendrogram leaves must be exactly 0..n".into()));
            }
        }
        fn build(t: &TreeNode, n: usize, merges: &mut Vec<Merge>) -> usize {
            match t {
                TreeNode::Leaf { leaf, .. } => *leaf,
                TreeNode::Internal { left, right, level } => {
                    let l = build(left, n, merges);
                    let r = build(right, n, merges);
                    merges.push(Merge {
                        left: l,
                        right: r,
                        level: *level,
                    });
                    n + merges.len() - 1
                }
            }
        }
        build(tree, n, &mut merges);
        let labels = if leaves.iter().all(|(_, l)| l.is_some()) && n > 0 {
            let mut l = vec![String::new(); n];
            for (leaf, label) in leaves {
                l[leaf] = label.unwrap();
            }
            Some(l)
        } else {
            None
        };
        Ok(Dendrogram { n, merges, labels })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_tree()).expect("dendrograms always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let tree: Option<TreeNode> = Deserialize::deserialize(&mut de)?;
        de.end()?;
        match tree {
            Some(t) => Self::from_tree(&t),
            None => Ok(Dendrogram {
                n: 0,
                merges: Vec::new(),
                labels: None,
            }),
        }
    }

    /// Newick text; each branch carries the level of the merge it joins.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        if let Some(r) = self.root() {
            self.write_newick(r, None, &mut out);
        }
        out.push(';');
        out
    }

    fn write_newick(&self, node: usize, parent_level: Option<f64>, out: &mut String) {
        if node < self.n {
            match &self.labels {
                Some(l) => out.push_str(&newick_name(&l[node])),
                None => out.push_str(&node.to_string()),
            }
        } else {
            let m = self.merges[node - self.n];
            out.push('(');
            self.write_newick(m.left, Some(m.level), out);
            out.push(',');
            self.write_newick(m.right, Some(m.level), out);
            out.push(')');
        }
        if let Some(level) = parent_level {
            out.push(':');
            out.push_str(&level.to_string());
        }
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => self.to_json(),
            ExportFormat::Newick => self.to_newick(),
        }
    }
}

impl PartialEq for Dendrogram {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.labels == other.labels && self.to_tree() == other.to_tree()
    }
}

fn newick_name(label: &str) -> String {
    let plain = !label.is_empty()
        && label
            .chars()
            .all(|c| !c.is_whitespace() && !"()[]':;,".contains(c));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> SquareMatrix<f64> {
        SquareMatrix::from_rows(vec![
            vec![1.0, 0.9, 0.1],
            vec![0.9, 1.0, 0.8],
            vec![0.1, 0.8, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn two_nodes() {
        let s = SquareMatrix::from_rows(vec![vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        let m = merge_estimate(&s).unwrap();
        assert_eq!(m.get(0, 1), 0.3);
        assert_eq!(m.get(0, 0), 1.0);
        let d = build_dendrogram(&m);
        assert_eq!(d.merges(), &[Merge { left: 0, right: 1, level: 0.3 }]);
        assert_eq!(d.to_newick(), "(0:0.3,1:0.3);");
    }

    #[test]
    fn chain_example() {
        let m = merge_estimate(&chain()).unwrap();
        assert_eq!(m.get(0, 2), 0.8);
        assert_eq!(m.get(0, 1), 0.9);
        let d = build_dendrogram(&m);
        assert_eq!(d.merges()[0], Merge { left: 0, right: 1, level: 0.9 });
        assert_eq!(d.merges()[1], Merge { left: 3, right: 2, level: 0.8 });
        assert_eq!(clusters_at_level(&m, 0.85), vec![vec![0, 1], vec![2]]);
        assert_eq!(d.cut(0.85), vec![vec![0, 1], vec![2]]);
        assert_eq!(d.to_newick(), "((0:0.9,1:0.9):0.8,2:0.8);");
        assert_eq!(
            d.to_json(),
            r#"{"left":{"left":{"leaf":0},"right":{"leaf":1},"level":0.9},"right":{"leaf":2},"level":0.8}"#
        );
        assert_eq!(d.leaf_order(), vec![0, 1, 2]);
    }

    #[test]
    fn equal_levels_lean_left() {
        let m = merge_estimate(&SquareMatrix::filled(4, 0.5)).unwrap();
        let d = build_dendrogram(&m);
        let expect = [(0, 1), (4, 2), (5, 3)];
        for (merge, (l, r)) in d.merges().iter().zip(expect) {
            assert_eq!((merge.left, merge.right, merge.level), (l, r, 0.5));
        }
    }

    #[test]
    fn level_extremes() {
        let m = merge_estimate(&chain()).unwrap();
        assert_eq!(clusters_at_level(&m, 0.0), vec![vec![0, 1, 2]]);
        assert_eq!(clusters_at_level(&m, 0.95), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(clusters_at_level(&m, 2.0), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn rejects_bad_similarities() {
        let asym = SquareMatrix::from_rows(vec![vec![0.0, 0.3], vec![0.2, 0.0]]).unwrap();
        assert!(merge_estimate(&asym).is_err());
        assert!(merge_estimate(&SquareMatrix::filled(1, 0.0)).is_err());
        assert!(merge_estimate(&SquareMatrix::filled(3, f64::NAN)).is_err());
    }

    #[test]
    fn json_round_trip_with_labels() {
        let d = build_dendrogram(&merge_estimate(&chain()).unwrap())
            .with_labels(vec!["a b".into(), "c".into(), "it's".into()])
            .unwrap();
        let text = d.to_json();
        let back = Dendrogram::from_json(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), text);
        assert_eq!(d.to_newick(), "(('a b':0.9,c:0.9):0.8,'it''s':0.8);");
    }

    #[test]
    fn deep_chain_round_trips() {
        let n = 400;
        let s = SquareMatrix::from_fn(n, |i, j| 1.0 / (1.0 + i.max(j) as f64));
        let d = build_dendrogram(&merge_estimate(&s).unwrap());
        assert_eq!(Dendrogram::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn malformed_tree_rejected() {
        assert!(Dendrogram::from_json(r#"{"left":{"leaf":0},"right":{"leaf":0},"level":0.5}"#).is_err());
        assert!(Dendrogram::from_json(r#"{"left":{"leaf":0},"right":{"leaf":2},"level":0.5}"#).is_err());
    }
}
