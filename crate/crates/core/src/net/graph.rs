use std::collections::HashSet;

use crate::error::{Error, Result};

/// One undirected weighted edge, stored canonically with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A single weighted undirected snapshot over the shared node set.
///
/// Invariants: no self-loops, each unordered pair stored once with
/// `u < v`, and all stored weights strictly positive (a zero weight means
/// the edge is absent).
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotGraph {
    num_nodes: usize,
    index: usize,
    edges: Vec<Edge>,
}

impl SnapshotGraph {
    /// Builds a snapshot, canonicalizing edge orientation and enforcing
    /// the storage invariants. Zero-weight inputs are dropped as absent
    /// edges; duplicates (after canonicalization) are a hard error.
    pub fn new(num_nodes: usize, index: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            if a == b {
                return Err(Error::SelfLoop {
                    node: a,
                    snapshot: index,
                });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v >= num_nodes {
                return Err(Error::NodeOutOfRange {
                    node: v,
                    num_nodes,
                    snapshot: index,
                });
            }
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeWeight {
                    u,
                    v,
                    weight: w,
                    snapshot: index,
                });
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge { u, v, snapshot: index });
            }
            if w > 0.0 {
                canonical.push(Edge { u, v, w });
            }
        }
        canonical.sort_by_key(|e| (e.u, e.v));
        Ok(Self {
            num_nodes,
            index,
            edges: canonical,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Weighted degree of every node: `d(u) = sum_v A(u, v)`.
    pub fn degree_vector(&self) -> DegreeVector {
        let mut d = vec![0.0; self.num_nodes];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        DegreeVector(d)
    }

    /// Partition of the node set into maximal connected components;
    /// isolated nodes come out as singletons. Components are ordered by
    /// their smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut adjacency = vec![Vec::new(); self.num_nodes];
        for e in &self.edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        let mut component = vec![usize::MAX; self.num_nodes];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.num_nodes {
            if component[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![start];
            component[start] = id;
            stack.push(start);
            while let Some(node) = stack.pop() {
                for &next in &adjacency[node] {
                    if component[next] == usize::MAX {
                        component[next] = id;
                        members.push(next);
                        stack.push(next);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }
}

/// Weighted degrees of one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector(pub Vec<f64>);

impl DegreeVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_isolated(&self, node: usize) -> bool {
        self.0[node] == 0.0
    }

    /// Mean degree over all nodes, isolated ones included.
    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.0.iter().sum::<f64>() / self.0.len() as f64
        }
    }
}

/// An ordered sequence of snapshots over a fixed node set.
#[derive(Debug, Clone)]
pub struct TemporalNetwork {
    pub name: String,
    pub weighted: bool,
    pub ground_truth: Option<Vec<usize>>,
    num_nodes: usize,
    snapshots: Vec<SnapshotGraph>,
}

impl TemporalNetwork {
    /// Builds a temporal network. Datasets loaded from disk additionally
    /// require `M >= 2`; window aggregation may legitimately reduce a
    /// network to a single snapshot, so the constructor only rejects the
    /// empty case.
    pub fn new(
        name: impl Into<String>,
        weighted: bool,
        ground_truth: Option<Vec<usize>>,
        snapshots: Vec<SnapshotGraph>,
    ) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::Dataset("a temporal network needs at least one snapshot".into()));
        }
        let num_nodes = snapshots[0].num_nodes();
        if let Some(bad) = snapshots.iter().find(|s| s.num_nodes() != num_nodes) {
            return Err(Error::Dataset(format!(
                "snapshot {} has {} nodes, expected the shared node count {}",
                bad.index(),
                bad.num_nodes(),
                num_nodes
            )));
        }
        if let Some(gt) = &ground_truth {
            if gt.len() != snapshots.len() {
                return Err(Error::Dataset(format!(
                    "ground truth has {} labels for {} snapshots",
                    gt.len(),
                    snapshots.len()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            weighted,
            ground_truth,
            num_nodes,
            snapshots,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[SnapshotGraph] {
        &self.snapshots
    }

    pub fn snapshot(&self, index: usize) -> &SnapshotGraph {
        &self.snapshots[index]
    }

    /// Mean over snapshots of the mean weighted node degree.
    pub fn mean_degree(&self) -> f64 {
        self.snapshots
            .iter()
            .map(|s| s.degree_vector().mean())
            .sum::<f64>()
            / self.len() as f64
    }

    /// Sliding-window aggregation: output snapshot `j` is the union of
    /// input snapshots `[j*stride, j*stride + window)` with weights summed
    /// per edge. Output length is `floor((M - window) / stride) + 1`.
    pub fn aggregate_window(&self, window: usize, stride: usize) -> Result<TemporalNetwork> {
        if window < 1 || stride < 1 {
            return Err(Error::InvalidParameter(
                "window and stride must both be at least 1".into(),
            ));
        }
        if window > self.len() {
            return Err(Error::WindowTooLarge {
                window,
                len: self.len(),
            });
        }
        let out_len = (self.len() - window) / stride + 1;
        let mut aggregated = Vec::with_capacity(out_len);
        for j in 0..out_len {
            let mut weights = std::collections::BTreeMap::new();
            for s in &self.snapshots[j * stride..j * stride + window] {
                for e in s.edges() {
                    *weights.entry((e.u, e.v)).or_insert(0.0) += e.w;
                }
            }
            let edges: Vec<(usize, usize, f64)> =
                weights.into_iter().map(|((u, v), w)| (u, v, w)).collect();
            aggregated.push(SnapshotGraph::new(self.num_nodes, j, &edges)?);
        }
        TemporalNetwork::new(
            format!("{}-w{}s{}", self.name, window, stride),
            self.weighted,
            None,
            aggregated,
        )
    }
}
