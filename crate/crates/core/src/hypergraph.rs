//! Hypergraphs, label assignments and the directed-edge index.
//!
//! Hyperedges are stored as sorted vertex lists, which makes duplicate-edge
//! detection a set-membership test and gives every `(vertex, edge)` incidence a
//! canonical position.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// First broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("edge {edge} is empty")]
    EmptyEdge { edge: usize },
    #[error("vertex {vertex} in edge {edge} is out of range (N = {n})")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("duplicate vertex {vertex} in edge {edge}")]
    DuplicateVertex { edge: usize, vertex: usize },
    #[error("duplicate hyperedge: edges {first} and {second} have the same vertex set")]
    DuplicateEdge { first: usize, second: usize },
    #[error("edge {edge} has {size} vertices, expected uniform k = {k}")]
    NonUniform { edge: usize, size: usize, k: usize },
}

/// Checks every hypergraph invariant on raw edge lists, returning the first violation.
///
/// Edges need not be sorted. `uniform_k`, when given, must match every edge size.
pub fn validate(
    num_vertices: usize,
    edges: &[Vec<usize>],
    uniform_k: Option<usize>,
) -> std::result::Result<(), Violation> {
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::with_capacity(edges.len());
    for (e, edge) in edges.iter().enumerate() {
        if edge.is_empty() {
            return Err(Violation::EmptyEdge { edge: e });
        }
        if let Some(k) = uniform_k {
            if edge.len() != k {
                return Err(Violation::NonUniform {
                    edge: e,
                    size: edge.len(),
                    k,
                });
            }
        }
        let mut sorted = edge.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Violation::DuplicateVertex {
                    edge: e,
                    vertex: w[0],
                });
            }
        }
        if let Some(&v) = sorted.iter().find(|&&v| v >= num_vertices) {
            return Err(Violation::VertexOutOfRange {
                edge: e,
                vertex: v,
                n: num_vertices,
            });
        }
        if let Some(&first) = seen.get(&sorted) {
            return Err(Violation::DuplicateEdge { first, second: e });
        }
        seen.insert(sorted, e);
    }
    Ok(())
}

/// An immutable hypergraph on vertices `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    uniform_k: Option<usize>,
    incidence: Vec<Vec<usize>>,
    index: DirectedEdgeIndex,
}

impl Hypergraph {
    /// Builds a hypergraph, inferring `uniform_k` when all edges share one size.
    pub fn new(num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let k = edges.first().map(Vec::len);
        let uniform = k.filter(|&k| edges.iter().all(|e| e.len() == k));
        Self::build(num_vertices, edges, uniform, None)
    }

    /// Builds a hypergraph whose edges must all have exactly `k` vertices.
    ///
    /// Unlike [`Hypergraph::new`], this records `k` even for an empty edge list.
    pub fn with_uniform_k(num_vertices: usize, edges: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        Self::build(num_vertices, edges, Some(k), Some(k))
    }

    fn build(
        num_vertices: usize,
        mut edges: Vec<Vec<usize>>,
        uniform_k: Option<usize>,
        enforce: Option<usize>,
    ) -> Result<Self> {
        validate(num_vertices, &edges, enforce)?;
        for e in &mut edges {
            e.sort_unstable();
        }
        let mut incidence = vec![Vec::new(); num_vertices];
        for (mu, e) in edges.iter().enumerate() {
            for &i in e {
                incidence[i].push(mu);
            }
        }
        let index = DirectedEdgeIndex::new(&edges);
        Ok(Self {
            num_vertices,
            edges,
            uniform_k,
            incidence,
            index,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn uniform_k(&self) -> Option<usize> {
        self.uniform_k
    }

    /// Sorted vertex list of every hyperedge.
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, mu: usize) -> &[usize] {
        &self.edges[mu]
    }

    /// Edges containing vertex `i`, in increasing edge id.
    pub fn edges_of(&self, i: usize) -> &[usize] {
        &self.incidence[i]
    }

    pub fn directed_edges(&self) -> &DirectedEdgeIndex {
        &self.index
    }

    /// Re-checks all invariants. Always `Ok` for a constructed value.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        validate(self.num_vertices, &self.edges, None)
    }

    /// Number of hyperedges containing each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        self.incidence.iter().map(Vec::len).collect()
    }

    /// Sum of edge sizes, the dimension of the non-backtracking operator.
    pub fn total_edge_size(&self) -> usize {
        self.index.len()
    }

    /// `A_ij` = number of hyperedges containing both `i` and `j`; zero diagonal.
    pub fn adjacency(&self) -> CsrMatrix {
        let cap: usize = self.edges.iter().map(|e| e.len() * (e.len() - 1)).sum();
        let mut triplets = Vec::with_capacity(cap);
        for e in &self.edges {
            for (a, &i) in e.iter().enumerate() {
                for &j in &e[a + 1..] {
                    triplets.push((i, j, 1.0));
                    triplets.push((j, i, 1.0));
                }
            }
        }
        CsrMatrix::from_triplets(self.num_vertices, triplets)
    }
}

/// Flat enumeration of the incidences `(i -> mu)` with `i` in edge `mu`.
///
/// Directed edges of hyperedge `mu` occupy the contiguous block
/// `offset(mu) .. offset(mu) + k_mu`, in the order of the sorted vertex list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedEdgeIndex {
    offsets: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl DirectedEdgeIndex {
    fn new(edges: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(edges.len() + 1);
        let mut pairs = Vec::new();
        offsets.push(0);
        for (mu, e) in edges.iter().enumerate() {
            pairs.extend(e.iter().map(|&i| (i, mu)));
            offsets.push(pairs.len());
        }
        Self { offsets, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(vertex, edge)` of a flat index.
    pub fn pair(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    pub fn offset(&self, mu: usize) -> usize {
        self.offsets[mu]
    }

    /// Flat index range of the directed edges of hyperedge `mu`.
    pub fn block(&self, mu: usize) -> std::ops::Range<usize> {
        self.offsets[mu]..self.offsets[mu + 1]
    }

    /// Flat index of `(i -> mu)`, or `None` if `i` is not in `mu`.
    pub fn index_of(&self, h: &Hypergraph, i: usize, mu: usize) -> Option<usize> {
        h.edge(mu)
            .binary_search(&i)
            .ok()
            .map(|p| self.offsets[mu] + p)
    }
}

/// Group label of every vertex, values in `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    labels: Vec<usize>,
    num_groups: usize,
}

impl LabelAssignment {
    pub fn new(labels: Vec<usize>, num_groups: usize) -> Result<Self> {
        if num_groups < 2 {
            return Err(Error::InvalidLabels(format!(
                "need q >= 2 groups, got {num_groups}"
            )));
        }
        if let Some((i, &a)) = labels.iter().enumerate().find(|(_, &a)| a >= num_groups) {
            return Err(Error::InvalidLabels(format!(
                "vertex {i} has label {a}, outside 0..{num_groups}"
            )));
        }
        Ok(Self { labels, num_groups })
    }

    /// All vertices in group 0.
    pub fn uniform(n: usize, num_groups: usize) -> Result<Self> {
        Self::new(vec![0; n], num_groups)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Number of vertices in each group.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &a in &self.labels {
            sizes[a] += 1;
        }
        sizes
    }
}

impl fmt::Display for LabelAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} labels over {} groups", self.labels.len(), self.num_groups)
    }
}
