//! Matrix-free operators: the hypergraph non-backtracking operator `B`, its
//! `2N x 2N` reduction `B'` and the sparse adjacency matrix.
//!
//! Index convention: `(B v)_{i->mu} = sum_{nu in di \ mu} sum_{j in dnu \ i} v_{j->nu}`.
//! The other common convention is the transpose, exposed as [`NbOperator::apply_transpose`];
//! both have the same spectrum.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::sparse::CsrMatrix;

/// A real square operator that can be applied to a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// Non-backtracking operator on the directed edges `(i -> mu)` of a hypergraph.
#[derive(Debug, Clone)]
pub struct NbOperator {
    num_vertices: usize,
    vertex_of: Vec<usize>,
    edge_of: Vec<usize>,
    offsets: Vec<usize>,
    /// Directed edges leaving each vertex, one per incident hyperedge.
    out_edges: Vec<Vec<usize>>,
}

impl NbOperator {
    pub fn new(h: &Hypergraph) -> Self {
        let idx = h.directed_edges();
        let dim = idx.len();
        let mut vertex_of = Vec::with_capacity(dim);
        let mut edge_of = Vec::with_capacity(dim);
        let mut out_edges = vec![Vec::new(); h.num_vertices()];
        for p in 0..dim {
            let (i, mu) = idx.pair(p);
            vertex_of.push(i);
            edge_of.push(mu);
            out_edges[i].push(p);
        }
        let offsets = (0..=h.num_edges())
            .map(|mu| if mu == h.num_edges() { dim } else { idx.offset(mu) })
            .collect();
        Self {
            num_vertices: h.num_vertices(),
            vertex_of,
            edge_of,
            offsets,
            out_edges,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// `(vertex, edge)` of directed edge `p`.
    pub fn pair(&self, p: usize) -> (usize, usize) {
        (self.vertex_of[p], self.edge_of[p])
    }

    fn block(&self, mu: usize) -> std::ops::Range<usize> {
        self.offsets[mu]..self.offsets[mu + 1]
    }

    fn edge_size(&self, mu: usize) -> usize {
        self.offsets[mu + 1] - self.offsets[mu]
    }

    /// Closed-form count `sum_i sum_{mu in di} sum_{nu in di \ mu} (k_nu - 1)`.
    pub fn nnz(&self) -> usize {
        self.out_edges
            .iter()
            .map(|out| {
                let total: usize = out.iter().map(|&p| self.edge_size(self.edge_of[p]) - 1).sum();
                // every mu pairs with all nu != mu
                out.iter()
                    .map(|&p| total - (self.edge_size(self.edge_of[p]) - 1))
                    .sum::<usize>()
            })
            .sum()
    }

    /// Column indices of the non-zero entries of row `p`.
    pub fn row(&self, p: usize) -> Vec<usize> {
        let (i, mu) = self.pair(p);
        let mut cols = Vec::new();
        for &q in &self.out_edges[i] {
            let nu = self.edge_of[q];
            if nu == mu {
                continue;
            }
            cols.extend(self.block(nu).filter(|&c| self.vertex_of[c] != i));
        }
        cols
    }

    /// `(s)_{i->nu} = sum_{j in dnu \ i} v_{j->nu}`
    fn edge_complements(&self, v: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; v.len()];
        for mu in 0..self.offsets.len() - 1 {
            let block = self.block(mu);
            let total: f64 = v[block.clone()].iter().sum();
            for p in block {
                s[p] = total - v[p];
            }
        }
        s
    }

    /// `u_i = sum_{mu in di} v_{i->mu}`, the outgoing sum per vertex.
    pub fn vertex_sums(&self, v: &[f64]) -> Vec<f64> {
        self.out_edges
            .iter()
            .map(|out| out.iter().map(|&p| v[p]).sum())
            .collect()
    }

    /// `sum_{nu in di} sum_{j in dnu \ i} v_{j->nu}`, the incoming sum per vertex.
    pub fn incoming_sums(&self, v: &[f64]) -> Vec<f64> {
        let s = self.edge_complements(v);
        self.vertex_sums(&s)
    }

    /// `y = B^T x`.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let rowsum = self.vertex_sums(x);
        let partial: Vec<f64> = (0..x.len())
            .map(|p| rowsum[self.vertex_of[p]] - x[p])
            .collect();
        for mu in 0..self.offsets.len() - 1 {
            let block = self.block(mu);
            let total: f64 = partial[block.clone()].iter().sum();
            for p in block {
                y[p] = total - partial[p];
            }
        }
    }
}

impl LinearOperator for NbOperator {
    fn dim(&self) -> usize {
        self.vertex_of.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let s = self.edge_complements(x);
        let w = self.vertex_sums(&s);
        for (p, out) in y.iter_mut().enumerate() {
            *out = w[self.vertex_of[p]] - s[p];
        }
    }
}

/// Builds the full non-backtracking operator.
pub fn build_nb(h: &Hypergraph) -> NbOperator {
    NbOperator::new(h)
}

/// `B' = [[0, D - I], [-(k-1) I, A - (k-2) I]]` acting on `(v_out, v_in)`.
#[derive(Debug, Clone)]
pub struct ReducedNbOperator {
    k: usize,
    degrees: Vec<f64>,
    adjacency: CsrMatrix,
}

impl ReducedNbOperator {
    pub fn new(h: &Hypergraph) -> Result<Self> {
        let k = h.uniform_k().ok_or(Error::NonUniform)?;
        Ok(Self {
            k,
            degrees: h.degrees().into_iter().map(|d| d as f64).collect(),
            adjacency: h.adjacency(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.degrees.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl LinearOperator for ReducedNbOperator {
    fn dim(&self) -> usize {
        2 * self.degrees.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.degrees.len();
        let (x_out, x_in) = x.split_at(n);
        let (y_out, y_in) = y.split_at_mut(n);
        for i in 0..n {
            y_out[i] = (self.degrees[i] - 1.0) * x_in[i];
        }
        self.adjacency.matvec(x_in, y_in);
        let (a, b) = (self.k as f64 - 2.0, self.k as f64 - 1.0);
        for i in 0..n {
            y_in[i] -= a * x_in[i] + b * x_out[i];
        }
    }
}

/// Builds `B'`; requires equal edge sizes.
pub fn build_nb_reduced(h: &Hypergraph) -> Result<ReducedNbOperator> {
    ReducedNbOperator::new(h)
}

/// `Tr(B^r (B^r)^T) / dim(B)`, i.e. the mean squared row norm of `B^r`.
pub fn trace_moment(op: &NbOperator, r: u32) -> f64 {
    let dim = op.dim();
    if dim == 0 {
        return 0.0;
    }
    let rows: Vec<Vec<usize>> = (0..dim).map(|p| op.row(p)).collect();
    let mut cur = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let mut touched: Vec<usize> = Vec::new();
    let mut next_touched: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for start in 0..dim {
        cur[start] = 1.0;
        touched.clear();
        touched.push(start);
        for _ in 0..r {
            for &p in &touched {
                let w = cur[p];
                for &c in &rows[p] {
                    if next[c] == 0.0 {
                        next_touched.push(c);
                    }
                    next[c] += w;
                }
                cur[p] = 0.0;
            }
            std::mem::swap(&mut cur, &mut next);
            std::mem::swap(&mut touched, &mut next_touched);
            next_touched.clear();
        }
        for &p in &touched {
            total += cur[p] * cur[p];
            cur[p] = 0.0;
        }
    }
    total / dim as f64
}
