//! Per-vertex coordinates from informative eigenvectors.

use super::krylov::{OperatorSource, SpectralResult};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Eigenvalues whose relative gap is below this are treated as one subspace.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// `N x d` matrix of vertex coordinates, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    num_vertices: usize,
    columns: Vec<Vec<f64>>,
}

impl Embedding {
    /// Columns are used as given.
    pub fn from_columns(num_vertices: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        for c in &columns {
            if c.len() != num_vertices {
                return Err(Error::LengthMismatch(c.len(), num_vertices));
            }
        }
        Ok(Self { num_vertices, columns })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Every non-zero row scaled to unit length; zero rows stay at the origin.
    pub fn row_normalized(&self) -> Self {
        let mut columns = self.columns.clone();
        for i in 0..self.num_vertices {
            let norm: f64 = columns.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt();
            if norm > 0.0 {
                columns.iter_mut().for_each(|c| c[i] /= norm);
            }
        }
        Self { num_vertices: self.num_vertices, columns }
    }
}

/// Projects eigenvectors of `B` (or `B'`) to vertices.
///
/// `informative` indexes into `result.pairs`. For a non-real value, the real and
/// imaginary parts give two coordinates; its conjugate contributes nothing new.
/// Near-degenerate values are orthonormalised together, then every column is
/// scaled to unit norm with its first non-zero entry positive.
pub fn embed(result: &SpectralResult, h: &Hypergraph, informative: &[usize]) -> Result<Embedding> {
    let n = h.num_vertices();
    if informative.is_empty() {
        return Err(Error::InsufficientPairs { needed: 1, found: 0 });
    }
    let project = |v: &[f64]| -> Result<Vec<f64>> {
        match result.source {
            OperatorSource::Reduced => {
                if v.len() != 2 * n {
                    return Err(Error::LengthMismatch(v.len(), 2 * n));
                }
                Ok(v[..n].to_vec())
            }
            OperatorSource::Full => {
                let idx = h.directed_edges();
                if v.len() != idx.len() {
                    return Err(Error::LengthMismatch(v.len(), idx.len()));
                }
                let mut u = vec![0.0; n];
                for (p, &x) in v.iter().enumerate() {
                    u[idx.pair(p).0] += x;
                }
                Ok(u)
            }
            _ => {
                if v.len() != n {
                    return Err(Error::LengthMismatch(v.len(), n));
                }
                Ok(v.to_vec())
            }
        }
    };

    // group by near-equal eigenvalue
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in informative {
        let pair = result
            .pairs
            .get(idx)
            .ok_or(Error::InsufficientPairs { needed: idx + 1, found: result.pairs.len() })?;
        if pair.value.im < 0.0 && informative.iter().any(|&o| result.pairs[o].value == pair.value.conj()) {
            continue;
        }
        let joined = groups.last_mut().filter(|g| {
            let last = result.pairs[*g.last().unwrap()].value;
            (last - pair.value).norm() <= DEGENERACY_GAP * last.norm().max(pair.value.norm())
        });
        match joined {
            Some(g) => g.push(idx),
            None => groups.push(vec![idx]),
        }
    }

    let mut columns = Vec::new();
    for g in groups {
        let mut block: Vec<Vec<f64>> = Vec::new();
        for &idx in &g {
            let pair = &result.pairs[idx];
            block.push(project(&pair.re)?);
            if !pair.is_real() {
                block.push(project(&pair.im)?);
            }
        }
        if block.len() > 1 {
            block = orthonormalize(block);
        }
        columns.extend(block);
    }
    for c in columns.iter_mut() {
        normalize_column(c);
    }
    Embedding::from_columns(n, columns)
}

fn orthonormalize(cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    for mut c in cols {
        let before: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in &out {
                let d: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                c.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let after: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if after > 1e-10 * before {
            c.iter_mut().for_each(|x| *x /= after);
            out.push(c);
        }
    }
    out
}

fn normalize_column(c: &mut [f64]) {
    let norm: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let first = c.iter().copied().find(|&x| x.abs() > 1e-12 * norm).unwrap_or(1.0);
    let s = if first < 0.0 { -1.0 / norm } else { 1.0 / norm };
    c.iter_mut().for_each(|x| *x *= s);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::krylov::EigenPair;
    use num_complex::Complex64;

    fn result(source: OperatorSource, vecs: Vec<(f64, Vec<f64>)>) -> SpectralResult {
        SpectralResult {
            pairs: vecs
                .into_iter()
                .map(|(v, re)| EigenPair {
                    value: Complex64::new(v, 0.0),
                    residual: 0.0,
                    re,
                    im: Vec::new(),
                })
                .collect(),
            source,
            bulk_radius_estimate: 1.0,
            restarts: 0,
            matvecs: 0,
        }
    }

    #[test]
    fn constant_vector_gives_degrees() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let r = result(OperatorSource::Full, vec![(2.0, vec![1.0; 6])]);
        let e = embed(&r, &h, &[0]).unwrap();
        let d = [1.0, 1.0, 2.0, 1.0, 1.0];
        let norm = d.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        for i in 0..5 {
            assert!((e.column(0)[i] - d[i] / norm).abs() < 1e-15);
        }
    }

    #[test]
    fn single_vertex_spike() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let idx = h.directed_edges();
        let mut v = vec![0.0; 6];
        for p in 0..6 {
            if idx.pair(p).0 == 2 {
                v[p] = -0.5;
            }
        }
        let e = embed(&result(OperatorSource::Full, vec![(1.0, v)]), &h, &[0]).unwrap();
        assert_eq!(e.column(0), &[0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn reduced_uses_out_block_and_fixes_sign() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let r = result(OperatorSource::Reduced, vec![(1.0, vec![-3.0, 4.0, 9.0, 9.0])]);
        let e = embed(&r, &h, &[0]).unwrap();
        assert!((e.column(0)[0] - 0.6).abs() < 1e-15 && (e.column(0)[1] + 0.8).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pair_is_orthonormalised() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let r = result(
            OperatorSource::Adjacency,
            vec![(3.0, vec![1.0, 1.0, 0.0]), (3.0, vec![1.0, 0.0, 1.0])],
        );
        let e = embed(&r, &h, &[0, 1]).unwrap();
        let dot: f64 = e.column(0).iter().zip(e.column(1)).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-14);
        assert!(embed(&r, &h, &[]).is_err());
    }

    #[test]
    fn row_normalisation_keeps_direction() {
        let e = Embedding::from_columns(3, vec![vec![3.0, 0.0, -0.5], vec![4.0, 0.0, 0.0]]).unwrap();
        let r = e.row_normalized();
        assert_eq!(r.point(0), vec![0.6, 0.8]);
        assert_eq!(r.point(1), vec![0.0, 0.0]);
        assert_eq!(r.point(2), vec![-1.0, 0.0]);
    }
}
