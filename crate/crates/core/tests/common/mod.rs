//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use faer::{c64, Mat};
use hypernb::model::KernelTensor;
use hypernb::spectral::{build_nb_reduced, dense_spectrum, DEFAULT_DENSE_CAP};
use num_complex::Complex64;
use hypernb::{Hypergraph, LabelAssignment};
use proptest::prelude::*;

/// Random hypergraph with edge sizes in `sizes`; duplicate edges are dropped.
pub fn hypergraph(max_n: usize, max_m: usize, sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Hypergraph> {
    let lo = (*sizes.end()).max(3);
    (lo..=max_n).prop_flat_map(move |n| {
        let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), sizes.clone());
        proptest::collection::vec(edge, 0..=max_m).prop_map(move |mut edges| {
            edges.sort();
            edges.dedup();
            Hypergraph::new(n, edges).expect("subsequences are valid edges")
        })
    })
}

/// Same, with every edge of size `k`.
pub fn uniform_hypergraph(max_n: usize, max_m: usize, k: usize) -> impl Strategy<Value = Hypergraph> {
    hypergraph(max_n, max_m, k..=k)
}

/// Dense `H H^T - D` from an explicit incidence matrix.
pub fn adjacency_by_incidence(h: &Hypergraph) -> Vec<Vec<f64>> {
    let n = h.num_vertices();
    let m = h.num_edges();
    let mut inc = vec![vec![0.0; m]; n];
    for (mu, e) in h.edges().iter().enumerate() {
        for &i in e {
            inc[i][mu] = 1.0;
        }
    }
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = (0..m).map(|mu| inc[i][mu] * inc[j][mu]).sum();
        }
        a[i][i] -= h.degrees()[i] as f64;
    }
    a
}

/// Dense `B` built by enumerating `(i -> mu)` pairs with no index structure.
pub fn nb_matrix_by_enumeration(h: &Hypergraph) -> (Vec<(usize, usize)>, Vec<Vec<f64>>) {
    let mut pairs = Vec::new();
    for (mu, e) in h.edges().iter().enumerate() {
        for &i in e {
            pairs.push((i, mu));
        }
    }
    let d = pairs.len();
    let mut b = vec![vec![0.0; d]; d];
    for (r, &(i, mu)) in pairs.iter().enumerate() {
        for (c, &(j, nu)) in pairs.iter().enumerate() {
            if nu != mu && j != i && h.edge(nu).contains(&i) {
                b[r][c] = 1.0;
            }
        }
    }
    (pairs, b)
}

/// Overlap by enumerating every relabeling, without a confusion matrix.
pub fn brute_force_overlap(inferred: &[usize], planted: &[usize], q: usize, prior_max: f64) -> f64 {
    fn perms(q: usize) -> Vec<Vec<usize>> {
        if q == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in perms(q - 1) {
            for pos in 0..=p.len() {
                let mut next = p.clone();
                next.insert(pos, q - 1);
                out.push(next);
            }
        }
        out
    }
    let best = perms(q)
        .iter()
        .map(|pi| inferred.iter().zip(planted).filter(|(&a, &b)| pi[a] == b).count())
        .max()
        .unwrap();
    (best as f64 / planted.len() as f64 - prior_max) / (1.0 - prior_max)
}

/// `h_a` by summing the kernel over every ordered tail in `A^(k-1)`.
pub fn field_by_tuples(kernel: &KernelTensor, sums: &[f64], n: usize) -> Vec<f64> {
    let (k, q) = (kernel.k(), kernel.q());
    let tails = (q as u32).pow(k as u32 - 1) as usize;
    let fact: f64 = (1..k).map(|x| x as f64).product();
    (0..q)
        .map(|a| {
            let mut total = 0.0;
            for code in 0..tails {
                let mut key = vec![a];
                let mut c = code;
                let mut w = 1.0;
                for _ in 0..k - 1 {
                    key.push(c % q);
                    w *= sums[c % q] / n as f64;
                    c /= q;
                }
                total += kernel.rate(&key) * w;
            }
            total / fact
        })
        .collect()
}

pub fn labels(v: Vec<usize>, q: usize) -> LabelAssignment {
    LabelAssignment::new(v, q).unwrap()
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Smallest singular value of `B - z I`.
fn sigma_min(dense: &[Vec<f64>], z: Complex64) -> f64 {
    let d = dense.len();
    let m = Mat::<c64>::from_fn(d, d, |i, j| {
        let diag = if i == j { z } else { Complex64::new(0.0, 0.0) };
        c64::new(dense[i][j] - diag.re, -diag.im)
    });
    m.singular_values().unwrap().into_iter().fold(f64::INFINITY, f64::min)
}

/// Every eigenvalue of `B'` off the singular points is an eigenvalue of `B`.
///
/// Defective eigenvalues (the zero block) are only computable to about
/// `sqrt(eps)`, so a value farther than the tolerance from every computed
/// eigenvalue of `B` must make `B - z I` singular to the same tolerance.
pub fn containment_gap(h: &Hypergraph) -> f64 {
    let k = h.uniform_k().unwrap() as f64;
    let (_, dense) = nb_matrix_by_enumeration(h);
    let d = dense.len();
    let full: Vec<Complex64> = Mat::<f64>::from_fn(d, d, |i, j| dense[i][j])
        .eigenvalues()
        .unwrap();
    let reduced = dense_spectrum(&build_nb_reduced(h).unwrap(), DEFAULT_DENSE_CAP).unwrap();
    let mut worst: f64 = 0.0;
    for z in reduced {
        if (z - 1.0).norm() < 1e-6 || (z + (k - 1.0)).norm() < 1e-6 {
            continue;
        }
        let mut gap = full.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min) / z.norm().max(1.0);
        if gap >= 1e-8 {
            gap = gap.min(sigma_min(&dense, z));
        }
        worst = worst.max(gap);
    }
    worst
}
