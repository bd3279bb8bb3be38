//! Kernel estimation from a labelled hypergraph.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelAssignment};
use crate::model::{binomial, multisets, KernelTensor};

/// Composition counts of the hyperedges under a labelling, with calibrated rates.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    k: usize,
    q: usize,
    num_vertices: usize,
    num_edges: usize,
    group_sizes: Vec<usize>,
    counts: BTreeMap<Vec<usize>, usize>,
}

impl KernelEstimate {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Count for every sorted multiset, including zeros.
    pub fn counts(&self) -> &BTreeMap<Vec<usize>, usize> {
        &self.counts
    }

    pub fn count(&self, m: &[usize]) -> usize {
        let mut key = m.to_vec();
        key.sort_unstable();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// `count / M`; zero for an empty hypergraph.
    pub fn frequency(&self, m: &[usize]) -> f64 {
        if self.num_edges == 0 {
            0.0
        } else {
            self.count(m) as f64 / self.num_edges as f64
        }
    }

    /// `count * N^(k-1) / prod_a C(N_a, m_a)`; zero when no such vertex set exists.
    pub fn calibrated_rate(&self, m: &[usize]) -> f64 {
        let mut mult = vec![0usize; self.q];
        for &a in m {
            mult[a] += 1;
        }
        let possible: f64 = mult
            .iter()
            .zip(&self.group_sizes)
            .map(|(&c, &size)| binomial(size, c))
            .product();
        if possible == 0.0 {
            return 0.0;
        }
        self.count(m) as f64 * (self.num_vertices as f64).powi(self.k as i32 - 1) / possible
    }

    /// The calibrated rates as a kernel.
    pub fn to_kernel(&self) -> Result<KernelTensor> {
        let mut kernel = KernelTensor::new(self.k, self.q)?;
        for m in self.counts.keys() {
            kernel.set_rate(m, self.calibrated_rate(m))?;
        }
        Ok(kernel)
    }
}

impl fmt::Display for KernelEstimate {
    /// One row per multiset: labels, count, frequency, calibrated rate.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "composition\tcount\tfrequency\trate")?;
        for (m, &count) in &self.counts {
            let labels: Vec<String> = m.iter().map(|a| a.to_string()).collect();
            writeln!(
                f,
                "{}\t{}/{}\t{:.6}\t{:.6}",
                labels.join(" "),
                count,
                self.num_edges,
                self.frequency(m),
                self.calibrated_rate(m)
            )?;
        }
        Ok(())
    }
}

pub fn estimate_kernel(h: &Hypergraph, labels: &LabelAssignment) -> Result<KernelEstimate> {
    let k = h.uniform_k().ok_or(Error::NonUniform)?;
    if labels.len() != h.num_vertices() {
        return Err(Error::LengthMismatch(labels.len(), h.num_vertices()));
    }
    let q = labels.num_groups();
    let mut counts: BTreeMap<Vec<usize>, usize> = multisets(q, k).into_iter().map(|m| (m, 0)).collect();
    let mut key = vec![0; k];
    for e in h.edges() {
        for (slot, &i) in key.iter_mut().zip(e) {
            *slot = labels.get(i);
        }
        key.sort_unstable();
        *counts.get_mut(&key).expect("every multiset is present") += 1;
    }
    Ok(KernelEstimate {
        k,
        q,
        num_vertices: h.num_vertices(),
        num_edges: h.num_edges(),
        group_sizes: labels.group_sizes(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample, two_in_four_kernel, GroupPrior};

    #[test]
    fn planted_two_in_four_is_pure() {
        let (h, labels) = sample(&two_in_four_kernel(3.0).unwrap(), &GroupPrior::uniform(2), 3000, 4).unwrap();
        let est = estimate_kernel(&h, &labels).unwrap();
        assert_eq!(est.frequency(&[0, 0, 1, 1]), 1.0);
        assert_eq!(est.counts().values().sum::<usize>(), h.num_edges());
        assert_eq!(est.count(&[1, 0, 1, 0]), h.num_edges());
        for m in [[0, 0, 0, 0], [0, 0, 0, 1], [0, 1, 1, 1], [1, 1, 1, 1]] {
            assert_eq!(est.count(&m), 0);
        }
    }

    #[test]
    fn identical_labels_are_monochromatic() {
        let h = Hypergraph::new(6, vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 3, 5]]).unwrap();
        let labels = LabelAssignment::uniform(6, 2).unwrap();
        let est = estimate_kernel(&h, &labels).unwrap();
        assert_eq!(est.frequency(&[0, 0, 0]), 1.0);
        // C(6, 3) = 20 possible triples, rate = 3 * 36 / 20
        assert!((est.calibrated_rate(&[0, 0, 0]) - 5.4).abs() < 1e-12);
        assert_eq!(est.calibrated_rate(&[1, 1, 1]), 0.0);
        let kernel = est.to_kernel().unwrap();
        assert_eq!(kernel.rates().len(), 1);
        assert!(est.to_string().starts_with("composition\tcount"));
    }

    #[test]
    fn needs_uniform_edges() {
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2, 3]]).unwrap();
        let labels = LabelAssignment::uniform(4, 2).unwrap();
        assert!(matches!(estimate_kernel(&h, &labels), Err(Error::NonUniform)));
    }
}
