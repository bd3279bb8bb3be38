use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{multisets, GroupPrior, KernelTensor};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelAssignment};
use crate::rng::{substream, Stream};

/// `C(n, m)` as a float.
pub fn binomial(n: usize, m: usize) -> f64 {
    if m > n {
        return 0.0;
    }
    let m = m.min(n - m);
    (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Draws a planted instance with `n` vertices.
///
/// Labels are i.i.d. from `prior`. For each label multiset `m` the number of edges
/// is Poisson with mean `prod_a C(N_a, m_a) * c_m / N^(k-1)`; that many distinct
/// vertex sets of composition `m` are then drawn uniformly.
pub fn sample(
    kernel: &KernelTensor,
    prior: &GroupPrior,
    n: usize,
    seed: u64,
) -> Result<(Hypergraph, LabelAssignment)> {
    let (k, q) = (kernel.k(), kernel.q());
    if prior.q() != q {
        return Err(Error::InvalidParameter(format!(
            "kernel has q = {q}, prior has q = {}",
            prior.q()
        )));
    }
    if n < k {
        return Err(Error::InvalidParameter(format!(
            "need N >= k (N = {n}, k = {k})"
        )));
    }
    let scale = (n as f64).powi(k as i32 - 1);
    for (m, &rate) in kernel.rates() {
        let probability = rate / scale;
        if probability > 1.0 {
            return Err(Error::ProbabilityTooLarge {
                composition: m.clone(),
                probability,
                n,
            });
        }
    }

    let mut rng = substream(seed, Stream::Generation);
    let labels = draw_labels(prior, n, &mut rng);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (i, &a) in labels.iter().enumerate() {
        members[a].push(i);
    }

    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for m in multisets(q, k) {
        let rate = kernel.rate(&m);
        if rate == 0.0 {
            continue;
        }
        let mut counts = vec![0usize; q];
        for &a in &m {
            counts[a] += 1;
        }
        let possible: f64 = counts
            .iter()
            .enumerate()
            .map(|(a, &c)| binomial(members[a].len(), c))
            .product();
        let mean = possible * rate / scale;
        if mean <= 0.0 {
            continue;
        }
        let draw = Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?
            .sample(&mut rng);
        let target = (draw as usize).min(possible as usize);
        let mut added = 0;
        while added < target {
            let mut edge = Vec::with_capacity(k);
            for (a, &c) in counts.iter().enumerate() {
                if c > 0 {
                    let group = &members[a];
                    edge.extend(index::sample(&mut rng, group.len(), c).iter().map(|p| group[p]));
                }
            }
            edge.sort_unstable();
            if seen.insert(edge.clone()) {
                edges.push(edge);
                added += 1;
            }
        }
    }
    // edges were generated composition by composition
    edges.shuffle(&mut rng);

    let graph = Hypergraph::with_uniform_k(n, edges, k)?;
    Ok((graph, LabelAssignment::new(labels, q)?))
}

fn draw_labels(prior: &GroupPrior, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let probs = prior.probs();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (a, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return a;
                }
            }
            probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{hsbm_kernel, two_in_four_kernel};
    use super::*;

    #[test]
    fn zero_kernel_has_no_edges() {
        let kern = KernelTensor::new(3, 2).unwrap();
        let (h, labels) = sample(&kern, &GroupPrior::uniform(2), 100, 1).unwrap();
        assert_eq!(h.num_edges(), 0);
        assert_eq!(labels.len(), 100);
        assert_eq!(h.uniform_k(), Some(3));
    }

    #[test]
    fn two_in_four_edges_are_balanced() {
        let (h, labels) = sample(&two_in_four_kernel(3.0).unwrap(), &GroupPrior::uniform(2), 2000, 9).unwrap();
        assert!(h.num_edges() > 1000);
        for e in h.edges() {
            let ones: usize = e.iter().map(|&i| labels.get(i)).sum();
            assert_eq!(ones, 2);
        }
    }

    #[test]
    fn output_validates_and_is_deterministic() {
        let kern = hsbm_kernel(3, 3, 4.0, 0.2).unwrap();
        let prior = GroupPrior::uniform(3);
        let (a, la) = sample(&kern, &prior, 500, 42).unwrap();
        let (b, lb) = sample(&kern, &prior, 500, 42).unwrap();
        assert!(a.validate().is_ok());
        assert_eq!(a, b);
        assert_eq!(la, lb);
        let (c, _) = sample(&kern, &prior, 500, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_sizes() {
        let kern = two_in_four_kernel(3.0).unwrap();
        assert!(sample(&kern, &GroupPrior::uniform(2), 3, 0).is_err());
        // 48 / 4^3 < 1 but 16 * 30 / 5^3 > 1
        assert!(matches!(
            sample(&two_in_four_kernel(30.0).unwrap(), &GroupPrior::uniform(2), 5, 0),
            Err(Error::ProbabilityTooLarge { .. })
        ));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(7, 0), 1.0);
    }
}
