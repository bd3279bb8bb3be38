//! Kernel-tensor generative model.
//!
//! A [`KernelTensor`] maps every sorted label multiset of size `k` to a rescaled
//! rate `c_m`; a hyperedge whose vertices carry labels `m` is present with
//! probability `c_m / N^(k-1)`. Keys are sorted multisets, so permutation symmetry
//! holds by construction and missing keys mean rate zero.

mod predict;
mod sample;

pub use predict::{
    detectability, group_degree, hsbm_critical_eps_tilde, pair_degree, shortcut,
    transition_matrix, two_in_four_critical_degree, GroupDegrees, ModelPredictions,
    TransitionMatrix,
};
pub(crate) use predict::bisect_unit_crossing;
pub use sample::{binomial, sample};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTensor {
    k: usize,
    q: usize,
    rates: BTreeMap<Vec<usize>, f64>,
}

impl KernelTensor {
    /// All-zero kernel on `k`-multisets of `q` labels.
    pub fn new(k: usize, q: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("edge size k must be >= 1".into()));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!("need q >= 2, got {q}")));
        }
        Ok(Self {
            k,
            q,
            rates: BTreeMap::new(),
        })
    }

    /// Sets the rate of the multiset formed by `labels` (any order).
    pub fn set_rate(&mut self, labels: &[usize], rate: f64) -> Result<()> {
        if labels.len() != self.k {
            return Err(Error::InvalidParameter(format!(
                "multiset {labels:?} has size {}, kernel has k = {}",
                labels.len(),
                self.k
            )));
        }
        if let Some(&a) = labels.iter().find(|&&a| a >= self.q) {
            return Err(Error::InvalidParameter(format!(
                "label {a} outside 0..{}",
                self.q
            )));
        }
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rate must be finite and non-negative, got {rate}"
            )));
        }
        let mut key = labels.to_vec();
        key.sort_unstable();
        if rate == 0.0 {
            self.rates.remove(&key);
        } else {
            self.rates.insert(key, rate);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Rate of the multiset formed by `labels`, zero if absent.
    pub fn rate(&self, labels: &[usize]) -> f64 {
        let mut key = labels.to_vec();
        key.sort_unstable();
        self.rates.get(&key).copied().unwrap_or(0.0)
    }

    /// Non-zero rates keyed by sorted multiset.
    pub fn rates(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.rates
    }

    pub fn is_zero(&self) -> bool {
        self.rates.is_empty()
    }

    /// Rate of every ordered tuple in `A^k`, indexed base `q` with the first label
    /// most significant.
    pub fn dense_table(&self) -> Vec<f64> {
        let mut table = vec![0.0; self.q.pow(self.k as u32)];
        for (idx, slot) in table.iter_mut().enumerate() {
            *slot = self.rate(&decode_tuple(idx, self.q, self.k));
        }
        table
    }
}

/// For each first label `a`, the ordered tails `b` in `A^(k-1)` with a non-zero
/// rate `c_{a,b}`.
pub fn dense_tuples(kernel: &KernelTensor) -> Vec<Vec<(Vec<usize>, f64)>> {
    let (k, q) = (kernel.k(), kernel.q());
    let mut key = vec![0; k];
    (0..q)
        .map(|a| {
            (0..q.pow(k as u32 - 1))
                .filter_map(|idx| {
                    let b = decode_tuple(idx, q, k - 1);
                    key[0] = a;
                    key[1..].copy_from_slice(&b);
                    let r = kernel.rate(&key);
                    (r > 0.0).then_some((b, r))
                })
                .collect()
        })
        .collect()
}

/// All sorted multisets of size `k` over `0..q`, in lexicographic order.
pub fn multisets(q: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(q: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..q {
            cur.push(a);
            rec(q, k, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(q, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

pub(crate) fn decode_tuple(mut idx: usize, q: usize, len: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = idx % q;
        idx /= q;
    }
    t
}

/// Probability of each group; non-negative and summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPrior {
    n: Vec<f64>,
}

impl GroupPrior {
    pub fn new(n: Vec<f64>) -> Result<Self> {
        if n.len() < 2 {
            return Err(Error::InvalidParameter("prior needs q >= 2 entries".into()));
        }
        if n.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative prior entry in {n:?}")));
        }
        let total: f64 = n.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "prior sums to {total}, expected 1"
            )));
        }
        Ok(Self { n })
    }

    pub fn uniform(q: usize) -> Self {
        Self {
            n: vec![1.0 / q as f64; q],
        }
    }

    pub fn q(&self) -> usize {
        self.n.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.n
    }

    pub fn max(&self) -> f64 {
        self.n.iter().copied().fold(0.0, f64::max)
    }
}

/// Hypergraph stochastic block model rates solved from the target mean degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsbmRates {
    pub c_in: f64,
    pub c_out: f64,
}

/// Rates of the HSBM with uniform prior: `c_in` on monochromatic multisets,
/// `c_out = eps_tilde * c_in` elsewhere, `c_in` fixed so every group has mean degree `c`.
pub fn hsbm_rates(k: usize, q: usize, c: f64, eps_tilde: f64) -> Result<HsbmRates> {
    if k < 2 || q < 2 {
        return Err(Error::InvalidParameter(format!(
            "HSBM needs k >= 2 and q >= 2 (got k = {k}, q = {q})"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("need c > 0, got {c}")));
    }
    if !(0.0..=1.0).contains(&eps_tilde) {
        return Err(Error::InvalidParameter(format!(
            "eps_tilde must lie in [0, 1], got {eps_tilde}"
        )));
    }
    // group degree is linear in c_in: evaluate it on the unit-scale kernel
    let unit = hsbm_with_rates(k, q, 1.0, eps_tilde)?;
    let per_unit = group_degree(&unit, &GroupPrior::uniform(q)).mean;
    let c_in = c / per_unit;
    Ok(HsbmRates {
        c_in,
        c_out: eps_tilde * c_in,
    })
}

fn hsbm_with_rates(k: usize, q: usize, c_in: f64, eps_tilde: f64) -> Result<KernelTensor> {
    let mut kernel = KernelTensor::new(k, q)?;
    for m in multisets(q, k) {
        let mono = m.iter().all(|&a| a == m[0]);
        kernel.set_rate(&m, if mono { c_in } else { eps_tilde * c_in })?;
    }
    Ok(kernel)
}

/// HSBM kernel with mean degree `c` and `eps_tilde = c_out / c_in`.
pub fn hsbm_kernel(k: usize, q: usize, c: f64, eps_tilde: f64) -> Result<KernelTensor> {
    let rates = hsbm_rates(k, q, c, eps_tilde)?;
    hsbm_with_rates(k, q, rates.c_in, eps_tilde)
}

/// Planted 2-in-4-SAT: `k = 4`, `q = 2`, rate `16 c` on `{0,0,1,1}` only.
pub fn two_in_four_kernel(c: f64) -> Result<KernelTensor> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("need c > 0, got {c}")));
    }
    let mut kernel = KernelTensor::new(4, 2)?;
    kernel.set_rate(&[0, 0, 1, 1], 16.0 * c)?;
    Ok(kernel)
}

/// Built-in model families, as named in sweep specifications and on the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Hsbm {
        k: usize,
        q: usize,
        c: f64,
        eps_tilde: f64,
    },
    TwoInFour {
        c: f64,
    },
}

impl ModelKind {
    pub fn kernel(&self) -> Result<KernelTensor> {
        match *self {
            ModelKind::Hsbm { k, q, c, eps_tilde } => hsbm_kernel(k, q, c, eps_tilde),
            ModelKind::TwoInFour { c } => two_in_four_kernel(c),
        }
    }

    pub fn q(&self) -> usize {
        match *self {
            ModelKind::Hsbm { q, .. } => q,
            ModelKind::TwoInFour { .. } => 2,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            ModelKind::Hsbm { k, .. } => k,
            ModelKind::TwoInFour { .. } => 4,
        }
    }

    /// Both built-in families use an equiprobable prior.
    pub fn prior(&self) -> GroupPrior {
        GroupPrior::uniform(self.q())
    }
}
