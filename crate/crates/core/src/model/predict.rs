//! Closed-form predictions of the planted model: degrees, the group transition
//! matrix and the detectability threshold.

use faer::Mat;
use num_complex::Complex64;

use super::{decode_tuple, hsbm_kernel, two_in_four_kernel, GroupPrior, KernelTensor};
use crate::error::{Error, Result};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Sum over `A^len` of `f(tuple) * prod_l n[tuple_l]`.
fn expect_over_tuples(q: usize, len: usize, prior: &[f64], mut f: impl FnMut(&[usize]) -> f64) -> f64 {
    let mut total = 0.0;
    for idx in 0..q.pow(len as u32) {
        let t = decode_tuple(idx, q, len);
        let w: f64 = t.iter().map(|&b| prior[b]).product();
        if w != 0.0 {
            total += w * f(&t);
        }
    }
    total
}

/// Expected degree per group and overall.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDegrees {
    pub per_group: Vec<f64>,
    pub mean: f64,
    /// `true` when every `c_a` equals the mean (relative tolerance 1e-12).
    pub label_independent: bool,
}

fn check_prior(kernel: &KernelTensor, prior: &GroupPrior) -> Result<()> {
    if kernel.q() != prior.q() {
        return Err(Error::InvalidParameter(format!(
            "kernel has q = {}, prior has q = {}",
            kernel.q(),
            prior.q()
        )));
    }
    Ok(())
}

/// `c_a = 1/(k-1)! * sum_{b in A^(k-1)} c_{a,b} prod_l n_{b_l}` and `c = sum_a n_a c_a`.
pub fn group_degree(kernel: &KernelTensor, prior: &GroupPrior) -> GroupDegrees {
    assert_eq!(kernel.q(), prior.q(), "kernel and prior disagree on q");
    let (k, q) = (kernel.k(), kernel.q());
    let n = prior.probs();
    let norm = factorial(k - 1);
    let mut key = vec![0; k];
    let per_group: Vec<f64> = (0..q)
        .map(|a| {
            expect_over_tuples(q, k - 1, n, |b| {
                key[0] = a;
                key[1..].copy_from_slice(b);
                kernel.rate(&key)
            }) / norm
        })
        .collect();
    let mean: f64 = per_group.iter().zip(n).map(|(c, p)| c * p).sum();
    let label_independent = per_group
        .iter()
        .all(|&c| (c - mean).abs() <= 1e-12 * mean.abs().max(1e-300));
    GroupDegrees {
        per_group,
        mean,
        label_independent,
    }
}

/// `c_ab = 1/(k-2)! * sum_{s in A^(k-2)} c_{a,b,s} prod_l n_{s_l}`, a symmetric `q x q` matrix.
pub fn pair_degree(kernel: &KernelTensor, prior: &GroupPrior) -> Result<Vec<Vec<f64>>> {
    check_prior(kernel, prior)?;
    let (k, q) = (kernel.k(), kernel.q());
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "pair degree needs k >= 2, got {k}"
        )));
    }
    let n = prior.probs();
    let norm = factorial(k - 2);
    let mut key = vec![0; k];
    let mut out = vec![vec![0.0; q]; q];
    for a in 0..q {
        for b in a..q {
            let v = expect_over_tuples(q, k - 2, n, |s| {
                key[0] = a;
                key[1] = b;
                key[2..].copy_from_slice(s);
                kernel.rate(&key)
            }) / norm;
            out[a][b] = v;
            out[b][a] = v;
        }
    }
    Ok(out)
}

/// `T_ab = n_a [c_ab / (c (k-1)) - 1]` with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub matrix: Vec<Vec<f64>>,
    /// All `q` eigenvalues, decreasing magnitude (ties: larger real part first).
    pub eigenvalues: Vec<Complex64>,
}

pub(crate) fn sort_by_magnitude(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
}

pub fn transition_matrix(kernel: &KernelTensor, prior: &GroupPrior) -> Result<TransitionMatrix> {
    let c_ab = pair_degree(kernel, prior)?;
    let c = group_degree(kernel, prior).mean;
    if c <= 0.0 {
        return Err(Error::ZeroDegree);
    }
    let (k, q) = (kernel.k(), kernel.q());
    let n = prior.probs();
    let scale = c * (k as f64 - 1.0);
    let matrix: Vec<Vec<f64>> = (0..q)
        .map(|a| (0..q).map(|b| n[a] * (c_ab[a][b] / scale - 1.0)).collect())
        .collect();
    let mut eigenvalues = small_eigenvalues(&matrix)?;
    sort_by_magnitude(&mut eigenvalues);
    Ok(TransitionMatrix {
        matrix,
        eigenvalues,
    })
}

fn small_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let q = m.len();
    let dense = Mat::<f64>::from_fn(q, q, |i, j| m[i][j]);
    dense
        .eigenvalues()
        .map_err(|e| Error::DenseEigen(format!("{e:?}")))
}

/// Every closed-form prediction of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPredictions {
    pub degrees: GroupDegrees,
    pub pair_degrees: Vec<Vec<f64>>,
    pub transition: TransitionMatrix,
    /// Leading eigenvalue of the non-backtracking operator, `c (k-1)`.
    pub mu1: f64,
    /// Radius of the bulk, `sqrt(c (k-1))`.
    pub bulk_radius: f64,
    /// Informative eigenvalues `c (k-1) lambda` for the `q - 1` largest `lambda`.
    pub mu2: Vec<Complex64>,
    /// `c (k-1) |lambda|^2` for the largest `lambda`.
    pub criticality: f64,
    pub detectable: bool,
}

impl ModelPredictions {
    /// Largest-magnitude eigenvalue of `T`.
    pub fn lambda(&self) -> Complex64 {
        self.transition.eigenvalues[0]
    }
}

pub fn detectability(kernel: &KernelTensor, prior: &GroupPrior) -> Result<ModelPredictions> {
    let degrees = group_degree(kernel, prior);
    let pair_degrees = pair_degree(kernel, prior)?;
    let c = degrees.mean;
    let mu1 = c * (kernel.k() as f64 - 1.0);
    let transition = if c > 0.0 {
        transition_matrix(kernel, prior)?
    } else {
        let q = kernel.q();
        TransitionMatrix {
            matrix: vec![vec![0.0; q]; q],
            eigenvalues: vec![Complex64::new(0.0, 0.0); q],
        }
    };
    let mu2: Vec<Complex64> = transition.eigenvalues[..kernel.q() - 1]
        .iter()
        .map(|&l| l * mu1)
        .collect();
    let criticality = mu1 * transition.eigenvalues[0].norm_sqr();
    Ok(ModelPredictions {
        degrees,
        pair_degrees,
        transition,
        mu1,
        bulk_radius: mu1.sqrt(),
        mu2,
        criticality,
        detectable: criticality > 1.0,
    })
}

/// Bisection for `f(x) = 1` on `[lo, hi]`, where `f(lo) - 1` and `f(hi) - 1` differ in sign.
pub(crate) fn bisect_unit_crossing(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut f_lo = f(lo)? - 1.0;
    let f_hi = f(hi)? - 1.0;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidParameter(format!(
            "no detectability crossing in [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)? - 1.0;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical `eps_tilde` of the HSBM, solving `c (k-1) lambda^2 = 1` from the kernel.
pub fn hsbm_critical_eps_tilde(k: usize, q: usize, c: f64, tol: f64) -> Result<f64> {
    let prior = GroupPrior::uniform(q);
    bisect_unit_crossing(
        |eps| Ok(detectability(&hsbm_kernel(k, q, c, eps)?, &prior)?.criticality),
        0.0,
        1.0,
        tol,
    )
}

/// Critical mean degree of the planted 2-in-4-SAT kernel.
pub fn two_in_four_critical_degree(tol: f64) -> Result<f64> {
    let prior = GroupPrior::uniform(2);
    bisect_unit_crossing(
        |c| Ok(detectability(&two_in_four_kernel(c)?, &prior)?.criticality),
        0.5,
        10.0,
        tol,
    )
}

/// Parametric shortcut formulas for the symmetric HSBM.
///
/// These are diagnostics only; thresholds elsewhere are computed from the kernel.
pub mod shortcut {
    /// Critical `eps = c_in_pair / c_out_pair` ratio of the pairwise degrees.
    pub fn eps_c(c: f64, k: usize, q: usize) -> f64 {
        let s = (c * (k as f64 - 1.0)).sqrt();
        (s - 1.0) / (s + q as f64 - 1.0)
    }

    /// `eps_tilde` from the pairwise ratio `eps`, by inverting
    /// `eps = Q eps_tilde / (1 + (Q - 1) eps_tilde)` with `Q = q^(k-2)`.
    pub fn eps_tilde_from_eps(eps: f64, k: usize, q: usize) -> f64 {
        let big_q = (q as f64).powi(k as i32 - 2);
        eps / (big_q - (big_q - 1.0) * eps)
    }

    /// The same relation with a `+` in the denominator; does not reproduce the
    /// kernel-derived threshold and is kept only for comparison.
    pub fn eps_tilde_from_eps_plus(eps: f64, k: usize, q: usize) -> f64 {
        let big_q = (q as f64).powi(k as i32 - 2);
        eps / (big_q + (big_q - 1.0) * eps)
    }
}
