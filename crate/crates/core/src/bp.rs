//! Belief propagation on the planted model.
//!
//! Messages `chi^{i->mu}` live on the directed edges; factor-to-vertex messages
//! `psi^{mu->i}` only exist inside an update. Absent hyperedges act through the
//! global field `h_a`, computed from the marginals.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelAssignment};
use crate::model::{dense_tuples, hsbm_rates, transition_matrix, GroupPrior, KernelTensor, ModelKind};
use crate::rng::{substream, Stream};
use crate::spectral::{build_nb, overlap};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Messages, marginals and field of one BP iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct BPState {
    q: usize,
    messages: Vec<f64>,
    marginals: Vec<f64>,
    field: Vec<f64>,
}

impl BPState {
    /// Every message and marginal set to `prior`; zero field.
    pub fn factorized(h: &Hypergraph, prior: &GroupPrior) -> Self {
        let q = prior.q();
        let n = prior.probs();
        Self {
            q,
            messages: n.repeat(h.directed_edges().len()),
            marginals: n.repeat(h.num_vertices()),
            field: vec![0.0; q],
        }
    }

    pub fn num_groups(&self) -> usize {
        self.q
    }

    pub fn num_messages(&self) -> usize {
        self.messages.len() / self.q
    }

    /// `chi^{i->mu}` for flat directed-edge index `p`.
    pub fn message(&self, p: usize) -> &[f64] {
        &self.messages[p * self.q..(p + 1) * self.q]
    }

    pub fn marginal(&self, i: usize) -> &[f64] {
        &self.marginals[i * self.q..(i + 1) * self.q]
    }

    pub fn messages(&self) -> &[f64] {
        &self.messages
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn field(&self) -> &[f64] {
        &self.field
    }

    /// Sums `S_a = sum_i chi^i_a`.
    pub fn marginal_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.q];
        for m in self.marginals.chunks(self.q) {
            s.iter_mut().zip(m).for_each(|(x, y)| *x += y);
        }
        s
    }

    /// Argmax of each marginal, ties to the lowest label; returns the labels and
    /// the number of tied vertices.
    pub fn argmax(&self) -> (Vec<usize>, usize) {
        let mut ties = 0;
        let labels = self
            .marginals
            .chunks(self.q)
            .map(|m| {
                let mut best = 0;
                for a in 1..self.q {
                    if m[a] > m[best] {
                        best = a;
                    }
                }
                if m.iter().enumerate().any(|(a, &x)| a != best && x == m[best]) {
                    ties += 1;
                }
                best
            })
            .collect();
        (labels, ties)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `chi = n` plus i.i.d. Gaussian noise of amplitude `sigma`, renormalised.
    Factorized { sigma: f64 },
    /// Indicator of the given labels.
    Planted(LabelAssignment),
    /// `chi_a = 1/q`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BPConfig {
    /// Weight of the previous message in the damped update.
    pub damping: f64,
    /// Convergence threshold on the max-norm message change.
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    pub seed: u64,
}

impl Default for BPConfig {
    fn default() -> Self {
        Self {
            damping: 0.2,
            tol: 1e-8,
            max_iter: 1000,
            init: Init::Factorized { sigma: 1e-3 },
            seed: 0,
        }
    }
}

impl BPConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidParameter(format!("damping must lie in [0, 1), got {}", self.damping)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Built-in kernels with closed-form (linear time) field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FastModel {
    Hsbm { k: usize, q: usize, c_in: f64, c_out: f64 },
    TwoInFour { c: f64 },
}

impl FastModel {
    pub fn from_kind(kind: &ModelKind) -> Result<Self> {
        match *kind {
            ModelKind::Hsbm { k, q, c, eps_tilde } => {
                let r = hsbm_rates(k, q, c, eps_tilde)?;
                Ok(FastModel::Hsbm {
                    k,
                    q,
                    c_in: r.c_in,
                    c_out: r.c_out,
                })
            }
            ModelKind::TwoInFour { c } => Ok(FastModel::TwoInFour { c }),
        }
    }

    pub fn q(&self) -> usize {
        match *self {
            FastModel::Hsbm { q, .. } => q,
            FastModel::TwoInFour { .. } => 2,
        }
    }

    /// Closed-form field from the marginal sums. For the HSBM this differs from
    /// [`generic_field`] by a label-independent constant.
    pub fn field(&self, sums: &[f64], n: usize) -> Vec<f64> {
        let n = n as f64;
        match *self {
            FastModel::Hsbm { k, c_in, c_out, .. } => sums
                .iter()
                .map(|&s| c_out + (c_in - c_out) / factorial(k - 1) * (s / n).powi(k as i32 - 1))
                .collect(),
            FastModel::TwoInFour { c } => {
                let (s0, s1) = (sums[0] / n, sums[1] / n);
                vec![8.0 * c * s0 * s1 * s1, 8.0 * c * s1 * s0 * s0]
            }
        }
    }
}

/// `h_a = 1/(k-1)! sum_{b in A^(k-1)} c_{a,b} prod_l S_{b_l} / N`.
pub fn generic_field(kernel: &KernelTensor, sums: &[f64], n: usize) -> Vec<f64> {
    let (k, q) = (kernel.k(), kernel.q());
    let frac: Vec<f64> = sums.iter().map(|s| s / n.max(1) as f64).collect();
    let table = dense_tuples(kernel);
    let norm = factorial(k - 1);
    (0..q)
        .map(|a| {
            table[a]
                .iter()
                .map(|(b, rate)| rate * b.iter().map(|&x| frac[x]).product::<f64>())
                .sum::<f64>()
                / norm
        })
        .collect()
}

/// Evaluates `psi_a = sum_b c_{a,b} prod_l chi^{j_l}_{b_l}`.
enum Factor {
    Table(Vec<Vec<(Vec<usize>, f64)>>),
    Hsbm { c_in: f64, c_out: f64 },
}

impl Factor {
    fn generic(kernel: &KernelTensor) -> Self {
        Factor::Table(dense_tuples(kernel))
    }

    fn fast(model: &FastModel) -> Result<Self> {
        Ok(match *model {
            FastModel::Hsbm { c_in, c_out, .. } => Factor::Hsbm { c_in, c_out },
            FastModel::TwoInFour { c } => Factor::generic(&crate::model::two_in_four_kernel(c)?),
        })
    }

    fn eval(&self, others: &[&[f64]], out: &mut [f64]) {
        match self {
            Factor::Table(per_a) => {
                for (a, slot) in out.iter_mut().enumerate() {
                    *slot = per_a[a]
                        .iter()
                        .map(|(b, rate)| rate * b.iter().zip(others).map(|(&x, m)| m[x]).product::<f64>())
                        .sum();
                }
            }
            Factor::Hsbm { c_in, c_out } => {
                for (a, slot) in out.iter_mut().enumerate() {
                    let total: f64 = others.iter().map(|m| m.iter().sum::<f64>()).product();
                    let same: f64 = others.iter().map(|m| m[a]).product();
                    *slot = c_out * total + (c_in - c_out) * same;
                }
            }
        }
    }
}

/// Which field and factor evaluation a run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum BpModel {
    Generic(KernelTensor),
    Fast(FastModel),
}

impl BpModel {
    pub fn q(&self) -> usize {
        match self {
            BpModel::Generic(k) => k.q(),
            BpModel::Fast(f) => f.q(),
        }
    }

    fn factor(&self) -> Result<Factor> {
        match self {
            BpModel::Generic(k) => Ok(Factor::generic(k)),
            BpModel::Fast(f) => Factor::fast(f),
        }
    }

    fn field(&self, sums: &[f64], n: usize) -> Vec<f64> {
        match self {
            BpModel::Generic(k) => generic_field(k, sums, n),
            BpModel::Fast(f) => f.field(sums, n),
        }
    }
}

/// Directed edges leaving each vertex.
fn out_edges(h: &Hypergraph) -> Vec<Vec<usize>> {
    let idx = h.directed_edges();
    let mut out = vec![Vec::new(); h.num_vertices()];
    for p in 0..idx.len() {
        out[idx.pair(p).0].push(p);
    }
    out
}

/// Normalises `log_w` (with `zeros[a] > 0` meaning weight 0) into `out`;
/// falls back to `fallback` when every weight vanishes.
fn normalize_log(log_w: &[f64], zeros: &[usize], fallback: &[f64], out: &mut [f64]) {
    let max = log_w
        .iter()
        .zip(zeros)
        .filter(|(_, &z)| z == 0)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        out.copy_from_slice(fallback);
        return;
    }
    let mut total = 0.0;
    for ((o, &l), &z) in out.iter_mut().zip(log_w).zip(zeros) {
        *o = if z == 0 { (l - max).exp() } else { 0.0 };
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// One synchronous damped update with the field held fixed. Returns the new
/// state (field set to `field`) and the max-norm message change.
fn step(
    h: &Hypergraph,
    out: &[Vec<usize>],
    state: &BPState,
    factor: &Factor,
    prior: &GroupPrior,
    field: &[f64],
    damping: f64,
) -> (BPState, f64) {
    let q = state.q;
    let idx = h.directed_edges();
    let n_prob = prior.probs();
    let dim = idx.len();

    // normalised psi^{mu->i}, stored at the index of (i -> mu)
    let mut psi = vec![0.0; dim * q];
    let mut others: Vec<&[f64]> = Vec::new();
    for mu in 0..h.num_edges() {
        let block = idx.block(mu);
        for p in block.clone() {
            others.clear();
            others.extend(block.clone().filter(|&r| r != p).map(|r| state.message(r)));
            let slot = &mut psi[p * q..(p + 1) * q];
            factor.eval(&others, slot);
            let total: f64 = slot.iter().sum();
            if total > 0.0 {
                slot.iter_mut().for_each(|x| *x /= total);
            }
        }
    }

    let mut messages = vec![0.0; dim * q];
    let mut marginals = vec![0.0; h.num_vertices() * q];
    let mut base = vec![0.0; q];
    let mut base_zero = vec![0usize; q];
    let mut lw = vec![0.0; q];
    let mut zw = vec![0usize; q];
    for (i, edges) in out.iter().enumerate() {
        for a in 0..q {
            base[a] = if n_prob[a] > 0.0 { n_prob[a].ln() - field[a] } else { 0.0 };
            base_zero[a] = usize::from(n_prob[a] <= 0.0);
        }
        for &p in edges {
            for a in 0..q {
                let v = psi[p * q + a];
                if v > 0.0 {
                    base[a] += v.ln();
                } else {
                    base_zero[a] += 1;
                }
            }
        }
        normalize_log(&base, &base_zero, n_prob, &mut marginals[i * q..(i + 1) * q]);
        for &p in edges {
            for a in 0..q {
                let v = psi[p * q + a];
                if v > 0.0 {
                    lw[a] = base[a] - v.ln();
                    zw[a] = base_zero[a];
                } else {
                    lw[a] = base[a];
                    zw[a] = base_zero[a] - 1;
                }
            }
            normalize_log(&lw, &zw, n_prob, &mut messages[p * q..(p + 1) * q]);
        }
    }

    let mut change: f64 = 0.0;
    if damping > 0.0 {
        for (new, &old) in messages.iter_mut().zip(&state.messages) {
            *new = (1.0 - damping) * *new + damping * old;
        }
    }
    for (new, &old) in messages.iter().zip(&state.messages) {
        change = change.max((new - old).abs());
    }
    (
        BPState {
            q,
            messages,
            marginals,
            field: field.to_vec(),
        },
        change,
    )
}

fn check_state(h: &Hypergraph, state: &BPState, q: usize) -> Result<()> {
    if state.q != q {
        return Err(Error::InvalidParameter(format!("state has q = {}, model has q = {q}", state.q)));
    }
    if state.num_messages() != h.directed_edges().len() || state.marginals.len() != h.num_vertices() * q {
        return Err(Error::LengthMismatch(state.num_messages(), h.directed_edges().len()));
    }
    Ok(())
}

/// One update with the exact product-measure field of `kernel`.
pub fn bp_step_generic(
    h: &Hypergraph,
    state: &BPState,
    kernel: &KernelTensor,
    prior: &GroupPrior,
    damping: f64,
) -> Result<(BPState, f64)> {
    check_state(h, state, kernel.q())?;
    let field = generic_field(kernel, &state.marginal_sums(), h.num_vertices());
    Ok(step(h, &out_edges(h), state, &Factor::generic(kernel), prior, &field, damping))
}

/// One update with the closed-form field of a built-in model.
pub fn bp_step_fast(
    h: &Hypergraph,
    state: &BPState,
    model: &FastModel,
    prior: &GroupPrior,
    damping: f64,
) -> Result<(BPState, f64)> {
    check_state(h, state, model.q())?;
    let field = model.field(&state.marginal_sums(), h.num_vertices());
    Ok(step(h, &out_edges(h), state, &Factor::fast(model)?, prior, &field, damping))
}

/// Result of [`bp_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct BpOutcome {
    pub state: BPState,
    pub labels: LabelAssignment,
    /// Present when planted labels were supplied.
    pub overlap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Max message change after each iteration.
    pub history: Vec<f64>,
    /// Vertices whose argmax was a tie (resolved to the lowest label).
    pub ties: usize,
}

/// Serializable run log.
#[derive(Debug, Clone, Serialize)]
pub struct BpLog {
    pub iterations: usize,
    pub converged: bool,
    pub overlap: Option<f64>,
    pub ties: usize,
    pub max_change: Vec<f64>,
}

impl BpOutcome {
    pub fn log(&self) -> BpLog {
        BpLog {
            iterations: self.iterations,
            converged: self.converged,
            overlap: self.overlap,
            ties: self.ties,
            max_change: self.history.clone(),
        }
    }
}

/// Initial state for `config.init`.
pub fn initial_state(h: &Hypergraph, prior: &GroupPrior, config: &BPConfig) -> Result<BPState> {
    let mut state = BPState::factorized(h, prior);
    let q = prior.q();
    match &config.init {
        Init::Factorized { sigma } => {
            if *sigma > 0.0 {
                let mut rng = substream(config.seed, Stream::BpNoise);
                for m in state.messages.chunks_mut(q) {
                    for x in m.iter_mut() {
                        *x = (*x + sigma * rng.sample::<f64, _>(StandardNormal)).max(1e-12);
                    }
                    let t: f64 = m.iter().sum();
                    m.iter_mut().for_each(|x| *x /= t);
                }
            }
        }
        Init::Uniform => {
            state.messages.iter_mut().for_each(|x| *x = 1.0 / q as f64);
            state.marginals.iter_mut().for_each(|x| *x = 1.0 / q as f64);
        }
        Init::Planted(labels) => {
            if labels.len() != h.num_vertices() || labels.num_groups() != q {
                return Err(Error::InvalidLabels("planted init does not match the instance".into()));
            }
            let idx = h.directed_edges();
            for p in 0..idx.len() {
                let a = labels.get(idx.pair(p).0);
                let m = &mut state.messages[p * q..(p + 1) * q];
                m.iter_mut().enumerate().for_each(|(b, x)| *x = f64::from(u8::from(a == b)));
            }
            for (i, m) in state.marginals.chunks_mut(q).enumerate() {
                m.iter_mut().enumerate().for_each(|(b, x)| *x = f64::from(u8::from(labels.get(i) == b)));
            }
        }
    }
    Ok(state)
}

/// Iterates BP until the max message change drops below `config.tol`.
pub fn bp_run(
    h: &Hypergraph,
    model: &BpModel,
    prior: &GroupPrior,
    config: &BPConfig,
    planted: Option<&LabelAssignment>,
) -> Result<BpOutcome> {
    config.validate()?;
    if model.q() != prior.q() {
        return Err(Error::InvalidParameter(format!(
            "model has q = {}, prior has q = {}",
            model.q(),
            prior.q()
        )));
    }
    let out = out_edges(h);
    let factor = model.factor()?;
    let mut state = initial_state(h, prior, config)?;
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_iter {
        let field = model.field(&state.marginal_sums(), h.num_vertices());
        let (next, change) = step(h, &out, &state, &factor, prior, &field, config.damping);
        state = next;
        history.push(change);
        if change < config.tol {
            converged = true;
            break;
        }
    }
    let (labels, ties) = state.argmax();
    let labels = LabelAssignment::new(labels, prior.q())?;
    let overlap = planted.map(|p| overlap(&labels, p, prior)).transpose()?;
    Ok(BpOutcome {
        state,
        labels,
        overlap,
        iterations: history.len(),
        converged,
        history,
        ties,
    })
}

/// Linear stability of the factorized fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    /// Largest-magnitude eigenvalue of `T`.
    pub lambda: Complex64,
    /// `c (k-1) |lambda|^2`.
    pub value: f64,
    pub stable: bool,
}

pub fn factorized_stability(kernel: &KernelTensor, prior: &GroupPrior) -> Result<Stability> {
    let t = transition_matrix(kernel, prior)?;
    let c = crate::model::group_degree(kernel, prior).mean;
    let lambda = t.eigenvalues[0];
    let value = c * (kernel.k() as f64 - 1.0) * lambda.norm_sqr();
    Ok(Stability {
        lambda,
        value,
        stable: value < 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianCheck {
    pub max_abs_deviation: f64,
    /// Largest entry of the predicted Jacobian `B (x) T`.
    pub max_entry: f64,
    /// `max_abs_deviation / max_entry`, or the absolute deviation when the
    /// prediction vanishes.
    pub relative: f64,
}

/// Compares the central-difference Jacobian of the message update at the
/// factorized point (field fixed, no damping, step `1e-6`) with `B (x) T`.
pub fn bp_jacobian_check(h: &Hypergraph, kernel: &KernelTensor, prior: &GroupPrior) -> Result<JacobianCheck> {
    const STEP: f64 = 1e-6;
    let q = kernel.q();
    if !crate::model::group_degree(kernel, prior).label_independent {
        return Err(Error::InvalidParameter("factorized point needs label-independent degrees".into()));
    }
    let t = if kernel.is_zero() {
        vec![vec![0.0; q]; q]
    } else {
        transition_matrix(kernel, prior)?.matrix
    };
    let out = out_edges(h);
    let factor = Factor::generic(kernel);
    let base = BPState::factorized(h, prior);
    let field = generic_field(kernel, &base.marginal_sums(), h.num_vertices());
    let dim = base.messages.len();

    let nb = build_nb(h);
    let rows: Vec<Vec<usize>> = (0..base.num_messages()).map(|p| nb.row(p)).collect();
    let mut predicted = vec![0.0; dim * dim];
    for (p, cols) in rows.iter().enumerate() {
        for &r in cols {
            for a in 0..q {
                for b in 0..q {
                    predicted[(p * q + a) * dim + r * q + b] += t[a][b];
                }
            }
        }
    }

    let mut dev: f64 = 0.0;
    let mut probe = base.clone();
    for col in 0..dim {
        probe.messages[col] = base.messages[col] + STEP;
        let (plus, _) = step(h, &out, &probe, &factor, prior, &field, 0.0);
        probe.messages[col] = base.messages[col] - STEP;
        let (minus, _) = step(h, &out, &probe, &factor, prior, &field, 0.0);
        probe.messages[col] = base.messages[col];
        for row in 0..dim {
            let fd = (plus.messages[row] - minus.messages[row]) / (2.0 * STEP);
            dev = dev.max((fd - predicted[row * dim + col]).abs());
        }
    }
    let max_entry = predicted.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(JacobianCheck {
        max_abs_deviation: dev,
        max_entry,
        relative: if max_entry > 0.0 { dev / max_entry } else { dev },
    })
}
