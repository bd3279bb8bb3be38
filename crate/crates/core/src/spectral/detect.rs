//! The full spectral pipeline: operator, leading spectrum, outliers, embedding, k-means.

use num_complex::Complex64;

use super::embed::embed;
use super::kmeans::{cluster, DEFAULT_RESTARTS};
use super::krylov::{leading_spectrum_partial, KrylovOptions, OperatorSource, SpectralResult, StopRule};
use super::operator::{build_nb, build_nb_reduced, LinearOperator};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelAssignment};

/// Which non-backtracking operator to diagonalise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorChoice {
    /// Reduced `2N x 2N` operator when edges have uniform size, full operator otherwise.
    Auto,
    Full,
    Reduced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions {
    /// Number of groups; estimated from the outlier count when absent.
    pub groups: Option<usize>,
    /// Outliers are real eigenvalues with `|lambda| > (1 + delta) sqrt(mu_1)`.
    pub delta: f64,
    pub operator: OperatorChoice,
    pub tol: f64,
    pub max_pairs: usize,
    pub max_restarts: usize,
    /// Eigenvalues within this distance of `1` or `-(k-1)` are ignored for `B'`.
    pub singular_tol: f64,
    pub kmeans_restarts: usize,
    /// Cluster vertex directions rather than raw coordinates.
    pub normalize_rows: bool,
    pub seed: u64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            groups: None,
            delta: 0.1,
            operator: OperatorChoice::Auto,
            tol: 1e-8,
            max_pairs: 12,
            max_restarts: 400,
            singular_tol: 1e-6,
            kmeans_restarts: DEFAULT_RESTARTS,
            normalize_rows: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub labels: LabelAssignment,
    /// Number of groups used (given or estimated); 1 when nothing was detected
    /// without a given `q`.
    pub groups: usize,
    pub detectable: bool,
    /// Converged leading eigenvalues with residuals.
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// `sqrt(mu_1)` from the leading eigenvalue.
    pub rho: f64,
    /// Real eigenvalues outside `(1 + delta) rho`, leading one excluded.
    pub outliers: Vec<f64>,
    /// Eigenvalues whose vectors were embedded.
    pub informative: Vec<f64>,
    pub source: OperatorSource,
    /// The solver ran out of restarts before its stopping rule was met.
    pub truncated: bool,
    pub kmeans_degenerate: bool,
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= 1e-8 * z.norm().max(1e-300)
}

/// Indices of pairs used for the embedding.
///
/// With `q` given: the paper-style scan over the pairs after the leading one,
/// stopping at the first non-real value, keeping real values outside `rho`.
/// Without: every real outlier outside `(1 + delta) rho`.
fn select(
    spec: &SpectralResult,
    groups: Option<usize>,
    delta: f64,
    singular: &[f64],
    singular_tol: f64,
) -> (Vec<usize>, Vec<usize>) {
    let rho = spec.bulk_radius_estimate;
    let mut outliers = Vec::new();
    let mut scanned = Vec::new();
    let mut complex_seen = false;
    for (idx, pair) in spec.pairs.iter().enumerate().skip(1) {
        let z = pair.value;
        if !is_real(z) {
            complex_seen = true;
            continue;
        }
        if singular.iter().any(|&s| (z.re - s).abs() <= singular_tol) {
            continue;
        }
        if z.norm() > (1.0 + delta) * rho {
            outliers.push(idx);
        }
        if !complex_seen && z.norm() > rho {
            scanned.push(idx);
        }
    }
    match groups {
        Some(q) => {
            scanned.truncate(q - 1);
            (scanned, outliers)
        }
        None => (outliers.clone(), outliers),
    }
}

/// Runs spectral detection on `h`.
pub fn detect(h: &Hypergraph, opts: &DetectOptions) -> Result<Detection> {
    if let Some(q) = opts.groups {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("need q >= 2, got {q}")));
        }
    }
    let n = h.num_vertices();
    let choice = match opts.operator {
        OperatorChoice::Auto if h.uniform_k().is_some() => OperatorChoice::Reduced,
        OperatorChoice::Auto => OperatorChoice::Full,
        c => c,
    };
    let (op, source, singular): (Box<dyn LinearOperator>, OperatorSource, Vec<f64>) = match choice {
        OperatorChoice::Reduced => {
            let r = build_nb_reduced(h)?;
            let k = r.k() as f64;
            (Box::new(r), OperatorSource::Reduced, vec![1.0, -(k - 1.0)])
        }
        _ => (Box::new(build_nb(h)), OperatorSource::Full, Vec::new()),
    };

    let fallback = |detectable: bool| -> Result<Detection> {
        let q = opts.groups.unwrap_or(2);
        Ok(Detection {
            labels: LabelAssignment::uniform(n, q)?,
            groups: opts.groups.unwrap_or(1),
            detectable,
            eigenvalues: Vec::new(),
            residuals: Vec::new(),
            rho: 0.0,
            outliers: Vec::new(),
            informative: Vec::new(),
            source,
            truncated: false,
            kmeans_degenerate: true,
        })
    };
    if op.dim() < 2 {
        return fallback(false);
    }

    let kopts = KrylovOptions {
        max_pairs: opts.max_pairs.min(op.dim()),
        tol: opts.tol,
        subspace: None,
        max_restarts: opts.max_restarts,
        stop: StopRule::OutsideBulk {
            delta: opts.delta / 2.0,
            patience: 5,
        },
        imag_tol: 1e-8,
        seed: opts.seed,
    };
    let (spec, converged) = leading_spectrum_partial(op.as_ref(), source, &kopts)?;
    let (chosen, outliers) = select(&spec, opts.groups, opts.delta, &singular, opts.singular_tol);

    let eigenvalues = spec.eigenvalues();
    let residuals = spec.pairs.iter().map(|p| p.residual).collect();
    let outlier_values: Vec<f64> = outliers.iter().map(|&i| spec.pairs[i].value.re).collect();
    let informative: Vec<f64> = chosen.iter().map(|&i| spec.pairs[i].value.re).collect();

    let q = opts.groups.unwrap_or(1 + chosen.len());
    if chosen.is_empty() {
        let mut d = fallback(false)?;
        d.eigenvalues = eigenvalues;
        d.residuals = residuals;
        d.rho = spec.bulk_radius_estimate;
        d.outliers = outlier_values;
        d.truncated = !converged;
        return Ok(d);
    }
    let mut embedding = embed(&spec, h, &chosen)?;
    if opts.normalize_rows {
        embedding = embedding.row_normalized();
    }
    let clustering = cluster(&embedding, q, opts.kmeans_restarts, opts.seed)?;
    Ok(Detection {
        labels: clustering.labels,
        groups: q,
        detectable: true,
        eigenvalues,
        residuals,
        rho: spec.bulk_radius_estimate,
        outliers: outlier_values,
        informative,
        source,
        truncated: !converged,
        kmeans_degenerate: clustering.degenerate,
    })
}

/// Baseline: spectral clustering on the adjacency matrix `A` with the `q - 1`
/// eigenvectors following the leading one (largest magnitude).
pub fn adjacency_detect(h: &Hypergraph, q: usize, seed: u64) -> Result<Detection> {
    let a = h.adjacency();
    let n = h.num_vertices();
    let kopts = KrylovOptions {
        max_pairs: q.min(n),
        tol: 1e-8,
        max_restarts: 400,
        stop: StopRule::Count,
        seed,
        ..KrylovOptions::default()
    };
    let (spec, converged) = leading_spectrum_partial(&a, OperatorSource::Adjacency, &kopts)?;
    let chosen: Vec<usize> = (1..spec.pairs.len().min(q)).collect();
    let labels = if chosen.is_empty() {
        LabelAssignment::uniform(n, q)?
    } else {
        let e = embed(&spec, h, &chosen)?;
        cluster(&e, q, DEFAULT_RESTARTS, seed)?.labels
    };
    Ok(Detection {
        labels,
        groups: q,
        detectable: !chosen.is_empty(),
        eigenvalues: spec.eigenvalues(),
        residuals: spec.pairs.iter().map(|p| p.residual).collect(),
        rho: spec.bulk_radius_estimate,
        outliers: Vec::new(),
        informative: chosen.iter().map(|&i| spec.pairs[i].value.re).collect(),
        source: OperatorSource::Adjacency,
        truncated: !converged,
        kmeans_degenerate: false,
    })
}
