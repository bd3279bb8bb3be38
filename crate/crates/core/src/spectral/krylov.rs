//! Leading eigenpairs of a real non-symmetric operator.
//!
//! Thick-restart Arnoldi: the search space `V` is kept orthonormal together with
//! `A V`, so the projected matrix `H = V^T A V` is exact after every restart. At a
//! restart the wanted Ritz vectors (real and imaginary parts for complex pairs)
//! are orthonormalised and kept; the space is then extended by the common
//! residual direction and further Krylov vectors. Residuals are always computed
//! explicitly as `||A x - theta x|| / ||x||`.

use faer::Mat;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::operator::LinearOperator;
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

/// When to stop extracting eigenpairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// `max_pairs` leading pairs have converged.
    Count,
    /// Scan by decreasing magnitude down to the first converged non-real eigenvalue.
    FirstComplex,
    /// Every Ritz value outside `(1 + delta) sqrt(|theta_1|)` has converged, and either
    /// a converged value inside that radius follows or the outside set has been
    /// stable for `patience` restarts.
    OutsideBulk { delta: f64, patience: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovOptions {
    /// Upper bound on the number of reported eigenvalues (a conjugate pair counts twice).
    pub max_pairs: usize,
    /// Residual bound `||A x - theta x|| / ||x||` for a pair to count as converged.
    pub tol: f64,
    /// Search-space dimension; `None` picks `max(2 max_pairs + 20, 40)`.
    pub subspace: Option<usize>,
    pub max_restarts: usize,
    pub stop: StopRule,
    /// A converged value is non-real when `|im| > imag_tol * |theta|`.
    pub imag_tol: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            max_pairs: 10,
            tol: 1e-8,
            subspace: None,
            max_restarts: 2000,
            stop: StopRule::Count,
            imag_tol: 1e-8,
            seed: 0,
        }
    }
}

/// Operator an eigenpair was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSource {
    Full,
    Reduced,
    Adjacency,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub residual: f64,
    /// Real part of the eigenvector; `re` and `im` together have unit norm.
    pub re: Vec<f64>,
    /// Imaginary part; empty for a real eigenvalue.
    pub im: Vec<f64>,
}

impl EigenPair {
    pub fn is_real(&self) -> bool {
        self.im.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Converged pairs in decreasing `|lambda|`; conjugates are adjacent, upper half-plane first.
    pub pairs: Vec<EigenPair>,
    pub source: OperatorSource,
    /// `sqrt(|lambda_1|)`.
    pub bulk_radius_estimate: f64,
    pub restarts: usize,
    pub matvecs: usize,
}

impl SpectralResult {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// Rescales one eigenvector; used to check scale invariance downstream.
    pub fn scale_vector(&mut self, idx: usize, factor: f64) {
        let pair = &mut self.pairs[idx];
        pair.re.iter_mut().for_each(|v| *v *= factor);
        pair.im.iter_mut().for_each(|v| *v *= factor);
    }
}

/// One Ritz value in the upper half-plane with its coordinates in the basis.
struct Ritz {
    value: Complex64,
    y_re: Vec<f64>,
    y_im: Option<Vec<f64>>,
    residual: f64,
}

impl Ritz {
    fn width(&self) -> usize {
        if self.y_im.is_some() {
            2
        } else {
            1
        }
    }
}

struct Basis<'a> {
    op: &'a dyn LinearOperator,
    n: usize,
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `sum_j basis[j] * coeffs[j]`
fn combine(basis: &[Vec<f64>], coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != 0.0 {
            axpy(c, b, &mut out);
        }
    }
    out
}

impl<'a> Basis<'a> {
    fn new(op: &'a dyn LinearOperator, capacity: usize) -> Self {
        Self {
            op,
            n: op.dim(),
            v: Vec::with_capacity(capacity),
            av: Vec::with_capacity(capacity),
            h: vec![vec![0.0; capacity]; capacity],
            matvecs: 0,
        }
    }

    fn len(&self) -> usize {
        self.v.len()
    }

    /// Orthogonalises `w` against the basis (two passes); returns the remaining norm
    /// relative to the input norm.
    fn orthogonalize(&self, w: &mut [f64]) -> f64 {
        let before = norm(w);
        if before == 0.0 {
            return 0.0;
        }
        for _ in 0..2 {
            for b in &self.v {
                let c = dot(b, w);
                axpy(-c, b, w);
            }
        }
        norm(w) / before
    }

    /// Appends `w` (already orthogonal) after normalising; computes `A w`.
    fn push(&mut self, mut w: Vec<f64>) {
        let nrm = norm(&w);
        w.iter_mut().for_each(|x| *x /= nrm);
        let mut aw = vec![0.0; self.n];
        self.op.apply(&w, &mut aw);
        self.matvecs += 1;
        let j = self.v.len();
        self.v.push(w);
        self.av.push(aw);
        for i in 0..=j {
            self.h[i][j] = dot(&self.v[i], &self.av[j]);
        }
        for i in 0..j {
            self.h[j][i] = dot(&self.v[j], &self.av[i]);
        }
    }

    /// Pushes `w` orthogonalised, replacing it by random directions on breakdown.
    fn push_direction(&mut self, mut w: Vec<f64>, rng: &mut impl Rng) {
        let mut attempts = 0;
        while self.orthogonalize(&mut w) < 1e-10 {
            attempts += 1;
            assert!(attempts < 100, "cannot extend Krylov basis");
            w = (0..self.n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        }
        self.push(w);
    }

    fn ritz(&self) -> Result<Vec<Ritz>> {
        let m = self.len();
        let hm = Mat::<f64>::from_fn(m, m, |i, j| self.h[i][j]);
        let evd = hm.eigen().map_err(|e| Error::DenseEigen(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let mut out = Vec::with_capacity(m);
        for c in 0..m {
            let value: Complex64 = s[c];
            if value.im < 0.0 {
                continue;
            }
            let y_re: Vec<f64> = (0..m).map(|r| u[(r, c)].re).collect();
            let y_im = (value.im > 0.0).then(|| (0..m).map(|r| u[(r, c)].im).collect());
            out.push(Ritz {
                value,
                y_re,
                y_im,
                residual: f64::INFINITY,
            });
        }
        out.sort_by(|a, b| {
            b.value
                .norm()
                .total_cmp(&a.value.norm())
                .then(b.value.re.total_cmp(&a.value.re))
        });
        Ok(out)
    }

    fn residual(&self, r: &Ritz) -> f64 {
        let (a, b) = (r.value.re, r.value.im);
        let x_re = combine(&self.v, &r.y_re, self.n);
        let ax_re = combine(&self.av, &r.y_re, self.n);
        match &r.y_im {
            None => {
                let mut res = ax_re;
                axpy(-a, &x_re, &mut res);
                norm(&res) / norm(&x_re)
            }
            Some(y_im) => {
                let x_im = combine(&self.v, y_im, self.n);
                let ax_im = combine(&self.av, y_im, self.n);
                let mut res_re = ax_re;
                axpy(-a, &x_re, &mut res_re);
                axpy(b, &x_im, &mut res_re);
                let mut res_im = ax_im;
                axpy(-a, &x_im, &mut res_im);
                axpy(-b, &x_re, &mut res_im);
                let num = dot(&res_re, &res_re) + dot(&res_im, &res_im);
                let den = dot(&x_re, &x_re) + dot(&x_im, &x_im);
                (num / den).sqrt()
            }
        }
    }

    /// Keeps the span of the given Ritz vectors and returns the number kept.
    fn restart(&mut self, kept: &[&Ritz], rng: &mut impl Rng) {
        let m = self.len();
        // real basis of the kept invariant subspace of H, orthonormalised
        let mut y: Vec<Vec<f64>> = Vec::new();
        for r in kept {
            y.push(r.y_re.clone());
            if let Some(im) = &r.y_im {
                y.push(im.clone());
            }
        }
        let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(y.len());
        for mut col in y {
            let before = norm(&col);
            for _ in 0..2 {
                for q in &ortho {
                    let c = dot(q, &col);
                    axpy(-c, q, &mut col);
                }
            }
            let after = norm(&col);
            if after > 1e-10 * before {
                col.iter_mut().for_each(|x| *x /= after);
                ortho.push(col);
            }
        }
        let p = ortho.len();
        let w: Vec<Vec<f64>> = ortho.iter().map(|c| combine(&self.v, c, self.n)).collect();
        let aw: Vec<Vec<f64>> = ortho.iter().map(|c| combine(&self.av, c, self.n)).collect();
        // H_new = Y^T H Y
        let hy: Vec<Vec<f64>> = ortho
            .iter()
            .map(|c| (0..m).map(|i| dot(&self.h[i][..m], c)).collect())
            .collect();
        let mut h_new = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                h_new[i][j] = dot(&ortho[i], &hy[j]);
            }
        }
        // common residual direction AW g - W (H_new g) for random g
        let g: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut dir = combine(&aw, &g, self.n);
        for i in 0..p {
            let coef: f64 = (0..p).map(|j| h_new[i][j] * g[j]).sum();
            axpy(-coef, &w[i], &mut dir);
        }

        self.v = w;
        self.av = aw;
        for i in 0..p {
            self.h[i][..p].copy_from_slice(&h_new[i]);
        }
        self.push_direction(dir, rng);
    }
}

/// Computes leading eigenpairs of `op` in decreasing magnitude.
pub fn leading_spectrum(
    op: &dyn LinearOperator,
    source: OperatorSource,
    opts: &KrylovOptions,
) -> Result<SpectralResult> {
    run(op, source, opts, false).map(|(r, _)| r)
}

/// Like [`leading_spectrum`], but when the restart budget runs out the converged
/// leading prefix is returned with `false` instead of an error.
pub fn leading_spectrum_partial(
    op: &dyn LinearOperator,
    source: OperatorSource,
    opts: &KrylovOptions,
) -> Result<(SpectralResult, bool)> {
    run(op, source, opts, true)
}

fn run(
    op: &dyn LinearOperator,
    source: OperatorSource,
    opts: &KrylovOptions,
    partial: bool,
) -> Result<(SpectralResult, bool)> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("operator has dimension 0".into()));
    }
    if opts.max_pairs == 0 || opts.max_pairs > n {
        return Err(Error::InvalidParameter(format!(
            "max_pairs must lie in 1..={n}, got {}",
            opts.max_pairs
        )));
    }
    let m = opts
        .subspace
        .unwrap_or_else(|| (2 * opts.max_pairs + 20).max(40))
        .max(opts.max_pairs + 2)
        .min(n);
    let keep_target = (opts.max_pairs + (m - opts.max_pairs) / 2).min(m.saturating_sub(3)).max(1);

    let mut rng = substream(opts.seed, Stream::Krylov);
    let mut basis = Basis::new(op, m);
    let start: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    basis.push_direction(start, &mut rng);

    let mut restarts = 0;
    let mut stable_outside: Option<(usize, usize)> = None;
    loop {
        while basis.len() < m {
            let next = basis.av.last().unwrap().clone();
            basis.push_direction(next, &mut rng);
        }
        let mut ritz = basis.ritz()?;

        // residuals of the leading candidates only
        let mut width = 0;
        for r in ritz.iter_mut() {
            if width >= opts.max_pairs + 2 {
                break;
            }
            r.residual = basis.residual(r);
            width += r.width();
        }
        let prefix = ritz.iter().take_while(|r| r.residual <= opts.tol).count();
        let prefix_width: usize = ritz[..prefix].iter().map(Ritz::width).sum();

        let mut report: Option<usize> = None;
        if prefix_width >= opts.max_pairs {
            let mut w = 0;
            let mut cut = 0;
            for r in &ritz[..prefix] {
                if w >= opts.max_pairs {
                    break;
                }
                w += r.width();
                cut += 1;
            }
            report = Some(cut);
        }
        match opts.stop {
            StopRule::Count => {}
            StopRule::FirstComplex => {
                if let Some(pos) = ritz[..prefix]
                    .iter()
                    .position(|r| r.value.im.abs() > opts.imag_tol * r.value.norm())
                {
                    report = Some(report.map_or(pos + 1, |c| c.min(pos + 1)));
                }
            }
            StopRule::OutsideBulk { delta, patience } => {
                if prefix > 0 {
                    let radius = (1.0 + delta) * ritz[0].value.norm().sqrt();
                    let outside = ritz.iter().take_while(|r| r.value.norm() > radius).count();
                    if prefix > outside {
                        report = Some(report.map_or(prefix, |c| c.min(prefix)));
                    } else if prefix == outside {
                        let streak = match stable_outside {
                            Some((count, streak)) if count == outside => streak + 1,
                            _ => 1,
                        };
                        stable_outside = Some((outside, streak));
                        if streak > patience {
                            report = Some(report.map_or(prefix, |c| c.min(prefix)));
                        }
                    } else {
                        stable_outside = None;
                    }
                }
            }
        }

        if let Some(cut) = report {
            return Ok((assemble(&basis, &ritz[..cut], source, restarts), true));
        }
        if restarts >= opts.max_restarts {
            if partial {
                return Ok((assemble(&basis, &ritz[..prefix], source, restarts), false));
            }
            return Err(Error::NoConvergence {
                restarts,
                residuals: ritz
                    .iter()
                    .filter(|r| r.residual.is_finite())
                    .map(|r| r.residual)
                    .collect(),
            });
        }

        let mut kept: Vec<&Ritz> = Vec::new();
        let mut w = 0;
        for r in &ritz {
            if w >= keep_target {
                break;
            }
            if w + r.width() > m - 2 {
                break;
            }
            w += r.width();
            kept.push(r);
        }
        basis.restart(&kept, &mut rng);
        restarts += 1;
    }
}

fn assemble(basis: &Basis<'_>, ritz: &[Ritz], source: OperatorSource, restarts: usize) -> SpectralResult {
    let n = basis.n;
    let mut pairs = Vec::new();
    for r in ritz {
        let mut re = combine(&basis.v, &r.y_re, n);
        match &r.y_im {
            None => {
                let nrm = norm(&re);
                re.iter_mut().for_each(|x| *x /= nrm);
                pairs.push(EigenPair {
                    value: Complex64::new(r.value.re, 0.0),
                    residual: r.residual,
                    re,
                    im: Vec::new(),
                });
            }
            Some(y_im) => {
                let mut im = combine(&basis.v, y_im, n);
                let nrm = (dot(&re, &re) + dot(&im, &im)).sqrt();
                re.iter_mut().for_each(|x| *x /= nrm);
                im.iter_mut().for_each(|x| *x /= nrm);
                let conj_im: Vec<f64> = im.iter().map(|x| -x).collect();
                pairs.push(EigenPair {
                    value: r.value,
                    residual: r.residual,
                    re: re.clone(),
                    im,
                });
                pairs.push(EigenPair {
                    value: r.value.conj(),
                    residual: r.residual,
                    re,
                    im: conj_im,
                });
            }
        }
    }
    let bulk_radius_estimate = pairs.first().map_or(0.0, |p| p.value.norm().sqrt());
    SpectralResult {
        pairs,
        source,
        bulk_radius_estimate,
        restarts,
        matvecs: basis.matvecs,
    }
}
