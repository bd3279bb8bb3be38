//! Phase-transition sweeps: overlap of each method over a parameter grid.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp::{bp_run, BPConfig, BpModel, FastModel};
use crate::error::{Error, Result};
use crate::model::{bisect_unit_crossing, detectability, sample, ModelKind};
use crate::rng::derive_seed;
use crate::spectral::{adjacency_detect, detect, overlap, DetectOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    EpsTilde,
    C,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::EpsTilde => "eps_tilde",
            Parameter::C => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Spectral detection with the non-backtracking operator.
    Nbo,
    /// Spectral clustering with the adjacency matrix.
    Adjacency,
    /// Belief propagation with the model's closed-form field.
    Bp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Nbo => "nbo",
            Method::Adjacency => "adjacency",
            Method::Bp => "bp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Model with its fixed parameters; the swept one is overwritten per grid point.
    pub model: ModelKind,
    pub parameter: Parameter,
    pub grid: Vec<f64>,
    pub n: usize,
    pub samples: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("need at least one sample per grid point".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods requested".into()));
        }
        if matches!((self.model, self.parameter), (ModelKind::TwoInFour { .. }, Parameter::EpsTilde)) {
            return Err(Error::InvalidParameter("the 2-in-4 model has no eps_tilde".into()));
        }
        for &x in &self.grid {
            self.model_at(x)?.kernel()?;
        }
        Ok(())
    }

    /// The model with the swept parameter set to `x`.
    pub fn model_at(&self, x: f64) -> Result<ModelKind> {
        Ok(match (self.model, self.parameter) {
            (ModelKind::Hsbm { k, q, c, .. }, Parameter::EpsTilde) => ModelKind::Hsbm { k, q, c, eps_tilde: x },
            (ModelKind::Hsbm { k, q, eps_tilde, .. }, Parameter::C) => ModelKind::Hsbm { k, q, c: x, eps_tilde },
            (ModelKind::TwoInFour { .. }, Parameter::C) => ModelKind::TwoInFour { c: x },
            (ModelKind::TwoInFour { .. }, Parameter::EpsTilde) => {
                return Err(Error::InvalidParameter("the 2-in-4 model has no eps_tilde".into()))
            }
        })
    }

    /// Parameter value where `c (k-1) lambda^2 = 1`, if there is one.
    pub fn predicted_threshold(&self) -> Option<f64> {
        let f = |x: f64| {
            let m = self.model_at(x)?;
            Ok(detectability(&m.kernel()?, &m.prior())?.criticality)
        };
        let (lo, hi) = match self.parameter {
            Parameter::EpsTilde => (0.0, 1.0),
            Parameter::C => (1e-3, 1e3),
        };
        bisect_unit_crossing(f, lo, hi, 1e-10).ok()
    }
}

/// Aggregate over the samples of one grid point and method.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub method: Method,
    pub overlaps: Vec<f64>,
    pub failures: Vec<String>,
}

impl SweepRow {
    pub fn mean(&self) -> f64 {
        if self.overlaps.is_empty() {
            f64::NAN
        } else {
            self.overlaps.iter().sum::<f64>() / self.overlaps.len() as f64
        }
    }

    /// Standard error of the mean; zero with a single sample.
    pub fn stderr(&self) -> f64 {
        let n = self.overlaps.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let var = self.overlaps.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub threshold: Option<f64>,
    /// Grid order, then the order of `spec.methods`.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, param: f64, method: Method) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.param == param && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let model = serde_json::to_string(&self.spec.model).unwrap_or_default();
        let _ = writeln!(out, "# model: {model}");
        let _ = writeln!(out, "# n: {}, samples: {}, seed: {}", self.spec.n, self.spec.samples, self.spec.seed);
        match self.threshold {
            Some(t) => {
                let _ = writeln!(out, "# predicted_threshold: {}={t:.6}", self.spec.parameter.name());
            }
            None => {
                let _ = writeln!(out, "# predicted_threshold: none");
            }
        }
        for r in &self.rows {
            for f in &r.failures {
                let _ = writeln!(out, "# failure: {}={} {}: {f}", self.spec.parameter.name(), r.param, r.method.name());
            }
        }
        let _ = writeln!(out, "param,method,mean_overlap,stderr,samples,failures");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{},{}",
                r.param,
                r.method.name(),
                r.mean(),
                r.stderr(),
                r.overlaps.len(),
                r.failures.len()
            );
        }
        out
    }
}

fn run_method(method: Method, model: &ModelKind, n: usize, seed: u64) -> Result<f64> {
    let kernel = model.kernel()?;
    let prior = model.prior();
    let (h, planted) = sample(&kernel, &prior, n, seed)?;
    let q = model.q();
    match method {
        Method::Nbo => {
            let opts = DetectOptions {
                groups: Some(q),
                seed,
                ..DetectOptions::default()
            };
            overlap(&detect(&h, &opts)?.labels, &planted, &prior)
        }
        Method::Adjacency => overlap(&adjacency_detect(&h, q, seed)?.labels, &planted, &prior),
        Method::Bp => {
            let config = BPConfig {
                seed,
                ..BPConfig::default()
            };
            let fast = BpModel::Fast(FastModel::from_kind(model)?);
            let out = bp_run(&h, &fast, &prior, &config, Some(&planted))?;
            Ok(out.overlap.expect("planted labels were supplied"))
        }
    }
}

/// Runs every (grid point, sample, method) on a pool of `threads` workers
/// (`0` = rayon default). Sample `s` at grid index `g` uses the instance seed
/// `derive_seed(seed, g, s)`, shared by all methods.
pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Result<SweepTable> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (g, &x) in spec.grid.iter().enumerate() {
        for &m in &spec.methods {
            for s in 0..spec.samples {
                jobs.push((g, x, m, derive_seed(spec.seed, g as u64, s as u64)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Result<f64>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(_, x, m, seed)| run_method(m, &spec.model_at(x)?, spec.n, seed))
            .collect()
    });

    let mut rows: Vec<SweepRow> = Vec::new();
    for ((g, x, m, _), res) in jobs.iter().zip(results) {
        let idx = g * spec.methods.len() + spec.methods.iter().position(|z| z == m).unwrap();
        if rows.len() <= idx {
            rows.push(SweepRow {
                param: *x,
                method: *m,
                overlaps: Vec::new(),
                failures: Vec::new(),
            });
        }
        match res {
            Ok(q) => rows[idx].overlaps.push(q),
            Err(e) => rows[idx].failures.push(e.to_string()),
        }
    }
    Ok(SweepTable {
        spec: spec.clone(),
        threshold: spec.predicted_threshold(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepSpec {
        SweepSpec {
            model: ModelKind::TwoInFour { c: 4.0 },
            parameter: Parameter::C,
            grid: vec![4.5],
            n: 600,
            samples: 1,
            methods: vec![Method::Nbo, Method::Bp],
            seed: 11,
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = small();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"two_in_four\""));
        assert_eq!(serde_json::from_str::<SweepSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn rejects_invalid_specs() {
        let mut s = small();
        s.grid.clear();
        assert!(s.validate().is_err());
        let mut s = small();
        s.parameter = Parameter::EpsTilde;
        assert!(s.validate().is_err());
        let mut s = small();
        s.samples = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn threshold_header_and_determinism() {
        let spec = small();
        let a = run_sweep(&spec, 1).unwrap().to_csv();
        let b = run_sweep(&spec, 2).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.contains("# predicted_threshold: c=3.000000"), "{a}");
        let rows: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "param,method,mean_overlap,stderr,samples,failures");
        assert_eq!(rows.len(), 3);
    }

    #[test]
    fn stderr_of_samples() {
        let r = SweepRow {
            param: 0.0,
            method: Method::Bp,
            overlaps: vec![0.1, 0.3],
            failures: Vec::new(),
        };
        assert!((r.mean() - 0.2).abs() < 1e-15);
        assert!((r.stderr() - 0.1).abs() < 1e-15);
    }
}
