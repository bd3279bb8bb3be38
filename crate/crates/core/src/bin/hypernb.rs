use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hypernb::bp::{bp_run, BPConfig, BpModel, FastModel, Init};
use hypernb::io;
use hypernb::learn::estimate_kernel;
use hypernb::model::{detectability, sample, GroupPrior, KernelTensor, ModelKind};
use hypernb::spectral::{
    build_nb, build_nb_reduced, dense_spectrum, detect, leading_spectrum, overlap, DetectOptions, KrylovOptions,
    LinearOperator, OperatorChoice, OperatorSource, StopRule, DEFAULT_DENSE_CAP,
};
use hypernb::sweep::{run_sweep, SweepSpec};
use hypernb::{Error, Result};

#[derive(Parser)]
#[command(name = "hypernb", version, about = "Community detection in sparse hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path (prefix for `generate`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Hsbm,
    TwoInFour,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Option<Family>,
    /// Kernel file, instead of a built-in model.
    #[arg(long, conflicts_with = "model")]
    kernel: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    #[arg(long, default_value_t = 0.14)]
    eps_tilde: f64,
}

impl ModelArgs {
    fn kind(&self) -> Option<ModelKind> {
        self.model.map(|f| match f {
            Family::Hsbm => ModelKind::Hsbm {
                k: self.k,
                q: self.q,
                c: self.c,
                eps_tilde: self.eps_tilde,
            },
            Family::TwoInFour => ModelKind::TwoInFour { c: self.c },
        })
    }

    fn kernel(&self) -> Result<KernelTensor> {
        match (&self.kernel, self.kind()) {
            (Some(path), _) => io::load_kernel(path),
            (None, Some(kind)) => kind.kernel(),
            (None, None) => Err(Error::InvalidParameter("give --model or --kernel".into())),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorArg {
    Auto,
    Full,
    Reduced,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitArg {
    Factorized,
    Planted,
    Uniform,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a planted instance; writes `<out>.hyper` and `<out>.labels`.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
    },
    /// Eigenvalues of the non-backtracking operator as `re,im,residual`.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OperatorArg::Auto)]
        operator: OperatorArg,
        /// Full dense spectrum instead of the leading eigenvalues.
        #[arg(long)]
        dense: bool,
        /// Number of leading eigenvalues.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
    },
    /// Spectral detection; writes inferred labels.
    Detect {
        #[arg(long)]
        input: PathBuf,
        /// Number of groups; estimated from the outliers when omitted.
        #[arg(long)]
        groups: Option<usize>,
        /// Planted labels, to report the overlap.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = OperatorArg::Auto)]
        operator: OperatorArg,
        /// Cluster raw coordinates instead of unit-length vertex rows.
        #[arg(long)]
        raw_rows: bool,
    },
    /// Belief propagation; writes marginals as `vertex,p0,...`.
    Bp {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = InitArg::Factorized)]
        init: InitArg,
        #[arg(long, default_value_t = 1e-3)]
        sigma: f64,
        #[arg(long, default_value_t = 0.2)]
        damping: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        /// Use the exact product-measure field even for built-in models.
        #[arg(long)]
        generic: bool,
        /// Write the per-iteration run log as JSON.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Overlap sweep from a JSON specification.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Composition counts and calibrated rates; writes a kernel file.
    LearnKernel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn operator_choice(op: OperatorArg) -> OperatorChoice {
    match op {
        OperatorArg::Auto => OperatorChoice::Auto,
        OperatorArg::Full => OperatorChoice::Full,
        OperatorArg::Reduced => OperatorChoice::Reduced,
    }
}

fn complex_json(values: &[num_complex::Complex64]) -> serde_json::Value {
    values.iter().map(|z| json!([z.re, z.im])).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { model, n } => {
            let kernel = model.kernel()?;
            let prior = GroupPrior::uniform(kernel.q());
            let (h, labels) = sample(&kernel, &prior, n, cli.seed)?;
            match &cli.out {
                Some(prefix) => {
                    let base = prefix.to_string_lossy();
                    io::write_hypergraph(io::create(format!("{base}.hyper"))?, &h)?;
                    io::write_labels(io::create(format!("{base}.labels"))?, &labels)?;
                }
                None => io::write_hypergraph(std::io::stdout().lock(), &h)?,
            }
            let pred = detectability(&kernel, &prior)?;
            let summary = json!({
                "n": n, "m": h.num_edges(), "k": kernel.k(), "q": kernel.q(),
                "mu1": pred.mu1, "bulk_radius": pred.bulk_radius,
                "mu2": complex_json(&pred.mu2), "detectable": pred.detectable,
            });
            if cli.format == Format::Json {
                eprintln!("{summary}");
            }
        }
        Command::Spectrum {
            input,
            operator,
            dense,
            pairs,
        } => {
            let h = io::load_hypergraph(&input)?;
            let (op, source): (Box<dyn LinearOperator>, OperatorSource) = match operator {
                OperatorArg::Full => (Box::new(build_nb(&h)), OperatorSource::Full),
                OperatorArg::Reduced => (Box::new(build_nb_reduced(&h)?), OperatorSource::Reduced),
                OperatorArg::Auto => match build_nb_reduced(&h) {
                    Ok(r) => (Box::new(r), OperatorSource::Reduced),
                    Err(_) => (Box::new(build_nb(&h)), OperatorSource::Full),
                },
            };
            let (values, residuals) = if dense {
                (dense_spectrum(op.as_ref(), DEFAULT_DENSE_CAP)?, None)
            } else {
                let opts = KrylovOptions {
                    max_pairs: pairs.min(op.dim()),
                    stop: StopRule::Count,
                    seed: cli.seed,
                    ..KrylovOptions::default()
                };
                let r = leading_spectrum(op.as_ref(), source, &opts)?;
                let res: Vec<f64> = r.pairs.iter().map(|p| p.residual).collect();
                (r.eigenvalues(), Some(res))
            };
            let mut w = output(&cli.out)?;
            match cli.format {
                Format::Csv => io::write_spectrum_csv(&mut w, &values, residuals.as_deref())?,
                Format::Json => writeln!(
                    w,
                    "{}",
                    json!({ "eigenvalues": complex_json(&values), "residuals": residuals })
                )?,
            }
        }
        Command::Detect {
            input,
            groups,
            truth,
            delta,
            operator,
            raw_rows,
        } => {
            let h = io::load_hypergraph(&input)?;
            let opts = DetectOptions {
                groups,
                delta,
                operator: operator_choice(operator),
                normalize_rows: !raw_rows,
                seed: cli.seed,
                ..DetectOptions::default()
            };
            let d = detect(&h, &opts)?;
            let score = match truth {
                Some(p) => {
                    let planted = io::load_labels(p, Some(d.labels.num_groups()))?;
                    Some(overlap(&d.labels, &planted, &GroupPrior::uniform(planted.num_groups()))?)
                }
                None => None,
            };
            let diag = json!({
                "groups": d.groups, "detectable": d.detectable, "rho": d.rho,
                "outliers": d.outliers, "informative": d.informative,
                "eigenvalues": complex_json(&d.eigenvalues), "residuals": d.residuals,
                "truncated": d.truncated, "overlap": score,
            });
            match &cli.out {
                Some(p) => {
                    io::write_labels(io::create(p)?, &d.labels)?;
                    println!("{diag}");
                }
                None if cli.format == Format::Json => println!("{diag}"),
                None => {
                    io::write_labels(std::io::stdout().lock(), &d.labels)?;
                    eprintln!("{diag}");
                }
            }
        }
        Command::Bp {
            input,
            model,
            truth,
            init,
            sigma,
            damping,
            tol,
            max_iter,
            generic,
            log,
        } => {
            let h = io::load_hypergraph(&input)?;
            let kernel = model.kernel()?;
            let prior = GroupPrior::uniform(kernel.q());
            let planted = truth.map(|p| io::load_labels(p, Some(kernel.q()))).transpose()?;
            let init = match init {
                InitArg::Factorized => Init::Factorized { sigma },
                InitArg::Uniform => Init::Uniform,
                InitArg::Planted => Init::Planted(
                    planted
                        .clone()
                        .ok_or_else(|| Error::InvalidParameter("planted init needs --truth".into()))?,
                ),
            };
            let bp_model = match model.kind() {
                Some(kind) if !generic => BpModel::Fast(FastModel::from_kind(&kind)?),
                _ => BpModel::Generic(kernel),
            };
            let config = BPConfig {
                damping,
                tol,
                max_iter,
                init,
                seed: cli.seed,
            };
            let out = bp_run(&h, &bp_model, &prior, &config, planted.as_ref())?;
            if let Some(p) = log {
                serde_json::to_writer_pretty(io::create(p)?, &out.log())?;
            }
            let summary = json!({
                "iterations": out.iterations, "converged": out.converged,
                "overlap": out.overlap, "ties": out.ties,
            });
            match (&cli.out, cli.format) {
                (None, Format::Json) => println!("{summary}"),
                (out_path, _) => {
                    io::write_marginals_csv(output(out_path)?, &out.state)?;
                    eprintln!("{summary}");
                }
            }
        }
        Command::Sweep { spec } => {
            let spec: SweepSpec = serde_json::from_reader(std::fs::File::open(spec)?)?;
            let table = run_sweep(&spec, cli.threads)?;
            let mut w = output(&cli.out)?;
            match cli.format {
                Format::Csv => write!(w, "{}", table.to_csv())?,
                Format::Json => {
                    let rows: Vec<_> = table
                        .rows
                        .iter()
                        .map(|r| {
                            json!({
                                "param": r.param, "method": r.method.name(), "mean_overlap": r.mean(),
                                "stderr": r.stderr(), "samples": r.overlaps.len(), "failures": r.failures,
                            })
                        })
                        .collect();
                    writeln!(w, "{}", json!({ "threshold": table.threshold, "rows": rows }))?;
                }
            }
        }
        Command::LearnKernel { input, labels } => {
            let h = io::load_hypergraph(&input)?;
            let labels = io::load_labels(labels, None)?;
            let est = estimate_kernel(&h, &labels)?;
            match &cli.out {
                Some(p) => {
                    io::write_kernel(io::create(p)?, &est.to_kernel()?)?;
                    print!("{est}");
                }
                None if cli.format == Format::Json => {
                    let rows: Vec<_> = est
                        .counts()
                        .iter()
                        .map(|(m, &n)| json!({ "composition": m, "count": n, "frequency": est.frequency(m), "rate": est.calibrated_rate(m) }))
                        .collect();
                    println!("{}", json!({ "m": est.num_edges(), "compositions": rows }));
                }
                None => print!("{est}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
