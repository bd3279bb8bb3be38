//! Belief propagation on an HSBM instance, with the closed-form field and the generic one.

use hypernb::bp::{bp_run, factorized_stability, BPConfig, BpModel, FastModel};
use hypernb::model::{sample, ModelKind};
use hypernb::Result;

pub fn run() -> Result<()> {
    let kind = ModelKind::Hsbm { k: 3, q: 3, c: 4.0, eps_tilde: 0.08 };
    let kernel = kind.kernel()?;
    let prior = kind.prior();
    let (h, planted) = sample(&kernel, &prior, 3000, 9)?;

    let stability = factorized_stability(&kernel, &prior)?;
    println!("factorized fixed point: c(k-1)lambda^2 = {:.3}, stable = {}", stability.value, stability.stable);

    let config = BPConfig::default();
    for (name, model) in [
        ("closed-form field", BpModel::Fast(FastModel::from_kind(&kind)?)),
        ("generic field", BpModel::Generic(kernel.clone())),
    ] {
        let out = bp_run(&h, &model, &prior, &config, Some(&planted))?;
        println!(
            "{name}: overlap {:.3} after {} iterations (converged {})",
            out.overlap.unwrap_or(f64::NAN),
            out.iterations,
            out.converged
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
