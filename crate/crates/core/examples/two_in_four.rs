//! Disassortative structure: spectral detection on planted 2-in-4-SAT finds the negative outlier.

use hypernb::model::{detectability, sample, two_in_four_kernel};
use hypernb::spectral::{adjacency_detect, detect, overlap, DetectOptions};
use hypernb::{GroupPrior, Result};

pub fn run() -> Result<()> {
    let prior = GroupPrior::uniform(2);
    for c in [2.5, 4.5] {
        let kernel = two_in_four_kernel(c)?;
        let pred = detectability(&kernel, &prior)?;
        let (h, planted) = sample(&kernel, &prior, 4000, 5)?;
        let nbo = detect(&h, &DetectOptions { groups: Some(2), ..DetectOptions::default() })?;
        let adj = adjacency_detect(&h, 2, 0)?;
        println!(
            "c={c:.1}: predicted mu2={:.2}, informative {:.2?}, overlap nbo={:.3} adjacency={:.3}",
            pred.mu2[0].re,
            nbo.informative,
            overlap(&nbo.labels, &planted, &prior)?,
            overlap(&adj.labels, &planted, &prior)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
