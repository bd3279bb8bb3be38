//! Recover the generating rule from spectral labels: composition counts of the hyperedges.

use hypernb::learn::estimate_kernel;
use hypernb::model::{sample, two_in_four_kernel};
use hypernb::spectral::{detect, DetectOptions};
use hypernb::{GroupPrior, Result};

pub fn run() -> Result<()> {
    let (h, planted) = sample(&two_in_four_kernel(4.0)?, &GroupPrior::uniform(2), 6000, 21)?;
    let found = detect(&h, &DetectOptions::default())?;
    println!("detect chose q = {}", found.groups);

    let from_spectral = estimate_kernel(&h, &found.labels)?;
    print!("{from_spectral}");
    let from_truth = estimate_kernel(&h, &planted)?;
    println!("planted labels: {{0,0,1,1}} rate {:.2}", from_truth.calibrated_rate(&[0, 0, 1, 1]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
