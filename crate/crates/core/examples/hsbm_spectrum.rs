//! Dense spectrum of the reduced operator for a small HSBM instance, compared with predictions.

use hypernb::model::{detectability, hsbm_kernel, sample};
use hypernb::spectral::{build_nb_reduced, dense_spectrum, DEFAULT_DENSE_CAP};
use hypernb::{GroupPrior, Result};

pub fn run() -> Result<()> {
    let prior = GroupPrior::uniform(3);
    for eps in [0.10, 0.22] {
        let kernel = hsbm_kernel(3, 3, 4.0, eps)?;
        let pred = detectability(&kernel, &prior)?;
        let (h, _) = sample(&kernel, &prior, 600, 3)?;
        let values = dense_spectrum(&build_nb_reduced(&h)?, DEFAULT_DENSE_CAP)?;
        let radius = 1.05 * pred.bulk_radius;
        let outside: Vec<f64> = values
            .iter()
            .filter(|z| z.im.abs() < 1e-8 && z.norm() > radius)
            .map(|z| z.re)
            .collect();
        println!(
            "eps_tilde={eps:.2}: predicted mu1={:.2} mu2={:.2}, real eigenvalues outside {radius:.2}: {outside:.2?}",
            pred.mu1, pred.mu2[0].re
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
