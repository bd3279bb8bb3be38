//! Closed-form predictions: bulk radius, informative eigenvalues and detectability thresholds.

use hypernb::model::{detectability, hsbm_critical_eps_tilde, hsbm_kernel, two_in_four_critical_degree, two_in_four_kernel};
use hypernb::{GroupPrior, Result};

pub fn run() -> Result<()> {
    let eps_c = hsbm_critical_eps_tilde(3, 3, 4.0, 1e-12)?;
    println!("HSBM k=3 q=3 c=4: critical eps_tilde = {eps_c:.4}");
    for eps in [0.10, 0.14, 0.22] {
        let p = detectability(&hsbm_kernel(3, 3, 4.0, eps)?, &GroupPrior::uniform(3))?;
        println!(
            "  eps_tilde={eps:.2}  mu1={:.3}  radius={:.3}  mu2={:.3}  detectable={}",
            p.mu1,
            p.bulk_radius,
            p.mu2[0].re,
            p.detectable
        );
    }

    let c_c = two_in_four_critical_degree(1e-12)?;
    println!("planted 2-in-4: critical degree = {c_c:.6}");
    for c in [2.5, 4.0] {
        let p = detectability(&two_in_four_kernel(c)?, &GroupPrior::uniform(2))?;
        println!(
            "  c={c:.1}  radius={:.3}  mu2={:.3}  c(k-1)lambda^2={:.3}",
            p.bulk_radius, p.mu2[0].re, p.criticality
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
