//! The BP Jacobian at the factorized fixed point equals the non-backtracking operator times `T`.

use hypernb::bp::bp_jacobian_check;
use hypernb::model::{hsbm_kernel, sample, transition_matrix};
use hypernb::{GroupPrior, Result};

pub fn run() -> Result<()> {
    let kernel = hsbm_kernel(3, 2, 3.0, 0.3)?;
    let prior = GroupPrior::uniform(2);
    let t = transition_matrix(&kernel, &prior)?;
    println!("T = {:.4?}", t.matrix);
    let (h, _) = sample(&kernel, &prior, 40, 2)?;
    let check = bp_jacobian_check(&h, &kernel, &prior)?;
    println!(
        "{} messages: max |J - B x T| = {:.2e} (largest entry {:.3})",
        h.directed_edges().len(),
        check.max_abs_deviation,
        check.max_entry
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
