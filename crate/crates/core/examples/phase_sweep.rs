//! A small overlap sweep across the 2-in-4 transition, printed as CSV.

use hypernb::model::ModelKind;
use hypernb::sweep::{run_sweep, Method, Parameter, SweepSpec};
use hypernb::Result;

pub fn run() -> Result<()> {
    let spec = SweepSpec {
        model: ModelKind::TwoInFour { c: 3.0 },
        parameter: Parameter::C,
        grid: vec![2.0, 3.0, 4.0, 5.0],
        n: 2000,
        samples: 2,
        methods: vec![Method::Nbo, Method::Adjacency, Method::Bp],
        seed: 1,
    };
    let table = run_sweep(&spec, 2)?;
    print!("{}", table.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
