//! Sample a planted instance, inspect its degrees and round-trip it through the text formats.

use hypernb::io::{read_hypergraph, read_labels, write_hypergraph, write_labels};
use hypernb::model::{group_degree, hsbm_kernel, sample};
use hypernb::{GroupPrior, Result};

pub fn run() -> Result<()> {
    let kernel = hsbm_kernel(3, 3, 4.0, 0.14)?;
    let prior = GroupPrior::uniform(3);
    let (h, labels) = sample(&kernel, &prior, 5000, 11)?;
    h.validate().expect("sampled hypergraphs are valid");

    let degrees = h.degrees();
    let mean = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
    let expected = group_degree(&kernel, &prior).mean;
    println!("N={} M={} mean degree {mean:.3} (expected {expected:.3})", h.num_vertices(), h.num_edges());
    println!("group sizes {:?}", labels.group_sizes());

    let mut graph_text = Vec::new();
    write_hypergraph(&mut graph_text, &h)?;
    let mut label_text = Vec::new();
    write_labels(&mut label_text, &labels)?;
    assert_eq!(read_hypergraph(&graph_text[..])?, h);
    assert_eq!(read_labels(&label_text[..], Some(3))?, labels);
    println!("round trip ok ({} bytes of edges)", graph_text.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
