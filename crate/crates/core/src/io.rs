//! Plain-text formats.
//!
//! * hypergraph: `N M`, then one line of space-separated vertex ids per edge
//! * labels: one integer per line
//! * kernel: `k q`, then `a1 .. ak rate` per non-zero multiset
//! * CSV dumps of spectra, embeddings and BP marginals

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::bp::BPState;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelAssignment};
use crate::model::KernelTensor;
use crate::spectral::Embedding;

/// Shortest round-trip form, switching to exponent notation for very small or large magnitudes.
fn fmt_f64(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_fields<T: std::str::FromStr>(text: &str, line: usize) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| parse_err(line, format!("cannot parse {t:?}"))))
        .collect()
}

/// Non-empty lines with their 1-based numbers.
fn content_lines(r: impl BufRead) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

pub fn write_hypergraph(mut w: impl Write, h: &Hypergraph) -> Result<()> {
    writeln!(w, "{} {}", h.num_vertices(), h.num_edges())?;
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(|i| i.to_string()).collect();
        writeln!(w, "{}", ids.join(" "))?;
    }
    Ok(())
}

pub fn read_hypergraph(r: impl BufRead) -> Result<Hypergraph> {
    let lines = content_lines(r)?;
    let (first, header) = lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
    let head: Vec<usize> = parse_fields(header, *first)?;
    let [n, m] = head[..] else {
        return Err(parse_err(*first, "header must be `N M`"));
    };
    if lines.len() - 1 != m {
        return Err(parse_err(*first, format!("header announces {m} edges, found {}", lines.len() - 1)));
    }
    let mut edges = Vec::with_capacity(m);
    for (no, text) in &lines[1..] {
        edges.push(parse_fields::<usize>(text, *no)?);
    }
    Hypergraph::new(n, edges)
}

pub fn write_labels(mut w: impl Write, labels: &LabelAssignment) -> Result<()> {
    for &a in labels.labels() {
        writeln!(w, "{a}")?;
    }
    Ok(())
}

/// Reads labels; `q` defaults to `max(label) + 1` (at least 2).
pub fn read_labels(r: impl BufRead, q: Option<usize>) -> Result<LabelAssignment> {
    let mut labels = Vec::new();
    for (no, text) in content_lines(r)? {
        let f: Vec<usize> = parse_fields(&text, no)?;
        if f.len() != 1 {
            return Err(parse_err(no, "expected one label per line"));
        }
        labels.push(f[0]);
    }
    let q = q.unwrap_or_else(|| labels.iter().max().map_or(2, |&m| (m + 1).max(2)));
    LabelAssignment::new(labels, q)
}

pub fn write_kernel(mut w: impl Write, kernel: &KernelTensor) -> Result<()> {
    writeln!(w, "{} {}", kernel.k(), kernel.q())?;
    for (m, rate) in kernel.rates() {
        let labels: Vec<String> = m.iter().map(|a| a.to_string()).collect();
        writeln!(w, "{} {rate:e}", labels.join(" "))?;
    }
    Ok(())
}

pub fn read_kernel(r: impl BufRead) -> Result<KernelTensor> {
    let lines = content_lines(r)?;
    let (first, header) = lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
    let head: Vec<usize> = parse_fields(header, *first)?;
    let [k, q] = head[..] else {
        return Err(parse_err(*first, "header must be `k q`"));
    };
    let mut kernel = KernelTensor::new(k, q)?;
    for (no, text) in &lines[1..] {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != k + 1 {
            return Err(parse_err(*no, format!("expected {k} labels and a rate")));
        }
        let labels: Vec<usize> = parse_fields(&fields[..k].join(" "), *no)?;
        if labels.windows(2).any(|w| w[0] > w[1]) {
            return Err(parse_err(*no, "labels must be sorted"));
        }
        let rate: f64 = fields[k].parse().map_err(|_| parse_err(*no, format!("cannot parse rate {:?}", fields[k])))?;
        kernel.set_rate(&labels, rate).map_err(|e| parse_err(*no, e.to_string()))?;
    }
    Ok(kernel)
}

/// `re,im,residual`; the residual column is left empty when unknown.
pub fn write_spectrum_csv(mut w: impl Write, values: &[Complex64], residuals: Option<&[f64]>) -> Result<()> {
    writeln!(w, "re,im,residual")?;
    for (i, z) in values.iter().enumerate() {
        match residuals {
            Some(r) => writeln!(w, "{},{},{:e}", fmt_f64(z.re), fmt_f64(z.im), r[i])?,
            None => writeln!(w, "{},{},", fmt_f64(z.re), fmt_f64(z.im))?,
        }
    }
    Ok(())
}

/// `vertex,coord1,...`
pub fn write_embedding_csv(mut w: impl Write, e: &Embedding) -> Result<()> {
    let header: Vec<String> = (1..=e.dim()).map(|j| format!("coord{j}")).collect();
    writeln!(w, "vertex,{}", header.join(","))?;
    for i in 0..e.num_vertices() {
        let row: Vec<String> = e.point(i).iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{i},{}", row.join(","))?;
    }
    Ok(())
}

/// `vertex,p0,...`
pub fn write_marginals_csv(mut w: impl Write, state: &BPState) -> Result<()> {
    let q = state.num_groups();
    let header: Vec<String> = (0..q).map(|a| format!("p{a}")).collect();
    writeln!(w, "vertex,{}", header.join(","))?;
    for (i, m) in state.marginals().chunks(q).enumerate() {
        let row: Vec<String> = m.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{i},{}", row.join(","))?;
    }
    Ok(())
}

pub fn load_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    read_hypergraph(BufReader::new(File::open(path)?))
}

pub fn load_labels(path: impl AsRef<Path>, q: Option<usize>) -> Result<LabelAssignment> {
    read_labels(BufReader::new(File::open(path)?), q)
}

pub fn load_kernel(path: impl AsRef<Path>) -> Result<KernelTensor> {
    read_kernel(BufReader::new(File::open(path)?))
}

/// Opens `path` for buffered writing.
pub fn create(path: impl AsRef<Path>) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
