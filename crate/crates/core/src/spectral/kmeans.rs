//! Hard k-means with k-means++ seeding and restarts.

use rand::Rng;

use super::embed::Embedding;
use crate::error::{Error, Result};
use crate::hypergraph::LabelAssignment;
use crate::rng::{substream, Stream};

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub labels: LabelAssignment,
    /// Within-cluster sum of squares of the best restart.
    pub inertia: f64,
    /// All points coincide; labels are all zero.
    pub degenerate: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Clusters the rows of `e` into `q` groups; the best of `restarts` runs wins.
pub fn cluster(e: &Embedding, q: usize, restarts: usize, seed: u64) -> Result<Clustering> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("need q >= 2, got {q}")));
    }
    let n = e.num_vertices();
    let points: Vec<Vec<f64>> = (0..n).map(|i| e.point(i)).collect();
    let spread = points
        .iter()
        .map(|p| sq_dist(p, &points[0]))
        .fold(0.0, f64::max);
    let scale = points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>()).fold(0.0, f64::max);
    if n == 0 || e.dim() == 0 || spread <= 1e-24 * scale.max(1e-300) {
        return Ok(Clustering {
            labels: LabelAssignment::uniform(n, q)?,
            inertia: 0.0,
            degenerate: true,
        });
    }

    let mut rng = substream(seed, Stream::KMeans);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let (inertia, labels) = lloyd(&points, q, &mut rng);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    let (inertia, labels) = best.unwrap();
    Ok(Clustering {
        labels: LabelAssignment::new(labels, q)?,
        inertia,
        degenerate: false,
    })
}

fn plus_plus(points: &[Vec<f64>], q: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < q {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[pick].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, centers.last().unwrap()));
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], q: usize, rng: &mut impl Rng) -> (f64, Vec<usize>) {
    let dim = points[0].len();
    let mut centers = plus_plus(points, q, rng);
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..MAX_ITER {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let (c, _) = nearest(p, &centers);
            if c != *l {
                *l = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; q];
        let mut counts = vec![0usize; q];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        for c in 0..q {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // re-seed an empty cluster at the point farthest from its centre
                let far = points
                    .iter()
                    .zip(&labels)
                    .map(|(p, &l)| sq_dist(p, &centers[l]))
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(i, _)| i)
                    .unwrap();
                centers[c] = points[far].clone();
                labels[far] = c;
            }
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    (inertia, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_two_clouds() {
        let col: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 1.0 + 0.01 * i as f64 } else { -1.0 }).collect();
        let e = Embedding::from_columns(40, vec![col.clone()]).unwrap();
        let c = cluster(&e, 2, 10, 3).unwrap();
        assert!(!c.degenerate);
        for i in 0..40 {
            assert_eq!(c.labels.get(i) == c.labels.get(0), i % 2 == 0);
        }
    }

    #[test]
    fn identical_points_are_degenerate() {
        let e = Embedding::from_columns(5, vec![vec![0.3; 5], vec![-1.0; 5]]).unwrap();
        let c = cluster(&e, 3, 10, 0).unwrap();
        assert!(c.degenerate);
        assert!(c.labels.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn seeded_and_deterministic() {
        let col: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64).collect();
        let e = Embedding::from_columns(100, vec![col]).unwrap();
        assert_eq!(cluster(&e, 3, 5, 8).unwrap(), cluster(&e, 3, 5, 8).unwrap());
    }
}
