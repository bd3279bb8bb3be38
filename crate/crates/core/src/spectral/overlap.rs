use itertools::Itertools;

use crate::error::{Error, Result};
use crate::hypergraph::LabelAssignment;
use crate::model::GroupPrior;

pub const MAX_BRUTE_FORCE_GROUPS: usize = 8;

/// Largest number of agreeing vertices over all relabelings of `inferred`.
pub fn best_agreement(inferred: &LabelAssignment, planted: &LabelAssignment) -> Result<usize> {
    if inferred.len() != planted.len() {
        return Err(Error::LengthMismatch(inferred.len(), planted.len()));
    }
    let q = planted.num_groups();
    if inferred.num_groups() != q {
        return Err(Error::InvalidLabels(format!(
            "inferred labels use q = {}, planted use q = {q}",
            inferred.num_groups()
        )));
    }
    if q > MAX_BRUTE_FORCE_GROUPS {
        return Err(Error::TooManyGroups(q));
    }
    let mut confusion = vec![vec![0usize; q]; q];
    for (&a, &b) in inferred.labels().iter().zip(planted.labels()) {
        confusion[a][b] += 1;
    }
    Ok((0..q)
        .permutations(q)
        .map(|perm| (0..q).map(|a| confusion[a][perm[a]]).sum::<usize>())
        .max()
        .unwrap_or(0))
}

/// Normalised overlap `(agree / N - max_a n_a) / (1 - max_a n_a)`.
pub fn overlap(inferred: &LabelAssignment, planted: &LabelAssignment, prior: &GroupPrior) -> Result<f64> {
    if prior.q() != planted.num_groups() {
        return Err(Error::InvalidLabels(format!(
            "prior has q = {}, labels have q = {}",
            prior.q(),
            planted.num_groups()
        )));
    }
    let agree = best_agreement(inferred, planted)?;
    let n = planted.len().max(1) as f64;
    let top = prior.max();
    Ok((agree as f64 / n - top) / (1.0 - top))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[usize], q: usize) -> LabelAssignment {
        LabelAssignment::new(v.to_vec(), q).unwrap()
    }

    #[test]
    fn identity_and_permutation() {
        let p = labels(&[0, 1, 2, 2, 1, 0], 3);
        let prior = GroupPrior::uniform(3);
        assert_eq!(overlap(&p, &p, &prior).unwrap(), 1.0);
        let perm = labels(&[2, 0, 1, 1, 0, 2], 3);
        assert_eq!(overlap(&perm, &p, &prior).unwrap(), 1.0);
    }

    #[test]
    fn three_quarters_agreement() {
        let p = labels(&[0, 0, 1, 1], 2);
        let i = labels(&[0, 0, 1, 0], 2);
        assert_eq!(overlap(&i, &p, &GroupPrior::uniform(2)).unwrap(), 0.5);
    }

    #[test]
    fn too_many_groups() {
        let p = labels(&[0; 3], 9);
        assert!(matches!(best_agreement(&p, &p), Err(Error::TooManyGroups(9))));
        assert!(best_agreement(&labels(&[0], 2), &labels(&[0, 1], 2)).is_err());
    }
}
