mod common;

use common::{brute_force_overlap, labels};
use hypernb::model::{hsbm_kernel, sample, two_in_four_kernel};
use hypernb::spectral::{
    build_nb_reduced, cluster, detect, embed, leading_spectrum, overlap, DetectOptions, KrylovOptions,
    OperatorSource, StopRule,
};
use hypernb::GroupPrior;
use proptest::prelude::*;

fn assignment(q: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (5usize..60).prop_flat_map(move |n| (proptest::collection::vec(0..q, n), proptest::collection::vec(0..q, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn overlap_matches_brute_force((q, (a, b)) in (2usize..=4).prop_flat_map(|q| (Just(q), assignment(q)))) {
        let got = overlap(&labels(a.clone(), q), &labels(b.clone(), q), &GroupPrior::uniform(q)).unwrap();
        let want = brute_force_overlap(&a, &b, q, 1.0 / q as f64);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn overlap_is_permutation_invariant(shift in 1usize..4, (a, b) in assignment(4)) {
        let prior = GroupPrior::uniform(4);
        let moved: Vec<usize> = a.iter().map(|&x| (x + shift) % 4).collect();
        let base = overlap(&labels(a, 4), &labels(b.clone(), 4), &prior).unwrap();
        prop_assert_eq!(overlap(&labels(moved, 4), &labels(b, 4), &prior).unwrap(), base);
    }

}

#[test]
fn eigenvector_scale_leaves_labels_unchanged() {
    let prior = GroupPrior::uniform(3);
    let (h, _) = sample(&hsbm_kernel(3, 3, 4.0, 0.08).unwrap(), &prior, 3000, 1).unwrap();
    let opts = KrylovOptions { max_pairs: 3, ..KrylovOptions::default() };
    let spec = leading_spectrum(&build_nb_reduced(&h).unwrap(), OperatorSource::Reduced, &opts).unwrap();
    let base = cluster(&embed(&spec, &h, &[1, 2]).unwrap().row_normalized(), 3, 10, 0).unwrap().labels;
    for factor in [-3.0, 0.25, 1e4] {
        let mut scaled = spec.clone();
        scaled.scale_vector(1, factor);
        scaled.scale_vector(2, -factor);
        let e = embed(&scaled, &h, &[1, 2]).unwrap();
        let l = cluster(&e.row_normalized(), 3, 10, 0).unwrap().labels;
        assert_eq!(overlap(&base, &l, &prior).unwrap(), 1.0, "factor {factor}");
    }
}

#[test]
fn degenerate_pair_gives_orthonormal_columns() {
    let prior = GroupPrior::uniform(3);
    let (h, _) = sample(&hsbm_kernel(3, 3, 4.0, 0.08).unwrap(), &prior, 3000, 2).unwrap();
    let opts = KrylovOptions { max_pairs: 3, ..KrylovOptions::default() };
    let spec = leading_spectrum(&build_nb_reduced(&h).unwrap(), OperatorSource::Reduced, &opts).unwrap();
    let e = embed(&spec, &h, &[1, 2]).unwrap();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    assert_eq!(e.dim(), 2);
    assert!((dot(e.column(0), e.column(0)) - 1.0).abs() < 1e-12);
    assert!((dot(e.column(1), e.column(1)) - 1.0).abs() < 1e-12);
    assert!(dot(e.column(0), e.column(1)).abs() < 0.2);
}

#[test]
fn bulk_confinement() {
    let cases = [
        (hsbm_kernel(3, 3, 4.0, 0.14).unwrap(), GroupPrior::uniform(3), 3usize),
        (hsbm_kernel(3, 3, 4.0, 0.3).unwrap(), GroupPrior::uniform(3), 3),
        (two_in_four_kernel(4.0).unwrap(), GroupPrior::uniform(2), 2),
    ];
    for (kernel, prior, q) in cases {
        let (h, _) = sample(&kernel, &prior, 10000, 3).unwrap();
        let opts = KrylovOptions {
            max_pairs: 8,
            stop: StopRule::OutsideBulk { delta: 0.05, patience: 5 },
            max_restarts: 400,
            ..KrylovOptions::default()
        };
        let spec = leading_spectrum(&build_nb_reduced(&h).unwrap(), OperatorSource::Reduced, &opts).unwrap();
        let rho = spec.bulk_radius_estimate;
        let k = 4.0 - (q == 3) as u8 as f64;
        let outside = spec
            .pairs
            .iter()
            .filter(|p| p.value.norm() > 1.1 * rho && (p.value.re + (k - 1.0)).abs() > 1e-6)
            .count();
        assert!(outside <= q, "{outside} eigenvalues outside the bulk");
    }
}

#[test]
fn detect_verdicts() {
    let prior3 = GroupPrior::uniform(3);
    let (h, _) = sample(&hsbm_kernel(3, 3, 4.0, 0.22).unwrap(), &prior3, 30000, 5).unwrap();
    let d = detect(&h, &DetectOptions::default()).unwrap();
    assert!(!d.detectable, "outliers {:?}", d.outliers);
    assert_eq!(d.labels.group_sizes()[0], 30000);

    let (h, planted) = sample(&hsbm_kernel(3, 3, 4.0, 0.14).unwrap(), &prior3, 30000, 5).unwrap();
    let d = detect(&h, &DetectOptions::default()).unwrap();
    assert_eq!(d.groups, 3, "outliers {:?}", d.outliers);
    assert!(overlap(&d.labels, &planted, &prior3).unwrap() > 0.0);

    let prior2 = GroupPrior::uniform(2);
    let (h, planted) = sample(&two_in_four_kernel(4.0).unwrap(), &prior2, 30000, 5).unwrap();
    let d = detect(&h, &DetectOptions::default()).unwrap();
    assert_eq!(d.groups, 2, "outliers {:?}", d.outliers);
    assert!(d.informative[0] < 0.0);
    assert!(overlap(&d.labels, &planted, &prior2).unwrap() > 0.0);
}

#[test]
fn detect_is_deterministic() {
    let prior = GroupPrior::uniform(2);
    let (h, _) = sample(&two_in_four_kernel(4.5).unwrap(), &prior, 4000, 6).unwrap();
    let opts = DetectOptions { groups: Some(2), seed: 9, ..DetectOptions::default() };
    assert_eq!(detect(&h, &opts).unwrap(), detect(&h, &opts).unwrap());
}
