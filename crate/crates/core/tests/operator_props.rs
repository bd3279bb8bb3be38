mod common;

use common::{containment_gap, hypergraph, nb_matrix_by_enumeration, uniform_hypergraph};
use hypernb::model::{hsbm_kernel, sample, two_in_four_kernel};
use hypernb::spectral::{build_nb, build_nb_reduced, leading_spectrum, KrylovOptions, LinearOperator, OperatorSource};
use hypernb::GroupPrior;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn apply(op: &dyn LinearOperator, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; op.dim()];
    op.apply(x, &mut y);
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn nonzero_count_matches_formula(h in uniform_hypergraph(40, 40, 3)) {
        let b = build_nb(&h);
        let counted: usize = (0..b.dim()).map(|p| b.row(p).len()).sum();
        let formula: usize = h.degrees().iter().map(|&d| d * d.saturating_sub(1) * 2).sum();
        prop_assert_eq!(b.nnz(), counted);
        prop_assert_eq!(counted, formula);
    }

    #[test]
    fn operator_matches_enumerated_matrix(h in hypergraph(20, 15, 2..=4), seed in any::<u64>()) {
        let b = build_nb(&h);
        let (pairs, dense) = nb_matrix_by_enumeration(&h);
        let idx = h.directed_edges();
        // map enumeration order to the operator's internal order
        let pos: Vec<usize> = pairs.iter().map(|&(i, mu)| idx.index_of(&h, i, mu).unwrap()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..b.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = apply(&b, &x);
        let mut yt = vec![0.0; b.dim()];
        b.apply_transpose(&x, &mut yt);
        for (r, row) in dense.iter().enumerate() {
            let want: f64 = row.iter().enumerate().map(|(c, v)| v * x[pos[c]]).sum();
            let want_t: f64 = (0..dense.len()).map(|c| dense[c][r] * x[pos[c]]).sum();
            prop_assert!((y[pos[r]] - want).abs() < 1e-12);
            prop_assert!((yt[pos[r]] - want_t).abs() < 1e-12);
        }
    }
}

#[test]
fn reduced_spectrum_is_contained_in_full() {
    for s in 0..20u64 {
        let n = 30 + 3 * s as usize;
        let (h, _) = if s % 2 == 0 {
            sample(&hsbm_kernel(3, 3, 2.5, 0.3).unwrap(), &GroupPrior::uniform(3), n, s).unwrap()
        } else {
            sample(&two_in_four_kernel(2.0).unwrap(), &GroupPrior::uniform(2), n, s).unwrap()
        };
        let worst = containment_gap(&h);
        assert!(worst < 1e-8, "instance {s}: gap {worst:e}");
    }
}

#[test]
fn krylov_residuals_meet_tolerance() {
    let (h, _) = sample(&hsbm_kernel(3, 3, 4.0, 0.14).unwrap(), &GroupPrior::uniform(3), 3000, 4).unwrap();
    let op = build_nb_reduced(&h).unwrap();
    let opts = KrylovOptions { max_pairs: 6, ..KrylovOptions::default() };
    let res = leading_spectrum(&op, OperatorSource::Reduced, &opts).unwrap();
    for pair in &res.pairs {
        let (re, im) = (&pair.re, &pair.im);
        let are = apply(&op, re);
        let (lr, li) = (pair.value.re, pair.value.im);
        let mut num = 0.0;
        let mut den = 0.0;
        if im.is_empty() {
            for i in 0..re.len() {
                num += (are[i] - lr * re[i]).powi(2);
                den += re[i] * re[i];
            }
        } else {
            let aim = apply(&op, im);
            for i in 0..re.len() {
                num += (are[i] - (lr * re[i] - li * im[i])).powi(2) + (aim[i] - (li * re[i] + lr * im[i])).powi(2);
                den += re[i] * re[i] + im[i] * im[i];
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel <= 1e-8 * 1.01, "residual {rel:e} for {}", pair.value);
    }
}

#[test]
fn leading_eigenvalue_is_branching_factor() {
    let prior = GroupPrior::uniform(3);
    let (h, _) = sample(&hsbm_kernel(3, 3, 4.0, 0.14).unwrap(), &prior, 20000, 8).unwrap();
    let opts = KrylovOptions { max_pairs: 1, ..KrylovOptions::default() };
    let res = leading_spectrum(&build_nb_reduced(&h).unwrap(), OperatorSource::Reduced, &opts).unwrap();
    let top = res.pairs[0].value;
    assert!(top.im.abs() < 1e-8 && (top.re - 8.0).abs() < 0.4, "top eigenvalue {top}");
}

