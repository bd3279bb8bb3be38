//! Statistical checks of the generator and estimators against the model's own predictions.
mod common;

use common::mean_sd;
use hypernb::learn::estimate_kernel;
use hypernb::model::{binomial, hsbm_kernel, sample, two_in_four_kernel};
use hypernb::spectral::{build_nb, trace_moment};
use hypernb::{GroupPrior, LabelAssignment};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

#[test]
fn trace_law() {
    let (k, c) = (3.0, 4.0);
    let prior = GroupPrior::uniform(3);
    let kernel = hsbm_kernel(3, 3, c, 0.14).unwrap();
    let mut moments = vec![Vec::new(); 3];
    for s in 0..20u64 {
        let (h, _) = sample(&kernel, &prior, 2000, 100 + s).unwrap();
        let b = build_nb(&h);
        for r in 1..=3u32 {
            moments[r as usize - 1].push(trace_moment(&b, r));
        }
    }
    for r in 1..=3 {
        let (mean, sd) = mean_sd(&moments[r - 1]);
        let want = ((k - 1.0) * c).powi(r as i32);
        assert!((mean - want).abs() <= 3.0 * sd, "r={r}: mean {mean} vs {want} (sd {sd})");
    }
}

#[test]
fn degrees_are_poisson() {
    let c = 4.0;
    let (h, _) = sample(&hsbm_kernel(3, 3, c, 0.14).unwrap(), &GroupPrior::uniform(3), 30000, 17).unwrap();
    let d = h.degrees();
    let n = d.len() as f64;
    let mean = d.iter().sum::<usize>() as f64 / n;
    assert!((mean - c).abs() <= 3.0 * (c / n).sqrt(), "mean degree {mean}");

    let cap = 10;
    let mut observed = vec![0.0; cap + 1];
    for &x in &d {
        observed[x.min(cap)] += 1.0;
    }
    let pois = Poisson::new(c).unwrap();
    let mut expected: Vec<f64> = (0..cap).map(|x| n * pois.pmf(x as u64)).collect();
    expected.push(n - expected.iter().sum::<f64>());
    let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let p = 1.0 - ChiSquared::new(cap as f64).unwrap().cdf(chi2);
    assert!(p > 0.01, "chi2 {chi2}, p {p}");
}

#[test]
fn composition_counts_match_kernel() {
    let (n, c) = (20000usize, 4.0);
    for (kernel, prior) in [
        (hsbm_kernel(3, 3, c, 0.3).unwrap(), GroupPrior::uniform(3)),
        (two_in_four_kernel(c).unwrap(), GroupPrior::uniform(2)),
    ] {
        let (h, labels) = sample(&kernel, &prior, n, 5).unwrap();
        let est = estimate_kernel(&h, &labels).unwrap();
        let sizes = labels.group_sizes();
        for (m, &count) in est.counts() {
            let possible: f64 = (0..kernel.q())
                .map(|a| binomial(sizes[a], m.iter().filter(|&&x| x == a).count()))
                .product();
            let mean = possible * kernel.rate(m) / (n as f64).powi(kernel.k() as i32 - 1);
            let sd = mean.sqrt().max(1.0);
            assert!((count as f64 - mean).abs() <= 4.0 * sd, "{m:?}: {count} vs {mean}");
        }
    }
}

#[test]
fn calibrated_rates_recover_the_kernel() {
    let kernel = hsbm_kernel(3, 3, 4.0, 0.3).unwrap();
    let (h, labels) = sample(&kernel, &GroupPrior::uniform(3), 30000, 8).unwrap();
    let est = estimate_kernel(&h, &labels).unwrap();
    for (m, &rate) in kernel.rates() {
        let got = est.calibrated_rate(m);
        assert!((got - rate).abs() <= 0.1 * rate, "{m:?}: {got} vs {rate}");
    }
    let learned = est.to_kernel().unwrap();
    assert_eq!(learned.rates().len(), kernel.rates().len());
}

#[test]
fn estimate_invariants() {
    let (h, labels) = sample(&two_in_four_kernel(3.0).unwrap(), &GroupPrior::uniform(2), 3000, 1).unwrap();
    // perturb the labels so every composition appears
    let noisy: Vec<usize> = labels.labels().iter().enumerate().map(|(i, &a)| if i % 5 == 0 { 1 - a } else { a }).collect();
    let est = estimate_kernel(&h, &LabelAssignment::new(noisy.clone(), 2).unwrap()).unwrap();
    assert_eq!(est.counts().values().sum::<usize>(), h.num_edges());
    let total: f64 = est.counts().keys().map(|m| est.frequency(m)).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(est.counts().keys().all(|m| est.calibrated_rate(m) >= 0.0));

    let flipped: Vec<usize> = noisy.iter().map(|a| 1 - a).collect();
    let est2 = estimate_kernel(&h, &LabelAssignment::new(flipped, 2).unwrap()).unwrap();
    for m in est.counts().keys() {
        let mut image: Vec<usize> = m.iter().map(|a| 1 - a).collect();
        image.sort_unstable();
        assert_eq!(est.frequency(m), est2.frequency(&image));
    }
}
