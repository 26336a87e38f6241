//! Poisson-binomial engine against brute-force outcome enumeration, and the
//! analytic power against an outcome-weighted evaluation of the test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signtest::*;

/// Brute-force pmf of the positive-sign count: sum the probability of every
/// one of the 2^q sign patterns.
fn enumerated_pmf(p: &[f64]) -> Vec<f64> {
    let q = p.len();
    let mut pmf = vec![0.0f64; q + 1];
    for mask in 0u64..(1u64 << q) {
        let mut prob = 1.0;
        let mut positives = 0usize;
        for (i, &pi) in p.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prob *= pi;
                positives += 1;
            } else {
                prob *= 1.0 - pi;
            }
        }
        pmf[positives] += prob;
    }
    pmf
}

#[test]
fn dp_matches_enumeration_on_random_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let q = rng.random_range(1..=12);
        let p: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
        let marginals = MarginalProbabilities::new(p.clone()).unwrap();
        let dp = poisson_binomial_pmf(&marginals);
        let brute = enumerated_pmf(&p);
        for j in 0..=q {
            assert!(
                (dp[j] - brute[j]).abs() <= 1e-12,
                "pmf mismatch at q={q}, j={j}: {} vs {}",
                dp[j],
                brute[j]
            );
        }
    }
}

#[test]
fn power_matches_outcome_weighted_test() {
    // Independent route: P(reject) = sum over sign patterns of
    // P(pattern) * phi(statistic of pattern), with phi from the closed-form
    // constants. Must agree with the tail-pair formula.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let q = rng.random_range(1..=10);
        // wide level range on purpose: covers the regime where the boundary
        // atom is the unpaired central one (alpha > 1/2, even q)
        let alpha = 0.02 + 0.93 * rng.random::<f64>();
        let p: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
        let constants = critical_constants(q, alpha, Side::TwoSided).unwrap();
        let boundary = {
            // boundary weight implied by the group counts, as used by run_test
            let stats =
                enumerate_group_statistics(&Sample::new(vec![1.0; q]).unwrap(), Side::TwoSided)
                    .unwrap();
            let above = stats.iter().filter(|&&t| t > constants.critical_t).count() as f64;
            let at = stats.iter().filter(|&&t| t == constants.critical_t).count() as f64;
            (2f64.powi(q as i32) * alpha - above) / at
        };
        let mut expected_phi = 0.0f64;
        for mask in 0u64..(1u64 << q) {
            let mut prob = 1.0;
            let mut sum = 0i64;
            for (i, &pi) in p.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prob *= pi;
                    sum += 1;
                } else {
                    prob *= 1.0 - pi;
                    sum -= 1;
                }
            }
            let statistic = sum.abs();
            expected_phi += prob
                * if statistic > constants.critical_t {
                    1.0
                } else if statistic == constants.critical_t {
                    boundary
                } else {
                    0.0
                };
        }
        let marginals = MarginalProbabilities::new(p).unwrap();
        let analytic = power_from_proposition(&marginals, alpha).unwrap();
        assert!(
            (analytic - expected_phi).abs() < 1e-12,
            "q={q} alpha={alpha}: {analytic} vs {expected_phi}"
        );
    }
}

#[test]
fn unbiasedness_on_random_upper_half_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let q = rng.random_range(3..=12);
        let alpha = if rng.random::<bool>() { 0.05 } else { 0.10 };
        // all p_i >= 1/2, strictly above almost surely
        let p: Vec<f64> = (0..q).map(|_| 0.5 + 0.5 * rng.random::<f64>()).collect();
        let strict = p.iter().any(|&v| v > 0.5);
        let marginals = MarginalProbabilities::new(p).unwrap();
        let power = power_from_proposition(&marginals, alpha).unwrap();
        assert!(power >= alpha - 1e-12, "power {power} below alpha {alpha}");
        if strict {
            // all coordinates strictly above 1/2 almost surely
            assert!(power > alpha, "power {power} not above alpha {alpha}");
        }
    }
    // mirrored case: all p_i <= 1/2
    for _ in 0..100 {
        let q = rng.random_range(3..=12);
        let p: Vec<f64> = (0..q).map(|_| 0.5 * rng.random::<f64>()).collect();
        let marginals = MarginalProbabilities::new(p).unwrap();
        let power = power_from_proposition(&marginals, 0.05).unwrap();
        assert!(power >= 0.05 - 1e-12);
    }
}

#[test]
fn power_curve_is_monotone_in_distance_from_null() {
    let sigma = [1.0, 2.0, 0.5, 3.0, 1.5, 0.8, 2.2];
    let grid: Vec<f64> = (0..=60).map(|k| k as f64 * 0.1).collect();
    let curve = power_curve(&sigma, 0.0, &grid, 0.05).unwrap();
    for w in curve.windows(2) {
        assert!(
            w[1].1 >= w[0].1 - 1e-12,
            "power decreased between mu={} and mu={}",
            w[0].0,
            w[1].0
        );
    }
    // and symmetric around the null
    let left = power_curve(&sigma, 0.0, &[-1.7], 0.05).unwrap()[0].1;
    let right = power_curve(&sigma, 0.0, &[1.7], 0.05).unwrap()[0].1;
    assert!((left - right).abs() < 1e-12);
}

#[test]
fn permutation_invariance() {
    let base = vec![0.9, 0.55, 0.7, 0.85, 0.6];
    let reference =
        power_from_proposition(&MarginalProbabilities::new(base.clone()).unwrap(), 0.05).unwrap();
    let mut perm = base;
    // a few rotations and swaps
    for _ in 0..5 {
        perm.rotate_left(1);
        perm.swap(0, 3);
        let value =
            power_from_proposition(&MarginalProbabilities::new(perm.clone()).unwrap(), 0.05)
                .unwrap();
        assert!((value - reference).abs() < 1e-13);
    }
}
