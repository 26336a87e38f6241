//! Cross-checks between the analytic size/power engines and the simulation
//! oracle. Seeds are fixed, so these are deterministic; tolerances are 4
//! standard errors plus a float-level slack for the cases where the
//! simulated variance is zero.

use signtest::*;

fn rule() -> QuadratureRule {
    gauss_hermite(1000).unwrap()
}

#[test]
fn equicorrelated_size_agrees_with_simulation() {
    let rule = rule();
    let model = EquicorrelatedModel::new(7, 0.3).unwrap();
    let analytic = equicorrelated_size(&model, 0.05, &rule).unwrap();
    let sampler = SamplerSpec::Equicorrelated {
        q: 7,
        rho: 0.3,
        mu: 0.0,
    };
    let spec = TestSpec::new(0.0, 0.05, Side::TwoSided).unwrap();
    let report = estimate_rejection(&sampler, &spec, 300_000, 314).unwrap();
    assert!(
        (analytic - report.mean_phi).abs() <= 4.0 * report.std_error + 1e-12,
        "analytic {analytic} vs simulated {} (se {})",
        report.mean_phi,
        report.std_error
    );
}

#[test]
fn minimal_pair_size_agrees_with_simulation() {
    let model = MinimalPairModel::new(7, 0.8).unwrap();
    let analytic = minimal_pair_size(&model, 0.05).unwrap();
    assert!(analytic > 0.05);
    let sampler = SamplerSpec::MinimalPair {
        q: 7,
        rho: 0.8,
        mu: 0.0,
    };
    let spec = TestSpec::new(0.0, 0.05, Side::TwoSided).unwrap();
    let report = estimate_rejection(&sampler, &spec, 300_000, 159).unwrap();
    assert!(
        (analytic - report.mean_phi).abs() <= 4.0 * report.std_error + 1e-12,
        "analytic {analytic} vs simulated {} (se {})",
        report.mean_phi,
        report.std_error
    );
}

#[test]
fn heterogeneous_null_is_exact() {
    let sampler = SamplerSpec::Independent {
        mu: 0.0,
        sigma: vec![1.0, 2.0, 5.0, 10.0, 0.1, 3.0, 7.0],
    };
    let spec = TestSpec::new(0.0, 0.05, Side::TwoSided).unwrap();
    let report = estimate_rejection(&sampler, &spec, 100_000, 72).unwrap();
    assert!(
        (report.mean_phi - 0.05).abs() <= 4.0 * report.std_error + 1e-12,
        "null size {} (se {})",
        report.mean_phi,
        report.std_error
    );
}

#[test]
fn analytic_power_agrees_with_simulation_off_the_null() {
    // shifted alternative with unequal scales
    let sigma = vec![1.0, 2.0, 0.5, 3.0, 1.5];
    let mu = 1.2;
    let p: Vec<f64> = sigma.iter().map(|&s| normal::cdf(mu / s)).collect();
    let analytic = power_from_proposition(&MarginalProbabilities::new(p).unwrap(), 0.05).unwrap();
    let sampler = SamplerSpec::Independent {
        mu,
        sigma: sigma.clone(),
    };
    let spec = TestSpec::new(0.0, 0.05, Side::TwoSided).unwrap();
    let report = estimate_rejection(&sampler, &spec, 300_000, 2718).unwrap();
    assert!(
        (analytic - report.mean_phi).abs() <= 4.0 * report.std_error + 1e-12,
        "analytic {analytic} vs simulated {} (se {})",
        report.mean_phi,
        report.std_error
    );
}

#[test]
fn expected_phi_and_coin_flip_agree_but_phi_is_tighter() {
    // q = 5 at alpha = 0.05 keeps the boundary randomization active
    // (gamma = 0.8), which is where averaging phi buys variance.
    let sampler = SamplerSpec::Independent {
        mu: 0.0,
        sigma: vec![1.0; 5],
    };
    let spec = TestSpec::new(0.0, 0.05, Side::TwoSided).unwrap();
    let reps = 1_000_000;
    let smooth = estimate_rejection_with(&sampler, &spec, reps, 9, Estimator::ExpectedPhi).unwrap();
    let coin = estimate_rejection_with(&sampler, &spec, reps, 9, Estimator::CoinFlip).unwrap();
    let gap = (smooth.mean_phi - coin.mean_phi).abs();
    let combined = (smooth.std_error.powi(2) + coin.std_error.powi(2)).sqrt();
    assert!(gap <= 4.0 * combined, "estimators disagree: gap {gap}");
    assert!(
        smooth.std_error < coin.std_error,
        "phi averaging should be strictly tighter: {} vs {}",
        smooth.std_error,
        coin.std_error
    );
}

#[test]
fn equicorrelated_tail_probability_matches_sampled_counts() {
    // count-based check of a single tail-pair probability: q = 5, rho = 0.3,
    // exactly one positive or exactly one negative coordinate
    let rule = rule();
    let model = EquicorrelatedModel::new(5, 0.3).unwrap();
    let analytic = equicorrelated_tail_prob(&model, 1, &rule).unwrap();
    let draws = sample_equicorrelated(5, 0.3, 0.0, 1_000_000, 2024).unwrap();
    let hits = draws
        .iter()
        .filter(|s| {
            let positives = s.values().iter().filter(|&&v| v > 0.0).count();
            positives == 1 || positives == 4
        })
        .count();
    let estimate = hits as f64 / draws.len() as f64;
    let se = (estimate * (1.0 - estimate) / draws.len() as f64).sqrt();
    assert!(
        (analytic - estimate).abs() <= 3.0 * se,
        "analytic {analytic} vs sampled {estimate} (se {se})"
    );
}

#[test]
fn minimal_pair_matches_equicorrelated_at_q2() {
    // distributional agreement via the test itself
    let spec = TestSpec::new(0.0, 0.05, Side::TwoSided).unwrap();
    let equi = SamplerSpec::Equicorrelated {
        q: 2,
        rho: 0.6,
        mu: 0.0,
    };
    let pair = SamplerSpec::MinimalPair {
        q: 2,
        rho: 0.6,
        mu: 0.0,
    };
    let a = estimate_rejection(&equi, &spec, 200_000, 21).unwrap();
    let b = estimate_rejection(&pair, &spec, 200_000, 22).unwrap();
    let combined = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.mean_phi - b.mean_phi).abs() <= 4.0 * combined);
}
