#![no_main]
//! Full untrusted pipeline: parse arbitrary text, run the test with
//! arbitrary parameters, and hold the outcome invariants wherever it
//! succeeds. Must never panic.

use libfuzzer_sys::{arbitrary, fuzz_target};
use signtest::{run_test, Sample, Side, TestSpec};
use signtest_cli::input::parse_sample_text;

#[derive(arbitrary::Arbitrary, Debug)]
struct Case<'a> {
    text: &'a str,
    mu0: f64,
    alpha: f64,
    two_sided: bool,
}

fuzz_target!(|case: Case| {
    let Ok(parsed) = parse_sample_text(case.text) else {
        return;
    };
    if parsed.values.len() > 64 {
        return;
    }
    let Ok(sample) = Sample::new(parsed.values) else {
        return;
    };
    let side = if case.two_sided {
        Side::TwoSided
    } else {
        Side::OneSidedGreater
    };
    let Ok(spec) = TestSpec::new(case.mu0, case.alpha, side) else {
        return;
    };
    if let Ok(outcome) = run_test(&sample, &spec) {
        assert!((0.0..=1.0).contains(&outcome.phi));
        assert!(outcome.p_value > 0.0 && outcome.p_value <= 1.0);
        if outcome.statistic > outcome.critical_t {
            assert_eq!(outcome.phi, 1.0);
        }
        if outcome.statistic < outcome.critical_t {
            assert_eq!(outcome.phi, 0.0);
        }
    }
});
