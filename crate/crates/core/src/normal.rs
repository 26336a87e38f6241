//! Standard normal density and distribution function.
//!
//! `cdf` and `upper_tail` are both routed through `erfc` so that tail values
//! keep full relative accuracy instead of rounding to 0 or 1; the correlated
//! size integrals depend on that behaviour for correlations near one.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density.
pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function, Phi(x) = erfc(-x / sqrt(2)) / 2.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 - Phi(x), evaluated directly (no cancellation).
pub fn upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        // Reference values to 1e-15 (Phi(0), Phi(1), Phi(-1), Phi(2)).
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(1.0) - 0.8413447460685429).abs() < 1e-15);
        assert!((cdf(-1.0) - 0.15865525393145705).abs() < 1e-15);
        assert!((cdf(2.0) - 0.9772498680518208).abs() < 1e-15);
    }

    #[test]
    fn tails_are_complementary_and_accurate() {
        for x in [-30.0, -8.0, -1.3, 0.0, 0.7, 5.0, 12.0, 37.0] {
            let lo = cdf(x);
            let hi = upper_tail(x);
            assert!((lo + hi - 1.0).abs() < 1e-14);
            assert!(lo >= 0.0 && hi >= 0.0);
        }
        // Far tail keeps relative precision rather than flushing to zero.
        assert!(upper_tail(10.0) > 0.0);
        assert!((upper_tail(10.0) - 7.619853024160527e-24).abs() < 1e-36);
    }

    #[test]
    fn pdf_normalizes_at_zero() {
        assert!((pdf(0.0) - 0.3989422804014327).abs() < 1e-16);
    }
}
