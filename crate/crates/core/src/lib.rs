//! Exact randomized sign test for a median, with analytic finite-sample
//! power and size.
//!
//! The crate covers four pieces that belong together:
//!
//! * [`exact`] — the randomized sign test itself (two-sided and one-sided),
//!   its closed-form critical constants, group p-values, and the full
//!   sign-flip enumeration used as an oracle.
//! * [`power`] — analytic power for independent, not necessarily identical
//!   observations via the Poisson-binomial distribution of the sign count.
//! * [`correlated`] — analytic null size when the coordinates are
//!   equicorrelated normals (one-dimensional integral, Gauss–Hermite
//!   quadrature from [`quadrature`]) or normals with a single correlated
//!   pair (arcsin closed forms), quantifying over-rejection under
//!   correlation. [`correlated::identity_suite`] verifies the combinatorial
//!   identities those closed forms rest on.
//! * [`montecarlo`] — a seeded, reproducible simulation oracle that
//!   cross-checks every analytic number with confidence intervals.
//!
//! ```
//! use signtest::{run_test, Sample, Side, TestSpec};
//!
//! let x = Sample::new(vec![3.0, 4.0, 5.0, 6.0, 7.0])?;
//! let spec = TestSpec::new(0.0, 0.05, Side::TwoSided)?;
//! let outcome = run_test(&x, &spec)?;
//! assert_eq!(outcome.statistic, 5);
//! assert_eq!(outcome.p_value, 0.0625);
//! # Ok::<(), signtest::Error>(())
//! ```

pub mod correlated;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod normal;
pub mod power;
pub mod quadrature;

mod binom;
mod util;

pub use correlated::{
    equicorrelated_size, equicorrelated_tail_prob, identity_suite, minimal_pair_size,
    minimal_pair_tail_prob, size_surface, EquicorrelatedModel, IdentityReport, MinimalPairModel,
    SizeCurve, SizeRow,
};
pub use error::{Error, Result};
pub use exact::{
    critical_constants, enumerate_group_statistics, one_sided_statistic, randomized_decision,
    run_test, two_sided_statistic, CriticalConstants, Sample, Side, TestOutcome, TestSpec,
};
pub use montecarlo::{
    estimate_rejection, estimate_rejection_with, sample_equicorrelated, sample_minimal_pair,
    Estimator, SamplerSpec, SimulationReport,
};
pub use power::{
    poisson_binomial_pmf, power_curve, power_from_proposition, tail_pair_probability,
    MarginalProbabilities, TailPairTable,
};
pub use quadrature::{gauss_hermite, integrate, QuadratureRule};
