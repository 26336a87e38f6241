//! Exact randomized sign test.
//!
//! The test statistic is the (absolute) sum of the signs of the centered
//! observations. Flipping the sign of any subset of coordinates forms a
//! group of 2^q transformations, and under the null the statistic is
//! invariant in distribution to every element of that group, so comparing
//! the observed statistic against the group distribution gives a test whose
//! null rejection probability is exactly `alpha` for any finite `q` — with a
//! randomized decision on the boundary atom making up the difference between
//! the achievable discrete levels.
//!
//! Because the group distribution of the statistic is Binomial(q, 1/2)
//! regardless of the data, the critical constants reduce to binomial tail
//! counts and the boundary rejection weight has a closed form. The full
//! 2^q enumeration is still provided ([`enumerate_group_statistics`]) and is
//! used by the test suite as the independent oracle for those shortcuts.

use serde::Serialize;

use crate::binom::pascal_row;
use crate::error::{Error, Result};
use crate::util::neumaier_sum;

/// Hard cap for the 2^q group enumeration (~3.4e7 elements).
pub const ENUMERATION_MAX_Q: usize = 25;

/// Which alternative the test is run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Median differs from the hypothesized value (absolute-sum statistic).
    TwoSided,
    /// Median exceeds the hypothesized value (signed-sum statistic).
    OneSidedGreater,
}

/// A vector of observations (or centered observations). Nonempty, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Centered copy, x - mu0.
    pub fn centered(&self, mu0: f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|x| x - mu0).collect())
    }
}

/// Null median, level and side of the hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestSpec {
    pub mu0: f64,
    pub alpha: f64,
    pub side: Side,
}

impl TestSpec {
    pub fn new(mu0: f64, alpha: f64, side: Side) -> Result<Self> {
        let spec = Self { mu0, alpha, side };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu0.is_finite() {
            return Err(Error::InvalidSpec {
                reason: format!("mu0 must be finite, got {}", self.mu0),
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec {
                reason: format!("alpha must lie in (0, 1), got {}", self.alpha),
            });
        }
        Ok(())
    }
}

/// The discrete rejection rule: reject outright above `critical_t`, reject
/// with probability `gamma` at `critical_t`, never below.
///
/// `m` is the number of binomial tail terms strictly inside the rejection
/// region; `critical_t = q - 2m` for both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalConstants {
    pub q: usize,
    pub m: usize,
    pub gamma: f64,
    pub critical_t: i64,
}

impl CriticalConstants {
    /// Rejection probability at the boundary atom, as a weight on the
    /// tail-pair probability P_Y(m).
    ///
    /// gamma is normalized against the tail pair 2 C(q, m): when the
    /// boundary sits at the central atom of an even q (2m = q, which needs
    /// alpha > 1/2) the atom is unpaired, its group count is C(q, m) alone,
    /// and the rejection probability there doubles to 2 gamma (still < 1).
    /// Everywhere else this is just gamma.
    pub fn boundary_weight(&self) -> f64 {
        if 2 * self.m == self.q {
            2.0 * self.gamma
        } else {
            self.gamma
        }
    }
}

/// Result of running the test on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: i64,
    pub critical_t: i64,
    /// Rejection probability: 1 above the critical value, the boundary
    /// weight at it, 0 below.
    pub phi: f64,
    /// Group p-value: fraction of sign flips whose statistic is >= the
    /// observed one.
    pub p_value: f64,
    /// Present only when a seeded coin-flip decision was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<bool>,
}

fn sign(value: f64, index: usize) -> Result<i64> {
    if value > 0.0 {
        Ok(1)
    } else if value < 0.0 {
        Ok(-1)
    } else {
        // A tie with the null median breaks the continuity assumption the
        // exactness guarantee rests on; the caller has to resolve it.
        Err(Error::ZeroEntry { index })
    }
}

fn signed_sum(y: &Sample) -> Result<i64> {
    let mut total = 0i64;
    for (index, &v) in y.values().iter().enumerate() {
        total += sign(v, index)?;
    }
    Ok(total)
}

/// |sum of signs|. Values lie in {q mod 2, q mod 2 + 2, ..., q}.
pub fn two_sided_statistic(y: &Sample) -> Result<i64> {
    signed_sum(y).map(i64::abs)
}

/// Sum of signs, in {-q, ..., q} with the parity of q.
pub fn one_sided_statistic(y: &Sample) -> Result<i64> {
    signed_sum(y)
}

/// Critical constants (m, gamma, critical_t) for level `alpha`.
///
/// Two-sided: m is the smallest integer with
/// `alpha <= 2^-(q-1) * sum_{r<=m} C(q, r)`, and
/// `gamma = (alpha 2^(q-1) - sum_{r<=m-1} C(q, r)) / C(q, m)`.
/// One-sided uses the same construction with 2^-q in place of 2^-(q-1).
///
/// The scaling `alpha * 2^k` is exact in binary floating point and the
/// binomial sums are exact integers for every q used in practice, so the
/// defining identity `2^-(q-1) [sum_{r<=m-1} C(q,r) + gamma C(q,m)] = alpha`
/// holds to a rounding error.
pub fn critical_constants(q: usize, alpha: f64, side: Side) -> Result<CriticalConstants> {
    if q == 0 {
        return Err(Error::EmptySample);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidSpec {
            reason: format!("alpha must lie in (0, 1), got {alpha}"),
        });
    }
    let row = pascal_row(q);
    let scale_exp = match side {
        Side::TwoSided => q as i32 - 1,
        Side::OneSidedGreater => q as i32,
    };
    let target = alpha * 2f64.powi(scale_exp);
    let m_max = match side {
        Side::TwoSided => q / 2,
        Side::OneSidedGreater => q,
    };
    let mut below = 0.0f64; // sum_{r <= m-1} C(q, r)
    for (m, &count) in row.iter().enumerate().take(m_max + 1) {
        let with_m = below + count;
        if target <= with_m {
            let gamma = (target - below) / count;
            return Ok(CriticalConstants {
                q,
                m,
                gamma,
                critical_t: q as i64 - 2 * m as i64,
            });
        }
        below = with_m;
    }
    // Unreachable: the cumulative bound at m_max is >= 1 > alpha.
    Err(Error::InvalidSpec {
        reason: format!("no critical value bracket for q = {q}, alpha = {alpha}"),
    })
}

/// Number of sign assignments whose statistic is strictly above / exactly at
/// `t`, for the given side. Exact binomial counting.
fn group_counts(q: usize, side: Side, t: i64) -> (f64, f64) {
    let row = pascal_row(q);
    let mut above = 0.0;
    let mut at = 0.0;
    for (j, &c) in row.iter().enumerate() {
        // j = number of negative coordinates in the assignment
        let value = match side {
            Side::TwoSided => (q as i64 - 2 * j as i64).abs(),
            Side::OneSidedGreater => q as i64 - 2 * j as i64,
        };
        if value > t {
            above += c;
        } else if value == t {
            at += c;
        }
    }
    (above, at)
}

/// Group p-value: #{assignments with statistic >= s} / 2^q.
fn group_p_value(q: usize, side: Side, s: i64) -> f64 {
    let (above, at) = group_counts(q, side, s);
    (above + at) / 2f64.powi(q as i32)
}

/// Run the sign test: center at `mu0`, compare the statistic with the
/// critical constants and report the rejection probability and p-value.
///
/// The boundary weight is `a = (2^q alpha - M+) / M0` with M+ and M0 the
/// group counts above/at the critical value — closed-form, never sampled.
pub fn run_test(x: &Sample, spec: &TestSpec) -> Result<TestOutcome> {
    spec.validate()?;
    let y = x.centered(spec.mu0)?;
    let q = y.len();
    let statistic = match spec.side {
        Side::TwoSided => two_sided_statistic(&y)?,
        Side::OneSidedGreater => one_sided_statistic(&y)?,
    };
    let constants = critical_constants(q, spec.alpha, spec.side)?;
    let (above, at) = group_counts(q, spec.side, constants.critical_t);
    let a = (2f64.powi(q as i32) * spec.alpha - above) / at;
    let phi = if statistic > constants.critical_t {
        1.0
    } else if statistic == constants.critical_t {
        a.clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(TestOutcome {
        statistic,
        critical_t: constants.critical_t,
        phi,
        p_value: group_p_value(q, spec.side, statistic),
        decision: None,
    })
}

/// All 2^q statistics T(gY) over the sign-flip group, as a multiset.
///
/// This is the enumeration oracle behind the binomial shortcuts; it walks
/// the group in Gray-code order so each step updates the signed sum in O(1).
pub fn enumerate_group_statistics(y: &Sample, side: Side) -> Result<Vec<i64>> {
    let q = y.len();
    if q > ENUMERATION_MAX_Q {
        return Err(Error::TooLarge {
            q,
            max: ENUMERATION_MAX_Q,
        });
    }
    let mut signs: Vec<i64> = Vec::with_capacity(q);
    for (index, &v) in y.values().iter().enumerate() {
        signs.push(sign(v, index)?);
    }
    let record = |sum: i64| match side {
        Side::TwoSided => sum.abs(),
        Side::OneSidedGreater => sum,
    };
    let total = 1u64 << q;
    let mut out = Vec::with_capacity(total as usize);
    let mut flipped = vec![false; q]; // which coordinates are currently negated
    let mut sum: i64 = signs.iter().sum();
    out.push(record(sum));
    for counter in 1..total {
        let bit = counter.trailing_zeros() as usize;
        // Gray code: exactly coordinate `bit` toggles.
        let delta = if flipped[bit] { 2 } else { -2 };
        sum += delta * signs[bit];
        flipped[bit] = !flipped[bit];
        out.push(record(sum));
    }
    Ok(out)
}

/// Resolve a randomized outcome into a hard decision.
///
/// Draws a single uniform u in [0, 1) from a ChaCha8 stream seeded with
/// `seed` and rejects iff u < phi. Deterministic in (outcome, seed).
pub fn randomized_decision(outcome: &TestOutcome, seed: u64) -> bool {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random();
    u < outcome.phi
}

/// Expected rejection probability implied by a multiset of group statistics
/// at the stated level, derived purely from order statistics. Test-suite
/// oracle for the closed-form constants.
pub fn oracle_rejection_rule(statistics: &[i64], alpha: f64) -> (i64, f64) {
    let m = statistics.len();
    let mut sorted = statistics.to_vec();
    sorted.sort_unstable();
    let k = ((1.0 - alpha) * m as f64).ceil() as usize; // 1-based order index
    let t_k = sorted[k - 1];
    let above = sorted.iter().filter(|&&t| t > t_k).count() as f64;
    let at = sorted.iter().filter(|&&t| t == t_k).count() as f64;
    let a = (m as f64 * alpha - above) / at;
    (t_k, a)
}

/// Exact null rejection probability of the rule (critical value, boundary
/// weight) against an enumerated group multiset.
pub fn oracle_null_size(statistics: &[i64], critical_t: i64, boundary: f64) -> f64 {
    let m = statistics.len() as f64;
    let above = statistics.iter().filter(|&&t| t > critical_t).count() as f64;
    let at = statistics.iter().filter(|&&t| t == critical_t).count() as f64;
    neumaier_sum([above, boundary * at]) / m
}
