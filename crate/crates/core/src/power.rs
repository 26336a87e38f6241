//! Analytic power of the sign test for independent, not necessarily
//! identical observations.
//!
//! With `p_i = P(Y_i > 0)` under the true data-generating process, the count
//! of positive signs is Poisson-binomial. The test rejects outright when
//! fewer than `m` coordinates land on the minority side and with probability
//! `gamma` when exactly `m` do, so its power is a short linear combination
//! of Poisson-binomial tail pairs.

use crate::binom::pascal_row;
use crate::error::{Error, Result};
use crate::exact::{critical_constants, Side};
use crate::normal;

/// Per-coordinate exceedance probabilities p_i = P(Y_i > 0), each in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalProbabilities {
    p: Vec<f64>,
}

impl MarginalProbabilities {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptySample);
        }
        for (index, &value) in p.iter().enumerate() {
            if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        Ok(Self { p })
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// P_Y(r) for r = 0..floor(q/2): the probability of exactly r positive or
/// exactly r negative coordinates, with the central term of an even q
/// counted once.
#[derive(Debug, Clone, PartialEq)]
pub struct TailPairTable {
    pub q: usize,
    pub values: Vec<f64>,
}

/// Probability mass function of the number of positive coordinates.
///
/// Iterative convolution over the coordinates, O(q^2); entry j is
/// P(exactly j of the q independent signs are positive).
pub fn poisson_binomial_pmf(p: &MarginalProbabilities) -> Vec<f64> {
    let mut pmf = vec![0.0f64; p.len() + 1];
    pmf[0] = 1.0;
    for (i, &pi) in p.values().iter().enumerate() {
        let qi = 1.0 - pi;
        for j in (0..=i + 1).rev() {
            let stay = pmf[j] * qi;
            let up = if j > 0 { pmf[j - 1] * pi } else { 0.0 };
            pmf[j] = stay + up;
        }
    }
    pmf
}

/// Fold the pmf into tail pairs: P_Y(r) = pmf\[r\] + pmf\[q - r\] for
/// r < q/2, and the single central mass at r = q/2 for even q.
pub fn tail_pair_probability(p: &MarginalProbabilities) -> TailPairTable {
    let pmf = poisson_binomial_pmf(p);
    let q = p.len();
    let values = (0..=q / 2)
        .map(|r| {
            if 2 * r == q {
                pmf[r]
            } else {
                pmf[r] + pmf[q - r]
            }
        })
        .collect();
    TailPairTable { q, values }
}

/// Power of the two-sided test: sum_{r <= m-1} P_Y(r) + gamma * P_Y(m),
/// with the boundary weight adjusted when the boundary atom is the unpaired
/// central one (see [`CriticalConstants::boundary_weight`]); the two agree
/// whenever alpha <= 1/2.
///
/// [`CriticalConstants::boundary_weight`]: crate::exact::CriticalConstants::boundary_weight
pub fn power_from_proposition(p: &MarginalProbabilities, alpha: f64) -> Result<f64> {
    let constants = critical_constants(p.len(), alpha, Side::TwoSided)?;
    let table = tail_pair_probability(p);
    let head: f64 = table.values[..constants.m].iter().sum();
    Ok(head + constants.boundary_weight() * table.values[constants.m])
}

/// Power along a grid of true medians for normal marginals with scales
/// `sigma`: p_i = Phi((mu - mu0) / sigma_i).
pub fn power_curve(
    sigma: &[f64],
    mu0: f64,
    mu_grid: &[f64],
    alpha: f64,
) -> Result<Vec<(f64, f64)>> {
    if sigma.is_empty() {
        return Err(Error::EmptySample);
    }
    for (index, &value) in sigma.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSigma { index, value });
        }
    }
    mu_grid
        .iter()
        .map(|&mu| {
            let p = MarginalProbabilities::new(
                sigma.iter().map(|&s| normal::cdf((mu - mu0) / s)).collect(),
            )?;
            Ok((mu, power_from_proposition(&p, alpha)?))
        })
        .collect()
}

/// Null shortcut used by tests: with every p_i = 1/2 the tail pairs are the
/// fair-coin counts C(q, r) 2^-(q-1).
pub fn null_tail_pairs(q: usize) -> Vec<f64> {
    let row = pascal_row(q);
    let scale = 2f64.powi(-(q as i32 - 1));
    (0..=q / 2)
        .map(|r| {
            if 2 * r == q {
                row[r] * scale / 2.0
            } else {
                row[r] * scale
            }
        })
        .collect()
}
