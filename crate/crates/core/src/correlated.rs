//! Null rejection probability of the sign test when the coordinates are
//! correlated normals — the quantity that shows how unaccounted-for
//! correlation inflates size.
//!
//! Two covariance structures are covered:
//!
//! * equicorrelated: unit variances, common pairwise correlation rho. The
//!   single-factor representation reduces the tail-pair probabilities to a
//!   one-dimensional integral against the normal density (Genz & Bretz 2009,
//!   eq. 2.16),
//!
//!   ```text
//!   P(exactly r positive) = C(q, r) ∫ φ(y) Φ(ρ̃y)^r Φ(-ρ̃y)^(q-r) dy,
//!   ```
//!
//!   with ρ̃ = sqrt(rho / (1 - rho)); we evaluate it by Gauss–Hermite
//!   quadrature. Both Φ factors are computed through erfc directly so the
//!   tails stay accurate when ρ̃ is large (rho close to one).
//! * minimal pair: identity covariance except one correlated pair, where the
//!   tail-pair probabilities have closed forms in arcsin(rho) obtained by
//!   conditioning on how many of the two correlated coordinates are
//!   positive.
//!
//! The size then follows from the same critical constants (m, gamma) as the
//! independent case. `identity_suite` checks the combinatorial identities
//! this module's closed forms rest on against direct summation.

use serde::Serialize;

use crate::binom::{binom_i128, pascal_row};
use crate::error::{Error, Result};
use crate::exact::{critical_constants, Side};
use crate::normal;
use crate::quadrature::{integrate, QuadratureRule};
use crate::util::neumaier_sum;

/// Largest supported equicorrelation; the integral saturates as rho -> 1 and
/// the factor scale sqrt(rho/(1-rho)) leaves double precision around here.
pub const MAX_EQUICORRELATED_RHO: f64 = 0.9999;

/// Unit-variance normal vector with common pairwise correlation rho >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquicorrelatedModel {
    pub q: usize,
    pub rho: f64,
}

impl EquicorrelatedModel {
    pub fn new(q: usize, rho: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::EmptySample);
        }
        if !(rho.is_finite() && (0.0..=MAX_EQUICORRELATED_RHO).contains(&rho)) {
            return Err(Error::InvalidRho {
                value: rho,
                range: "[0, 0.9999]",
            });
        }
        Ok(Self { q, rho })
    }
}

/// Identity covariance except for corr(Y_1, Y_2) = rho.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalPairModel {
    pub q: usize,
    pub rho: f64,
}

impl MinimalPairModel {
    pub fn new(q: usize, rho: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidSpec {
                reason: format!("minimal-pair model needs q >= 2, got {q}"),
            });
        }
        if !(rho.is_finite() && (-1.0..=1.0).contains(&rho)) {
            return Err(Error::InvalidRho {
                value: rho,
                range: "[-1, 1]",
            });
        }
        Ok(Self { q, rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeRow {
    pub q: usize,
    pub rho: f64,
    pub size: f64,
}

/// Grid of null rejection probabilities at a fixed level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeCurve {
    pub alpha: f64,
    pub rows: Vec<SizeRow>,
}

fn check_r(r: usize, q: usize) -> Result<()> {
    if r > q / 2 {
        return Err(Error::InvalidR { r, q, max: q / 2 });
    }
    Ok(())
}

/// P_{q,rho}(r): probability that an equicorrelated null vector has exactly
/// r positive or exactly r negative coordinates (central term of an even q
/// counted once).
pub fn equicorrelated_tail_prob(
    model: &EquicorrelatedModel,
    r: usize,
    rule: &QuadratureRule,
) -> Result<f64> {
    let q = model.q;
    check_r(r, q)?;
    let rho_tilde = (model.rho / (1.0 - model.rho)).sqrt();
    let integral = integrate(
        |z| {
            let pos = normal::cdf(rho_tilde * z); // P(coordinate > 0 | factor)
            let neg = normal::upper_tail(rho_tilde * z);
            pos.powi(r as i32) * neg.powi((q - r) as i32)
        },
        rule,
    )?;
    let combos = pascal_row(q)[r];
    let doubling = if 2 * r == q { 1.0 } else { 2.0 };
    Ok(doubling * combos * integral)
}

/// Null rejection probability under the equicorrelated model:
/// sum_{r <= m-1} P_{q,rho}(r) + gamma * P_{q,rho}(m).
pub fn equicorrelated_size(
    model: &EquicorrelatedModel,
    alpha: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let constants = critical_constants(model.q, alpha, Side::TwoSided)?;
    let mut terms = Vec::with_capacity(constants.m + 1);
    for r in 0..constants.m {
        terms.push(equicorrelated_tail_prob(model, r, rule)?);
    }
    terms.push(constants.boundary_weight() * equicorrelated_tail_prob(model, constants.m, rule)?);
    Ok(neumaier_sum(terms))
}

/// Exact P(both coordinates of a standard bivariate normal with correlation
/// rho are positive) = 1/4 + arcsin(rho) / (2 pi).
fn bivariate_orthant(rho: f64) -> f64 {
    0.25 + rho.asin() / (2.0 * std::f64::consts::PI)
}

/// P_{q,rho}(r) under the minimal-pair model, in closed form.
pub fn minimal_pair_tail_prob(model: &MinimalPairModel, r: usize) -> Result<f64> {
    let q = model.q;
    check_r(r, q)?;
    let s = (2.0 / std::f64::consts::PI) * model.rho.asin();
    if q == 2 {
        // With q = 2 the pair is the whole vector and minimal correlation
        // coincides with equicorrelation: both-same-sign mass for r = 0,
        // the opposite-sign remainder for the central r = 1.
        let both_same = 2.0 * bivariate_orthant(model.rho); // P(++) + P(--)
        return Ok(match r {
            0 => both_same,
            _ => 1.0 - both_same,
        });
    }
    let c = |n: i64, k: i64| binom_i128(n, k) as f64;
    let qi = q as i64;
    let ri = r as i64;
    // Paired probability 2 * [C(q,r) + (sign-pattern coefficient) * s] / 2^q,
    // conditioning on 0, 1 or 2 of the correlated pair being positive.
    let coefficient = match r {
        0 => 1.0,
        1 => c(qi - 2, 1) - 2.0,
        _ => c(qi - 2, ri) - 2.0 * c(qi - 2, ri - 1) + c(qi - 2, ri - 2),
    };
    let paired = 2f64.powi(1 - q as i32) * (c(qi, ri) + coefficient * s);
    Ok(if 2 * r == q { paired / 2.0 } else { paired })
}

/// Null rejection probability under the minimal-pair model.
pub fn minimal_pair_size(model: &MinimalPairModel, alpha: f64) -> Result<f64> {
    let constants = critical_constants(model.q, alpha, Side::TwoSided)?;
    let mut terms = Vec::with_capacity(constants.m + 1);
    for r in 0..constants.m {
        terms.push(minimal_pair_tail_prob(model, r)?);
    }
    terms.push(constants.boundary_weight() * minimal_pair_tail_prob(model, constants.m)?);
    Ok(neumaier_sum(terms))
}

/// Equicorrelated size over a (q, rho) grid, row-major in q then rho.
pub fn size_surface(
    q_range: &[usize],
    rho_list: &[f64],
    alpha: f64,
    rule: &QuadratureRule,
) -> Result<SizeCurve> {
    if q_range.is_empty() || rho_list.is_empty() {
        return Err(Error::InvalidSpec {
            reason: "size surface needs nonempty q and rho grids".into(),
        });
    }
    let mut rows = Vec::with_capacity(q_range.len() * rho_list.len());
    for &q in q_range {
        for &rho in rho_list {
            let model = EquicorrelatedModel::new(q, rho)?;
            let size = equicorrelated_size(&model, alpha, rule)?;
            rows.push(SizeRow { q, rho, size });
        }
    }
    Ok(SizeCurve { alpha, rows })
}

/// Outcome of the combinatorial identity checks for one (q, m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub q: usize,
    pub m: usize,
    /// max |finite difference - theta^(q-m-1) (1-theta)^m| over the theta grid
    pub fprime_max_err: f64,
    /// max |lhs - rhs| of the alternating binomial identity over r = 0..=m
    pub binomial_max_dev: i128,
    /// |direct sum - (C(q-2,m) - C(q-2,m-1))|
    pub telescoping_dev: i128,
    pub pass: bool,
}

/// f(theta) = sum_{r=0}^m (-1)^(m-r) / (q-r) * C(m, r) * theta^(q-r); its
/// derivative collapses to theta^(q-m-1) (1-theta)^m.
fn f_theta(q: usize, m: usize, theta: f64) -> f64 {
    let terms = (0..=m).map(|r| {
        let sign = if (m - r).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / (q - r) as f64 * binom_i128(m as i64, r as i64) as f64 * theta.powi((q - r) as i32)
    });
    neumaier_sum(terms)
}

/// Direct evaluation of the telescoping sum W(m): the r = 0 row contributes
/// 1, the r = 1 row C(q-2,1) - 2, and each row r >= 2 contributes
/// C(q,r) - 4 C(q-2,r-1).
fn w_direct(q: usize, m: usize) -> i128 {
    let qi = q as i64;
    let mut total: i128 = 0;
    for r in 0..=m as i64 {
        total += match r {
            0 => 1,
            1 => binom_i128(qi - 2, 1) - 2,
            _ => binom_i128(qi, r) - 4 * binom_i128(qi - 2, r - 1),
        };
    }
    total
}

/// Telescoped closed form W(m) = C(q-2, m) - C(q-2, m-1); m = -1 gives 0 so
/// callers can form W(m-1) uniformly.
pub(crate) fn w_closed(q: usize, m: i64) -> i128 {
    if m < 0 {
        return 0;
    }
    binom_i128(q as i64 - 2, m) - binom_i128(q as i64 - 2, m - 1)
}

/// Verify the three identities behind the correlated closed forms on an
/// exhaustive grid: the derivative of f against central finite differences,
/// the alternating binomial coefficient identity, and the W(m) telescoping.
pub fn identity_suite(q: usize, m: usize) -> Result<IdentityReport> {
    if q == 0 {
        return Err(Error::EmptySample);
    }
    if m > q / 2 {
        return Err(Error::InvalidR {
            r: m,
            q,
            max: q / 2,
        });
    }

    // (i) finite differences of f
    let step = 1e-5;
    let mut fprime_max_err = 0.0f64;
    let mut theta = 0.05;
    while theta < 0.96 {
        let fd = (f_theta(q, m, theta + step) - f_theta(q, m, theta - step)) / (2.0 * step);
        let exact = theta.powi((q - m) as i32 - 1) * (1.0 - theta).powi(m as i32);
        fprime_max_err = fprime_max_err.max((fd - exact).abs());
        theta += 0.05;
    }

    // (ii) sum_{k=r}^m C(q,k) C(k,k-r) (-1)^(k-r)
    //      = (-1)^(m-r) (m+1) C(q,m+1) C(m,r) / (q-r), exactly
    let mut binomial_max_dev: i128 = 0;
    let qi = q as i64;
    let mi = m as i64;
    for r in 0..=mi {
        let mut lhs: i128 = 0;
        for k in r..=mi {
            let term = binom_i128(qi, k) * binom_i128(k, k - r);
            lhs += if (k - r) % 2 == 0 { term } else { -term };
        }
        let numerator = (mi + 1) as i128 * binom_i128(qi, mi + 1) * binom_i128(mi, r);
        let denom = (qi - r) as i128;
        let dev = if numerator % denom != 0 {
            // not an integer: flag by the full numerator magnitude
            numerator.abs().max(1)
        } else {
            let rhs = if (mi - r) % 2 == 0 { 1 } else { -1 } * (numerator / denom);
            (lhs - rhs).abs()
        };
        binomial_max_dev = binomial_max_dev.max(dev);
    }

    // (iii) telescoping of W(m)
    let telescoping_dev = (w_direct(q, m) - w_closed(q, m as i64)).abs();

    let pass = fprime_max_err <= 1e-6 && binomial_max_dev == 0 && telescoping_dev == 0;
    Ok(IdentityReport {
        q,
        m,
        fprime_max_err,
        binomial_max_dev,
        telescoping_dev,
        pass,
    })
}
