//! Gauss–Hermite quadrature normalized against the standard normal density.
//!
//! A rule of order n integrates `E[f(Z)] = ∫ φ(z) f(z) dz` as `Σ w_i f(z_i)`
//! and is exact whenever f is a polynomial of degree at most 2n - 1. The
//! probabilists' normalization is the contract here: weights sum to one, so
//! the rule computes expectations under the standard normal directly.
//!
//! Nodes are the roots of the orthonormal (probabilists') Hermite polynomial
//! of degree n, i.e. the eigenvalues of the Jacobi matrix with zero diagonal
//! and off-diagonals sqrt(k). Each root is bracketed by bisection on the
//! Sturm pivot count of that matrix — which cannot skip or reorder roots —
//! and then polished by Newton's method on the three-term recurrence
//!
//! ```text
//! sqrt(k+1) h_{k+1}(z) = z h_k(z) - sqrt(k) h_{k-1}(z)
//! ```
//!
//! with per-step power-of-two rescaling: raw polynomial values grow like
//! exp(z^2/4) near the extreme nodes and overflow f64 far below n = 1000,
//! but the Newton ratio h_n / h_n' and the weight exponent survive rescaling
//! untouched. Weights use w_i = 1 / (n h_{n-1}(z_i)^2), assembled in log2
//! space; far-tail weights below ~1e-308 underflow to zero, which is the
//! best double precision can represent (their true values are positive but
//! smaller than the smallest subnormal).

use crate::error::{Error, Result};
use crate::util::neumaier_sum;

/// Largest supported rule order.
pub const MAX_ORDER: usize = 2000;

const RESCALE_THRESHOLD: f64 = 1e150;
const RESCALE_EXP: i32 = 512;

/// Nodes and weights of an order-n rule. Nodes are strictly increasing and
/// antisymmetric about zero; weights are symmetric, nonnegative and sum to
/// one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Orthonormal Hermite pair (h_{n-1}, h_n) at z in scaled form: true values
/// are (prev, curr) * 2^exp.
fn hermite_pair_scaled(n: usize, z: f64) -> (f64, f64, i64) {
    debug_assert!(n >= 1);
    let mut prev = 1.0f64; // h_0
    let mut curr = z; // h_1
    let mut exp: i64 = 0;
    for k in 1..n {
        let next = (z * curr - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = curr;
        curr = next;
        if curr.abs() > RESCALE_THRESHOLD || prev.abs() > RESCALE_THRESHOLD {
            prev *= 2f64.powi(-RESCALE_EXP);
            curr *= 2f64.powi(-RESCALE_EXP);
            exp += RESCALE_EXP as i64;
        }
    }
    (prev, curr, exp)
}

/// Number of eigenvalues of the order-n Jacobi matrix strictly below
/// `lambda`, via the LDL^T pivot signs (b_k^2 = k, zero diagonal).
fn eigenvalues_below(n: usize, lambda: f64) -> usize {
    const PIVOT_FLOOR: f64 = 1e-300;
    let mut count = 0usize;
    let mut d = -lambda;
    if d < 0.0 {
        count += 1;
    }
    for k in 1..n {
        if d.abs() < PIVOT_FLOOR {
            d = if d < 0.0 { -PIVOT_FLOOR } else { PIVOT_FLOOR };
        }
        d = -lambda - k as f64 / d;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Generate the order-n Gauss–Hermite rule (normal-density normalization).
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::OrderTooLarge { n, max: MAX_ORDER });
    }
    let half = n / 2;
    let mut positive_roots = Vec::with_capacity(half); // ascending
    let mut positive_weights = Vec::with_capacity(half);

    let nf = n as f64;
    // Gershgorin bound on the spectrum: |lambda| <= 2 sqrt(n - 1).
    let bound = 2.0 * nf.sqrt() + 1.0;
    for i in 0..half {
        // Bisect the (rank)-th smallest eigenvalue down to an interval well
        // inside its Newton basin (node spacing is never below ~1/sqrt(n)).
        let rank = n - half + i; // 0-based; upper half of the spectrum
        let mut lo = if i == 0 { 0.0 } else { positive_roots[i - 1] };
        let mut hi = bound;
        while hi - lo > 1e-8 {
            let mid = 0.5 * (lo + hi);
            if eigenvalues_below(n, mid) > rank {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        for _ in 0..40 {
            let (prev, curr, _) = hermite_pair_scaled(n, z);
            let step = curr / (nf.sqrt() * prev);
            z -= step;
            if step.abs() <= 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        let (prev, _, exp) = hermite_pair_scaled(n, z);
        positive_roots.push(z);
        positive_weights.push(weight_from_scaled(nf, prev, exp));
    }

    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for (i, (&root, &weight)) in positive_roots.iter().zip(&positive_weights).enumerate() {
        // ascending positive roots; mirror them into both tails
        nodes[n - half + i] = root;
        nodes[half - 1 - i] = -root;
        weights[n - half + i] = weight;
        weights[half - 1 - i] = weight;
    }
    if n % 2 == 1 {
        let (prev, _, exp) = hermite_pair_scaled(n, 0.0);
        nodes[half] = 0.0;
        weights[half] = weight_from_scaled(nf, prev, exp);
    }

    // Renormalize so the weights sum to one at machine precision.
    let total = neumaier_sum(weights.iter().copied());
    for w in &mut weights {
        *w /= total;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn weight_from_scaled(nf: f64, h_prev: f64, exp: i64) -> f64 {
    // w = 1 / (n * h_{n-1}^2) with h_{n-1} = h_prev * 2^exp
    let log2_w = -(nf.log2() + 2.0 * h_prev.abs().log2() + 2.0 * exp as f64);
    log2_w.exp2()
}

/// Approximate `E[f(Z)] = ∫ φ(z) f(z) dz` with the rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.order());
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let value = f(z);
        if !value.is_finite() {
            return Err(Error::NonFiniteEvaluation { node: z });
        }
        terms.push(w * value);
    }
    Ok(neumaier_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_and_two_are_closed_form() {
        let rule = gauss_hermite(1).unwrap();
        assert_eq!(rule.nodes(), &[0.0]);
        assert!((rule.weights()[0] - 1.0).abs() < 1e-15);

        let rule = gauss_hermite(2).unwrap();
        assert!((rule.nodes()[0] + 1.0).abs() < 1e-14);
        assert!((rule.nodes()[1] - 1.0).abs() < 1e-14);
        assert!((rule.weights()[0] - 0.5).abs() < 1e-15);
        assert!((rule.weights()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn order_bounds_are_enforced() {
        assert!(matches!(gauss_hermite(0), Err(Error::OrderTooLarge { .. })));
        assert!(matches!(
            gauss_hermite(MAX_ORDER + 1),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn rules_are_symmetric_and_normalized() {
        for n in [1, 2, 3, 4, 5, 10, 63, 64, 257, 500, 1000, 2000] {
            let rule = gauss_hermite(n).unwrap();
            let nodes = rule.nodes();
            let weights = rule.weights();
            for i in 0..n {
                assert_eq!(nodes[i], -nodes[n - 1 - i], "node symmetry at n={n}");
                assert_eq!(weights[i], weights[n - 1 - i], "weight symmetry at n={n}");
                assert!(weights[i] >= 0.0);
                if i > 0 {
                    assert!(nodes[i] > nodes[i - 1], "nodes not increasing at n={n}");
                }
            }
            let total = neumaier_sum(weights.iter().copied());
            assert!((total - 1.0).abs() < 1e-13, "weight sum off at n={n}");
            assert!(weights.iter().any(|&w| w > 0.0));
        }
    }

    #[test]
    fn normal_moments_at_high_order() {
        let rule = gauss_hermite(1000).unwrap();
        let m2 = integrate(|z| z * z, &rule).unwrap();
        let m4 = integrate(|z| z.powi(4), &rule).unwrap();
        assert!((m2 - 1.0).abs() < 1e-10, "E[z^2] = {m2}");
        assert!((m4 - 3.0).abs() < 1e-10, "E[z^4] = {m4}");
    }

    #[test]
    fn integrate_basics() {
        let rule = gauss_hermite(1000).unwrap();
        assert!((integrate(|_| 1.0, &rule).unwrap() - 1.0).abs() < 1e-13);
        let half = integrate(crate::normal::cdf, &rule).unwrap();
        assert!((half - 0.5).abs() < 1e-10);
    }

    #[test]
    fn integrate_flags_non_finite() {
        // odd order puts a node at exactly zero
        let rule = gauss_hermite(15).unwrap();
        assert!(matches!(
            integrate(|z| 1.0 / z, &rule),
            Err(Error::NonFiniteEvaluation { .. })
        ));
    }
}
