//! Order-doubling convergence of the quadrature on the correlated-size
//! integrands Phi(rt z)^r (1 - Phi(rt z))^(q-r).
//!
//! The transition layer of these integrands narrows like sqrt(1-rho), so
//! the order needed for a given accuracy grows with rho: 500 nodes are
//! converged through rho = 0.9, while rho = 0.95 needs the full 1000-node
//! rule (matched against 2000 nodes here).

use signtest::normal;
use signtest::*;

fn worst_gap(coarse: &QuadratureRule, fine: &QuadratureRule, rho: f64) -> f64 {
    let rt = (rho / (1.0 - rho)).sqrt();
    let mut worst = 0.0f64;
    for q in 1..=15usize {
        for r in 0..=q / 2 {
            let f = |z: f64| {
                normal::cdf(rt * z).powi(r as i32)
                    * normal::upper_tail(rt * z).powi((q - r) as i32)
            };
            let a = integrate(f, coarse).unwrap();
            let b = integrate(f, fine).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

#[test]
fn integrand_convergence_under_order_doubling() {
    let r500 = gauss_hermite(500).unwrap();
    let r1000 = gauss_hermite(1000).unwrap();
    let r2000 = gauss_hermite(2000).unwrap();

    for rho in [0.0, 0.3, 0.5, 0.8, 0.9] {
        let gap = worst_gap(&r500, &r1000, rho);
        assert!(gap < 1e-9, "500 vs 1000 gap {gap:.3e} at rho={rho}");
    }
    // sharper layer: the default 1000-node rule is converged, 500 is not
    let gap = worst_gap(&r1000, &r2000, 0.95);
    assert!(gap < 1e-9, "1000 vs 2000 gap {gap:.3e} at rho=0.95");
    let coarse_gap = worst_gap(&r500, &r1000, 0.95);
    assert!(
        coarse_gap > 1e-8,
        "expected the 500-node rule to be visibly unconverged at rho=0.95, got {coarse_gap:.3e}"
    );
}
