use idemconc::constructions::{dirichlet, dirichlet_grid_product};
use idemconc::grids::*;
use idemconc::trigpoly::{QuadratureSpec, SparseTrigPoly};
use proptest::prelude::*;

#[test]
fn ratio_approaches_limit() {
    // Plain grid, r/q fixed: the ratio converges to 1/B(p, r/q).
    let mut last = f64::INFINITY;
    for q in [25u64, 101, 401] {
        let r = q / 4;
        let poly = dirichlet_grid_product(r, q, 1, false).unwrap();
        let ratio = grid_ratio(&poly, 4.0, q, 1, false).unwrap().ratio;
        let lim = predicted_grid_limit(r, q, 1, 4.0, false).unwrap();
        let err = (ratio - lim).abs() / lim;
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-3);
}

#[test]
fn condition_k_of_dirichlet() {
    let k = grid_condition_k(&dirichlet(5).unwrap(), 2.0, 16).unwrap();
    assert!(k > 0.0 && k.is_finite());
}

#[test]
fn zero_grid_sum_detected() {
    let f = SparseTrigPoly::zero();
    assert!(matches!(grid_ratio(&f, 2.0, 5, 1, false), Err(idemconc::Error::ZeroGridSum)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn inverse_is_inverse(a in -10_000i64..10_000, m in 2u64..5000) {
        match modular_inverse(a, m) {
            Ok(b) => prop_assert_eq!(((a as i128).rem_euclid(m as i128) * b as i128) % m as i128, 1),
            Err(_) => prop_assert!(gcd(a.unsigned_abs(), m) != 1),
        }
    }

    #[test]
    fn ratios_sum_to_one(freqs in prop::collection::btree_set(0u64..200, 1..15), q in 2u64..30, p in 0.5f64..6.0) {
        let f = SparseTrigPoly::idempotent(freqs).unwrap();
        let total: f64 = (0..q).map(|k| grid_ratio(&f, p, q, k, false).map(|c| c.ratio).unwrap_or(0.0)).sum();
        prop_assume!(grid_sum(&f, p, q, false) > 1e-12);
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bernstein_never_violated(freqs in prop::collection::btree_set(0u64..60, 1..10), p in 1.0f64..6.0, t in -0.01f64..0.01) {
        let f = SparseTrigPoly::idempotent(freqs).unwrap();
        let rep = bernstein_report(&f, p, 64, t, &QuadratureSpec::default()).unwrap();
        prop_assert!(rep.bernstein.lhs <= rep.bernstein.rhs * (1.0 + 1e-8) + 1e-12);
    }
}
