use idemconc::constants::c2_constant;
use idemconc::constructions::dirichlet;
use idemconc::pipeline::*;
use idemconc::trigpoly::*;
use idemconc::Error;
use proptest::prelude::*;

fn near_third() -> IntervalUnion {
    IntervalUnion::symmetrize(&[(1.0 / 3.0 - 0.02, 1.0 / 3.0 + 0.02)]).unwrap()
}

fn window(a: f64, d: f64) -> IntervalUnion {
    IntervalUnion::new(vec![(a - d, a + d)], true).unwrap()
}

#[test]
fn peaking_regime_gates() {
    let o = PeakingOptions::new(0.5, 0.1, 10);
    for (a, p) in [(0.0, 2.0), (0.5, 2.0), (0.5, 4.0), (0.5, 6.0)] {
        assert!(matches!(build_peaking_idempotent(a, p, &o), Err(Error::IllegalRegime(_))), "{a} {p}");
    }
}

#[test]
fn flat_marginal_at_half_exhausts_budget() {
    // F_1 at 1/2 is too flat: ε = 0.5 on ±0.1 needs far more depth than
    // the degree budget allows.
    let mut o = PeakingOptions::new(0.5, 0.1, 10);
    o.max_degree = 50_000;
    assert!(matches!(build_peaking_idempotent(0.5, 1.0, &o), Err(Error::ResourceLimit(_))));
}

#[test]
fn peaking_at_half_p1() {
    let o = PeakingOptions::new(0.9, 0.25, 10);
    let t = build_peaking_idempotent(0.5, 1.0, &o).unwrap();
    assert!(t.poly.is_idempotent());
    assert!(t.poly.min_gap().unwrap() > 10);
    let spec = QuadratureSpec::with_rel_tol(1e-12);
    let inside = lp_integral(&t.poly, 1.0, &window(0.5, 0.25), &spec).unwrap();
    let total = lp_integral(&t.poly, 1.0, &IntervalUnion::full(), &spec).unwrap();
    assert!((inside / total - t.peak_mass).abs() < 1e-8);
    assert!(t.peak_mass > 0.1);
}

#[test]
fn peaking_at_zero_p4_matches_oracle() {
    let o = PeakingOptions::new(0.3, 0.3, 20);
    let t = build_peaking_idempotent(0.0, 4.0, &o).unwrap();
    assert!(t.peak_mass > 0.7);
    assert!(t.poly.min_gap().unwrap() > 20);
    let oracle = dense_reference_integral(&t.poly, 4.0, &window(0.0, 0.3))
        / parseval_even_norm(&t.poly, 2).unwrap();
    assert!((oracle - t.peak_mass).abs() < 1e-8);
    let env = t.envelope.unwrap();
    assert!(env.sufficient_depth as u32 >= t.depth);
}

#[test]
fn peak_mass_nondecreasing_in_depth() {
    let mut last = 0.0;
    for j in 1..=4 {
        let mut o = PeakingOptions::new(0.01, 0.2, 1);
        o.depth = Some(j);
        let t = peaking_within_budget(0.0, 4.0, &o).unwrap();
        assert!(t.peak_mass >= last - 1e-9, "J = {j}: {} < {last}", t.peak_mass);
        last = t.peak_mass;
    }
}

#[test]
fn full_circle_fast_path() {
    let rep = concentrate(&IntervalUnion::full(), &PipelineConfig::default()).unwrap();
    assert_eq!(rep.ratio, 1.0);
    assert_eq!(rep.polynomial.terms, 1);
}

#[test]
fn end_to_end_certificate_and_oracle() {
    let cfg = PipelineConfig {
        gap_n: 50,
        ..PipelineConfig::default()
    };
    let set = near_third();
    let c = concentrate_with_polynomial(&set, &cfg).unwrap();
    let rep = &c.report;
    assert!(rep.certificate > 0.0);
    assert!(rep.ratio >= rep.certificate);
    assert!(rep.polynomial.min_gap.unwrap() > 50);
    assert_eq!(c.polynomial.min_gap(), rep.polynomial.min_gap);
    let oracle = dense_reference_integral(&c.polynomial, 4.0, &set)
        / dense_reference_integral(&c.polynomial, 4.0, &IntervalUnion::full());
    assert!((oracle - rep.ratio).abs() < 1e-6);
    let chain = rep.chain.as_ref().unwrap();
    assert!((0.0..=1.0).contains(&chain.peak_mass));
    assert_eq!(rep.config.j, Some(chain.riesz_depth));
}

#[test]
fn large_gap_request() {
    let cfg = PipelineConfig {
        gap_n: 1000,
        ..PipelineConfig::default()
    };
    let c = concentrate_with_polynomial(&near_third(), &cfg).unwrap();
    assert!(c.polynomial.min_gap().unwrap() > 1000);
    assert!(c.report.ratio >= c.report.certificate);
}

#[test]
fn l2_route_reports_ceiling() {
    let cfg = PipelineConfig {
        p: 2.0,
        gap_n: 100,
        ..PipelineConfig::default()
    };
    let rep = concentrate(&near_third(), &cfg).unwrap();
    assert_eq!(rep.ceiling, Some(c2_constant()));
    assert!(rep.ratio > 0.0 && rep.ratio <= 1.0);
}

#[test]
fn measurable_route_rejects_small_p() {
    let cfg = PipelineConfig {
        p: 0.4,
        ..PipelineConfig::default()
    };
    assert!(matches!(concentrate(&near_third(), &cfg), Err(Error::IllegalRegime(_))));
}

#[test]
fn asymmetric_set_rejected() {
    let set = IntervalUnion::new(vec![(0.1, 0.2)], false).unwrap();
    assert!(matches!(concentrate(&set, &PipelineConfig::default()), Err(Error::InvalidInput(_))));
}

#[test]
fn unreachable_target_reports_best() {
    let cfg = PipelineConfig {
        target_c: 0.99,
        max_escalations: 1,
        ..PipelineConfig::default()
    };
    match concentrate(&near_third(), &cfg) {
        Err(Error::TargetUnreachable { target, best }) => {
            assert_eq!(target, 0.99);
            assert!(best > 0.0 && best < 0.99);
        }
        other => panic!("expected TargetUnreachable, got {other:?}"),
    }
}

#[test]
fn random_trials_reproducible() {
    let a = random_concentration_trial(101, 25, 2, 4.0, 0.1, 50, 3).unwrap();
    let b = random_concentration_trial(101, 25, 2, 4.0, 0.1, 50, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.best_ratio <= 1.0 && a.successes <= 50);
    let c = random_concentration_trial(101, 25, 2, 4.0, 0.1, 50, 4).unwrap();
    assert_eq!(a.base_ratio, c.base_ratio);
}

#[test]
fn l2_bound_trend() {
    let d3 = dirichlet(3).unwrap();
    let ratios: Vec<f64> = [10u64, 100, 1000]
        .iter()
        .map(|&m| l2_gap_bound(0.01, &d3.dilate(m).unwrap(), m).unwrap().measured_ratio)
        .collect();
    assert!(ratios[0] > ratios[1] - 1e-12 && ratios[1] >= ratios[2] - 1e-12);
    let b = l2_gap_bound(0.01, &SparseTrigPoly::one(), 1).unwrap();
    assert!((b.measured_ratio - 0.02).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn l2_bound_holds(freqs in prop::collection::btree_set(0u64..40, 1..8), m in 1u64..300, delta in 0.002f64..0.2) {
        let f = SparseTrigPoly::idempotent(freqs).unwrap().dilate(m).unwrap();
        let n = f.min_gap().unwrap_or(m);
        let r = l2_gap_bound(delta, &f, n).unwrap();
        prop_assert!(r.measured_ratio <= r.bound);
    }
}
