//! Acceptance criteria, one test per criterion. Each prints a
//! `[PASS]`/`[FAIL]` line with the measured values before asserting.

use idemconc::constants::*;
use idemconc::constructions::*;
use idemconc::grids::{bernstein_report, grid_ratio};
use idemconc::pipeline::*;
use idemconc::trigpoly::*;
use idemconc::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

/// Pinned tolerances. These are part of the acceptance contract.
mod tol {
    pub const C2_LO: f64 = 0.4612;
    pub const C2_HI: f64 = 0.4614;
    pub const C2_SECONDS: f64 = 0.1;
    pub const SERIES_IDENTITY: f64 = 1e-9;
    pub const TWO_C2: f64 = 1e-6;
    pub const C4_LOWER: f64 = 0.495;
    pub const C4_ARGMIN: f64 = 0.005;
    pub const BETA: f64 = 4.13273 + 1e-4;
    pub const TWO_OVER_BETA: f64 = 0.48394;
    pub const PARSEVAL_REL: f64 = 1e-8;
    pub const MARGINAL_SERIES: f64 = 1e-5;
    pub const SPOT_VALUE: f64 = 1e-8;
    pub const RIESZ_REL: f64 = 0.02;
    pub const GRID_LIMIT_REL: f64 = 0.03;
    pub const ORACLE_ABS: f64 = 1e-6;
    pub const L2_LEVEL: f64 = 0.05;
    pub const BERNSTEIN_SLACK: f64 = 1e-8;
}

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] criterion {n:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_c2_reproduction() {
    let start = Instant::now();
    let c2 = c2_constant();
    let secs = start.elapsed().as_secs_f64();
    // Oracle: dense scan of 2 sin²x / (πx) on (0, 3].
    let n = 300_000;
    let scan = (1..=n)
        .map(|i| {
            let x = 3.0 * i as f64 / n as f64;
            2.0 * x.sin().powi(2) / (PI * x)
        })
        .fold(0.0, f64::max);
    let pass = c2 > tol::C2_LO && c2 < tol::C2_HI && (c2 - scan).abs() < 1e-8 && secs < tol::C2_SECONDS;
    verdict(1, "c2 reproduction", pass, format!("c2 = {c2:.10}, scan = {scan:.10}, {secs:.2e} s"));
}

#[test]
fn criterion_02_a_series_identities() {
    let spec = SeriesSpec::default();
    let mut worst_exact: f64 = 0.0;
    for i in 0..50 {
        let t = 0.01 + 0.48 * i as f64 / 49.0;
        let exact = PI * PI * t / (4.0 * (PI * t).sin().powi(2));
        worst_exact = worst_exact.max((a_series(2.0, t, &spec).unwrap().value - exact).abs());
    }
    let mut worst_zeta: f64 = 0.0;
    for lambda in [2.0, 3.0, 4.5] {
        let expected = (1.0 - 2f64.powf(-lambda)) * zeta(lambda);
        worst_zeta = worst_zeta.max((a_series(lambda, 0.25, &spec).unwrap().value - expected).abs());
    }
    let min = minimize_scalar(SeriesKind::A, 2.0, 1e-10).unwrap();
    let gap = (1.0 / min.value - 2.0 * c2_constant()).abs();
    let pass = worst_exact < tol::SERIES_IDENTITY && worst_zeta < tol::SERIES_IDENTITY && gap < tol::TWO_C2;
    verdict(
        2,
        "A-series identities",
        pass,
        format!("closed form {worst_exact:.2e}, zeta {worst_zeta:.2e}, |1/min A - 2c2| = {gap:.2e}"),
    );
}

#[test]
fn criterion_03_b_series_constants() {
    let min = minimize_scalar(SeriesKind::B, 4.0, 1e-8).unwrap();
    let lower = 2.0 / min.value;
    let beta = theta_beta(0.225);
    let pass = lower >= tol::C4_LOWER
        && (min.argmin - 0.267).abs() <= tol::C4_ARGMIN
        && beta <= tol::BETA
        && 2.0 / beta >= tol::TWO_OVER_BETA;
    verdict(
        3,
        "B-series constants",
        pass,
        format!("2/min B(4) = {lower:.7} at t = {:.6}, beta = {beta:.10}, 2/beta = {:.7}", min.argmin, 2.0 / beta),
    );
}

#[test]
fn criterion_04_quadrature_vs_parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let density: f64 = rng.gen_range(0.02..0.5);
        let deg = rng.gen_range(1..=256u64);
        let mut freqs: Vec<u64> = (0..=deg).filter(|_| rng.gen::<f64>() < density).collect();
        if freqs.is_empty() {
            freqs.push(deg);
        }
        let f = SparseTrigPoly::idempotent(freqs).unwrap();
        for k in 1..=3 {
            let exact = parseval_even_norm(&f, k).unwrap();
            let q = lp_integral(&f, 2.0 * k as f64, &IntervalUnion::full(), &spec).unwrap();
            worst = worst.max((q - exact).abs() / exact);
        }
    }
    verdict(4, "quadrature vs Parseval", worst < tol::PARSEVAL_REL, format!("worst relative disagreement {worst:.2e}"));
}

#[test]
fn criterion_05_peaking_marginals() {
    let spec = QuadratureSpec::default();
    let f = PeakFamily::At0High.bivariate().unwrap();
    let argmax = |vals: &[f64]| vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let grid: Vec<f64> = (0..1001).map(|i| i as f64 / 1000.0).collect();
    let f4: Vec<f64> = grid.iter().map(|&x| marginal_integral(&f, 4.0, x, &spec).unwrap()).collect();
    let f1: Vec<f64> = grid.iter().map(|&x| marginal_integral(&f, 1.0, x, &spec).unwrap()).collect();
    let at0 = argmax(&f4) == 0 || argmax(&f4) == 1000;
    let at_half = argmax(&f1) == 500;

    let ms = PeakFamily::AtHalfHigh(3).bivariate().unwrap();
    let mut worst: f64 = 0.0;
    let mut g3 = Vec::with_capacity(grid.len());
    for &x in &grid {
        let quad = marginal_integral(&ms, 3.0, x, &spec).unwrap();
        worst = worst.max((ms_marginal(3.0, 3, x).unwrap() - quad).abs());
        g3.push(quad);
    }
    let g3_half = argmax(&g3) == 500;
    let spot0 = (marginal_integral(&f, 4.0, 0.0, &spec).unwrap() - 19.0).abs();
    let spot_half = (marginal_integral(&f, 4.0, 0.5, &spec).unwrap() - 11.0).abs();
    let pass = at0 && at_half && g3_half && worst < tol::MARGINAL_SERIES && spot0 < tol::SPOT_VALUE && spot_half < tol::SPOT_VALUE;
    verdict(
        5,
        "peaking marginals",
        pass,
        format!(
            "F4 max at 0: {at0}, F1 max at 1/2: {at_half}, G3 max at 1/2: {g3_half}, series gap {worst:.2e}, |F4(0)-19| = {spot0:.1e}, |F4(1/2)-11| = {spot_half:.1e}"
        ),
    );
}

#[test]
fn criterion_06_riesz_convergence() {
    let f = PeakFamily::At0High.bivariate().unwrap();
    let spec = QuadratureSpec::default();
    let interval = IntervalUnion::symmetric_around(0.0, 0.05).unwrap();
    let limit = MarginalProfile::new(&f, 4.0, 0.0, 0.05, &spec).unwrap().mass(2);
    let ratio = |r: u64| {
        let g = riesz_product_form(&f, r, 2).unwrap();
        lp_integral(&g, 4.0, &interval, &spec).unwrap() / lp_integral(&g, 4.0, &IntervalUnion::full(), &spec).unwrap()
    };
    let e16 = (ratio(16) - limit).abs() / limit;
    let e128 = (ratio(128) - limit).abs() / limit;
    verdict(
        6,
        "Riesz convergence",
        e128 < tol::RIESZ_REL && e128 < e16,
        format!("limit {limit:.6}, relative error R=16: {e16:.4}, R=128: {e128:.4}"),
    );
}

#[test]
fn criterion_07_grid_limit_agreement() {
    // On the star grid the limit is 1/(2A(Lp, r/(2q))) and the optimal
    // length is r = 2q t*; the plain grid uses 1/B(Lp, r/q) with r = q t*.
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (l, p) in [(1u32, 4.0), (2, 2.0)] {
        let lambda = l as f64 * p;
        let ta = minimize_scalar(SeriesKind::A, lambda, 1e-8).unwrap().argmin;
        let tb = minimize_scalar(SeriesKind::B, lambda, 1e-8).unwrap().argmin;
        for q in [101u64, 401] {
            for star in [true, false] {
                let r = if star { (2.0 * q as f64 * ta).round() } else { (q as f64 * tb).round() } as u64;
                let poly = dirichlet_grid_product(r, q, l, star).unwrap();
                let got = grid_ratio(&poly, p, q, 1, star).unwrap().ratio;
                let want = idemconc::grids::predicted_grid_limit(r, q, l, p, star).unwrap();
                let rel = (got - want).abs() / want;
                worst = worst.max(rel);
                lines.push(format!("(L={l},p={p},q={q},{}) {rel:.1e}", if star { "star" } else { "plain" }));
            }
        }
    }
    verdict(7, "grid-limit agreement", worst < tol::GRID_LIMIT_REL, format!("worst {worst:.2e}; {}", lines.join(", ")));
}

#[test]
fn criterion_08_end_to_end_certificate() {
    let set = IntervalUnion::symmetrize(&[(1.0 / 3.0 - 0.02, 1.0 / 3.0 + 0.02)]).unwrap();
    let cfg = PipelineConfig {
        p: 4.0,
        gap_n: 50,
        ..PipelineConfig::default()
    };
    let c = concentrate_with_polynomial(&set, &cfg).unwrap();
    let oracle = dense_reference_integral(&c.polynomial, 4.0, &set)
        / dense_reference_integral(&c.polynomial, 4.0, &IntervalUnion::full());
    let gap = c.polynomial.min_gap().unwrap_or(u64::MAX);
    let r = &c.report;
    let pass = (oracle - r.ratio).abs() < tol::ORACLE_ABS && r.ratio >= r.certificate && r.certificate > 0.0 && gap > 50;
    verdict(
        8,
        "end-to-end certificate",
        pass,
        format!(
            "ratio {:.8}, oracle {oracle:.8}, certificate {:.6}, min gap {gap}, terms {}",
            r.ratio, r.certificate, r.polynomial.terms
        ),
    );
}

#[test]
fn criterion_09_l2_negative_result() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    let mut checked = 0;
    for _ in 0..40 {
        let freqs: Vec<u64> = (0..30).filter(|_| rng.gen::<f64>() < 0.3).chain([30]).collect();
        let m = rng.gen_range(1..500u64);
        let f = SparseTrigPoly::idempotent(freqs).unwrap().dilate(m).unwrap();
        let delta = rng.gen_range(0.002..0.2);
        let r = l2_gap_bound(delta, &f, f.min_gap().unwrap()).unwrap();
        checked += 1;
        if r.measured_ratio > r.bound {
            violations += 1;
        }
    }
    let d3 = dirichlet(3).unwrap();
    let sweep = [2u64, 5, 10, 20, 50, 100, 200, 500, 1000];
    let ratios: Vec<f64> = sweep
        .iter()
        .map(|&m| l2_gap_bound(0.01, &d3.dilate(m).unwrap(), m).unwrap().measured_ratio)
        .collect();
    let threshold = (0..sweep.len()).find(|&i| ratios[i..].iter().all(|&r| r < tol::L2_LEVEL)).map(|i| sweep[i]);
    let pass = violations == 0 && threshold.is_some();
    verdict(
        9,
        "L2 negative result",
        pass,
        format!("{violations}/{checked} bound violations, ratio < 0.05 from gap {threshold:?} on, ratios {ratios:.4?}"),
    );
}

#[test]
fn criterion_10_bernstein() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let spec = QuadratureSpec::default();
    let q = 64;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut freqs: Vec<u64> = (0..q).filter(|_| rng.gen::<f64>() < 0.25).collect();
        if freqs.is_empty() {
            freqs.push(0);
        }
        let f = SparseTrigPoly::idempotent(freqs).unwrap();
        for p in [1.0, 2.0, 3.5] {
            for t in [0.0005, -0.002, 0.004, -0.007, 0.01] {
                let rep = bernstein_report(&f, p, q, t, &spec).unwrap();
                let s = rep.bernstein;
                worst = worst.max(s.ratio());
                if s.lhs > s.rhs * (1.0 + tol::BERNSTEIN_SLACK) {
                    violations += 1;
                }
            }
        }
    }
    verdict(10, "Bernstein inequality", violations == 0, format!("{violations} violations of 750, max lhs/rhs {worst:.4}"));
}

#[test]
fn criterion_11_randomized_construction() {
    let base = random_concentration_trial(401, 100, 2, 4.0, 0.0, 0, 7).unwrap().base_ratio;
    let k = 0.8 * base;
    let a = random_concentration_trial(401, 100, 2, 4.0, k, 200, 7).unwrap();
    let b = random_concentration_trial(401, 100, 2, 4.0, k, 200, 7).unwrap();
    let identical = a == b && a.best_ratio.to_bits() == b.best_ratio.to_bits();
    verdict(
        11,
        "randomized construction",
        a.successes >= 1 && identical,
        format!("{} / 200 successes at K = {k:.6} (base {base:.6}), best {:.6}, reproducible {identical}", a.successes, a.best_ratio),
    );
}

#[test]
fn criterion_12_regime_gates() {
    let o = PeakingOptions::new(0.5, 0.1, 10);
    let code = |r: Result<PeakingIdempotent, Error>| r.err().map(|e| e.code());
    let zero_l2 = code(build_peaking_idempotent(0.0, 2.0, &o));
    let half_p4 = code(build_peaking_idempotent(0.5, 4.0, &o));
    let set = IntervalUnion::symmetrize(&[(0.2, 0.3)]).unwrap();
    let cfg = PipelineConfig {
        p: 0.4,
        route: Route::Measurable,
        ..PipelineConfig::default()
    };
    let small_p = concentrate(&set, &cfg).err().map(|e| e.code());
    let want = Some("IllegalRegime");
    verdict(
        12,
        "regime gates",
        zero_l2 == want && half_p4 == want && small_p == want,
        format!("(0, 2): {zero_l2:?}, (1/2, 4): {half_p4:?}, measurable p = 0.4: {small_p:?}"),
    );
}
