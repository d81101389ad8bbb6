//! Scalar constants: `c_2`, the series `A` and `B` with their minima,
//! the theta-function bound `β(κ)`, the lower bound for `c_4`, and the
//! Fourier coefficients of `|cos|^p`.

mod fourier;
mod series;

pub use fourier::{cos_p_fourier, cos_power_mean, ms_marginal, CosPowerSeries, MsMarginal};
pub use series::{
    a_series, b_series, hurwitz_zeta, mean_abs_sin_pow, small_rational, zeta, SeriesMethod,
    SeriesSpec, SeriesValue,
};

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Search interval for the minimizers of `A` and `B`.
pub const SEARCH_LO: f64 = 0.01;
pub const SEARCH_HI: f64 = 0.49;
const SCAN_POINTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    A,
    B,
}

impl SeriesKind {
    pub fn evaluate(self, lambda: f64, t: f64, spec: &SeriesSpec) -> Result<SeriesValue> {
        match self {
            SeriesKind::A => a_series(lambda, t, spec),
            SeriesKind::B => b_series(lambda, t, spec),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerResult {
    pub argmin: f64,
    pub value: f64,
    pub bracket_width: f64,
}

/// Location of the maximum of `sin²x / x`: the root of `2x cos x = sin x`
/// in `(0, π/2)`, by bisection.
pub fn c2_argmax() -> f64 {
    let g = |x: f64| 2.0 * x * x.cos() - x.sin();
    let (mut lo, mut hi) = (0.5f64, 1.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `c_2 = sup_{x>0} 2 sin²x / (πx) ≈ 0.4613`.
pub fn c2_constant() -> f64 {
    let x = c2_argmax();
    2.0 * x.sin().powi(2) / (PI * x)
}

/// `β(κ) = e^{π²κ²} (1 + 2 Σ_{k≥1} e^{-κ²k²π²})`.
pub fn theta_beta(kappa: f64) -> f64 {
    assert!(kappa > 0.0, "kappa must be positive");
    let a = (kappa * PI).powi(2);
    let mut s = 0.0;
    let mut k = 1.0f64;
    loop {
        let term = (-a * k * k).exp();
        if term < 1e-18 * (1.0 + s) {
            break;
        }
        s += term;
        k += 1.0;
    }
    a.exp() * (1.0 + 2.0 * s)
}

/// Minimizes `f` on `[lo, hi]`: a uniform scan picks the best sample, then
/// golden-section search runs on the bracket formed by its neighbours.
pub fn minimize_on<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<MinimizerResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (lo, f(lo)?);
    let mut best_i = 0usize;
    for i in 1..SCAN_POINTS {
        let t = lo + step * i as f64;
        let v = f(t)?;
        if v < best.1 {
            best = (t, v);
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (argmin, value) = if fc < fd { (c, fc) } else { (d, fd) };
    let (argmin, value) = if best.1 < value { best } else { (argmin, value) };
    Ok(MinimizerResult {
        argmin,
        value,
        bracket_width: b - a,
    })
}

/// `inf_{0<t<1/2}` of `A(λ, ·)` or `B(λ, ·)`, searched on `[0.01, 0.49]`.
pub fn minimize_scalar(kind: SeriesKind, lambda: f64, tol: f64) -> Result<MinimizerResult> {
    let spec = SeriesSpec::default();
    minimize_on(
        |t| kind.evaluate(lambda, t, &spec).map(|v| v.value),
        SEARCH_LO,
        SEARCH_HI,
        tol,
    )
}

/// `max_t 3 sin⁴(πt) / (π⁴ t³)`, a lower bound for `c_4`; returns `(t★, bound)`.
pub fn c4_lower() -> (f64, f64) {
    let h = |t: f64| 3.0 * (PI * t).sin().powi(4) / (PI.powi(4) * t.powi(3));
    let r = minimize_on(|t| Ok(-h(t)), SEARCH_LO, SEARCH_HI, 1e-12)
        .expect("closed form never fails");
    (r.argmin, -r.value)
}

/// The fixed table printed by the `constants` command.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub c2: f64,
    pub two_c2: f64,
    pub min_a2: f64,
    pub min_a2_argmin: f64,
    pub c4_lower: f64,
    pub c4_argmax: f64,
    pub beta_0225: f64,
    pub two_over_beta: f64,
}

pub fn constants_table() -> Result<ConstantsTable> {
    let c2 = c2_constant();
    let a2 = minimize_scalar(SeriesKind::A, 2.0, 1e-10)?;
    let (t4, c4) = c4_lower();
    let beta = theta_beta(0.225);
    Ok(ConstantsTable {
        c2,
        two_c2: 2.0 * c2,
        min_a2: a2.value,
        min_a2_argmin: a2.argmin,
        c4_lower: c4,
        c4_argmax: t4,
        beta_0225: beta,
        two_over_beta: 2.0 / beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_value_and_stationarity() {
        let x = c2_argmax();
        let c = c2_constant();
        assert!(c > 0.46 && c < 0.47);
        let d = |x: f64| 2.0 * (2.0 * x * x.sin() * x.cos() - x.sin().powi(2)) / (PI * x * x);
        assert!(d(x).abs() < 1e-9);
        // Dense scan oracle.
        let scan = (1..31_415_926 / 100)
            .map(|i| {
                let x = i as f64 * 1e-5;
                2.0 * x.sin().powi(2) / (PI * x)
            })
            .fold(0.0f64, f64::max);
        assert!((c - scan).abs() < 1e-9);
    }

    #[test]
    fn theta_examples() {
        let b = theta_beta(0.225);
        assert!(b > 4.0 && b <= 4.13273 + 1e-4);
        assert!(2.0 / b >= 0.48394);
        assert!(theta_beta(0.01) > b);
    }

    #[test]
    fn c4_examples() {
        let (t, bound) = c4_lower();
        assert!(bound > 0.495 && bound <= 0.5);
        assert!((t - 0.267).abs() < 0.005);
    }
}
