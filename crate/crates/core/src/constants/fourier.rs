//! Fourier coefficients of `2^p |cos πy|^p` and the marginal of the
//! two-factor idempotent `(1 + e(x + ky)) (1 + e(x + (k+1)y))`.

use crate::error::{Error, Result};
use crate::trigpoly::{lp_integral, IntervalUnion, QuadratureSpec, SparseTrigPoly};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Relative agreement required between quadrature and closed form for `c_0`.
const C0_AGREEMENT: f64 = 1e-8;

/// Coefficients `c_n` in `2^p |cos πy|^p = Σ_n (-1)^n c_n e(n y)`.
#[derive(Clone, Debug)]
pub struct CosPowerSeries {
    p: f64,
    coeffs: Vec<f64>,
}

impl CosPowerSeries {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("p = {p} must be positive")));
        }
        let c0 = cos_power_mean(p)?;
        Ok(Self { p, coeffs: vec![c0] })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `c_n` for any integer `n` (the sequence is even).
    pub fn coeff(&mut self, n: i64) -> f64 {
        let n = n.unsigned_abs() as usize;
        let half = 0.5 * self.p;
        while self.coeffs.len() <= n {
            let m = (self.coeffs.len() - 1) as f64;
            let last = *self.coeffs.last().expect("c_0 present");
            self.coeffs.push((m - half) / (m + half + 1.0) * last);
        }
        self.coeffs[n]
    }

    /// Partial Fourier sum `Σ_{|n|≤N} (-1)^n c_n e(n y)` (real-valued).
    pub fn partial_sum(&mut self, y: f64, terms: u64) -> f64 {
        let mut s = self.coeff(0);
        for n in 1..=terms as i64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            s += 2.0 * sign * self.coeff(n) * (2.0 * PI * n as f64 * y).cos();
        }
        s
    }
}

/// `∫_0^1 2^p |cos πy|^p dy = ∫ |1 + e(y)|^p`, by quadrature, checked
/// against `2^p Γ((p+1)/2) / (√π Γ(p/2 + 1))`.
pub fn cos_power_mean(p: f64) -> Result<f64> {
    let one_plus_e1 = SparseTrigPoly::idempotent([0, 1])?;
    let spec = QuadratureSpec::with_rel_tol(1e-11);
    let quad = lp_integral(&one_plus_e1, p, &IntervalUnion::full(), &spec)?;
    let closed = (p * 2f64.ln() + ln_gamma((p + 1.0) / 2.0) - ln_gamma(p / 2.0 + 1.0)).exp()
        / PI.sqrt();
    if (quad - closed).abs() > C0_AGREEMENT * closed {
        return Err(Error::NonConvergence(format!(
            "c_0 quadrature {quad} disagrees with closed form {closed}"
        )));
    }
    Ok(quad)
}

/// `c_n` for the exponent `p`.
pub fn cos_p_fourier(p: f64, n: i64) -> Result<f64> {
    Ok(CosPowerSeries::new(p)?.coeff(n))
}

/// Evaluator for `G_p(x) = Σ_n (-1)^n c_{kn} c_{(k+1)n} e(n x)`.
#[derive(Clone, Debug)]
pub struct MsMarginal {
    k: u64,
    /// `(-1)^n c_{kn} c_{(k+1)n}` for `n = 0..`.
    weights: Vec<f64>,
    tail: f64,
}

impl MsMarginal {
    pub fn new(p: f64, k: u64) -> Result<Self> {
        if !(p > 2.0) || (p / 2.0).fract() == 0.0 {
            return Err(Error::IllegalRegime(format!(
                "the two-factor marginal peaks at 1/2 only for p > 2 not even, got {p}"
            )));
        }
        if k.is_multiple_of(2) || (k as f64) <= p / 2.0 {
            return Err(Error::InvalidInput(format!("k = {k} must be odd and exceed p/2")));
        }
        let mut series = CosPowerSeries::new(p)?;
        let c0 = series.coeff(0);
        let mut weights = vec![c0 * c0];
        let scale = c0 * c0;
        let mut n = 1i64;
        loop {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * series.coeff(k as i64 * n) * series.coeff((k as i64 + 1) * n);
            weights.push(w);
            // Terms decay like n^{-2(p+1)}; the remaining tail is at most
            // the last term times n / (2p + 1).
            if w.abs() * n as f64 / (2.0 * p + 1.0) < 1e-17 * scale || n > 200_000 {
                break;
            }
            n += 1;
        }
        let last = weights.last().copied().unwrap_or(0.0).abs();
        Ok(Self {
            k,
            tail: 2.0 * last * n as f64 / (2.0 * p + 1.0),
            weights,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Truncation error estimate.
    pub fn tail_estimate(&self) -> f64 {
        self.tail
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let mut s = self.weights[0];
        for (n, w) in self.weights.iter().enumerate().skip(1) {
            s += 2.0 * w * (2.0 * PI * n as f64 * x).cos();
        }
        s
    }
}

/// `G_p(x)` for the exponent `p` and odd `k > p/2`.
pub fn ms_marginal(p: f64, k: u64, x: f64) -> Result<f64> {
    Ok(MsMarginal::new(p, k)?.evaluate(x))
}
