//! Gap-peaking idempotents at 0 and 1/2 built as Riesz products of a
//! peaking bivariate idempotent, with the depth chosen from the measured
//! marginal.

use crate::constructions::{
    dirichlet, marginal_integral, riesz_base_for_gap, riesz_product_form, riesz_product,
    BivariatePoly, PeakFamily,
};
use crate::error::{Error, Result};
use crate::trigpoly::{
    gauss_legendre, lp_integral, AsProductForm, IntervalUnion,
    ProductForm, QuadratureSpec, SparseTrigPoly, MAX_FREQUENCY,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default bound on the degree of a constructed peaking polynomial.
pub const DEFAULT_PEAK_DEGREE_BUDGET: u64 = 1_000_000;

/// Deepest Riesz product ever attempted.
const MAX_DEPTH: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakingOptions {
    pub epsilon: f64,
    pub delta: f64,
    /// The result has minimum gap strictly above this.
    pub gap: u64,
    pub max_degree: u64,
    /// Fixed Riesz depth instead of the automatic choice.
    pub depth: Option<u32>,
    /// Fixed Riesz base instead of the automatic choice.
    pub base: Option<u64>,
    pub quadrature: QuadratureSpec,
}

impl PeakingOptions {
    pub fn new(epsilon: f64, delta: f64, gap: u64) -> Self {
        Self {
            epsilon,
            delta,
            gap,
            max_degree: DEFAULT_PEAK_DEGREE_BUDGET,
            depth: None,
            base: None,
            quadrature: QuadratureSpec::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon = {} not in (0, 1)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::InvalidInput(format!("delta = {} not in (0, 1/2)", self.delta)));
        }
        Ok(())
    }
}

/// Gaussian envelope `F(a) e^{-A d²} ≤ F ≤ F(a) e^{-a d²}` of a marginal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// Curvature `-F''(a) / (2 F(a))` from a central difference.
    pub curvature: f64,
    pub lower: f64,
    pub upper: f64,
    /// Depth from the sufficient rule `⌈(ε' δ)^{-2}⌉`, `ε' = ε a √(π/A) / 8`.
    pub sufficient_depth: u64,
}

/// Marginal `F` of a bivariate idempotent sampled at Gauss–Legendre nodes
/// split into the peak window and its complement.
#[derive(Clone, Debug)]
pub struct MarginalProfile {
    pub peak: f64,
    pub delta: f64,
    pub peak_value: f64,
    inside: Vec<(f64, f64)>,
    outside: Vec<(f64, f64)>,
}

impl MarginalProfile {
    pub fn new(f: &BivariatePoly, p: f64, peak: f64, delta: f64, spec: &QuadratureSpec) -> Result<Self> {
        let marginal = |x: f64| marginal_integral(f, p, x, spec);
        let peak_value = marginal(peak)?;
        let (nodes, weights) = gauss_legendre(8);
        let sample = |l: f64, r: f64, out: &mut Vec<(f64, f64)>| -> Result<()> {
            let panels = ((r - l) * 128.0).ceil().max(2.0) as usize;
            let w = (r - l) / panels as f64;
            for i in 0..panels {
                let a = l + w * i as f64;
                for (x, wt) in nodes.iter().zip(&weights) {
                    let t = a + 0.5 * w * (1.0 + x);
                    out.push((0.5 * w * wt, marginal(t)? / peak_value));
                }
            }
            Ok(())
        };
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        sample(peak - delta, peak + delta, &mut inside)?;
        sample(peak + delta, peak + 1.0 - delta, &mut outside)?;
        Ok(Self {
            peak,
            delta,
            peak_value,
            inside,
            outside,
        })
    }

    /// `∫_{peak ± δ} F^J / ∫_T F^J`.
    pub fn mass(&self, depth: u32) -> f64 {
        let s = |v: &[(f64, f64)]| v.iter().map(|&(w, f)| w * f.powi(depth as i32)).sum::<f64>();
        let a = s(&self.inside);
        a / (a + s(&self.outside))
    }

    /// Smallest depth whose mass reaches `level`, if any up to `max`.
    pub fn depth_for(&self, level: f64, max: u32) -> Option<u32> {
        (1..=max).find(|&j| self.mass(j) >= level)
    }

    /// Largest normalized value outside the window (below 1 for a strict peak).
    pub fn max_outside(&self) -> f64 {
        self.outside.iter().map(|v| v.1).fold(0.0, f64::max)
    }
}

/// Envelope constants of the marginal around its peak.
pub fn envelope(
    f: &BivariatePoly,
    p: f64,
    peak: f64,
    epsilon: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<Envelope> {
    let fm = |x: f64| marginal_integral(f, p, x, spec);
    let f0 = fm(peak)?;
    let h = 1e-3;
    let second = (fm(peak + h)? - 2.0 * f0 + fm(peak - h)?) / (h * h);
    let curvature = -second / (2.0 * f0);
    let (mut lower, mut upper) = (curvature, curvature);
    for i in 1..=100 {
        let d = 0.5 * i as f64 / 100.0;
        let v = fm(peak + d)? / f0;
        if v >= 1.0 {
            return Err(Error::IllegalRegime(format!(
                "marginal has no strict maximum at {peak} (ratio {v} at distance {d})"
            )));
        }
        let g = -v.ln() / (d * d);
        lower = lower.min(g);
        upper = upper.max(g);
    }
    let eps_prime = epsilon * lower * (PI / upper).sqrt() / 8.0;
    let raw = (eps_prime * delta).powi(-2).ceil();
    let sufficient_depth = if raw.is_finite() && raw < u64::MAX as f64 { raw as u64 } else { u64::MAX };
    Ok(Envelope {
        curvature,
        lower,
        upper,
        sufficient_depth,
    })
}

/// Upper bound for the degree of `∏_{j≤J} f(x, R^j x)`.
pub fn riesz_degree(f: &BivariatePoly, base: u64, depth: u32) -> u128 {
    let n_max = f.pairs().iter().map(|p| p.0).max().unwrap_or(0) as u128;
    let m_max = f.pairs().iter().map(|p| p.1).max().unwrap_or(0) as u128;
    let mut total = n_max * depth as u128;
    let mut rj: u128 = 1;
    for _ in 0..depth {
        rj = rj.saturating_mul(base as u128);
        total = total.saturating_add(m_max.saturating_mul(rj));
    }
    total
}

/// A peaking idempotent with its measured peak mass.
#[derive(Clone, Debug)]
pub struct PeakingIdempotent {
    pub poly: SparseTrigPoly,
    pub form: ProductForm,
    /// `None` for the Dirichlet kernel used when `p = 2`.
    pub family: Option<PeakFamily>,
    pub peak_point: f64,
    pub delta: f64,
    pub depth: u32,
    pub base: u64,
    /// `∫_{a±δ} |T|^p / ∫_T |T|^p`, measured.
    pub peak_mass: f64,
    /// `∫_T |T|^p`.
    pub total: f64,
    /// The corresponding mass of the marginal power `F^J`.
    pub marginal_mass: Option<f64>,
    pub envelope: Option<Envelope>,
    pub target_met: bool,
}

fn window(peak: f64, delta: f64) -> Result<IntervalUnion> {
    IntervalUnion::new(vec![(peak - delta, peak + delta)], true)
}

fn measure(form: &ProductForm, p: f64, peak: f64, delta: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let total = lp_integral(form, p, &IntervalUnion::full(), spec)?;
    let inside = lp_integral(form, p, &window(peak, delta)?, spec)?;
    Ok((inside / total, total))
}

/// Largest depth whose automatic Riesz product stays within the degree budget.
fn max_depth_within(f: &BivariatePoly, gap: u64, max_degree: u64) -> u32 {
    let cap = (max_degree as u128).min(MAX_FREQUENCY as u128);
    (1..=MAX_DEPTH)
        .take_while(|&j| riesz_degree(f, riesz_base_for_gap(f, j, gap), j) <= cap)
        .last()
        .unwrap_or(0)
}

/// Peaking idempotent for the peak point `a ∈ {0, 1/2}` whose measured
/// mass on `a ± δ` exceeds `1 - ε` and whose gaps exceed `opts.gap`.
///
/// Fails with `IllegalRegime` for `(a, p) = (0, 2)` and for `a = 1/2`
/// with even `p`, and with `ResourceLimit` when the required depth does
/// not fit the degree budget.
pub fn build_peaking_idempotent(a: f64, p: f64, opts: &PeakingOptions) -> Result<PeakingIdempotent> {
    let t = peaking_within_budget(a, p, opts)?;
    if t.target_met {
        Ok(t)
    } else {
        Err(Error::ResourceLimit(format!(
            "peak mass {:.4} on {a} ± {} stays below {} within degree budget {} (depth {}, base {})",
            t.peak_mass,
            opts.delta,
            1.0 - opts.epsilon,
            opts.max_degree,
            t.depth,
            t.base
        )))
    }
}

/// As [`build_peaking_idempotent`] but returns the best polynomial found
/// within the budget, flagging whether `1 - ε` was reached.
pub fn peaking_within_budget(a: f64, p: f64, opts: &PeakingOptions) -> Result<PeakingIdempotent> {
    opts.validate()?;
    let family = PeakFamily::select(a, p)?;
    let f = family.bivariate()?;
    let spec = opts.quadrature;
    let gap = opts.gap + 1;
    let profile = MarginalProfile::new(&f, p, a, opts.delta, &spec)?;
    let env = envelope(&f, p, a, opts.epsilon, opts.delta, &spec)?;
    let cap = max_depth_within(&f, gap, opts.max_degree);
    if cap == 0 && opts.depth.is_none() {
        return Err(Error::ResourceLimit(format!(
            "even a single Riesz factor with gap {gap} exceeds degree budget {}",
            opts.max_degree
        )));
    }
    let wanted = profile
        .depth_for(1.0 - 0.5 * opts.epsilon, MAX_DEPTH.min(env.sufficient_depth.max(1) as u32))
        .unwrap_or(MAX_DEPTH);
    let mut depth = opts.depth.unwrap_or_else(|| wanted.min(cap));

    let mut best: Option<PeakingIdempotent> = None;
    loop {
        let mut base = opts.base.unwrap_or_else(|| riesz_base_for_gap(&f, depth, gap));
        loop {
            let deg = riesz_degree(&f, base, depth);
            if deg > opts.max_degree as u128 || deg > MAX_FREQUENCY as u128 {
                break;
            }
            let poly = riesz_product(&f, base, depth)?;
            let form = riesz_product_form(&f, base, depth)?;
            let (peak_mass, total) = measure(&form, p, a, opts.delta, &spec)?;
            let met = peak_mass > 1.0 - opts.epsilon;
            let cand = PeakingIdempotent {
                poly,
                form,
                family: Some(family),
                peak_point: a,
                delta: opts.delta,
                depth,
                base,
                peak_mass,
                total,
                marginal_mass: Some(profile.mass(depth)),
                envelope: Some(env),
                target_met: met,
            };
            if best.as_ref().is_none_or(|b| cand.peak_mass > b.peak_mass) {
                best = Some(cand);
            }
            if met || opts.base.is_some() {
                break;
            }
            base = base.saturating_mul(2);
        }
        let done = best.as_ref().is_some_and(|b| b.target_met);
        if done || opts.depth.is_some() || depth >= cap {
            break;
        }
        depth += 1;
    }
    best.ok_or_else(|| {
        Error::ResourceLimit(format!(
            "Riesz product of depth {depth} exceeds degree budget {}",
            opts.max_degree
        ))
    })
}

/// Dirichlet kernel peaking at 0 in `L^2` (no gap): the length is doubled
/// until the mass on `±δ` exceeds `1 - ε`.
pub fn dirichlet_peak(opts: &PeakingOptions) -> Result<PeakingIdempotent> {
    opts.validate()?;
    let p = 2.0;
    let mut n = ((2.0 / opts.delta).ceil() as u64).max(2);
    loop {
        let poly = dirichlet(n)?;
        let form = poly.to_product_form();
        let (peak_mass, total) = measure(&form, p, 0.0, opts.delta, &opts.quadrature)?;
        let met = peak_mass > 1.0 - opts.epsilon;
        if met || 2 * n > opts.max_degree {
            return Ok(PeakingIdempotent {
                poly,
                form,
                family: None,
                peak_point: 0.0,
                delta: opts.delta,
                depth: 0,
                base: n,
                peak_mass,
                total,
                marginal_mass: None,
                envelope: None,
                target_met: met,
            });
        }
        n *= 2;
    }
}

impl PeakingIdempotent {
    /// `T(q x)` as a product form.
    pub fn dilated_form(&self, q: u64) -> Result<ProductForm> {
        self.form.dilate(q)
    }

    /// `|T(x)|` for quick inspection.
    pub fn modulus(&self, x: f64) -> f64 {
        self.form.evaluate(x).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_gates() {
        let o = PeakingOptions::new(0.5, 0.1, 10);
        assert!(matches!(build_peaking_idempotent(0.0, 2.0, &o), Err(Error::IllegalRegime(_))));
        assert!(matches!(build_peaking_idempotent(0.5, 4.0, &o), Err(Error::IllegalRegime(_))));
    }

    #[test]
    fn marginal_mass_monotone_in_depth() {
        let f = PeakFamily::At0High.bivariate().unwrap();
        let prof = MarginalProfile::new(&f, 4.0, 0.0, 0.2, &QuadratureSpec::default()).unwrap();
        let masses: Vec<f64> = (1..=12).map(|j| prof.mass(j)).collect();
        assert!(masses.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{masses:?}");
        assert!(prof.max_outside() < 1.0);
    }

    #[test]
    fn peak_at_zero_p4() {
        let o = PeakingOptions::new(0.4, 0.3, 10);
        let t = build_peaking_idempotent(0.0, 4.0, &o).unwrap();
        assert!(t.peak_mass > 0.6);
        assert!(t.poly.min_gap().unwrap() > 10);
        assert!(t.poly.is_idempotent());
        let env = t.envelope.unwrap();
        assert!(env.lower > 0.0 && env.lower <= env.curvature && env.curvature <= env.upper);
    }

    #[test]
    fn riesz_degree_matches_expansion() {
        let f = PeakFamily::At0High.bivariate().unwrap();
        let g = riesz_product(&f, 13, 3).unwrap();
        assert_eq!(riesz_degree(&f, 13, 3), g.degree() as u128);
    }
}
