use super::peaking::{dirichlet_peak, peaking_within_budget, PeakingIdempotent, PeakingOptions};
use crate::constants::{c2_constant, minimize_scalar, SeriesKind};
use crate::constructions::{dirichlet, grid_power_product, pair_product};
use crate::diophantine::{locate_in_set, GridApproximation};
use crate::error::{Error, Result};
use crate::grids::{grid_ratio, remap_to_target};
use crate::trigpoly::{
    lp_integral, AsProductForm, ComplexTrigPoly, IntervalUnion, PolyDescriptor, ProductForm,
    QuadratureSpec, SparseTrigPoly, MAX_FREQUENCY,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Which class of target sets the construction must handle.
///
/// `Measurable` follows the interval-union argument and needs `p > 1/2`
/// with Dirichlet powers `L ≤ 3`; `Open` allows any `L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Open,
    #[default]
    Measurable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Plain,
    Star,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub p: f64,
    pub target_c: f64,
    pub gap_n: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub theta: f64,
    /// Riesz depth, automatic when `None`.
    pub j: Option<u32>,
    /// Riesz base, automatic when `None`.
    pub r: Option<u64>,
    /// Dirichlet power, automatic when `None`.
    pub l: Option<u32>,
    pub seed: u64,
    pub route: Route,
    pub q_max: u64,
    /// Degree budget for the final polynomial.
    pub max_degree: u64,
    /// Number of escalation steps after the first attempt.
    pub max_escalations: u32,
    pub quadrature: QuadratureSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            p: 4.0,
            target_c: 0.02,
            gap_n: 0,
            epsilon: 0.6,
            delta: 0.3,
            eta: 0.05,
            theta: 10.0,
            j: None,
            r: None,
            l: None,
            seed: 7,
            route: Route::Measurable,
            q_max: 4096,
            max_degree: 2_000_000,
            max_escalations: 3,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let open01 = |v: f64| v > 0.0 && v < 1.0;
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::InvalidInput(format!("p = {} must be positive", self.p)));
        }
        for (name, v) in [("target_c", self.target_c), ("epsilon", self.epsilon), ("eta", self.eta)] {
            if !open01(v) {
                return Err(Error::InvalidInput(format!("{name} = {v} not in (0, 1)")));
            }
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::InvalidInput(format!("delta = {} not in (0, 1/2)", self.delta)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidInput("theta must be positive".into()));
        }
        if self.route == Route::Measurable && self.p <= 0.5 {
            return Err(Error::IllegalRegime(format!(
                "measurable route needs p > 1/2, got p = {}",
                self.p
            )));
        }
        if self.route == Route::Measurable && self.l.is_some_and(|l| l > 3) {
            return Err(Error::InvalidInput("measurable route allows L <= 3".into()));
        }
        self.quadrature.validate()
    }

    fn is_even_integer(&self) -> bool {
        self.p.fract() == 0.0 && (self.p as u64).is_multiple_of(2)
    }

    fn grid(&self) -> GridKind {
        if self.is_even_integer() {
            GridKind::Plain
        } else {
            GridKind::Star
        }
    }

    fn is_l2(&self) -> bool {
        self.p == 2.0
    }

    /// Smallest `L ≥ 1` with `L p > 1`, so the limiting series converge.
    fn default_l(&self) -> u32 {
        let mut l = 1;
        while (l as f64) * self.p <= 1.0 {
            l += 1;
        }
        l
    }

    fn max_l(&self) -> u32 {
        match self.route {
            Route::Measurable => 3,
            Route::Open => u32::MAX,
        }
    }
}

/// Measured quantities of the inequality chain behind the certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub q: u64,
    pub numerator: u64,
    pub target_point: f64,
    pub density: f64,
    /// Length of the Dirichlet kernel behind `R`.
    pub dirichlet_len: u64,
    pub l: u32,
    /// Dilation `ν ≡ 1` modulo the grid applied to `R` for the gap.
    pub nu: u64,
    /// Grid ratio `C` of `R` at the target point.
    pub grid_ratio: f64,
    /// `1 - min_W |R|^p / |R(x_target)|^p` on the peak window.
    pub r_variation: f64,
    /// `max_{|s| ≤ w} Σ_k |R(x_k + s)|^p / Σ_k |R(x_k)|^p`.
    pub window_spread: f64,
    /// The same maximum over all shifts.
    pub global_spread: f64,
    /// Peak mass `1 - ε_meas` of `T` on its window.
    pub peak_mass: f64,
    /// Normalized mass of `T(q ·)` on the window around the target inside `E`.
    pub peak_mass_in_set: f64,
    /// Half-width of the peak window of `T`, and of the window in `x`.
    pub delta_t: f64,
    pub window: f64,
    pub riesz_depth: u32,
    pub riesz_base: u64,
    pub t_degree: u64,
    pub certificate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub dirichlet_len: u64,
    pub nu: u64,
    pub grid_ratio: f64,
    pub certificate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub schema_version: u32,
    pub polynomial: PolyDescriptor,
    pub set: IntervalUnion,
    pub p: f64,
    pub grid: GridKind,
    pub integral_on_e: f64,
    pub integral_total: f64,
    pub ratio: f64,
    pub certificate: f64,
    pub chain: Option<Chain>,
    pub candidates: Vec<CandidateSummary>,
    /// Attempts made, including escalations.
    pub attempts: u32,
    /// For `p = 2`: the ceiling of concentration under large gaps.
    pub ceiling: Option<f64>,
    pub config: PipelineConfig,
}

/// A report together with the polynomial it describes.
#[derive(Clone, Debug)]
pub struct Concentration {
    pub report: ConcentrationReport,
    pub polynomial: SparseTrigPoly,
    pub form: ProductForm,
}

/// Builds an idempotent concentrating on `set` and measures it.
pub fn concentrate(set: &IntervalUnion, config: &PipelineConfig) -> Result<ConcentrationReport> {
    concentrate_with_polynomial(set, config).map(|c| c.report)
}

pub fn concentrate_with_polynomial(set: &IntervalUnion, config: &PipelineConfig) -> Result<Concentration> {
    config.validate()?;
    if !set.is_symmetric() {
        return Err(Error::InvalidInput("the target set must be symmetric".into()));
    }
    if set.measure() >= 1.0 - 1e-12 {
        let one = SparseTrigPoly::one();
        let report = ConcentrationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            polynomial: one.descriptor(),
            set: set.clone(),
            p: config.p,
            grid: config.grid(),
            integral_on_e: 1.0,
            integral_total: 1.0,
            ratio: 1.0,
            certificate: 1.0,
            chain: None,
            candidates: Vec::new(),
            attempts: 0,
            ceiling: config.is_l2().then(c2_constant),
            config: config.clone(),
        };
        return Ok(Concentration {
            report,
            form: one.to_product_form(),
            polynomial: one,
        });
    }

    let mut ctx = Context::new(set, config);
    let mut q_min = 1;
    let mut l = config.l.unwrap_or_else(|| config.default_l());
    let mut depth = config.j;
    let mut best: Option<Concentration> = None;
    let mut attempts = 0;
    for step in 0..=config.max_escalations {
        attempts += 1;
        let outcome = ctx.attempt(q_min, l, depth);
        match outcome {
            Ok(c) => {
                let improved = best.as_ref().is_none_or(|b| c.report.ratio > b.report.ratio);
                let (q, used_depth) = c
                    .report
                    .chain
                    .as_ref()
                    .map_or((q_min, depth.unwrap_or(1)), |ch| (ch.q, ch.riesz_depth));
                if improved {
                    best = Some(c);
                }
                if best.as_ref().is_some_and(|b| b.report.ratio >= config.target_c) {
                    break;
                }
                match step % 3 {
                    0 => q_min = 2 * q,
                    1 if l < config.max_l() => l += 1,
                    _ => depth = Some(used_depth + 1),
                }
            }
            Err(e) if best.is_none() || !e.is_domain_error() => return Err(e),
            Err(_) => break,
        }
    }
    let mut best = best.expect("first attempt either succeeds or returns");
    best.report.attempts = attempts;
    if best.report.ratio < config.target_c {
        return Err(Error::TargetUnreachable {
            target: config.target_c,
            best: best.report.ratio,
        });
    }
    Ok(best)
}

struct Candidate {
    r_poly: SparseTrigPoly,
    peak: PeakingIdempotent,
    chain: Chain,
}

struct Context<'a> {
    set: &'a IntervalUnion,
    cfg: &'a PipelineConfig,
    argmins: HashMap<(u8, u64), f64>,
}

impl<'a> Context<'a> {
    fn new(set: &'a IntervalUnion, cfg: &'a PipelineConfig) -> Self {
        Self {
            set,
            cfg,
            argmins: HashMap::new(),
        }
    }

    fn star(&self) -> bool {
        self.cfg.grid() == GridKind::Star
    }

    /// Optimal `r/q` (plain) or `r/(2q)` (star) for the grid ratio of `D_r^L`.
    fn optimal_fraction(&mut self, l: u32) -> Result<f64> {
        let lambda = l as f64 * self.cfg.p;
        let kind = if self.star() { SeriesKind::A } else { SeriesKind::B };
        let key = (self.star() as u8, lambda.to_bits());
        if let Some(&t) = self.argmins.get(&key) {
            return Ok(t);
        }
        let t = minimize_scalar(kind, lambda, 1e-4)?.argmin;
        self.argmins.insert(key, t);
        Ok(t)
    }

    fn attempt(&mut self, q_min: u64, l: u32, depth: Option<u32>) -> Result<Concentration> {
        let cfg = self.cfg;
        let star = self.star();
        let loc = locate_in_set(self.set, cfg.theta, cfg.eta, q_min.max(2), cfg.q_max, star, 1)?;
        let q = loc.q;
        let delta_t = cfg.delta.min(cfg.theta / q as f64);
        let t = self.optimal_fraction(l)?;
        let scale = if star { 2.0 * q as f64 } else { q as f64 };
        let r_star = ((scale * t).round() as u64).clamp(1, q - 1);
        let mut lens = vec![r_star];
        if r_star != 1 {
            lens.push(1);
        }
        let mut candidates = Vec::new();
        let mut summaries = Vec::new();
        let mut last_err = None;
        for len in lens {
            match self.candidate(&loc, len, l, depth, delta_t) {
                Ok(c) => {
                    summaries.push(CandidateSummary {
                        dirichlet_len: len,
                        nu: c.chain.nu,
                        grid_ratio: c.chain.grid_ratio,
                        certificate: c.chain.certificate,
                    });
                    candidates.push(c);
                }
                Err(e) if e.is_domain_error() => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        let chosen = candidates
            .into_iter()
            .max_by(|a, b| a.chain.certificate.total_cmp(&b.chain.certificate))
            .ok_or_else(|| last_err.unwrap_or_else(|| Error::NotFound("no candidate".into())))?;
        self.finish(chosen, summaries)
    }

    fn candidate(
        &mut self,
        loc: &GridApproximation,
        len: u64,
        l: u32,
        depth: Option<u32>,
        delta_t: f64,
    ) -> Result<Candidate> {
        let cfg = self.cfg;
        let star = self.star();
        let q = loc.q;
        let modulus = loc.modulus();
        let gap = if cfg.is_l2() { 0 } else { cfg.gap_n };

        let base = remap_to_target(&dirichlet(len)?, q, loc.numerator, star, 1)?;
        let r_plain = match (cfg.route, l) {
            (_, 1) => base,
            (Route::Measurable, 2) => pair_product(&base, q)?,
            _ => grid_power_product(&base, q, l, star)?,
        };
        let nu = match r_plain.min_gap() {
            Some(g) if gap > 0 && g <= gap => {
                let need = gap / g + 1;
                let k = (need - 1).div_ceil(modulus);
                k.checked_mul(modulus)
                    .and_then(|v| v.checked_add(1))
                    .ok_or_else(|| Error::Overflow("dilation for the gap".into()))?
            }
            _ => 1,
        };
        let r_poly = if nu == 1 { r_plain } else { r_plain.dilate(nu)? };
        let r_deg = r_poly.degree();

        let t_gap = (r_deg + gap) / q + 1;
        let t_budget = (cfg.max_degree.saturating_sub(r_deg)) / q;
        let peak = if cfg.is_l2() {
            let mut o = PeakingOptions::new(cfg.epsilon, delta_t, 0);
            o.max_degree = t_budget.min(super::DEFAULT_PEAK_DEGREE_BUDGET);
            o.quadrature = cfg.quadrature;
            let mut d = dirichlet_peak(&o)?;
            if t_gap > 1 {
                // |D_n| peaks at 0 only; spread the spectrum instead of failing.
                d.poly = d.poly.dilate(t_gap)?;
                d.form = d.form.dilate(t_gap)?;
            }
            d
        } else {
            let a = if star { 0.5 } else { 0.0 };
            let mut o = PeakingOptions::new(cfg.epsilon, delta_t, t_gap - 1);
            o.max_degree = t_budget.min(super::DEFAULT_PEAK_DEGREE_BUDGET);
            o.depth = depth.or(cfg.j);
            o.base = cfg.r;
            o.quadrature = cfg.quadrature;
            peaking_within_budget(a, cfg.p, &o)?
        };
        let t_deg = peak.poly.degree();
        let total_deg = (t_deg as u128) * (q as u128) + r_deg as u128;
        if total_deg > cfg.max_degree as u128 || total_deg > MAX_FREQUENCY as u128 {
            return Err(Error::ResourceLimit(format!(
                "final degree {total_deg} exceeds budget {}",
                cfg.max_degree
            )));
        }

        let chain = self.measure_chain(loc, &r_poly, &peak, len, l, nu, delta_t)?;
        Ok(Candidate { r_poly, peak, chain })
    }

    #[allow(clippy::too_many_arguments)]
    fn measure_chain(
        &self,
        loc: &GridApproximation,
        r_poly: &SparseTrigPoly,
        peak: &PeakingIdempotent,
        len: u64,
        l: u32,
        nu: u64,
        delta_t: f64,
    ) -> Result<Chain> {
        let cfg = self.cfg;
        let p = cfg.p;
        let q = loc.q;
        let star = self.star();
        let c = grid_ratio(r_poly, p, q, loc.numerator, star)?;
        let point = loc.point();
        let x_t = point.min(1.0 - point);
        let w = delta_t / q as f64;
        let deg = r_poly.degree().max(1) as f64;

        let at = r_poly.evaluate(x_t).norm().powf(p);
        let n_w = ((32.0 * deg * 2.0 * w).ceil() as usize).clamp(64, 1 << 14);
        let min_w = (0..=n_w)
            .map(|i| r_poly.evaluate(x_t - w + 2.0 * w * i as f64 / n_w as f64).norm().powf(p))
            .fold(f64::INFINITY, f64::min);
        let r_variation = if at > 0.0 { (1.0 - min_w / at).clamp(0.0, 1.0) } else { 1.0 };

        let complex = ComplexTrigPoly::from(r_poly);
        let shift_sum = |s: f64| -> f64 {
            let twisted = ComplexTrigPoly::new(
                complex
                    .terms()
                    .iter()
                    .map(|&(h, a)| (h, a * crate::trigpoly::phase::unit(h, s)))
                    .collect(),
            )
            .expect("order preserved");
            twisted.evaluate_grid(q, star).iter().map(|z: &Complex64| z.norm().powf(p)).sum()
        };
        let g0 = c.grid_sum;
        let spread = |half: f64, n: usize| -> f64 {
            (0..=n)
                .map(|i| shift_sum(-half + 2.0 * half * i as f64 / n as f64))
                .fold(0.0, f64::max)
                / g0
        };
        let n_s = ((32.0 * deg * 2.0 * w).ceil() as usize).clamp(64, 4096);
        let window_spread = spread(w, n_s).max(1.0);
        let n_g = ((32.0 * deg / q as f64).ceil() as usize).clamp(64, 8192);
        let global_spread = spread(0.5 / q as f64, n_g).max(window_spread);

        let peak_mass = peak.peak_mass;
        let peak_mass_in_set = match IntervalUnion::new(vec![(x_t - w, x_t + w)], false)?.intersect(self.set) {
            Some(part) => {
                let dil = peak.dilated_form(q)?;
                q as f64 * lp_integral(&dil, p, &part, &cfg.quadrature)? / peak.total
            }
            None => 0.0,
        };
        let mirrored = if x_t > w && x_t < 0.5 - w { 2.0 } else { 1.0 };
        let denom = window_spread * peak_mass + global_spread * (1.0 - peak_mass);
        let certificate = mirrored * c.ratio * (1.0 - r_variation) * peak_mass_in_set / denom;
        Ok(Chain {
            q,
            numerator: loc.numerator,
            target_point: point,
            density: loc.density.unwrap_or(1.0),
            dirichlet_len: len,
            l,
            nu,
            grid_ratio: c.ratio,
            r_variation,
            window_spread,
            global_spread,
            peak_mass,
            peak_mass_in_set,
            delta_t,
            window: w,
            riesz_depth: peak.depth,
            riesz_base: peak.base,
            t_degree: peak.poly.degree(),
            certificate: certificate.clamp(0.0, 1.0),
        })
    }

    fn finish(&self, chosen: Candidate, candidates: Vec<CandidateSummary>) -> Result<Concentration> {
        let cfg = self.cfg;
        let q = chosen.chain.q;
        let t_dilated = chosen.peak.poly.dilate(q)?;
        let polynomial = chosen.r_poly.multiply_idempotent(&t_dilated)?;
        let form = chosen
            .r_poly
            .to_product_form()
            .times(&chosen.peak.dilated_form(q)?);
        let integral_total = lp_integral(&form, cfg.p, &IntervalUnion::full(), &cfg.quadrature)?;
        let integral_on_e = lp_integral(&form, cfg.p, self.set, &cfg.quadrature)?;
        let ratio = (integral_on_e / integral_total).clamp(0.0, 1.0);
        let mut config = cfg.clone();
        config.j = Some(chosen.chain.riesz_depth);
        config.r = Some(chosen.chain.riesz_base);
        config.l = Some(chosen.chain.l);
        let report = ConcentrationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            polynomial: polynomial.descriptor(),
            set: self.set.clone(),
            p: cfg.p,
            grid: cfg.grid(),
            integral_on_e,
            integral_total,
            ratio,
            certificate: chosen.chain.certificate,
            chain: Some(chosen.chain),
            candidates,
            attempts: 1,
            ceiling: cfg.is_l2().then(c2_constant),
            config,
        };
        Ok(Concentration {
            report,
            polynomial,
            form,
        })
    }
}
