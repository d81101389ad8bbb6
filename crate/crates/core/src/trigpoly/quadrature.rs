//! Adaptive panel Gauss–Legendre quadrature for `∫_E |P|^p`.
//!
//! The base partition has panels no wider than `1 / (oversample (D + 1))`.
//! On each panel the 8-node rule over the whole panel is compared with the
//! 8-node rule applied to both halves; panels where the two disagree are
//! bisected recursively. On the base partition every term's phase is split
//! as `e(h a) e(h o_j)` with the offset table `e(h o_j)` shared by all
//! panels of an arc, so a panel costs one sine/cosine pair per term.

use super::{phase, AsProductForm, IntervalUnion, ProductForm};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const NODES: usize = 8;
const OFFSETS: usize = 3 * NODES;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub oversample: u32,
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            oversample: 4,
            rel_tol: 1e-9,
            max_refinements: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.oversample < 4 {
            return Err(Error::InvalidInput("oversample must be at least 4".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("rel_tol must be positive".into()));
        }
        if self.max_refinements < 1 {
            return Err(Error::InvalidInput("max_refinements must be at least 1".into()));
        }
        Ok(())
    }
}

/// Value of an integral together with bookkeeping about how it was found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// Sum over accepted panels of the two-level disagreement.
    pub error_estimate: f64,
    pub panels: usize,
    pub refined_panels: usize,
    pub max_depth: u32,
    pub evaluations: u64,
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealSum {
    sum: f64,
    comp: f64,
}

impl RealSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise Neumaier sum of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: RealSum,
    im: RealSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `|z|^p`, using integer powers of `|z|^2` for even `p`.
#[inline]
fn abs_pow(z: Complex64, p: f64, half_even: Option<i32>) -> f64 {
    let n2 = z.norm_sqr();
    match half_even {
        Some(k) => n2.powi(k),
        None => n2.powf(0.5 * p),
    }
}

fn half_even(p: f64) -> Option<i32> {
    let h = 0.5 * p;
    (h.fract() == 0.0 && (1.0..=64.0).contains(&h)).then_some(h as i32)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new() -> Self {
        let (nodes, weights) = gauss_legendre(NODES);
        Self { nodes, weights }
    }

    /// Offsets in `[0, w]`: 8 coarse nodes, then 8 per half.
    fn offsets(&self, w: f64) -> [f64; OFFSETS] {
        let mut o = [0.0; OFFSETS];
        for (i, &x) in self.nodes.iter().enumerate() {
            o[i] = 0.5 * w * (1.0 + x);
            o[NODES + i] = 0.25 * w * (1.0 + x);
            o[2 * NODES + i] = 0.5 * w + 0.25 * w * (1.0 + x);
        }
        o
    }

    /// Coarse and fine estimates from integrand values at the offsets.
    fn combine(&self, vals: &[f64; OFFSETS], w: f64) -> (f64, f64) {
        let (mut coarse, mut fine) = (0.0, 0.0);
        for i in 0..NODES {
            coarse += self.weights[i] * vals[i];
            fine += self.weights[i] * (vals[NODES + i] + vals[2 * NODES + i]);
        }
        (0.5 * w * coarse, 0.25 * w * fine)
    }
}

struct Ctx<'a> {
    form: &'a ProductForm,
    p: f64,
    half_even: Option<i32>,
    rule: Rule,
    spec: QuadratureSpec,
    evaluations: u64,
    max_depth: u32,
    error: f64,
    /// Errors below this are lost in the rounding of the total.
    floor: f64,
}

impl Ctx<'_> {
    fn integrand(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        abs_pow(self.form.evaluate(x), self.p, self.half_even)
    }

    fn estimates(&mut self, a: f64, w: f64) -> (f64, f64) {
        let offs = self.rule.offsets(w);
        let mut vals = [0.0; OFFSETS];
        for (v, o) in vals.iter_mut().zip(offs) {
            *v = self.integrand(a + o);
        }
        self.rule.combine(&vals, w)
    }

    /// Returns the accepted value of the panel `[a, a + w]`.
    fn refine(&mut self, a: f64, w: f64, depth: u32, abs_tol: f64) -> Result<f64> {
        if depth > self.spec.max_refinements {
            return Err(Error::NonConvergence(format!(
                "panel at {a:.6e} of width {w:.3e} still unresolved after {} bisections",
                self.spec.max_refinements
            )));
        }
        self.max_depth = self.max_depth.max(depth);
        let (coarse, fine) = self.estimates(a, w);
        let diff = (fine - coarse).abs();
        if diff <= abs_tol.max(self.spec.rel_tol * fine.abs()).max(self.floor) {
            self.error += diff;
            return Ok(fine);
        }
        let h = 0.5 * w;
        let left = self.refine(a, h, depth + 1, 0.5 * abs_tol)?;
        let right = self.refine(a + h, h, depth + 1, 0.5 * abs_tol)?;
        Ok(left + right)
    }
}

/// `∫_E |f|^p dx` to relative tolerance `spec.rel_tol`.
pub fn lp_integral<P: AsProductForm + ?Sized>(
    f: &P,
    p: f64,
    set: &IntervalUnion,
    spec: &QuadratureSpec,
) -> Result<f64> {
    lp_integral_detailed(f, p, set, spec).map(|r| r.value)
}

/// As [`lp_integral`], with quadrature statistics.
pub fn lp_integral_detailed<P: AsProductForm + ?Sized>(
    f: &P,
    p: f64,
    set: &IntervalUnion,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    integrate_arcs(&f.to_product_form(), p, set.intervals(), spec)
}

/// Core routine over explicit arcs `(l, r)` with `l < r` (not normalized).
pub fn integrate_arcs(
    form: &ProductForm,
    p: f64,
    arcs: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent p = {p} must be positive")));
    }
    spec.validate()?;
    let degree = form.degree();
    let max_w = 1.0 / (spec.oversample as f64 * (degree as f64 + 1.0));
    let mut ctx = Ctx {
        form,
        p,
        half_even: half_even(p),
        rule: Rule::new(),
        spec: *spec,
        evaluations: 0,
        max_depth: 0,
        error: 0.0,
        floor: 0.0,
    };

    // First pass over the base partition, with shared offset tables.
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new();
    for &(l, r) in arcs {
        let len = r - l;
        if len <= 0.0 {
            continue;
        }
        let n = (len / max_w).ceil().max(1.0) as usize;
        let w = len / n as f64;
        let offs = ctx.rule.offsets(w);
        let tables: Vec<Vec<(Complex64, [Complex64; OFFSETS])>> = form
            .factors()
            .iter()
            .map(|fac| {
                fac.terms()
                    .iter()
                    .map(|&(h, c)| {
                        let mut t = [Complex64::new(0.0, 0.0); OFFSETS];
                        for (tj, &o) in t.iter_mut().zip(offs.iter()) {
                            *tj = phase::unit(h, o);
                        }
                        (c, t)
                    })
                    .collect()
            })
            .collect();
        let hs: Vec<Vec<u64>> = form
            .factors()
            .iter()
            .map(|fac| fac.terms().iter().map(|t| t.0).collect())
            .collect();
        for i in 0..n {
            let a = l + w * i as f64;
            let mut prod = [Complex64::new(1.0, 0.0); OFFSETS];
            for (fi, table) in tables.iter().enumerate() {
                let mut acc = [Complex64::new(0.0, 0.0); OFFSETS];
                for (&(c, ref t), &h) in table.iter().zip(hs[fi].iter()) {
                    let base = c * phase::unit(h, a);
                    for j in 0..OFFSETS {
                        acc[j] += base * t[j];
                    }
                }
                for j in 0..OFFSETS {
                    prod[j] *= acc[j];
                }
            }
            let mut vals = [0.0; OFFSETS];
            for j in 0..OFFSETS {
                vals[j] = abs_pow(prod[j], p, ctx.half_even);
            }
            ctx.evaluations += OFFSETS as u64;
            let (coarse, fine) = ctx.rule.combine(&vals, w);
            panels.push((a, w, coarse, fine));
        }
    }

    let mut total = RealSum::default();
    for &(_, _, _, fine) in &panels {
        total.add(fine);
    }
    let total_len: f64 = arcs.iter().map(|&(l, r)| (r - l).max(0.0)).sum();
    let per_length = spec.rel_tol * total.value().abs() / total_len.max(f64::MIN_POSITIVE);
    ctx.floor = f64::EPSILON * total.value().abs();

    let mut sum = RealSum::default();
    let mut refined = 0usize;
    for &(a, w, coarse, fine) in &panels {
        let diff = (fine - coarse).abs();
        let tol = per_length * w;
        if diff <= tol.max(spec.rel_tol * fine.abs()) {
            ctx.error += diff;
            sum.add(fine);
        } else {
            refined += 1;
            let h = 0.5 * w;
            sum.add(ctx.refine(a, h, 1, 0.5 * tol)?);
            sum.add(ctx.refine(a + h, h, 1, 0.5 * tol)?);
        }
    }

    Ok(Integral {
        value: sum.value(),
        error_estimate: ctx.error,
        panels: panels.len(),
        refined_panels: refined,
        max_depth: ctx.max_depth,
        evaluations: ctx.evaluations,
    })
}

/// Non-adaptive reference: uniform panels at eight times the degree,
/// 16-point Gauss–Legendre, direct evaluation at every node.
pub fn dense_reference_integral<P: AsProductForm + ?Sized>(
    f: &P,
    p: f64,
    set: &IntervalUnion,
) -> f64 {
    let form = f.to_product_form();
    let (nodes, weights) = gauss_legendre(16);
    let max_w = 1.0 / (8.0 * (form.degree() as f64 + 1.0));
    let mut sum = RealSum::default();
    for &(l, r) in set.intervals() {
        let n = ((r - l) / max_w).ceil().max(1.0) as usize;
        let w = (r - l) / n as f64;
        for i in 0..n {
            let a = l + w * i as f64;
            let mut s = 0.0;
            for (x, wt) in nodes.iter().zip(&weights) {
                s += wt * form.evaluate(a + 0.5 * w * (1.0 + x)).norm().powf(p);
            }
            sum.add(0.5 * w * s);
        }
    }
    sum.value()
}
