//! Sparse exponential sums `Σ a_h e(h x)` on the circle `T = R/Z`.
//!
//! [`SparseTrigPoly`] carries nonnegative real coefficients and a class tag
//! (idempotent, positive definite or general). [`ComplexTrigPoly`] holds
//! arbitrary complex coefficients (derivatives, differences, bivariate
//! slices). [`ProductForm`] is an unexpanded product of complex sums; it is
//! what the quadrature engine integrates, so that Riesz products can be
//! evaluated factor by factor.

mod interval;
mod parseval;
pub mod phase;
pub mod quadrature;

pub use interval::IntervalUnion;
pub use parseval::parseval_even_norm;
pub use quadrature::{
    dense_reference_integral, gauss_legendre, lp_integral, lp_integral_detailed, Integral,
    QuadratureSpec,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Largest admissible frequency.
pub const MAX_FREQUENCY: u64 = 1 << 62;

/// A nonnegative frequency bounded by [`MAX_FREQUENCY`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Frequency(u64);

impl Frequency {
    pub fn new(value: u64) -> Result<Self> {
        if value > MAX_FREQUENCY {
            Err(Error::Overflow(format!("frequency {value} exceeds 2^62")))
        } else {
            Ok(Self(value))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, other: Frequency) -> Result<Self> {
        self.0
            .checked_add(other.0)
            .ok_or_else(|| Error::Overflow(format!("{} + {}", self.0, other.0)))
            .and_then(Self::new)
    }

    pub fn checked_mul(self, m: u64) -> Result<Self> {
        self.0
            .checked_mul(m)
            .ok_or_else(|| Error::Overflow(format!("{} * {}", self.0, m)))
            .and_then(Self::new)
    }
}

impl TryFrom<u64> for Frequency {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Frequency> for u64 {
    fn from(f: Frequency) -> u64 {
        f.0
    }
}

/// Checked `a + b` under the frequency bound.
pub fn freq_add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b)
        .filter(|&s| s <= MAX_FREQUENCY)
        .ok_or_else(|| Error::Overflow(format!("{a} + {b} exceeds 2^62")))
}

/// Checked `a * b` under the frequency bound.
pub fn freq_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b)
        .filter(|&s| s <= MAX_FREQUENCY)
        .ok_or_else(|| Error::Overflow(format!("{a} * {b} exceeds 2^62")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyClass {
    Idempotent,
    PositiveDefinite,
    General,
}

impl PolyClass {
    fn infer(coeffs: impl Iterator<Item = f64> + Clone) -> Self {
        if coeffs.clone().all(|c| c == 1.0) {
            PolyClass::Idempotent
        } else if coeffs.clone().all(|c| c > 0.0) {
            PolyClass::PositiveDefinite
        } else {
            PolyClass::General
        }
    }
}

impl fmt::Display for PolyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolyClass::Idempotent => "idempotent",
            PolyClass::PositiveDefinite => "positive_definite",
            PolyClass::General => "general",
        })
    }
}

/// Finite exponential sum with nonnegative frequencies and nonnegative
/// real coefficients, sorted by strictly increasing frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct SparseTrigPoly {
    terms: Vec<(Frequency, f64)>,
    class: PolyClass,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    coeffs: Vec<(u64, f64)>,
    class: PolyClass,
}

impl TryFrom<PolyJson> for SparseTrigPoly {
    type Error = Error;
    fn try_from(raw: PolyJson) -> Result<Self> {
        SparseTrigPoly::with_class(raw.coeffs, raw.class)
    }
}

impl From<SparseTrigPoly> for PolyJson {
    fn from(p: SparseTrigPoly) -> Self {
        PolyJson {
            coeffs: p.terms.iter().map(|&(h, c)| (h.get(), c)).collect(),
            class: p.class,
        }
    }
}

impl SparseTrigPoly {
    /// The zero polynomial (an empty idempotent).
    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            class: PolyClass::Idempotent,
        }
    }

    /// `e_0`, the constant 1.
    pub fn one() -> Self {
        Self::monomial(0).expect("0 is a valid frequency")
    }

    /// `e_h`.
    pub fn monomial(h: u64) -> Result<Self> {
        Ok(Self {
            terms: vec![(Frequency::new(h)?, 1.0)],
            class: PolyClass::Idempotent,
        })
    }

    /// Idempotent with the given spectrum. Duplicate frequencies are rejected.
    pub fn idempotent<I: IntoIterator<Item = u64>>(freqs: I) -> Result<Self> {
        let mut hs: Vec<u64> = freqs.into_iter().collect();
        hs.sort_unstable();
        if let Some(w) = hs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Collision { frequency: w[0] });
        }
        let terms = hs
            .into_iter()
            .map(|h| Ok((Frequency::new(h)?, 1.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            terms,
            class: PolyClass::Idempotent,
        })
    }

    /// Builds from `(frequency, coefficient)` pairs, summing repeated
    /// frequencies and dropping zero coefficients; the class is inferred.
    pub fn from_terms<I: IntoIterator<Item = (u64, f64)>>(terms: I) -> Result<Self> {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (h, c) in terms {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "coefficient {c} at frequency {h} is not a nonnegative real"
                )));
            }
            Frequency::new(h)?;
            *acc.entry(h).or_insert(0.0) += c;
        }
        let terms: Vec<(Frequency, f64)> = acc
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(h, c)| (Frequency(h), c))
            .collect();
        let class = PolyClass::infer(terms.iter().map(|t| t.1));
        Ok(Self { terms, class })
    }

    /// Builds from sorted, distinct terms and checks them against `class`.
    pub fn with_class(terms: Vec<(u64, f64)>, class: PolyClass) -> Result<Self> {
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput(
                "frequencies must be strictly increasing".into(),
            ));
        }
        for &(h, c) in &terms {
            Frequency::new(h)?;
            let ok = match class {
                PolyClass::Idempotent => c == 1.0,
                PolyClass::PositiveDefinite => c > 0.0 && c.is_finite(),
                PolyClass::General => c >= 0.0 && c.is_finite(),
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "coefficient {c} at frequency {h} violates class {class}"
                )));
            }
        }
        Ok(Self {
            terms: terms.into_iter().map(|(h, c)| (Frequency(h), c)).collect(),
            class,
        })
    }

    pub fn terms(&self) -> &[(Frequency, f64)] {
        &self.terms
    }

    pub fn frequencies(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|t| t.0.get())
    }

    pub fn class(&self) -> PolyClass {
        self.class
    }

    pub fn is_idempotent(&self) -> bool {
        self.class == PolyClass::Idempotent
    }

    /// Number of terms (cardinality of the spectrum).
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest frequency, 0 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        self.terms.last().map_or(0, |t| t.0.get())
    }

    /// `Σ a_h`, which is also `f(0)`.
    pub fn coeff_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum()
    }

    /// `Σ a_h e(h x)`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let mut acc = quadrature::ComplexSum::default();
        for &(h, c) in &self.terms {
            acc.add(phase::unit(h.get(), x) * c);
        }
        acc.value()
    }

    /// Values at `k/q` (or `(2k+1)/(2q)` when `half_shift`), `k = 0..q`,
    /// from one table of `2q`-th roots of unity.
    pub fn evaluate_grid(&self, q: u64, half_shift: bool) -> Vec<Complex64> {
        ComplexTrigPoly::from(self).evaluate_grid(q, half_shift)
    }

    /// Exact product; idempotent only when every product coefficient is 1.
    pub fn multiply(&self, other: &SparseTrigPoly) -> Result<SparseTrigPoly> {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for &(h, a) in &self.terms {
            for &(g, b) in &other.terms {
                *acc.entry(freq_add(h.get(), g.get())?).or_insert(0.0) += a * b;
            }
        }
        let terms: Vec<(Frequency, f64)> = acc.into_iter().map(|(h, c)| (Frequency(h), c)).collect();
        let class = PolyClass::infer(terms.iter().map(|t| t.1));
        Ok(Self { terms, class })
    }

    /// Idempotent product that fails on the first coinciding frequency sum.
    pub fn multiply_idempotent(&self, other: &SparseTrigPoly) -> Result<SparseTrigPoly> {
        let mut sums = Vec::with_capacity(self.len() * other.len());
        for h in self.frequencies() {
            for g in other.frequencies() {
                sums.push(freq_add(h, g)?);
            }
        }
        Self::idempotent(sums)
    }

    /// `f(m x)`.
    pub fn dilate(&self, m: u64) -> Result<SparseTrigPoly> {
        if m == 0 {
            return Err(Error::InvalidInput("dilation factor must be positive".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|&(h, c)| Ok((h.checked_mul(m)?, c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            terms,
            class: self.class,
        })
    }

    /// Folds frequencies modulo `q`; agrees with `self` on the grid `k/q`.
    pub fn project_mod(&self, q: u64) -> Result<SparseTrigPoly> {
        if q == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        Self::from_terms(self.terms.iter().map(|&(h, c)| (h.get() % q, c)))
    }

    /// `f'`, the term-wise product with `2πi h`.
    pub fn derivative(&self) -> ComplexTrigPoly {
        let tau = std::f64::consts::TAU;
        ComplexTrigPoly::new(
            self.terms
                .iter()
                .filter(|t| t.0.get() != 0)
                .map(|&(h, c)| (h.get(), Complex64::new(0.0, tau * h.get() as f64 * c)))
                .collect(),
        )
        .expect("frequencies stay sorted")
    }

    /// Minimum difference between consecutive frequencies; `None` stands for
    /// an infinite gap (fewer than two terms).
    pub fn min_gap(&self) -> Option<u64> {
        min_gap_of(self.frequencies())
    }
}

/// Summary of a polynomial for reports: size, degree and gap, without
/// the full spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyDescriptor {
    pub terms: usize,
    pub degree: u64,
    /// `None` when there are fewer than two terms.
    pub min_gap: Option<u64>,
    pub class: PolyClass,
}

impl SparseTrigPoly {
    pub fn descriptor(&self) -> PolyDescriptor {
        PolyDescriptor {
            terms: self.len(),
            degree: self.degree(),
            min_gap: self.min_gap(),
            class: self.class,
        }
    }
}

/// Minimum consecutive difference of an increasing frequency sequence.
pub fn min_gap_of<I: IntoIterator<Item = u64>>(freqs: I) -> Option<u64> {
    let mut it = freqs.into_iter();
    let mut prev = it.next()?;
    let mut best: Option<u64> = None;
    for h in it {
        let d = h - prev;
        best = Some(best.map_or(d, |b| b.min(d)));
        prev = h;
    }
    best
}

/// Exponential sum with complex coefficients and sorted distinct
/// nonnegative frequencies.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexTrigPoly {
    terms: Vec<(u64, Complex64)>,
}

impl ComplexTrigPoly {
    pub fn new(terms: Vec<(u64, Complex64)>) -> Result<Self> {
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput(
                "frequencies must be strictly increasing".into(),
            ));
        }
        if let Some(&(h, _)) = terms.iter().find(|t| t.0 > MAX_FREQUENCY) {
            return Err(Error::Overflow(format!("frequency {h} exceeds 2^62")));
        }
        Ok(Self { terms })
    }

    /// Accumulates unsorted terms, merging equal frequencies.
    pub fn from_unsorted<I: IntoIterator<Item = (u64, Complex64)>>(terms: I) -> Result<Self> {
        let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (h, c) in terms {
            *acc.entry(h).or_default() += c;
        }
        Self::new(acc.into_iter().collect())
    }

    pub fn terms(&self) -> &[(u64, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.terms.last().map_or(0, |t| t.0)
    }

    /// `Σ |c_h|`, a bound for the sup norm.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).sum()
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        let mut acc = quadrature::ComplexSum::default();
        for &(h, c) in &self.terms {
            acc.add(phase::unit(h, x) * c);
        }
        acc.value()
    }

    pub fn evaluate_grid(&self, q: u64, half_shift: bool) -> Vec<Complex64> {
        assert!(q >= 1, "grid size must be positive");
        let n = 2 * q;
        let roots = phase::roots_of_unity(n);
        let reduced: Vec<(u64, Complex64)> = self.terms.iter().map(|&(h, c)| (h % n, c)).collect();
        (0..q)
            .map(|k| {
                let j = if half_shift { 2 * k + 1 } else { 2 * k };
                let mut acc = quadrature::ComplexSum::default();
                for &(h, c) in &reduced {
                    let idx = ((h as u128 * j as u128) % n as u128) as usize;
                    acc.add(roots[idx] * c);
                }
                acc.value()
            })
            .collect()
    }

    /// `P(m x)`.
    pub fn dilate(&self, m: u64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|&(h, c)| Ok((freq_mul(h, m)?, c)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    /// `P(x + t) - P(x)`.
    pub fn shift_difference(&self, t: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|&(h, c)| (h, c * (phase::unit(h, t) - Complex64::new(1.0, 0.0))))
            .collect();
        Self { terms }
    }
}

impl From<&SparseTrigPoly> for ComplexTrigPoly {
    fn from(p: &SparseTrigPoly) -> Self {
        Self {
            terms: p
                .terms
                .iter()
                .map(|&(h, c)| (h.get(), Complex64::new(c, 0.0)))
                .collect(),
        }
    }
}

/// Unexpanded product `Π_j P_j(x)` of complex exponential sums.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProductForm {
    factors: Vec<ComplexTrigPoly>,
}

impl ProductForm {
    pub fn new(factors: Vec<ComplexTrigPoly>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[ComplexTrigPoly] {
        &self.factors
    }

    pub fn push(&mut self, factor: ComplexTrigPoly) {
        self.factors.push(factor);
    }

    /// Degree of the expanded product.
    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|f| f.degree()).sum()
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.factors
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.evaluate(x))
    }

    pub fn evaluate_grid(&self, q: u64, half_shift: bool) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0); q as usize];
        for f in &self.factors {
            for (o, v) in out.iter_mut().zip(f.evaluate_grid(q, half_shift)) {
                *o *= v;
            }
        }
        out
    }

    /// Every factor dilated by `m`.
    pub fn dilate(&self, m: u64) -> Result<Self> {
        Ok(Self {
            factors: self
                .factors
                .iter()
                .map(|f| f.dilate(m))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Concatenation of the factor lists (the product of both forms).
    pub fn times(mut self, other: &ProductForm) -> Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }
}

/// Anything the quadrature engine can integrate.
pub trait AsProductForm {
    fn to_product_form(&self) -> ProductForm;
}

impl AsProductForm for SparseTrigPoly {
    fn to_product_form(&self) -> ProductForm {
        ProductForm::new(vec![ComplexTrigPoly::from(self)])
    }
}

impl AsProductForm for ComplexTrigPoly {
    fn to_product_form(&self) -> ProductForm {
        ProductForm::new(vec![self.clone()])
    }
}

impl AsProductForm for ProductForm {
    fn to_product_form(&self) -> ProductForm {
        self.clone()
    }
}
