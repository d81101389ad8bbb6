use crate::error::{Error, Result};
use crate::trigpoly::{
    freq_add, freq_mul, lp_integral, phase, ComplexTrigPoly, IntervalUnion, ProductForm,
    QuadratureSpec, SparseTrigPoly,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Bivariate idempotent `Σ_k e(n_k x + m_k y)` with `m_k` strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivariatePoly {
    pairs: Vec<(u64, u64)>,
}

impl BivariatePoly {
    pub fn new(pairs: Vec<(u64, u64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("bivariate polynomial needs at least one pair".into()));
        }
        if pairs.windows(2).any(|w| w[0].1 >= w[1].1) {
            return Err(Error::InvalidInput(
                "second coordinates must be strictly increasing".into(),
            ));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Smallest `M` with every coordinate below `M`.
    pub fn bound(&self) -> u64 {
        self.pairs.iter().map(|&(n, m)| n.max(m)).max().unwrap_or(0) + 1
    }

    /// The slice `y -> f(x, y)` as an exponential sum in `y`.
    pub fn slice(&self, x: f64) -> ComplexTrigPoly {
        ComplexTrigPoly::new(self.pairs.iter().map(|&(n, m)| (m, phase::unit(n, x))).collect())
            .expect("second coordinates are strictly increasing")
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        self.pairs
            .iter()
            .map(|&(n, m)| phase::unit(n, x) * phase::unit(m, y))
            .sum()
    }

    /// The univariate restriction `x -> f(x, s x)`, checked to stay idempotent.
    pub fn restrict(&self, s: u64) -> Result<SparseTrigPoly> {
        let freqs = self
            .pairs
            .iter()
            .map(|&(n, m)| freq_add(n, freq_mul(m, s)?))
            .collect::<Result<Vec<_>>>()?;
        SparseTrigPoly::idempotent(freqs)
    }
}

/// The four peaking families of bivariate idempotents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family", content = "k")]
pub enum PeakFamily {
    /// `1 + e(y) + e(x + 2y)`, peaking at 0 for `p > 2`.
    At0High,
    /// `1 + e(y) + e(x + 2y)`, peaking at 1/2 for `0 < p < 2`.
    AtHalfLow,
    /// `(1 + e(x + k y)) (1 + e(x + (k+1) y))`, peaking at 1/2 for `p > 2`
    /// not even, `k` odd and `k > p/2`.
    AtHalfHigh(u64),
    /// `(1 + e(y)) (1 + e(x + 3y))`, peaking at 0 for `0 < p < 2`.
    At0Low,
}

impl PeakFamily {
    /// The family for a peak at `a ∈ {0, 1/2}` and exponent `p`.
    pub fn select(a: f64, p: f64) -> Result<Self> {
        let even = p > 0.0 && (p / 2.0).fract() == 0.0;
        if !(p > 0.0) {
            return Err(Error::InvalidInput(format!("p = {p} must be positive")));
        }
        if a == 0.0 {
            if p == 2.0 {
                Err(Error::IllegalRegime(
                    "no peaking idempotent at 0 for p = 2".into(),
                ))
            } else if p > 2.0 {
                Ok(PeakFamily::At0High)
            } else {
                Ok(PeakFamily::At0Low)
            }
        } else if a == 0.5 {
            if even {
                Err(Error::IllegalRegime(format!(
                    "no peaking idempotent at 1/2 for even p = {p}"
                )))
            } else if p < 2.0 {
                Ok(PeakFamily::AtHalfLow)
            } else {
                Ok(PeakFamily::AtHalfHigh(smallest_odd_above(p / 2.0)))
            }
        } else {
            Err(Error::InvalidInput(format!("peak point {a} must be 0 or 1/2")))
        }
    }

    pub fn peak_point(&self) -> f64 {
        match self {
            PeakFamily::At0High | PeakFamily::At0Low => 0.0,
            PeakFamily::AtHalfLow | PeakFamily::AtHalfHigh(_) => 0.5,
        }
    }

    /// Whether the family is proven to peak for this `p`.
    pub fn admits(&self, p: f64) -> bool {
        let even = (p / 2.0).fract() == 0.0;
        match *self {
            PeakFamily::At0High => p > 2.0,
            PeakFamily::AtHalfLow | PeakFamily::At0Low => p > 0.0 && p < 2.0,
            PeakFamily::AtHalfHigh(k) => p > 2.0 && !even && k % 2 == 1 && (k as f64) > p / 2.0,
        }
    }

    pub fn bivariate(&self) -> Result<BivariatePoly> {
        match *self {
            PeakFamily::At0High | PeakFamily::AtHalfLow => {
                BivariatePoly::new(vec![(0, 0), (0, 1), (1, 2)])
            }
            PeakFamily::At0Low => BivariatePoly::new(vec![(0, 0), (0, 1), (1, 3), (1, 4)]),
            PeakFamily::AtHalfHigh(k) => {
                if k % 2 == 0 {
                    return Err(Error::InvalidInput(format!("k = {k} must be odd")));
                }
                BivariatePoly::new(vec![(0, 0), (1, k), (1, k + 1), (2, 2 * k + 1)])
            }
        }
    }
}

/// Least odd integer strictly greater than `x`.
fn smallest_odd_above(x: f64) -> u64 {
    let mut k = x.floor() as u64 + 1;
    if k.is_multiple_of(2) {
        k += 1;
    }
    k
}

/// `F_p(x) = ∫_T |f(x, y)|^p dy`.
pub fn marginal_integral(
    f: &BivariatePoly,
    p: f64,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    lp_integral(&f.slice(x), p, &IntervalUnion::full(), spec)
}

/// Smallest `R` for which the Riesz product is certified collision free
/// and has gap at least `gap` (use `gap = 1` for no requirement).
pub fn riesz_base_for_gap(f: &BivariatePoly, j: u32, gap: u64) -> u64 {
    let m = f.bound();
    let base = m * (j as u64 + 1) + 1;
    base.max(gap + j as u64 * (m - 1))
}

fn riesz_factors(f: &BivariatePoly, r: u64, j: u32) -> Result<Vec<SparseTrigPoly>> {
    let mut factors = Vec::with_capacity(j as usize);
    let mut rj = 1u64;
    for _ in 0..j {
        rj = freq_mul(rj, r)?;
        let freqs = f
            .pairs
            .iter()
            .map(|&(n, m)| freq_add(n, freq_mul(m, rj)?))
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = freqs.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Collision { frequency: w[0] });
        }
        factors.push(SparseTrigPoly::idempotent(freqs)?);
    }
    Ok(factors)
}

/// `∏_{j=1}^J f(x, R^j x)` kept as a product of its factors.
pub fn riesz_product_form(f: &BivariatePoly, r: u64, j: u32) -> Result<ProductForm> {
    Ok(ProductForm::new(
        riesz_factors(f, r, j)?
            .iter()
            .map(ComplexTrigPoly::from)
            .collect(),
    ))
}

/// Expanded Riesz product, requiring `R > M (J + 1)`.
pub fn riesz_product(f: &BivariatePoly, r: u64, j: u32) -> Result<SparseTrigPoly> {
    let need = f.bound() * (j as u64 + 1);
    if r <= need {
        return Err(Error::InvalidInput(format!(
            "Riesz base R = {r} must exceed M(J+1) = {need}"
        )));
    }
    riesz_product_unchecked(f, r, j)
}

/// Expanded Riesz product without the sufficient condition on `R`;
/// coincident frequencies are still reported as [`Error::Collision`].
pub fn riesz_product_unchecked(f: &BivariatePoly, r: u64, j: u32) -> Result<SparseTrigPoly> {
    if j == 0 {
        return Err(Error::InvalidInput("J must be at least 1".into()));
    }
    let factors = riesz_factors(f, r, j)?;
    let total = (f.len() as u128).pow(j);
    if total > 50_000_000 {
        return Err(Error::ResourceLimit(format!(
            "Riesz product would have {total} terms"
        )));
    }
    let mut freqs: Vec<u64> = vec![0];
    for fac in &factors {
        let mut next = Vec::with_capacity(freqs.len() * fac.len());
        for &a in &freqs {
            for h in fac.frequencies() {
                next.push(freq_add(a, h)?);
            }
        }
        freqs = next;
    }
    SparseTrigPoly::idempotent(freqs)
}
