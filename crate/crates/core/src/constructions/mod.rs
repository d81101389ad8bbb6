//! Explicit polynomial families: Dirichlet kernels, peaking bivariate
//! idempotents, Riesz products, Dirichlet grid products and random
//! Bernoulli idempotents.

mod bivariate;

pub use bivariate::{
    marginal_integral, riesz_base_for_gap, riesz_product, riesz_product_form,
    riesz_product_unchecked, BivariatePoly, PeakFamily,
};

use crate::error::{Error, Result};
use crate::trigpoly::{freq_add, freq_mul, ComplexTrigPoly, ProductForm, SparseTrigPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dirichlet kernel `D_n = Σ_{ν<n} e_ν`.
pub fn dirichlet(n: u64) -> Result<SparseTrigPoly> {
    if n == 0 {
        return Err(Error::InvalidInput("Dirichlet kernel needs n >= 1".into()));
    }
    SparseTrigPoly::idempotent(0..n)
}

/// Dilation factors `m^l + 1`, `l = 1..L`, with `m = 2q` or `q`.
pub fn grid_multipliers(q: u64, l: u32, star: bool) -> Result<Vec<u64>> {
    let m = if star { 2 * q } else { q };
    let mut out = Vec::with_capacity(l.saturating_sub(1) as usize);
    let mut pow = 1u64;
    for _ in 1..l {
        pow = freq_mul(pow, m)?;
        out.push(freq_add(pow, 1)?);
    }
    Ok(out)
}

/// `Q(x) ∏_{l=1}^{L-1} Q(s_l x)` as unexpanded factors.
pub fn grid_power_form(base: &SparseTrigPoly, q: u64, l: u32, star: bool) -> Result<ProductForm> {
    if l == 0 {
        return Err(Error::InvalidInput("L must be at least 1".into()));
    }
    let mut factors = vec![ComplexTrigPoly::from(base)];
    for s in grid_multipliers(q, l, star)? {
        factors.push(ComplexTrigPoly::from(&base.dilate(s)?));
    }
    Ok(ProductForm::new(factors))
}

/// Expanded `Q(x) ∏ Q(s_l x)`; the result must remain idempotent, which
/// holds whenever `deg Q < q` (star) resp. the digits do not interact.
pub fn grid_power_product(base: &SparseTrigPoly, q: u64, l: u32, star: bool) -> Result<SparseTrigPoly> {
    if l == 0 {
        return Err(Error::InvalidInput("L must be at least 1".into()));
    }
    let terms = (base.len() as u128).pow(l);
    if terms > 20_000_000 {
        return Err(Error::ResourceLimit(format!("grid product would have {terms} terms")));
    }
    let mut acc = base.clone();
    for s in grid_multipliers(q, l, star)? {
        acc = acc.multiply_idempotent(&base.dilate(s)?)?;
    }
    Ok(acc)
}

/// `D_r(x) ∏_{l=1}^{L-1} D_r(s_l x)`; on the grid matching `star` its
/// modulus is `|D_r|^L`.
pub fn dirichlet_grid_product(r: u64, q: u64, l: u32, star: bool) -> Result<SparseTrigPoly> {
    if r >= q {
        return Err(Error::InvalidInput(format!("need r < q, got r = {r}, q = {q}")));
    }
    grid_power_product(&dirichlet(r)?, q, l, star)
}

/// `Q(x) Q((2q + 1) x)`.
pub fn pair_product(base: &SparseTrigPoly, q: u64) -> Result<SparseTrigPoly> {
    if base.degree() >= 2 * q {
        return Err(Error::DegreeTooLarge {
            degree: base.degree(),
            modulus: 2 * q,
        });
    }
    grid_power_product(base, q, 2, true)
}

/// Exact integer coefficients of `D_r^L`, indexed by frequency.
pub fn dirichlet_power_coefficients(r: u64, l: u32) -> Result<Vec<u128>> {
    if r == 0 || l == 0 {
        return Err(Error::InvalidInput("r and L must be positive".into()));
    }
    let len = (r - 1)
        .checked_mul(l as u64)
        .and_then(|d| d.checked_add(1))
        .filter(|&d| d <= 1 << 26)
        .ok_or_else(|| Error::Overflow(format!("D_{r}^{l} is too long")))?;
    let mut cur = vec![1u128; r as usize];
    for _ in 1..l {
        let mut next = vec![0u128; cur.len() + r as usize - 1];
        // Sliding window sum: next[i] = Σ_{j=i-r+1..=i} cur[j].
        let mut window: u128 = 0;
        for i in 0..next.len() {
            if i < cur.len() {
                window = window
                    .checked_add(cur[i])
                    .ok_or_else(|| Error::Overflow("coefficient overflow".into()))?;
            }
            if i >= r as usize {
                window -= cur[i - r as usize];
            }
            next[i] = window;
        }
        cur = next;
    }
    debug_assert_eq!(cur.len() as u64, len);
    Ok(cur)
}

/// Inclusion probabilities `α_k = (D_r^L folded mod q)_k / (L r^{L-1})`.
pub fn base_alpha_from_dirichlet_power(r: u64, l: u32, q: u64) -> Result<Vec<f64>> {
    if r == 0 || r > q {
        return Err(Error::InvalidInput(format!("need 1 <= r <= q, got r = {r}, q = {q}")));
    }
    let coeffs = dirichlet_power_coefficients(r, l)?;
    let mut folded = vec![0u128; q as usize];
    for (h, c) in coeffs.into_iter().enumerate() {
        folded[h % q as usize] += c;
    }
    let majorant = (l as u128)
        .checked_mul((r as u128).checked_pow(l - 1).ok_or_else(|| Error::Overflow("r^(L-1)".into()))?)
        .ok_or_else(|| Error::Overflow("L r^(L-1)".into()))?;
    Ok(folded
        .into_iter()
        .map(|c| c as f64 / majorant as f64)
        .collect())
}

/// Includes each frequency `k` independently with probability `alpha[k]`,
/// drawing from ChaCha8 seeded by `seed` (reproducible across platforms).
pub fn random_idempotent(alpha: &[f64], seed: u64) -> Result<SparseTrigPoly> {
    if let Some((k, a)) = alpha.iter().enumerate().find(|(_, a)| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidInput(format!("alpha[{k}] = {a} is not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let freqs: Vec<u64> = alpha
        .iter()
        .enumerate()
        .filter_map(|(k, &a)| {
            let u: f64 = rng.gen();
            (u < a).then_some(k as u64)
        })
        .collect();
    SparseTrigPoly::idempotent(freqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet(1).unwrap(), SparseTrigPoly::one());
        for n in [2u64, 5, 40] {
            let v = dirichlet(n).unwrap().evaluate(1.0 / (2 * n) as f64).norm();
            assert!((v - 1.0 / (PI / (2 * n) as f64).sin()).abs() < 1e-12 * n as f64);
        }
        assert!(dirichlet(4).unwrap().evaluate(0.5).norm() < 1e-14);
    }

    #[test]
    fn grid_product_examples() {
        assert_eq!(dirichlet_grid_product(3, 7, 1, true).unwrap(), dirichlet(3).unwrap());
        let r = dirichlet_grid_product(2, 3, 2, true).unwrap();
        assert!((r.evaluate(1.0 / 6.0).norm() - 3.0).abs() < 1e-13);
        let r = dirichlet_grid_product(2, 4, 2, false).unwrap();
        let m: Vec<f64> = r.evaluate_grid(4, false).iter().map(|z| z.norm_sqr()).collect();
        for (a, b) in m.iter().zip([16.0, 4.0, 0.0, 4.0]) {
            assert!((a - b).abs() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn pair_product_examples() {
        let one = SparseTrigPoly::one();
        assert_eq!(pair_product(&one, 5).unwrap(), one);
        let q = SparseTrigPoly::idempotent([0, 1]).unwrap();
        let r = pair_product(&q, 2).unwrap();
        assert_eq!(r.frequencies().collect::<Vec<_>>(), vec![0, 1, 5, 6]);
        assert!((r.evaluate(0.25).norm_sqr() - 4.0).abs() < 1e-13);
        assert!(pair_product(&dirichlet(5).unwrap(), 2).is_err());
    }

    #[test]
    fn alpha_examples() {
        let a = base_alpha_from_dirichlet_power(3, 1, 5).unwrap();
        assert_eq!(a, vec![1.0, 1.0, 1.0, 0.0, 0.0]);
        let a = base_alpha_from_dirichlet_power(2, 2, 8).unwrap();
        assert_eq!(a, vec![0.25, 0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let a = base_alpha_from_dirichlet_power(9, 3, 10).unwrap();
        assert!((a.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        assert!(a.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn random_examples() {
        let full = random_idempotent(&[1.0; 17], 3).unwrap();
        assert_eq!(full, dirichlet(17).unwrap());
        assert!(random_idempotent(&[0.0; 17], 3).unwrap().is_empty());
        let a = [0.3; 50];
        assert_eq!(random_idempotent(&a, 11).unwrap(), random_idempotent(&a, 11).unwrap());
        assert!(random_idempotent(&[1.5], 0).is_err());
    }
}
