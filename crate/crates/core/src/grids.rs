//! Discrete concentration on the grids `G_q = {k/q}` and
//! `G_q* = {(2k+1)/(2q)}`: grid sums and ratios, modular remapping of a
//! peak to a prescribed grid point, the grid-condition constant, and
//! Bernstein / Marcinkiewicz–Zygmund comparison reports.

use crate::constants::{a_series, b_series, SeriesSpec};
use crate::error::{Error, Result};
use crate::trigpoly::{
    lp_integral, phase, AsProductForm, ComplexTrigPoly, IntervalUnion, PolyDescriptor,
    QuadratureSpec, SparseTrigPoly,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSumReport {
    pub q: u64,
    pub p: f64,
    pub sigma: f64,
    pub sigma_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRatio {
    pub q: u64,
    /// `a` for the point `a/q`, or the odd `2a+1` for `(2a+1)/(2q)`.
    pub numerator: u64,
    pub star: bool,
    pub ratio: f64,
    pub value_at_target: f64,
    pub grid_sum: f64,
    pub witness: Option<PolyDescriptor>,
}

fn pow_values(vals: &[Complex64], p: f64) -> impl Iterator<Item = f64> + '_ {
    vals.iter().map(move |z| z.norm().powf(p))
}

fn sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut acc = crate::trigpoly::quadrature::RealSum::default();
    it.for_each(|x| acc.add(x));
    acc.value()
}

/// `Σ_k |f(x_k)|^p` over `G_q` or `G_q*`.
pub fn grid_sum<P: AsProductForm + ?Sized>(f: &P, p: f64, q: u64, star: bool) -> f64 {
    let vals = f.to_product_form().evaluate_grid(q, star);
    sum(pow_values(&vals, p))
}

pub fn grid_sums<P: AsProductForm + ?Sized>(f: &P, p: f64, q: u64) -> GridSumReport {
    GridSumReport {
        q,
        p,
        sigma: grid_sum(f, p, q, false),
        sigma_star: grid_sum(f, p, q, true),
    }
}

/// `|f(x_target)|^p / Σ_k |f(x_k)|^p` with `x_target = numerator/q` (plain)
/// or `numerator/(2q)` (star, numerator odd).
pub fn grid_ratio<P: AsProductForm + ?Sized>(
    f: &P,
    p: f64,
    q: u64,
    numerator: u64,
    star: bool,
) -> Result<ConcentrationRatio> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    let index = if star {
        if numerator.is_multiple_of(2) || numerator >= 2 * q {
            return Err(Error::InvalidInput(format!(
                "star numerator {numerator} must be odd and below {}",
                2 * q
            )));
        }
        (numerator - 1) / 2
    } else {
        if numerator >= q {
            return Err(Error::InvalidInput(format!("numerator {numerator} must be below q = {q}")));
        }
        numerator
    };
    let vals = f.to_product_form().evaluate_grid(q, star);
    let powers: Vec<f64> = pow_values(&vals, p).collect();
    let total = sum(powers.iter().copied());
    if total == 0.0 {
        return Err(Error::ZeroGridSum);
    }
    let at = powers[index as usize];
    Ok(ConcentrationRatio {
        q,
        numerator,
        star,
        ratio: (at / total).min(1.0),
        value_at_target: at,
        grid_sum: total,
        witness: None,
    })
}

/// Ratio with the witness polynomial recorded.
pub fn grid_ratio_of(
    f: &SparseTrigPoly,
    p: f64,
    q: u64,
    numerator: u64,
    star: bool,
) -> Result<ConcentrationRatio> {
    let mut r = grid_ratio(f, p, q, numerator, star)?;
    r.witness = Some(f.descriptor());
    Ok(r)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `b ∈ [1, m)` with `a b ≡ 1 (mod m)`, by the extended Euclidean algorithm.
pub fn modular_inverse(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(0);
    }
    let a_mod = (a as i128).rem_euclid(m as i128);
    let (mut r0, mut r1) = (m as i128, a_mod);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    if r0 != 1 {
        return Err(Error::NotCoprime { a, m });
    }
    Ok(s0.rem_euclid(m as i128) as u64)
}

/// Moves the value `Q(1/m)` to the grid point `target/m` (`m = q`, or
/// `m = 2q` on the star grid) while permuting the other grid values:
/// returns `Π_m(Q(b ·))(ν x)` with `b ν target ≡ 1 (mod m)`.
pub fn remap_to_target(
    base: &SparseTrigPoly,
    q: u64,
    target: u64,
    star: bool,
    nu: u64,
) -> Result<SparseTrigPoly> {
    let m = if star { 2 * q } else { q };
    if star && target.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("star target {target} must be odd")));
    }
    if base.degree() >= m {
        return Err(Error::DegreeTooLarge {
            degree: base.degree(),
            modulus: m,
        });
    }
    if nu == 0 {
        return Err(Error::InvalidInput("dilation must be positive".into()));
    }
    let key = ((target as u128 * nu as u128) % m as u128) as i64;
    let b = modular_inverse(key, m).map_err(|_| Error::NotCoprime {
        a: (target as u128 * nu as u128).min(i64::MAX as u128) as i64,
        m,
    })?;
    let folded = SparseTrigPoly::idempotent(
        base.frequencies()
            .map(|h| ((h as u128 * b as u128) % m as u128) as u64),
    )?;
    if nu == 1 {
        Ok(folded)
    } else {
        folded.dilate(nu)
    }
}

/// `K = Σ_q |f|^p / Σ_q* |f|^p`.
pub fn grid_condition_k<P: AsProductForm + ?Sized>(f: &P, p: f64, q: u64) -> Result<f64> {
    let r = grid_sums(f, p, q);
    if r.sigma_star == 0.0 {
        return Err(Error::ZeroGridSum);
    }
    Ok(r.sigma / r.sigma_star)
}

/// Both sides of one inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    /// `lhs / rhs`, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub p: f64,
    pub q: u64,
    pub t: f64,
    /// `∫|P(·+t) − P|^p` against `(2πq|t|)^p ∫|P|^p`; a theorem, must hold.
    pub bernstein: Sides,
    /// `Σ_k |P(k/q + t)|^p` against `Σ_k |P(k/q)|^p`.
    pub shifted_grid: Sides,
    /// `Σ_k |P(k/q + t) − P(k/q)|^p` against `q|t| Σ_k |P(k/q)|^p`.
    pub perturbation: Sides,
}

pub fn bernstein_report(
    poly: &SparseTrigPoly,
    p: f64,
    q: u64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<BernsteinReport> {
    if poly.degree() >= q {
        return Err(Error::DegreeTooLarge {
            degree: poly.degree(),
            modulus: q,
        });
    }
    if !(t.abs() < 0.5) {
        return Err(Error::InvalidInput(format!("shift t = {t} must satisfy |t| < 1/2")));
    }
    let full = IntervalUnion::full();
    let diff = ComplexTrigPoly::from(poly).shift_difference(t);
    let lhs_i = if t == 0.0 { 0.0 } else { lp_integral(&diff, p, &full, spec)? };
    let norm = lp_integral(poly, p, &full, spec)?;
    let rhs_i = (2.0 * std::f64::consts::PI * q as f64 * t.abs()).powf(p) * norm;

    let shifted = ComplexTrigPoly::new(
        poly.terms()
            .iter()
            .map(|&(h, c)| (h.get(), phase::unit(h.get(), t) * c))
            .collect(),
    )?;
    let grid = poly.evaluate_grid(q, false);
    let moved = shifted.evaluate_grid(q, false);
    let g = sum(pow_values(&grid, p));
    let gs = sum(pow_values(&moved, p));
    let pert = sum(grid.iter().zip(&moved).map(|(a, b)| (b - a).norm().powf(p)));
    Ok(BernsteinReport {
        p,
        q,
        t,
        bernstein: Sides { lhs: lhs_i, rhs: rhs_i },
        shifted_grid: Sides { lhs: gs, rhs: g },
        perturbation: Sides {
            lhs: pert,
            rhs: q as f64 * t.abs() * g,
        },
    })
}

/// The large-`q` limit of the Dirichlet-product grid ratio at the base
/// point: `1 / (2 A(Lp, r/(2q)))` on `G_q*`, `1 / B(Lp, r/q)` on `G_q`.
pub fn predicted_grid_limit(r: u64, q: u64, l: u32, p: f64, star: bool) -> Result<f64> {
    let lambda = l as f64 * p;
    let spec = SeriesSpec::default();
    if star {
        Ok(1.0 / (2.0 * a_series(lambda, r as f64 / (2 * q) as f64, &spec)?.value))
    } else {
        Ok(1.0 / b_series(lambda, r as f64 / q as f64, &spec)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::dirichlet;

    #[test]
    fn grid_sum_examples() {
        let d2 = dirichlet(2).unwrap();
        assert!((grid_sum(&d2, 2.0, 4, false) - 8.0).abs() < 1e-13);
        assert!((grid_sum(&d2, 2.0, 2, true) - 4.0).abs() < 1e-13);
        assert!((grid_sum(&SparseTrigPoly::one(), 3.3, 17, true) - 17.0).abs() < 1e-12);
    }

    #[test]
    fn grid_ratio_examples() {
        let d2 = dirichlet(2).unwrap();
        let r = grid_ratio_of(&d2, 2.0, 4, 1, false).unwrap();
        assert!((r.ratio - 0.25).abs() < 1e-14);
        assert_eq!(r.witness.unwrap().terms, 2);
        let r = grid_ratio(&SparseTrigPoly::one(), 1.5, 9, 3, true).unwrap();
        assert!((r.ratio - 1.0 / 9.0).abs() < 1e-14);
        // D_2 vanishes at 1/2 only; D_4 vanishes on all of G_4 except 0.
        assert!(grid_ratio(&d2, 2.0, 4, 2, false).unwrap().ratio.abs() < 1e-14);
        let zero_on_star = dirichlet(2).unwrap().dilate(2).unwrap(); // 1 + e(2x) on (2k+1)/4
        assert!(matches!(
            grid_ratio(&zero_on_star, 2.0, 2, 1, true),
            Err(Error::ZeroGridSum)
        ));
        assert!(grid_ratio(&d2, 2.0, 4, 2, true).is_err());
    }

    #[test]
    fn modular_inverse_examples() {
        assert_eq!(modular_inverse(3, 7).unwrap(), 5);
        assert_eq!(modular_inverse(1, 11).unwrap(), 1);
        assert_eq!(modular_inverse(-3, 7).unwrap(), 2);
        assert!(matches!(modular_inverse(2, 4), Err(Error::NotCoprime { a: 2, m: 4 })));
    }

    #[test]
    fn remap_examples() {
        let d3 = dirichlet(3).unwrap();
        assert_eq!(remap_to_target(&d3, 5, 1, false, 1).unwrap(), d3);
        let r = remap_to_target(&d3, 5, 2, false, 1).unwrap();
        assert!((r.evaluate(0.4).norm() - d3.evaluate(0.2).norm()).abs() < 1e-13);
        let r = remap_to_target(&d3, 5, 3, true, 1).unwrap();
        assert!((r.evaluate(0.3).norm() - d3.evaluate(0.1).norm()).abs() < 1e-13);
        assert!(remap_to_target(&d3, 5, 5, false, 1).is_err());
        assert!(remap_to_target(&dirichlet(7).unwrap(), 5, 2, false, 1).is_err());
    }

    #[test]
    fn grid_condition_examples() {
        assert!((grid_condition_k(&SparseTrigPoly::one(), 2.0, 7).unwrap() - 1.0).abs() < 1e-14);
        assert!((grid_condition_k(&dirichlet(2).unwrap(), 2.0, 2).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bernstein_examples() {
        let spec = QuadratureSpec::default();
        let e1 = SparseTrigPoly::monomial(1).unwrap();
        let r = bernstein_report(&e1, 3.0, 4, 0.0, &spec).unwrap();
        assert_eq!(r.bernstein.lhs, 0.0);
        assert_eq!(r.perturbation.lhs, 0.0);
        let t = 0.07;
        let r = bernstein_report(&e1, 3.0, 4, t, &spec).unwrap();
        let closed = (2.0 * (std::f64::consts::PI * t).sin()).powi(3);
        assert!((r.bernstein.lhs - closed).abs() < 1e-9);
        assert!(r.bernstein.lhs <= r.bernstein.rhs);
    }
}
