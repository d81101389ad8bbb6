//! Constructive location of grid fractions: continued-fraction
//! convergents, the first grid denominator approximating a number to
//! quality `θ/q²`, and grid points whose `θ/q²`-neighbourhood lies mostly
//! inside a given set.

use crate::error::{Error, Result};
use crate::grids::gcd;
use crate::trigpoly::IntervalUnion;
use serde::{Deserialize, Serialize};

/// An irreducible fraction `a/q` (plain grid) or `a/(2q)` with `a` odd
/// (star grid), together with its approximation quality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridApproximation {
    pub numerator: u64,
    pub q: u64,
    pub star: bool,
    /// Distance from the approximated number (zero for set location).
    pub error: f64,
    pub theta: f64,
    /// `gcd(numerator, q)` (plain) or `gcd(numerator, 2q)` (star); always 1.
    pub gcd_numerator: u64,
    /// `gcd(q, coprime_to)`; always 1.
    pub gcd_coprime_to: u64,
    /// Relative measure of the set inside the `θ/q²`-neighbourhood, when
    /// the fraction was located in a set.
    pub density: Option<f64>,
}

impl GridApproximation {
    pub fn modulus(&self) -> u64 {
        if self.star {
            2 * self.q
        } else {
            self.q
        }
    }

    pub fn point(&self) -> f64 {
        self.numerator as f64 / self.modulus() as f64
    }

    pub fn radius(&self) -> f64 {
        self.theta / (self.q as f64 * self.q as f64)
    }

    /// Re-checks parity, coprimality and the error bound.
    pub fn is_valid(&self, coprime_to: u64) -> bool {
        let parity = !self.star || self.numerator % 2 == 1;
        parity
            && gcd(self.numerator, self.modulus()) == 1
            && gcd(self.q, coprime_to) == 1
            && self.error <= self.radius()
    }
}

/// The first `n` continued-fraction convergents `p_i/q_i` of `xi`.
pub fn convergents(xi: f64, n: usize) -> Result<Vec<(u64, u64)>> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidInput(format!("xi = {xi} must lie in (0, 1)")));
    }
    let mut out = Vec::with_capacity(n);
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    let mut x = xi;
    for i in 0..n {
        let a = x.floor();
        let ai = a as u128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > u64::MAX as u128 {
            return Err(Error::Overflow("convergent denominator".into()));
        }
        out.push((h2 as u64, k2 as u64));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = x - a;
        let exact = (h2 as f64 / k2 as f64 - xi).abs() < 1e-15;
        if i + 1 < n && (frac < 1e-15 || exact) {
            return Err(Error::RationalInput { terms: i + 1 });
        }
        x = 1.0 / frac;
    }
    // The zeroth convergent of a number in (0, 1) is 0/1; drop it.
    out.remove(0);
    if out.len() + 1 < n {
        return Err(Error::RationalInput { terms: out.len() });
    }
    Ok(out)
}

fn admissible_q(q: u64, coprime_to: u64) -> bool {
    gcd(q, coprime_to) == 1
}

/// Candidate numerators closest to `xi · modulus` respecting the grid's
/// parity, nearest first.
fn nearest_numerators(xi: f64, modulus: u64, star: bool) -> Vec<u64> {
    let x = xi * modulus as f64;
    let mut c: Vec<u64> = if star {
        let k = ((x - 1.0) / 2.0).floor().max(0.0) as u64;
        vec![2 * k + 1, 2 * k + 3]
    } else {
        let f = x.floor().max(0.0) as u64;
        vec![f, f + 1]
    };
    c.retain(|&a| a < modulus);
    c.sort_by(|&a, &b| {
        let da = (a as f64 - x).abs();
        let db = (b as f64 - x).abs();
        da.total_cmp(&db)
    });
    c
}

/// Smallest `q ∈ [q_min, q_max]` prime to `coprime_to` whose nearest
/// admissible grid point is within `θ/q²` of `xi`.
pub fn best_grid_approx(
    xi: f64,
    theta: f64,
    q_min: u64,
    q_max: u64,
    star: bool,
    coprime_to: u64,
) -> Result<GridApproximation> {
    if q_min < 2 || !(theta > 0.0) {
        return Err(Error::InvalidInput("need q_min >= 2 and theta > 0".into()));
    }
    let xi = crate::trigpoly::phase::wrap_unit(xi);
    for q in q_min..=q_max {
        if !admissible_q(q, coprime_to) {
            continue;
        }
        let modulus = if star { 2 * q } else { q };
        let radius = theta / (q as f64 * q as f64);
        for a in nearest_numerators(xi, modulus, star) {
            if gcd(a, modulus) != 1 {
                continue;
            }
            let error = (xi - a as f64 / modulus as f64).abs();
            if error <= radius {
                return Ok(GridApproximation {
                    numerator: a,
                    q,
                    star,
                    error,
                    theta,
                    gcd_numerator: 1,
                    gcd_coprime_to: 1,
                    density: None,
                });
            }
        }
    }
    Err(Error::NotFound(format!(
        "no q in [{q_min}, {q_max}] approximates {xi} to within {theta}/q^2"
    )))
}

/// Relative measure of `set` in the arc `(x - r, x + r)`.
pub fn neighbourhood_density(set: &IntervalUnion, x: f64, r: f64) -> Result<f64> {
    let arc = IntervalUnion::new(vec![(x - r, x + r)], false)?;
    Ok(set.intersection_measure(&arc) / arc.measure())
}

/// Smallest admissible `q` (then the densest numerator) such that the
/// `θ/q²`-neighbourhood of the grid point has `set`-density at least `1 - η`.
pub fn locate_in_set(
    set: &IntervalUnion,
    theta: f64,
    eta: f64,
    q_min: u64,
    q_max: u64,
    star: bool,
    coprime_to: u64,
) -> Result<GridApproximation> {
    if !(eta > 0.0 && eta < 1.0) || !(theta > 0.0) || q_min < 1 {
        return Err(Error::InvalidInput("need 0 < eta < 1, theta > 0, q_min >= 1".into()));
    }
    for q in q_min..=q_max {
        if !admissible_q(q, coprime_to) {
            continue;
        }
        let modulus = if star { 2 * q } else { q };
        let radius = theta / (q as f64 * q as f64);
        let mut best: Option<(u64, f64)> = None;
        let step = if star { 2 } else { 1 };
        let start = if star { 1 } else { 0 };
        for a in (start..modulus).step_by(step) {
            let x = a as f64 / modulus as f64;
            // Cheap rejection: the centre itself must be in the set unless
            // the neighbourhood is large.
            if radius < 0.25 && !set.contains(x) {
                continue;
            }
            if gcd(a, modulus) != 1 {
                continue;
            }
            let d = neighbourhood_density(set, x, radius)?;
            if d >= 1.0 - eta && best.is_none_or(|(_, bd)| d > bd) {
                best = Some((a, d));
            }
        }
        if let Some((a, d)) = best {
            return Ok(GridApproximation {
                numerator: a,
                q,
                star,
                error: 0.0,
                theta,
                gcd_numerator: 1,
                gcd_coprime_to: 1,
                density: Some(d),
            });
        }
    }
    Err(Error::NotFound(format!(
        "no grid point with density >= {} for q in [{q_min}, {q_max}]",
        1.0 - eta
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents_of_pi_minus_three() {
        let c = convergents(0.14159265358979, 4).unwrap();
        assert_eq!(c[0], (1, 7));
        assert!((0.14159265358979f64 - 1.0 / 7.0).abs() < 1.0 / 49.0);
        assert_eq!(c[1], (15, 106));
    }

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let xi = (5f64.sqrt() - 1.0) / 2.0;
        let c = convergents(xi, 11).unwrap();
        let fib = [1u64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (i, &(p, q)) in c.iter().take(10).enumerate() {
            assert_eq!((p, q), (fib[i], fib[i + 1]));
            assert_eq!(gcd(p, q), 1);
        }
    }

    #[test]
    fn rational_input_detected() {
        assert!(matches!(convergents(0.375, 10), Err(Error::RationalInput { .. })));
    }

    #[test]
    fn best_grid_examples() {
        let g = best_grid_approx(1.0 / 3.0 + 1e-9, 0.1, 2, 100, false, 1).unwrap();
        assert_eq!((g.numerator, g.q), (1, 3));
        assert!(g.is_valid(1));
        assert!(matches!(
            best_grid_approx(0.5, 0.1, 2, 2, true, 1),
            Err(Error::NotFound(_))
        ));
        let g = best_grid_approx(0.2718281828, 1.0, 2, 10_000, true, 7).unwrap();
        assert_eq!(gcd(g.q, 7), 1);
        assert!(g.is_valid(7));
    }

    #[test]
    fn locate_examples() {
        let e = IntervalUnion::symmetrize(&[(0.25, 0.42)]).unwrap();
        let g = locate_in_set(&e, 0.5, 0.1, 2, 50, false, 1).unwrap();
        assert_eq!((g.numerator, g.q), (1, 3));
        assert!(g.density.unwrap() >= 0.9);
        let g = locate_in_set(&IntervalUnion::full(), 0.5, 0.1, 5, 50, true, 1).unwrap();
        assert_eq!(g.q, 5);
    }
}
