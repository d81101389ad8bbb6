use crate::error::{Error, Result};
use crate::trigpoly::{lp_integral, parseval_even_norm, IntervalUnion, QuadratureSpec, SparseTrigPoly};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Terms of the coefficient tail summed explicitly before the majorant.
const EXPLICIT_TERMS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2GapBound {
    pub half_width: f64,
    pub gap: u64,
    pub min_gap: Option<u64>,
    /// `∫_E |f|² / ∫_T |f|²` for `E = [-δ, δ]`.
    pub measured_ratio: f64,
    /// `Σ_{|m| ≥ N} |Δ̂(m)|`, including the majorant of the unsummed part.
    pub tail: f64,
    /// `2|E| + 2 · tail`.
    pub bound: f64,
}

/// `Δ̂(m)` for the triangle of height 1 supported on `[-2δ, 2δ]`.
pub fn triangle_coefficient(m: i64, delta: f64) -> f64 {
    if m == 0 {
        return 2.0 * delta;
    }
    let z = 2.0 * PI * m as f64 * delta;
    2.0 * delta * (z.sin() / z).powi(2)
}

fn tail_sum(n: u64, delta: f64) -> f64 {
    let start = n.max(1);
    let end = start + EXPLICIT_TERMS;
    let explicit: f64 = (start..end).map(|m| triangle_coefficient(m as i64, delta)).sum();
    // |Δ̂(m)| ≤ 1/(2π² m² δ), and Σ_{m ≥ M} 1/m² ≤ 1/(M - 1).
    let majorant = 1.0 / (2.0 * PI * PI * delta * (end - 1) as f64);
    2.0 * (explicit + majorant)
}

/// `L²` concentration of a gapped idempotent on `[-δ, δ]` against the
/// bound coming from a triangular minorant, which tends to `2|E|` as the
/// gap grows.
pub fn l2_gap_bound(half_width: f64, f: &SparseTrigPoly, gap: u64) -> Result<L2GapBound> {
    if !(half_width > 0.0 && half_width < 0.25) {
        return Err(Error::InvalidInput(format!("half width {half_width} not in (0, 1/4)")));
    }
    if f.is_empty() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let min_gap = f.min_gap();
    if let Some(g) = min_gap {
        if g < gap {
            return Err(Error::GapViolation {
                found: g,
                required: gap,
            });
        }
    }
    let set = IntervalUnion::symmetric_around(0.0, half_width)?;
    let on_e = lp_integral(f, 2.0, &set, &QuadratureSpec::default())?;
    let total = parseval_even_norm(f, 1)?;
    let measured_ratio = on_e / total;
    let tail = tail_sum(gap, half_width);
    let bound = 4.0 * half_width + 2.0 * tail;
    if measured_ratio > bound * (1.0 + 1e-9) {
        return Err(Error::InvalidInput(format!(
            "measured ratio {measured_ratio} above bound {bound}"
        )));
    }
    Ok(L2GapBound {
        half_width,
        gap,
        min_gap,
        measured_ratio,
        tail,
        bound,
    })
}
