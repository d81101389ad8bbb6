use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Intervals shorter than this are treated as empty and rejected.
pub const MIN_INTERVAL_LEN: f64 = 1e-12;

/// Tolerance used when checking the reflection symmetry of a union.
const SYMMETRY_TOL: f64 = 1e-12;

/// Finite union of open arcs of the circle `R/Z`.
///
/// Arcs are stored normalized: each lies inside `[0, 1]`, they are sorted,
/// and overlapping or touching arcs are merged. An arc that wraps through
/// 0 is split in two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalJson", into = "IntervalJson")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    symmetric: bool,
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    intervals: Vec<(f64, f64)>,
    symmetric: bool,
}

impl TryFrom<IntervalJson> for IntervalUnion {
    type Error = Error;
    fn try_from(raw: IntervalJson) -> Result<Self> {
        IntervalUnion::new(raw.intervals, raw.symmetric)
    }
}

impl From<IntervalUnion> for IntervalJson {
    fn from(u: IntervalUnion) -> Self {
        IntervalJson {
            intervals: u.intervals,
            symmetric: u.symmetric,
        }
    }
}

impl IntervalUnion {
    /// Normalizes arcs `(l, r)` with `l < r` given in any real coordinates.
    /// With `symmetric = true` the union must be invariant under `x -> -x`.
    pub fn new(arcs: Vec<(f64, f64)>, symmetric: bool) -> Result<Self> {
        let mut pieces = Vec::with_capacity(arcs.len() + 1);
        for (l, r) in arcs {
            if !l.is_finite() || !r.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite endpoint in ({l}, {r})")));
            }
            let len = r - l;
            if len < MIN_INTERVAL_LEN {
                return Err(Error::InvalidInput(format!(
                    "interval ({l}, {r}) is empty or shorter than {MIN_INTERVAL_LEN:e}"
                )));
            }
            if len >= 1.0 {
                pieces.push((0.0, 1.0));
                continue;
            }
            let a = l - l.floor();
            let b = a + len;
            if b > 1.0 {
                pieces.push((a, 1.0));
                pieces.push((0.0, b - 1.0));
            } else {
                pieces.push((a, b));
            }
        }
        let intervals = merge(pieces);
        if intervals.is_empty() {
            return Err(Error::InvalidInput("interval union is empty".into()));
        }
        let out = Self {
            intervals,
            symmetric: false,
        };
        if symmetric {
            if !out.is_reflection_invariant() {
                return Err(Error::InvalidInput(
                    "set flagged symmetric is not invariant under x -> -x".into(),
                ));
            }
            Ok(Self {
                symmetric: true,
                ..out
            })
        } else {
            Ok(out)
        }
    }

    /// The whole circle.
    pub fn full() -> Self {
        Self {
            intervals: vec![(0.0, 1.0)],
            symmetric: true,
        }
    }

    /// The symmetric arc `(c - r, c + r)` together with its mirror image.
    pub fn symmetric_around(center: f64, radius: f64) -> Result<Self> {
        Self::new(
            vec![(center - radius, center + radius), (-center - radius, -center + radius)],
            true,
        )
    }

    /// Symmetrization `A ∪ (-A)` of arbitrary arcs.
    pub fn symmetrize(arcs: &[(f64, f64)]) -> Result<Self> {
        let mut all: Vec<(f64, f64)> = arcs.to_vec();
        all.extend(arcs.iter().map(|&(l, r)| (-r, -l)));
        Self::new(all, true)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Lebesgue measure, in `(0, 1]`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(l, r)| r - l).sum()
    }

    /// Membership of `x` taken mod 1 (open arcs, wrapping at 0 honoured).
    pub fn contains(&self, x: f64) -> bool {
        let x = super::phase::wrap_unit(x);
        self.intervals.iter().any(|&(l, r)| {
            (l < x && x < r) || (x == 0.0 && (l == 0.0 || r == 1.0) && self.wraps_at_zero())
        })
    }

    fn wraps_at_zero(&self) -> bool {
        let first = self.intervals.first().is_some_and(|i| i.0 == 0.0);
        let last = self.intervals.last().is_some_and(|i| i.1 == 1.0);
        first && last
    }

    /// Intersection with another union; `None` if (numerically) empty.
    pub fn intersect(&self, other: &IntervalUnion) -> Option<IntervalUnion> {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                let (l, r) = (a.max(c), b.min(d));
                if r - l >= MIN_INTERVAL_LEN {
                    out.push((l, r));
                }
            }
        }
        let intervals = merge(out);
        if intervals.is_empty() {
            None
        } else {
            let mut u = IntervalUnion {
                intervals,
                symmetric: false,
            };
            u.symmetric = self.symmetric && other.symmetric && u.is_reflection_invariant();
            Some(u)
        }
    }

    /// Measure of the intersection, exact up to rounding of the endpoints.
    pub fn intersection_measure(&self, other: &IntervalUnion) -> f64 {
        self.intersect(other).map_or(0.0, |u| u.measure())
    }

    /// Image under `x -> -x`.
    pub fn reflect(&self) -> IntervalUnion {
        let pieces = self.intervals.iter().map(|&(l, r)| (1.0 - r, 1.0 - l)).collect();
        IntervalUnion {
            intervals: merge(pieces),
            symmetric: self.symmetric,
        }
    }

    /// Complement in the circle; `None` for the full circle.
    pub fn complement(&self) -> Option<IntervalUnion> {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(l, r) in &self.intervals {
            if l - cursor >= MIN_INTERVAL_LEN {
                out.push((cursor, l));
            }
            cursor = r;
        }
        if 1.0 - cursor >= MIN_INTERVAL_LEN {
            out.push((cursor, 1.0));
        }
        if out.is_empty() {
            None
        } else {
            Some(IntervalUnion {
                intervals: out,
                symmetric: self.symmetric,
            })
        }
    }

    /// Arcs of `self` lying in the half circle `[0, 1/2]`.
    pub fn positive_half(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .filter_map(|&(l, r)| {
                let r = r.min(0.5);
                (r > l).then_some((l, r))
            })
            .collect()
    }

    fn is_reflection_invariant(&self) -> bool {
        let refl = merge(self.intervals.iter().map(|&(l, r)| (1.0 - r, 1.0 - l)).collect());
        let sym_diff = self.measure() + measure_of(&refl) - 2.0 * overlap(&self.intervals, &refl);
        sym_diff <= SYMMETRY_TOL * (1 + self.intervals.len()) as f64
    }
}

fn measure_of(v: &[(f64, f64)]) -> f64 {
    v.iter().map(|&(l, r)| r - l).sum()
}

fn overlap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for &(l1, r1) in a {
        for &(l2, r2) in b {
            total += (r1.min(r2) - l1.max(l2)).max(0.0);
        }
    }
    total
}

fn merge(mut pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pieces.retain(|&(l, r)| r - l >= MIN_INTERVAL_LEN);
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (l, r) in pieces {
        match out.last_mut() {
            Some(last) if l <= last.1 => last.1 = last.1.max(r),
            _ => out.push((l, r)),
        }
    }
    out
}
