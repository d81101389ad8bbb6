use crate::constructions::{base_alpha_from_dirichlet_power, random_idempotent};
use crate::error::{Error, Result};
use crate::grids::grid_ratio;
use crate::trigpoly::SparseTrigPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomTrialReport {
    pub q: u64,
    pub r: u64,
    pub l: u32,
    pub p: f64,
    pub k_target: f64,
    pub trials: u32,
    pub seed: u64,
    pub successes: u32,
    pub best_ratio: f64,
    /// Grid ratio at `1/q` of the deterministic `Σ α_k e(kx)`.
    pub base_ratio: f64,
}

/// Seed of the `i`-th trial derived from the master seed.
pub fn trial_seed(seed: u64, i: u32) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    rng.gen()
}

/// Draws `trials` random idempotents with `P(k ∈ spec) = α_k` and counts
/// those whose grid ratio at `1/q` exceeds `k_target`.
pub fn random_concentration_trial(
    q: u64,
    r: u64,
    l: u32,
    p: f64,
    k_target: f64,
    trials: u32,
    seed: u64,
) -> Result<RandomTrialReport> {
    if r == 0 || r > q || !(1..=3).contains(&l) || !(p > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need 1 <= r <= q, 1 <= L <= 3 and p > 0 (q = {q}, r = {r}, L = {l}, p = {p})"
        )));
    }
    let alpha = base_alpha_from_dirichlet_power(r, l, q)?;
    let base = SparseTrigPoly::from_terms(
        alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(k, &a)| (k as u64, a)),
    )?;
    let numerator = 1 % q;
    let base_ratio = grid_ratio(&base, p, q, numerator, false)?.ratio;
    let mut successes = 0;
    let mut best_ratio: f64 = 0.0;
    for i in 0..trials {
        let f = random_idempotent(&alpha, trial_seed(seed, i))?;
        let ratio = match grid_ratio(&f, p, q, numerator, false) {
            Ok(c) => c.ratio,
            Err(Error::ZeroGridSum) => 0.0,
            Err(e) => return Err(e),
        };
        if ratio > k_target {
            successes += 1;
        }
        best_ratio = best_ratio.max(ratio);
    }
    Ok(RandomTrialReport {
        q,
        r,
        l,
        p,
        k_target,
        trials,
        seed,
        successes,
        best_ratio,
        base_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_alpha_is_deterministic() {
        let rep = random_concentration_trial(7, 7, 1, 2.0, 0.0, 5, 1).unwrap();
        assert_eq!(rep.successes, 5);
        assert!((rep.best_ratio - rep.base_ratio).abs() < 1e-15);
    }

    #[test]
    fn seeds_distinct() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|i| trial_seed(3, i)).collect();
        assert_eq!(s.len(), 1000);
    }
}
