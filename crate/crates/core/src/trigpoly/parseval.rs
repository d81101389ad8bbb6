use super::{freq_add, SparseTrigPoly};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Dense convolution is used while the power's degree stays below this.
const DENSE_LIMIT: u64 = 1 << 22;

/// Exact `∫ |f|^{2k}`, computed as the sum of squared coefficients of
/// `f^k`. Idempotents are convolved in checked 128-bit integers.
pub fn parseval_even_norm(f: &SparseTrigPoly, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if f.is_empty() {
        return Ok(0.0);
    }
    let deg_k = (f.degree() as u128) * k as u128;
    if f.is_idempotent() {
        let coeffs = if deg_k < DENSE_LIMIT as u128 {
            power_dense_int(f, k)?
        } else {
            power_sparse_int(f, k)?
        };
        let mut s: u128 = 0;
        for c in coeffs {
            let sq = c.checked_mul(c).ok_or_else(|| overflow(k))?;
            s = s.checked_add(sq).ok_or_else(|| overflow(k))?;
        }
        Ok(s as f64)
    } else {
        let coeffs = if deg_k < DENSE_LIMIT as u128 {
            power_dense_f64(f, k)
        } else {
            power_sparse_f64(f, k)?
        };
        Ok(coeffs.iter().map(|c| c * c).sum())
    }
}

fn overflow(k: u32) -> Error {
    Error::Overflow(format!("coefficients of f^{k} exceed 128-bit integers"))
}

fn power_dense_int(f: &SparseTrigPoly, k: u32) -> Result<Vec<u128>> {
    let mut cur = vec![0u128; f.degree() as usize + 1];
    for h in f.frequencies() {
        cur[h as usize] = 1;
    }
    for _ in 1..k {
        let mut next = vec![0u128; cur.len() + f.degree() as usize];
        for (i, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for h in f.frequencies() {
                let slot = &mut next[i + h as usize];
                *slot = slot.checked_add(c).ok_or_else(|| overflow(k))?;
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn power_sparse_int(f: &SparseTrigPoly, k: u32) -> Result<Vec<u128>> {
    let mut cur: HashMap<u64, u128> = f.frequencies().map(|h| (h, 1)).collect();
    for _ in 1..k {
        let mut next: HashMap<u64, u128> = HashMap::new();
        for (&g, &c) in &cur {
            for h in f.frequencies() {
                let slot = next.entry(freq_add(g, h)?).or_insert(0);
                *slot = slot.checked_add(c).ok_or_else(|| overflow(k))?;
            }
        }
        cur = next;
    }
    Ok(cur.into_values().collect())
}

fn power_dense_f64(f: &SparseTrigPoly, k: u32) -> Vec<f64> {
    let mut cur = vec![0.0; f.degree() as usize + 1];
    for &(h, c) in f.terms() {
        cur[h.get() as usize] = c;
    }
    for _ in 1..k {
        let mut next = vec![0.0; cur.len() + f.degree() as usize];
        for (i, &c) in cur.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for &(h, a) in f.terms() {
                next[i + h.get() as usize] += c * a;
            }
        }
        cur = next;
    }
    cur
}

fn power_sparse_f64(f: &SparseTrigPoly, k: u32) -> Result<Vec<f64>> {
    let mut cur: HashMap<u64, f64> = f.terms().iter().map(|&(h, c)| (h.get(), c)).collect();
    for _ in 1..k {
        let mut next: HashMap<u64, f64> = HashMap::new();
        for (&g, &c) in &cur {
            for &(h, a) in f.terms() {
                *next.entry(freq_add(g, h.get())?).or_insert(0.0) += c * a;
            }
        }
        cur = next;
    }
    Ok(cur.into_values().collect())
}
