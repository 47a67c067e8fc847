//! `Σ_{0<γ<α} C(α,γ) |γ|^{|γ|-δ} |α-γ|^{|α-γ|-δ}` against `|α|^{|α|-δ}`.
//!
//! Every term is positive, so plain floating-point summation is accurate to
//! a few ulps per term.

use super::bounds::BoundCheckResult;
use crate::error::{Error, Result};
use crate::report::SampleRow;

const MAX_DEGREE: usize = 30;

fn binomials() -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; MAX_DEGREE + 1]; MAX_DEGREE + 1];
    for m in 0..=MAX_DEGREE {
        c[m][0] = 1.0;
        for k in 1..=m {
            c[m][k] = c[m - 1][k - 1] + if k < m { c[m - 1][k] } else { 0.0 };
        }
    }
    c
}

fn power_table(delta: f64) -> Vec<f64> {
    (0..=MAX_DEGREE)
        .map(|m| if m == 0 { 0.0 } else { (m as f64).powf(m as f64 - delta) })
        .collect()
}

fn interior_sum(alpha: &[usize], binom: &[Vec<f64>], pow: &[f64]) -> f64 {
    let total: usize = alpha.iter().sum();
    let mut gamma = vec![0usize; alpha.len()];
    let mut sum = 0.0;
    loop {
        let g: usize = gamma.iter().sum();
        if g > 0 && g < total {
            let c: f64 = alpha.iter().zip(&gamma).map(|(&a, &b)| binom[a][b]).product();
            sum += c * pow[g] * pow[total - g];
        }
        let mut d = 0;
        loop {
            if d == alpha.len() {
                return sum;
            }
            gamma[d] += 1;
            if gamma[d] <= alpha[d] {
                break;
            }
            gamma[d] = 0;
            d += 1;
        }
    }
}

fn validate(delta: f64, degree: usize) -> Result<()> {
    if !(delta > 0.5) {
        return Err(Error::Precondition(format!("delta = {delta} must exceed 1/2")));
    }
    if degree > MAX_DEGREE {
        return Err(Error::Precondition(format!("total degree {degree} exceeds {MAX_DEGREE}")));
    }
    Ok(())
}

/// The interior sum for one multi-index.
pub fn combinatorial_sum(alpha: &[usize], delta: f64) -> Result<f64> {
    validate(delta, alpha.iter().sum())?;
    Ok(interior_sum(alpha, &binomials(), &power_table(delta)))
}

/// Every multi-index with `1 <= |α| <= max_total_degree` in `n` variables.
/// Rows carry `δ` in the `alpha` column and `|α|` in `k`.
pub fn check_combinatorial_lemma(delta: f64, max_total_degree: usize, n: usize) -> Result<BoundCheckResult> {
    validate(delta, max_total_degree)?;
    if !(1..=3).contains(&n) {
        return Err(Error::Precondition(format!("dimension {n} is not in 1..=3")));
    }
    let binom = binomials();
    let pow = power_table(delta);
    let mut rows = Vec::new();
    for total in 1..=max_total_degree {
        for alpha in crate::operators::multi_indices(n, total) {
            let value = interior_sum(&alpha, &binom, &pow);
            let bound = pow[total];
            rows.push(SampleRow {
                alpha: delta,
                n,
                t: 0.0,
                r: 0.0,
                k: total,
                value,
                bound_value: bound,
                ratio: value / bound,
            });
        }
    }
    Ok(BoundCheckResult::from_rows("combinatorial_lemma", rows))
}
