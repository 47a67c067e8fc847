//! Finite-difference check of `sup |η|^{|a|} |∂^a m(η)|` for the Leray symbol.

use super::bounds::BoundCheckResult;
use crate::error::{Error, Result};
use crate::operators::multi_indices;
use crate::report::SampleRow;

/// `m_ij(η) = δ_ij - η_i η_j / |η|²`, row-major.
pub fn leray_symbol(eta: &[f64]) -> Vec<f64> {
    let n = eta.len();
    let e2: f64 = eta.iter().map(|v| v * v).sum();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = if i == j { 1.0 } else { 0.0 } - eta[i] * eta[j] / e2;
        }
    }
    out
}

/// Offsets and weights of the central difference for `d^order/dx^order`
/// with unit step.
fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        _ => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
    }
}

fn derivative(eta: &[f64], a: &[usize], h: f64) -> Vec<f64> {
    let n = eta.len();
    let mut out = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    fn rec(axis: usize, a: &[usize], h: f64, eta: &[f64], point: &mut Vec<f64>, weight: f64, out: &mut [f64]) {
        if axis == eta.len() {
            for (o, m) in out.iter_mut().zip(leray_symbol(point)) {
                *o += weight * m;
            }
            return;
        }
        for &(off, w) in stencil(a[axis]) {
            point[axis] = eta[axis] + off * h;
            rec(axis + 1, a, h, eta, point, weight * w / h.powi(a[axis] as i32), out);
        }
    }
    rec(0, a, h, eta, &mut point, 1.0, &mut out);
    out
}

fn sphere_samples(n: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|l| {
                let p = 2.0 * PI * l as f64 / 64.0;
                vec![p.cos(), p.sin()]
            })
            .collect(),
        _ => {
            let count = 200;
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rad = (1.0 - z * z).sqrt();
                    let p = golden * i as f64;
                    vec![rad * p.cos(), rad * p.sin(), z]
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MihlinReport {
    /// `(multi-index, sup at step h, sup at step h/2)`
    pub per_index: Vec<(Vec<usize>, f64, f64)>,
    pub result: BoundCheckResult,
}

/// Largest value over directions and components at one `|η|`.
fn scaled_sup(n: usize, a: &[usize], radius: f64, step: f64) -> f64 {
    let order: usize = a.iter().sum();
    let mut sup = 0.0f64;
    for dir in sphere_samples(n) {
        let eta: Vec<f64> = dir.iter().map(|v| v * radius).collect();
        let d = derivative(&eta, a, step * radius);
        for v in d {
            sup = sup.max(radius.powi(order as i32) * v.abs());
        }
    }
    sup
}

pub const MIHLIN_RADII: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];

/// Every multi-index of order `<= max_order` on `|η| ∈ {1e-3, ..., 1e3}`;
/// the refinement halves the difference step.
pub fn check_mihlin_hormander(n: usize, max_order: usize, step: f64) -> Result<MihlinReport> {
    if max_order > 3 {
        return Err(Error::Precondition(format!("max_order = {max_order} exceeds 3")));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::Precondition(format!("dimension {n} is not in 1..=3")));
    }
    let mut per_index = Vec::new();
    let mut rows = Vec::new();
    let mut pass = true;
    for order in 0..=max_order {
        for a in multi_indices(n, order) {
            let mut sup = 0.0f64;
            let mut sup_refined = 0.0f64;
            for &radius in &MIHLIN_RADII {
                let s = scaled_sup(n, &a, radius, step);
                let sr = scaled_sup(n, &a, radius, step / 2.0);
                rows.push(SampleRow {
                    alpha: 0.0,
                    n,
                    t: step,
                    r: radius,
                    k: order,
                    value: s,
                    bound_value: 1.0,
                    ratio: s,
                });
                sup = sup.max(s);
                sup_refined = sup_refined.max(sr);
            }
            let floor = 1e-8;
            let drift = (sup - sup_refined).abs() / sup.max(sup_refined).max(floor);
            pass &= sup.is_finite() && drift < 0.1;
            per_index.push((a, sup, sup_refined));
        }
    }
    let mut result = BoundCheckResult::from_rows("mihlin_hormander", rows);
    let refined = per_index.iter().map(|p| p.2).fold(0.0, f64::max);
    result.refined_sup_ratio = Some(refined);
    result.pass &= pass;
    Ok(MihlinReport { per_index, result })
}

#[cfg(test)]
pub(crate) mod tests_support {
    pub(crate) fn scaled_sup(n: usize, a: &[usize], radius: f64, step: f64) -> f64 {
        super::scaled_sup(n, a, radius, step)
    }
}
