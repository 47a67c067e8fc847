//! `∫ (a + |x-y|)^{-n-1} (b + |y|)^{-n-1} dy`, split along the bisecting
//! hyperplane of `0` and `x`.

use std::f64::consts::PI;

use super::bounds::BoundCheckResult;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, integrate_to_infinity};
use crate::report::SampleRow;

const MAX_INTERVALS: usize = 4000;

/// Integral of `(b + |y|)^{-n-1}` over the part of the sphere `|y - x| = rho`
/// (with `|x| = dist`) that is at least as far from the origin as from `x`.
fn far_shell(n: usize, b: f64, dist: f64, rho: f64, rel_tol: f64) -> Result<f64> {
    let p = -(n as f64) - 1.0;
    let g = |d: f64| (b + d).powf(p);
    let full = [2.0, 2.0 * PI, 4.0 * PI][n - 1];
    if dist == 0.0 {
        // every point is on the bisector; each half takes half of it
        return Ok(0.5 * full * g(rho));
    }
    if n == 1 {
        // the two points x ± rho
        let mut v = 0.0;
        for d in [(dist - rho).abs(), dist + rho] {
            if d >= rho {
                v += g(d);
            }
        }
        return Ok(v);
    }
    if rho == 0.0 {
        return Ok(full * g(dist));
    }
    // |y| >= rho  <=>  cos ψ <= dist / (2 rho)
    let c = dist / (2.0 * rho);
    let psi0 = if c >= 1.0 { 0.0 } else { c.acos() };
    let d_lo = if c >= 1.0 { dist - rho } else { rho };
    if n == 3 && dist.min(rho) > 1e-3 * dist.max(rho) {
        // sin ψ dψ = d dd / (|x| ρ) turns the shell into an elementary integral
        let antiderivative = |d: f64| -0.5 / (b + d).powi(2) + b / (3.0 * (b + d).powi(3));
        let diff = antiderivative(dist + rho) - antiderivative(d_lo);
        return Ok(2.0 * PI * diff / (dist * rho));
    }
    let f = |psi: f64| {
        let d = (dist * dist + rho * rho - 2.0 * dist * rho * psi.cos()).max(0.0).sqrt();
        if n == 2 {
            g(d)
        } else {
            psi.sin() * g(d)
        }
    };
    let weight = if n == 2 { 2.0 } else { 2.0 * PI };
    Ok(weight * integrate_adaptive(f, psi0, PI, rel_tol, 0.0, MAX_INTERVALS)?.0)
}

/// `∫_{|y| >= |x-y|} (a + |x-y|)^{-n-1} (b + |y|)^{-n-1} dy` in polar
/// coordinates about `x`. On this half-space the second factor never comes
/// close to its peak, so the angular integrals are smooth.
fn half_space(n: usize, a: f64, b: f64, dist: f64, rel_tol: f64) -> Result<f64> {
    let nf = n as f64;
    let inner_tol = rel_tol * 1e-2;
    let mut failure = None;
    let mut integrand = |rho: f64| -> f64 {
        match far_shell(n, b, dist, rho, inner_tol) {
            Ok(v) => rho.powf(nf - 1.0) * (a + rho).powf(-nf - 1.0) * v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let mut breaks = vec![0.0, a];
    if dist > 0.0 {
        breaks.push(0.5 * dist);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate_adaptive(&mut integrand, w[0], w[1], rel_tol, 0.0, MAX_INTERVALS)?.0;
    }
    let start = *breaks.last().expect("nonempty");
    let scale = start.max(a).max(b);
    total += integrate_to_infinity(&mut integrand, start, scale, rel_tol, 0.0, MAX_INTERVALS)?.0;
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Left-hand side at a point with `|x| = dist`: the half-space nearer to `x`
/// in polar coordinates about `x`, the other in coordinates about the origin.
pub fn convolution_lhs(n: usize, a: f64, b: f64, dist: f64, rel_tol: f64) -> Result<f64> {
    Ok(half_space(n, a, b, dist, rel_tol)? + half_space(n, b, a, dist, rel_tol)?)
}

fn sweep(n: usize, a: f64, b: f64, x_samples: &[f64], rel_tol: f64) -> Result<BoundCheckResult> {
    let mut rows = Vec::with_capacity(x_samples.len());
    for &dist in x_samples {
        let lhs = convolution_lhs(n, a, b, dist, rel_tol)?;
        let bound = 1.0 / (a * (a + dist).powf(n as f64 + 1.0));
        rows.push(SampleRow {
            alpha: b,
            n,
            t: a,
            r: dist,
            k: 0,
            value: lhs,
            bound_value: bound,
            ratio: lhs / bound,
        });
    }
    Ok(BoundCheckResult::from_rows("convolution_inequality", rows))
}

/// Ratio `LHS · a (a + |x|)^{n+1}` at every `|x|` sample, refined by a
/// hundredfold tighter tolerance. Rows carry `a` in the `t` column and `b`
/// in the `alpha` column.
pub fn verify_convolution_inequality(
    a: f64,
    b: f64,
    x_samples: &[f64],
    n: usize,
    rel_tol: f64,
) -> Result<BoundCheckResult> {
    if !(a > 0.0 && a < b) {
        return Err(Error::Precondition(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::Precondition(format!("dimension {n} is not in 1..=3")));
    }
    let coarse = sweep(n, a, b, x_samples, rel_tol)?;
    let fine = sweep(n, a, b, x_samples, rel_tol * 1e-2)?;
    Ok(coarse.with_refinement(&fine, 0.01))
}
