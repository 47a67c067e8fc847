//! Two-dimensional `∇^{k+1}ΠΦ` through the angular Fourier expansion of the
//! symbol: with `(iξ)^γ m_ij(ξ) = i^{k+1} ρ^{k+1} Σ_p c_p e^{ipψ}`,
//! the kernel is `(1/2π) Σ_p c_p i^{k+1+|p|} e^{ipφ} H_|p|(r)` where
//! `H_q(r) = ∫ ρ^{k+2} e^{-ρ^{2α}} J_q(rρ) dρ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::radial::KernelQuadrature;
use crate::quadrature::{cap_width, panels_toward_left, GaussRule};
use crate::special::bessel_j_all;

const BUDGET: f64 = 80.0;
const ANGLES: usize = 128;
const SAMPLES: usize = 64;

/// Angular Fourier coefficients `c_p`, `p = -deg..=deg`, of
/// `cos^a ψ sin^b ψ m_ij(ψ)` for every component.
fn symbol_coefficients(order: usize) -> (usize, Vec<Vec<Complex64>>) {
    let deg = order + 3;
    let mut comps = Vec::new();
    for a in 0..=order + 1 {
        let b = order + 1 - a;
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            let coeffs = (-(deg as i64)..=deg as i64)
                .map(|p| {
                    let mut c = Complex64::new(0.0, 0.0);
                    for l in 0..SAMPLES {
                        let psi = 2.0 * PI * l as f64 / SAMPLES as f64;
                        let w = [psi.cos(), psi.sin()];
                        let m = if i == j { 1.0 } else { 0.0 } - w[i] * w[j];
                        let val = w[0].powi(a as i32) * w[1].powi(b as i32) * m;
                        c += Complex64::from_polar(val, -(p as f64) * psi);
                    }
                    c / SAMPLES as f64
                })
                .collect();
            comps.push(coeffs);
        }
    }
    (deg, comps)
}

/// `H_q(r)` for `q = 0..=deg` and the tail bound.
fn hankel_moments(alpha: f64, order: usize, r: f64, deg: usize, quad: &KernelQuadrature) -> (Vec<f64>, f64) {
    let a2 = 2.0 * alpha;
    let j = (order + 2) as f64;
    let f = |p: f64| p.powf(a2) - j * p.ln();
    let df = |p: f64| a2 * p.powf(a2 - 1.0) - j / p;
    let mut extent = 2.0;
    while f(extent) < BUDGET || df(extent) <= 0.0 {
        extent *= 1.25;
    }
    let graded = panels_toward_left(0.0, extent, quad.panels, quad.grading());
    let mut width = extent / 8.0;
    if r > 0.0 {
        width = width.min(PI / r);
    }
    let rule = GaussRule::new(quad.nodes);
    let mut acc = vec![0.0; deg + 1];
    let mut bess = vec![0.0; deg + 1];
    for (a, b) in cap_width(graded, width / quad.factor()) {
        for (p, w) in rule.on(a, b) {
            let g = w * p.powf(j) * (-p.powf(a2)).exp();
            bessel_j_all(r * p, &mut bess);
            for q in 0..=deg {
                acc[q] += g * bess[q];
            }
        }
    }
    (acc, (-f(extent)).exp() / df(extent))
}

/// Full kernel component values at one unit-time point `(r, φ)`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn pi_gradient_components(alpha: f64, order: usize, r: f64, phi: f64, quad: &KernelQuadrature) -> Vec<Complex64> {
    let (deg, comps) = symbol_coefficients(order);
    let (h, _) = hankel_moments(alpha, order, r, deg, quad);
    comps.iter().map(|c| combine(order, deg, c, &h, phi)).collect()
}

fn combine(order: usize, deg: usize, coeffs: &[Complex64], h: &[f64], phi: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (idx, c) in coeffs.iter().enumerate() {
        let p = idx as i64 - deg as i64;
        let q = p.unsigned_abs() as usize;
        sum += c * i.powu((order + 1 + q) as u32) * Complex64::from_polar(h[q], p as f64 * phi);
    }
    sum / (2.0 * PI)
}

/// Sup over components and directions of `∇^{k+1}ΠΦ(1, ·)` at each radius.
pub(crate) fn pi_gradient_2d(alpha: f64, order: usize, radii: &[f64], quad: &KernelQuadrature) -> (Vec<f64>, f64) {
    let (deg, comps) = symbol_coefficients(order);
    let results: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let (h, tail) = hankel_moments(alpha, order, r, deg, quad);
            let mut sup = 0.0f64;
            for l in 0..ANGLES {
                let phi = 2.0 * PI * l as f64 / ANGLES as f64;
                for c in &comps {
                    sup = sup.max(combine(order, deg, c, &h, phi).re.abs());
                }
            }
            (sup, tail)
        })
        .collect();
    let tail = results.iter().map(|r| r.1).fold(0.0, f64::max);
    (results.into_iter().map(|r| r.0).collect(), tail)
}
