//! Tensorized Gauss quadrature of `(2π)^{-n} ∫ e^{ix·ξ} σ(ξ) e^{-t|ξ|^{2α}} dξ`.
//! Slow; serves as an independent check of the radial and angular routes.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::radial::KernelQuadrature;
use crate::quadrature::{cap_width, panels_toward_left, GaussRule};

/// Kernel of the symbol `σ(ξ) e^{-t|ξ|^{2α}}` at `x`; `degree` is the
/// polynomial growth of `σ`, used only to size the truncated cube.
pub fn direct_kernel(
    alpha: f64,
    t: f64,
    x: &[f64],
    degree: usize,
    symbol: impl Fn(&[f64]) -> Complex64,
    quad: &KernelQuadrature,
) -> Complex64 {
    let n = x.len();
    let a2 = 2.0 * alpha;
    let mut extent = 1.0f64;
    while t * extent.powf(a2) - (degree + n) as f64 * extent.ln() < 40.0 {
        extent *= 1.25;
    }
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut width: f64 = extent / 8.0;
    if xmax > 0.0 {
        width = width.min(PI / xmax);
    }
    let rule = GaussRule::new(quad.nodes);
    let mut nodes = Vec::new();
    let graded = panels_toward_left(0.0, extent, quad.panels, quad.grading());
    for (a, b) in cap_width(graded, width / quad.factor()) {
        for (v, w) in rule.on(a, b) {
            nodes.push((v, w));
            nodes.push((-v, w));
        }
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; n];
    let mut xi = vec![0.0; n];
    loop {
        let mut w = 1.0;
        let mut phase = 0.0;
        let mut k2 = 0.0;
        for d in 0..n {
            let (v, wd) = nodes[idx[d]];
            xi[d] = v;
            w *= wd;
            phase += x[d] * v;
            k2 += v * v;
        }
        let decay = (-t * k2.powf(alpha)).exp();
        sum += Complex64::from_polar(w * decay, phase) * symbol(&xi);
        let mut d = 0;
        loop {
            if d == n {
                return sum / (2.0 * PI).powi(n as i32);
            }
            idx[d] += 1;
            if idx[d] < nodes.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
