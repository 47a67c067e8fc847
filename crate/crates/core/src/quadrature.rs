//! Gauss–Legendre rules, graded panel layouts and an adaptive Gauss–Kronrod
//! integrator.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Splits `[a, b]` into `panels` pieces whose widths shrink geometrically by
/// `ratio` toward `b`.
pub fn panels_toward_right(a: f64, b: f64, panels: usize, ratio: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = panels_toward_left(0.0, b - a, panels, ratio)
        .into_iter()
        .map(|(x, y)| (b - y, b - x))
        .collect();
    out.reverse();
    out
}

/// Splits `[a, b]` into `panels` pieces whose widths shrink geometrically by
/// `ratio` toward `a`.
pub fn panels_toward_left(a: f64, b: f64, panels: usize, ratio: f64) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let len = b - a;
    // widths w, w ratio, w ratio^2, ... summing to len
    let total: f64 = (0..panels).map(|j| ratio.powi(j as i32)).sum();
    let mut out = Vec::with_capacity(panels);
    let mut lo = a;
    for j in 0..panels {
        let hi = if j + 1 == panels {
            b
        } else {
            lo + len * ratio.powi(j as i32) / total
        };
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Splits every panel wider than `max_width` into equal parts.
pub fn cap_width(panels: Vec<(f64, f64)>, max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels.len());
    for (a, b) in panels {
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for i in 0..pieces {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == pieces { b } else { lo + h };
            out.push((lo, hi));
        }
    }
    out
}

/// Splits panels at the given breakpoints (those strictly inside a panel).
pub fn split_at(panels: Vec<(f64, f64)>, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels.len() + breakpoints.len());
    for (a, b) in panels {
        let mut lo = a;
        for &p in breakpoints.iter().filter(|&&p| p > a && p < b) {
            if p - lo > 1e-14 * (b - a) {
                out.push((lo, p));
                lo = p;
            }
        }
        out.push((lo, b));
    }
    out
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut k = fc * KRONROD_WEIGHTS[7];
    let mut g = fc * GAUSS7_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        k += KRONROD_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += GAUSS7_WEIGHTS[i / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7–K15 quadrature on a finite interval.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (value, error) = kronrod15(&mut f, a, b);
    let mut heap = BinaryHeap::from([Panel { lo: a, hi: b, value, error }]);
    let (mut total, mut err) = (value, error);
    loop {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            // running sums drift; confirm with exact ones
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
            if err <= abs_tol.max(rel_tol * total.abs()) {
                return Ok((total, err));
            }
        }
        if heap.len() >= max_intervals {
            return Err(Error::QuadratureNotConverged(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {err:e} (value {total:e})"
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::QuadratureNotConverged(format!(
                "interval [{}, {}] cannot be bisected further",
                worst.lo, worst.hi
            )));
        }
        let (v1, e1) = kronrod15(&mut f, worst.lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Panel { lo: mid, hi: worst.hi, value: v2, error: e2 });
    }
}

/// Adaptive quadrature on `[a, ∞)` through `y = a + s u / (1 - u)`.
pub fn integrate_to_infinity(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    integrate_adaptive(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let y = a + scale * u / (1.0 - u);
            let jac = scale / ((1.0 - u) * (1.0 - u));
            f(y) * jac
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
        max_intervals,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_on_polynomials() {
        for n in 1..=12 {
            let rule = GaussRule::new(n);
            let w: f64 = rule.on(-1.0, 1.0).map(|(_, w)| w).sum();
            assert!((w - 2.0).abs() < 1e-14, "n = {n}");
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n = {n}, deg = {deg}");
            }
        }
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = panels_toward_right(0.0, 1.0, 5, 2.0);
        assert_eq!(p.len(), 5);
        assert_eq!(p[0].0, 0.0);
        assert_eq!(p[4].1, 1.0);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
            let (a, b) = (w[0].1 - w[0].0, w[1].1 - w[1].0);
            assert!((a / b - 2.0).abs() < 1e-12);
        }
        let q = panels_toward_left(1.0, 3.0, 4, 2.0);
        assert!((q[0].1 - q[0].0 - 2.0 / 15.0).abs() < 1e-14);
        assert_eq!(q[3].1, 3.0);
    }

    #[test]
    fn adaptive_handles_kinks_and_tails() {
        let (v, _) = integrate_adaptive(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 0.0, 200).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-12);
        let (v, _) = integrate_to_infinity(|x| (-x).exp(), 0.0, 1.0, 1e-12, 0.0, 200).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let (v, _) =
            integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12, 0.0, 400).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }
}
