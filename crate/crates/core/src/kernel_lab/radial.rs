//! Radial profiles of the unit-time kernel `Φ = F^{-1}(e^{-|ξ|^{2α}})`.
//!
//! Half-line transforms `∫_0^∞ e^{iyρ} h(ρ) dρ` are taken along the ray
//! `arg ρ = π/(8α)`, where both `e^{iyρ}` and `e^{-ρ^{2α}}` decay, so large-`r`
//! values keep their relative accuracy. In two dimensions large radii go
//! through the Mehler–Sonine representation of `J_0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::quadrature::{cap_width, panels_toward_left, GaussRule};
use crate::special::bessel_j_all;

const BUDGET: f64 = 80.0;
const SERIES_RADIUS: f64 = 0.05;
const HANKEL_RADIUS: f64 = 2.0;

/// Panel layout for every radial and spectral kernel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    pub panels: usize,
    pub nodes: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self { panels: 32, nodes: 10 }
    }
}

impl KernelQuadrature {
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            panels: self.panels * factor,
            nodes: self.nodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 4 || self.nodes < 2 {
            return Err(invalid("kernel quadrature", "need at least 4 panels of 2 nodes"));
        }
        Ok(())
    }

    pub(crate) fn factor(&self) -> f64 {
        self.panels as f64 / 32.0
    }

    /// Geometric grading ratio so that the panels always span 40 octaves.
    pub(crate) fn grading(&self) -> f64 {
        2f64.powf(40.0 / self.panels as f64)
    }
}

/// `ln ∫_0^∞ ρ^p e^{-ρ^{2α}} dρ`.
pub(crate) fn ln_moment(alpha: f64, p: f64) -> f64 {
    libm::lgamma((p + 1.0) / (2.0 * alpha)) - (2.0 * alpha).ln()
}

/// Surface area of the unit sphere in `R^n`.
pub(crate) fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0)
}

fn expm1c(w: Complex64) -> Complex64 {
    if w.norm() < 1e-2 {
        let mut term = w;
        let mut sum = w;
        for k in 2..8 {
            term *= w / k as f64;
            sum += term;
        }
        sum
    } else {
        w.exp() - 1.0
    }
}

/// `Φ`, `Φ'` and the ball mean `J(r) = r^{-n} ∫_0^r Φ(s) s^{n-1} ds` at one
/// radius, with a bound on the discarded integration tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub phi: f64,
    pub dphi: f64,
    pub jmean: f64,
    pub tail: f64,
}

#[derive(Clone, Copy)]
enum Profile {
    /// `ρ^j e^{-ρ^{2α}}` for `j = 0, 1, 2` at once
    Powers,
    /// `(e^{-ρ^{2α}} - 1) / ρ`
    Deficit,
}

/// Evaluator for the unit-time kernel in dimension `n`.
pub(crate) struct UnitKernel {
    alpha: f64,
    n: usize,
    quad: KernelQuadrature,
    rule: GaussRule,
    rot: Complex64,
    zrot: Complex64,
    sin_t: f64,
    cos_t: f64,
    damp: f64,
    series: Vec<f64>,
}

impl UnitKernel {
    pub(crate) fn new(alpha: f64, n: usize, quad: KernelQuadrature) -> Self {
        let theta = PI / (8.0 * alpha);
        let nf = n as f64;
        let nu = nf / 2.0 - 1.0;
        let series = (0..60)
            .map(|m| {
                let mf = m as f64;
                let ln = -nf / 2.0 * (2.0 * PI).ln() - (nu + 2.0 * mf) * 2f64.ln()
                    - libm::lgamma(mf + 1.0)
                    - libm::lgamma(mf + nf / 2.0)
                    + ln_moment(alpha, 2.0 * mf + nf - 1.0);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * ln.exp()
            })
            .collect();
        Self {
            alpha,
            n,
            quad,
            rule: GaussRule::new(quad.nodes),
            rot: Complex64::from_polar(1.0, theta),
            zrot: Complex64::from_polar(1.0, 2.0 * alpha * theta),
            sin_t: theta.sin(),
            cos_t: theta.cos(),
            damp: (2.0 * alpha * theta).cos(),
            series,
        }
    }

    pub(crate) fn eval(&self, r: f64) -> RadialSample {
        if r < SERIES_RADIUS {
            return self.series_at(r);
        }
        match self.n {
            1 => self.eval_1d(r),
            2 if r <= HANKEL_RADIUS => self.eval_2d_hankel(r),
            2 => self.eval_2d_mehler(r),
            _ => self.eval_3d(r),
        }
    }

    fn series_at(&self, r: f64) -> RadialSample {
        let nf = self.n as f64;
        let (mut phi, mut dphi, mut jmean) = (0.0, 0.0, 0.0);
        let r2 = r * r;
        let mut pow = 1.0;
        for (m, &a) in self.series.iter().enumerate() {
            let mf = m as f64;
            let term = a * pow;
            phi += term;
            jmean += term / (2.0 * mf + nf);
            if m > 0 {
                dphi += 2.0 * mf * term / r;
            }
            if m > 2 && term.abs() < 1e-18 * phi.abs() {
                break;
            }
            pow *= r2;
        }
        RadialSample {
            phi,
            dphi,
            jmean,
            tail: 0.0,
        }
    }

    /// Upper end of the rotated integration ray and the bound on the
    /// neglected part: the integrand modulus is at most `e^{-f(v)}`.
    fn ray_extent(&self, y: f64, profile: Profile) -> (f64, f64) {
        let a2 = 2.0 * self.alpha;
        let (j, decay) = match profile {
            Profile::Powers => (2.0, self.damp),
            Profile::Deficit => (-1.0, 0.0),
        };
        // |ρ^j| <= max(v, 1)^2 for the powers; |h| <= 2/v for the deficit
        let lv = move |v: f64| if j > 0.0 { v.max(1.0).ln() } else { v.ln() };
        let dlv = move |v: f64| if j > 0.0 && v < 1.0 { 0.0 } else { 1.0 / v };
        let f = |v: f64| y * self.sin_t * v + decay * v.powf(a2) - j * lv(v);
        let df = |v: f64| y * self.sin_t + decay * a2 * v.powf(a2 - 1.0) - j * dlv(v);
        let ok = |v: f64| f(v) >= BUDGET && df(v) > 0.0;
        let mut hi = 1.0;
        if ok(hi) {
            while ok(hi / 2.0) {
                hi /= 2.0;
            }
        } else {
            while !ok(hi) {
                hi *= 2.0;
            }
        }
        let mut lo = hi / 2.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let scale = if matches!(profile, Profile::Deficit) { 2.0 } else { 1.0 };
        (hi, scale * (-f(hi)).exp() / df(hi))
    }

    fn ray_panels(&self, extent: f64, y: f64) -> Vec<(f64, f64)> {
        let graded = panels_toward_left(0.0, extent, self.quad.panels, self.quad.grading());
        let a2 = 2.0 * self.alpha;
        let swirl = a2 * (a2 * PI / (8.0 * self.alpha)).sin();
        let mut out = Vec::with_capacity(2 * graded.len());
        for (a, b) in graded {
            // local angular frequency of e^{iyρ - ρ^{2α}} along the ray
            let mut freq = y * self.cos_t;
            if self.damp * a.powf(a2) < BUDGET {
                freq += swirl * b.powf(a2 - 1.0);
            }
            let width = (extent / 8.0).min(PI / freq) / self.quad.factor();
            out.extend(cap_width(vec![(a, b)], width));
        }
        out
    }

    /// `[Re F_0, Im F_1, Re F_2](y)` with `F_j(y) = ∫_0^∞ e^{iyρ} ρ^j e^{-ρ^{2α}} dρ`.
    fn powers(&self, y: f64) -> ([f64; 3], f64) {
        if self.alpha >= 1.0 - 1e-12 {
            return self.powers_gaussian(y);
        }
        let (extent, tail) = self.ray_extent(y, Profile::Powers);
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        let a2 = 2.0 * self.alpha;
        for (a, b) in self.ray_panels(extent, y) {
            for (v, w) in self.rule.on(a, b) {
                let rho = self.rot * v;
                let phase = Complex64::new(0.0, y) * rho - self.zrot * v.powf(a2);
                let base = phase.exp() * self.rot * w;
                acc[0] += base;
                acc[1] += base * rho;
                acc[2] += base * rho * rho;
            }
        }
        ([acc[0].re, acc[1].im, acc[2].re], tail)
    }

    /// Gaussian case: the even/odd extensions are entire, so the full-line
    /// integrals are taken on `Im ρ = y/2`, through the saddle point.
    fn powers_gaussian(&self, y: f64) -> ([f64; 3], f64) {
        let shift = Complex64::new(0.0, y / 2.0);
        let half = (BUDGET + 4.0 * (1.0 + y).ln()).sqrt();
        let panels = cap_width(vec![(-half, half)], 0.5 / self.quad.factor());
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for (a, b) in panels {
            for (x, w) in self.rule.on(a, b) {
                let rho = x + shift;
                let base = (Complex64::new(0.0, y) * rho - rho * rho).exp() * (0.5 * w);
                acc[0] += base;
                acc[1] += base * rho;
                acc[2] += base * rho * rho;
            }
        }
        let tail = (-half * half - y * y / 4.0).exp() * (1.0 + half + y).powi(2);
        ([acc[0].re, acc[1].im, acc[2].re], tail)
    }

    /// `∫_0^∞ e^{iyρ} (e^{-ρ^{2α}} - 1)/ρ dρ`, `y > 0`.
    fn deficit(&self, y: f64) -> (Complex64, f64) {
        let (extent, tail) = self.ray_extent(y, Profile::Deficit);
        let mut acc = Complex64::new(0.0, 0.0);
        let a2 = 2.0 * self.alpha;
        for (a, b) in self.ray_panels(extent, y) {
            for (v, w) in self.rule.on(a, b) {
                let rho = self.rot * v;
                let h = expm1c(-self.zrot * v.powf(a2)) / rho;
                acc += (Complex64::new(0.0, y) * rho).exp() * h * self.rot * w;
            }
        }
        (acc, tail)
    }

    /// Ball mean from the exterior mass `T(r) = ∫_{|x|>r} Φ`.
    fn jmean_from_tail(&self, r: f64, tail_mass: f64) -> f64 {
        (1.0 - tail_mass) / (sphere_area(self.n) * r.powi(self.n as i32))
    }

    fn exterior_1d(&self, r: f64) -> (f64, f64) {
        let (d, tail) = self.deficit(r);
        (-2.0 / PI * d.im, 2.0 / PI * tail)
    }

    fn eval_1d(&self, r: f64) -> RadialSample {
        let (f, tail) = self.powers(r);
        let (ext, tail_ext) = self.exterior_1d(r);
        RadialSample {
            phi: f[0] / PI,
            dphi: -f[1] / PI,
            jmean: self.jmean_from_tail(r, ext),
            tail: tail.max(tail_ext),
        }
    }

    fn eval_3d(&self, r: f64) -> RadialSample {
        let (f, tail) = self.powers(r);
        let (ext1, tail_ext) = self.exterior_1d(r);
        let c = 1.0 / (2.0 * PI * PI);
        let ext = 2.0 * r * f[0] / PI + ext1;
        RadialSample {
            phi: c * f[1] / r,
            dphi: c * (f[2] / r - f[1] / (r * r)),
            jmean: self.jmean_from_tail(r, ext),
            tail: tail.max(tail_ext),
        }
    }

    fn eval_2d_hankel(&self, r: f64) -> RadialSample {
        let a2 = 2.0 * self.alpha;
        let f = |p: f64| p.powf(a2) - 2.0 * p.ln();
        let df = |p: f64| a2 * p.powf(a2 - 1.0) - 2.0 / p;
        let mut extent = 2.0;
        while f(extent) < BUDGET || df(extent) <= 0.0 {
            extent *= 1.25;
        }
        let graded = panels_toward_left(0.0, extent, self.quad.panels, self.quad.grading());
        let panels = cap_width(graded, (extent / 8.0).min(PI / r) / self.quad.factor());
        let (mut phi, mut dphi, mut ball) = (0.0, 0.0, 0.0);
        let mut bess = [0.0; 2];
        for (a, b) in panels {
            for (p, w) in self.rule.on(a, b) {
                let g = (-p.powf(a2)).exp() * w;
                bessel_j_all(r * p, &mut bess);
                phi += bess[0] * p * g;
                dphi -= bess[1] * p * p * g;
                ball += bess[1] * g;
            }
        }
        RadialSample {
            phi: phi / (2.0 * PI),
            dphi: dphi / (2.0 * PI),
            jmean: r * ball / (2.0 * PI * r * r),
            tail: (-f(extent)).exp() / df(extent),
        }
    }

    fn eval_2d_mehler(&self, r: f64) -> RadialSample {
        let a2 = 2.0 * self.alpha;
        // decay rates of the three integrands in u
        let rates = [2.0 + a2, 2.0 + a2, a2];
        let extent = rates.map(|p| (1e17f64.powf(1.0 / p)).acosh());
        let u_max = extent.iter().copied().fold(0.0, f64::max);
        let mut panels = Vec::new();
        let mut lo = 0.0;
        while lo < u_max {
            let width = (0.5 * (1.0 + lo / 3.0)).min(2.0) / self.quad.factor();
            let hi = (lo + width).min(u_max);
            panels.push((lo, hi));
            lo = hi;
        }
        let mut acc = [0.0; 3];
        let mut last = [0.0; 3];
        let mut tail = 0.0f64;
        for (a, b) in panels {
            for (u, w) in self.rule.on(a, b) {
                let c = u.cosh();
                let (f, t) = self.powers(r * c);
                tail = tail.max(t);
                let vals = [f[1], f[2] * c, f[0] * c];
                for q in 0..3 {
                    if u <= extent[q] {
                        acc[q] += w * vals[q];
                        last[q] = vals[q];
                    }
                }
            }
        }
        for q in 0..3 {
            tail = tail.max(last[q].abs() / rates[q]);
        }
        let ext = 2.0 * r / PI * acc[2];
        RadialSample {
            phi: acc[0] / (PI * PI),
            dphi: acc[1] / (PI * PI),
            jmean: self.jmean_from_tail(r, ext),
            tail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, r: f64) -> f64 {
        (4.0 * PI).powf(-(n as f64) / 2.0) * (-r * r / 4.0).exp()
    }

    fn poisson(n: usize, r: f64) -> f64 {
        // F^{-1}(e^{-|ξ|}) = Γ((n+1)/2) π^{-(n+1)/2} (1 + r²)^{-(n+1)/2}
        let a = (n as f64 + 1.0) / 2.0;
        libm::tgamma(a) * PI.powf(-a) * (1.0 + r * r).powf(-a)
    }

    #[test]
    fn calibration_against_closed_forms() {
        for n in 1..=3 {
            let gauss = UnitKernel::new(1.0, n, KernelQuadrature::default());
            let pois = UnitKernel::new(0.5, n, KernelQuadrature::default());
            for &r in &[0.0, 0.01, 0.3, 1.0, 1.9, 2.1, 5.0, 10.0] {
                let g = gauss.eval(r).phi;
                let p = pois.eval(r).phi;
                assert!((g / gaussian(n, r) - 1.0).abs() < 1e-9, "gauss n={n} r={r}: {g:e}");
                assert!((p / poisson(n, r) - 1.0).abs() < 1e-9, "poisson n={n} r={r}: {p:e}");
            }
        }
    }

    #[test]
    fn derivative_and_ball_mean_match_gaussian() {
        for n in 1..=3 {
            let k = UnitKernel::new(1.0, n, KernelQuadrature::default());
            for &r in &[0.02, 0.5, 1.5, 3.0, 6.0] {
                let s = k.eval(r);
                let dphi = -r / 2.0 * gaussian(n, r);
                assert!((s.dphi - dphi).abs() < 1e-10 * gaussian(n, 0.0), "n={n} r={r}");
                // J' = (Φ - nJ)/r checked by a central difference
                let h = 1e-4 * r;
                let dj = (k.eval(r + h).jmean - k.eval(r - h).jmean) / (2.0 * h);
                let expect = (s.phi - n as f64 * s.jmean) / r;
                assert!((dj - expect).abs() < 1e-6 * s.jmean.abs().max(1e-3), "n={n} r={r}: {dj:e} vs {expect:e}");
            }
        }
    }

    #[test]
    fn two_dimensional_branches_agree_at_the_switch() {
        for &alpha in &[0.6, 0.75, 0.9] {
            let k = UnitKernel::new(alpha, 2, KernelQuadrature::default());
            let h = k.eval_2d_hankel(3.0);
            let m = k.eval_2d_mehler(3.0);
            assert!((h.phi / m.phi - 1.0).abs() < 1e-8, "{} {}", h.phi, m.phi);
            assert!((h.dphi / m.dphi - 1.0).abs() < 1e-7);
            assert!((h.jmean / m.jmean - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn series_and_quadrature_agree_near_the_switch() {
        for n in 1..=3 {
            let k = UnitKernel::new(0.7, n, KernelQuadrature::default());
            let s = k.series_at(0.049);
            let q = match n {
                1 => k.eval_1d(0.049),
                2 => k.eval_2d_hankel(0.049),
                _ => k.eval_3d(0.049),
            };
            assert!((s.phi / q.phi - 1.0).abs() < 1e-10);
            assert!((s.jmean / q.jmean - 1.0).abs() < 1e-8, "n={n}: {} {}", s.jmean, q.jmean);
        }
    }
}
