//! Physical-space heat kernels and certification of the kernel estimates.

mod angular;
mod bounds;
mod combinatorial;
mod convolution;
mod direct;
mod mihlin;
mod radial;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::params::{validate_alpha, AlphaRange};

pub use bounds::{check_bound, k_growth, Bound, BoundCheckResult, BoundKind, KGrowthReport};
pub use combinatorial::{check_combinatorial_lemma, combinatorial_sum};
pub use convolution::{convolution_lhs, verify_convolution_inequality};
pub use direct::direct_kernel;
pub use mihlin::{check_mihlin_hormander, leray_symbol, MihlinReport};
pub use radial::{KernelQuadrature, RadialSample};

use radial::UnitKernel;

/// Largest admissible discarded tail of any kernel integral.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Which kernel a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Phi,
    /// `ΠΦ`, sup over tensor components and directions
    PiPhi,
    /// `∇^{order+1} ΠΦ`, sup over tensor components and directions
    PiGradient { order: usize },
}

impl KernelKind {
    /// `k` in the CSV output.
    pub fn order(self) -> usize {
        match self {
            KernelKind::PiGradient { order } => order,
            _ => 0,
        }
    }

    /// Homogeneity degree of the symbol in front of the heat multiplier.
    pub fn symbol_degree(self) -> usize {
        match self {
            KernelKind::PiGradient { order } => order + 1,
            _ => 0,
        }
    }

    pub fn name(self) -> String {
        match self {
            KernelKind::Phi => "phi".into(),
            KernelKind::PiPhi => "pi_phi".into(),
            KernelKind::PiGradient { order } => format!("pi_grad{}_phi", order + 1),
        }
    }
}

/// Radial samples of one kernel at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub alpha: f64,
    pub dim: usize,
    pub t: f64,
    pub kind: KernelKind,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest bound on a discarded integration tail.
    pub tail_bound: f64,
}

/// `0` followed by a geometric grid on `[r_min, r_max]`.
pub fn radial_grid(r_min: f64, r_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (r_max / r_min).log10();
    let count = (decades * per_decade as f64).round() as usize;
    let mut out = vec![0.0];
    out.extend((0..=count).map(|i| r_min * 10f64.powf(decades * i as f64 / count.max(1) as f64)));
    out
}

fn validate_request(alpha: f64, n: usize, t: f64, radii: &[f64], quad: &KernelQuadrature) -> Result<()> {
    validate_alpha(alpha, AlphaRange::Kernel)?;
    if !(1..=3).contains(&n) {
        return Err(invalid("dim", format!("{n} is not in {{1, 2, 3}}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("{t} must be positive")));
    }
    if radii.iter().any(|&r| !(r >= 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("radii", "radii must be nonnegative and strictly increasing"));
    }
    quad.validate()
}

fn finish(alpha: f64, n: usize, t: f64, kind: KernelKind, radii: &[f64], samples: Vec<(f64, f64)>) -> Result<KernelTable> {
    let tail_bound = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if tail_bound > TAIL_TOLERANCE {
        return Err(Error::QuadratureNotConverged(format!(
            "{} at alpha = {alpha}, n = {n}, t = {t}: tail bound {tail_bound:e}",
            kind.name()
        )));
    }
    let values: Vec<f64> = samples.into_iter().map(|s| s.0).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureNotConverged(format!("{} produced non-finite values", kind.name())));
    }
    Ok(KernelTable {
        alpha,
        dim: n,
        t,
        kind,
        radii: radii.to_vec(),
        values,
        tail_bound,
    })
}

/// Unit-time radius and amplitude factor for a kernel of symbol degree `d`:
/// `K(t, r) = t^{-(n+d)/2α} K(1, r t^{-1/2α})`.
fn self_similar(alpha: f64, n: usize, d: usize, t: f64) -> (f64, f64) {
    let a2 = 2.0 * alpha;
    (t.powf(-1.0 / a2), t.powf(-((n + d) as f64) / a2))
}

/// `Φ(t, r)` on the given radii.
pub fn eval_phi(alpha: f64, n: usize, t: f64, radii: &[f64], quad: &KernelQuadrature) -> Result<KernelTable> {
    validate_request(alpha, n, t, radii, quad)?;
    let unit = UnitKernel::new(alpha, n, *quad);
    let (rs, amp) = self_similar(alpha, n, 0, t);
    let samples = radii
        .par_iter()
        .map(|&r| {
            let s = unit.eval(r * rs);
            (amp * s.phi, amp * s.tail)
        })
        .collect();
    finish(alpha, n, t, KernelKind::Phi, radii, samples)
}

/// Raw radial profiles `Φ, Φ', J` at unit time.
pub fn radial_profiles(alpha: f64, n: usize, radii: &[f64], quad: &KernelQuadrature) -> Result<Vec<RadialSample>> {
    validate_request(alpha, n, 1.0, radii, quad)?;
    let unit = UnitKernel::new(alpha, n, *quad);
    Ok(radii.par_iter().map(|&r| unit.eval(r)).collect())
}

/// Unit vectors covering one octant (all component magnitudes are
/// invariant under axis reflections).
pub(crate) fn directions(n: usize) -> Vec<[f64; 3]> {
    use std::f64::consts::FRAC_PI_2;
    match n {
        1 => vec![[1.0, 0.0, 0.0]],
        2 => (0..=32)
            .map(|l| {
                let p = FRAC_PI_2 * l as f64 / 32.0;
                [p.cos(), p.sin(), 0.0]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for a in 0..=8 {
                for b in 0..=8 {
                    let (th, ph) = (FRAC_PI_2 * a as f64 / 8.0, FRAC_PI_2 * b as f64 / 8.0);
                    out.push([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                }
            }
            out
        }
    }
}

/// `ΠΦ_{ij}(x) = δ_ij A + x̂_i x̂_j D` with `A = Φ - J`, `D = nJ - Φ`.
pub(crate) fn pi_phi_tensor(n: usize, s: &RadialSample, dir: &[f64; 3]) -> Vec<f64> {
    let nf = n as f64;
    let a = s.phi - s.jmean;
    let d = nf * s.jmean - s.phi;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            out.push(delta * a + dir[i] * dir[j] * d);
        }
    }
    out
}

/// `∂_k ΠΦ_{ij}` at radius `r > 0`, flattened as `(i n + j) n + k`.
pub(crate) fn pi_grad_tensor(n: usize, r: f64, s: &RadialSample, dir: &[f64; 3]) -> Vec<f64> {
    let nf = n as f64;
    let d = nf * s.jmean - s.phi;
    let da = s.dphi + d / r;
    let dd = -nf * d / r - s.dphi;
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let dij = if i == j { 1.0 } else { 0.0 };
                let dik = if i == k { 1.0 } else { 0.0 };
                let djk = if j == k { 1.0 } else { 0.0 };
                let (xi, xj, xk) = (dir[i], dir[j], dir[k]);
                out.push(
                    dij * da * xk
                        + dd * xi * xj * xk
                        + d * (dik * xj + djk * xi - 2.0 * xi * xj * xk) / r,
                );
            }
        }
    }
    out
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `ΠΦ` (`order = None`) or `∇^{k+1}ΠΦ` (`order = Some(k)`), reduced to the
/// sup over tensor components and directions at every radius.
///
/// First derivatives use the exact radial identity in every dimension;
/// higher derivatives are available in two dimensions (angular Fourier
/// expansion of the symbol against Hankel transforms). In one dimension
/// `Π = 0`.
pub fn eval_pi_phi(
    alpha: f64,
    n: usize,
    t: f64,
    radii: &[f64],
    order: Option<usize>,
    quad: &KernelQuadrature,
) -> Result<KernelTable> {
    validate_request(alpha, n, t, radii, quad)?;
    let kind = match order {
        None => KernelKind::PiPhi,
        Some(order) => KernelKind::PiGradient { order },
    };
    let (rs, amp) = self_similar(alpha, n, kind.symbol_degree(), t);
    let samples: Vec<(f64, f64)> = match order {
        Some(k) if k >= 1 => match n {
            1 => radii.iter().map(|_| (0.0, 0.0)).collect(),
            2 => {
                let unit_radii: Vec<f64> = radii.iter().map(|r| r * rs).collect();
                let (vals, tail) = angular::pi_gradient_2d(alpha, k, &unit_radii, quad);
                vals.into_iter().map(|v| (amp * v, amp * tail)).collect()
            }
            _ => {
                return Err(Error::Precondition(
                    "higher derivatives of the projected kernel are implemented for n <= 2".into(),
                ))
            }
        },
        _ => {
            let unit = UnitKernel::new(alpha, n, *quad);
            let dirs = directions(n);
            radii
                .par_iter()
                .map(|&r| {
                    let u = r * rs;
                    let s = unit.eval(u);
                    let v = dirs
                        .iter()
                        .map(|dir| match order {
                            None => sup_abs(&pi_phi_tensor(n, &s, dir)),
                            Some(_) if u == 0.0 => 0.0,
                            Some(_) => sup_abs(&pi_grad_tensor(n, u, &s, dir)),
                        })
                        .fold(0.0, f64::max);
                    (amp * v, amp * s.tail)
                })
                .collect()
        }
    };
    finish(alpha, n, t, kind, radii, samples)
}
