//! Time-weighted sup norms, the Carleson-type norm, the Littlewood–Paley
//! Besov norm and the certifications relating them.
//!
//! Pointwise values of vector and tensor fields are measured by the
//! Euclidean (Frobenius) magnitude at each grid point.

use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernel_lab::BoundCheckResult;
use crate::operators::{derivative, multi_indices, nonlinearity, semigroup_apply, TimeGrid, TrajectoryField};
use crate::params::gx_exponent;
use crate::quadrature::{panels_toward_left, split_at, GaussRule};
use crate::report::SampleRow;
use crate::special::bessel_j;
use crate::spectral::{forward_transform, inverse_transform, PhysicalField, SpectralField, WavenumberLattice};

/// Relative size of the zero mode tolerated as "mean-free".
const MEAN_TOLERANCE: f64 = 1e-12;

/// `max_x |g(x)|` over the grid.
pub fn sup_magnitude(g: &SpectralField) -> f64 {
    pointwise_sup(&inverse_transform(g))
}

fn pointwise_sup(phys: &PhysicalField) -> f64 {
    let len = phys.lattice().len();
    let values = phys.values();
    (0..len)
        .map(|i| (0..phys.rank()).map(|c| values[c * len + i].powi(2)).sum::<f64>())
        .fold(0.0, f64::max)
        .sqrt()
}

fn require_mean_free(g: &SpectralField) -> Result<()> {
    let mean = g.mean_magnitude();
    if mean > MEAN_TOLERANCE * g.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonzeroMean { magnitude: mean });
    }
    Ok(())
}

/// `max_t t^γ ‖u(t)‖_∞` over the samples of a trajectory.
pub fn weighted_sup(u: &TrajectoryField, gamma: f64) -> f64 {
    u.times()
        .par_iter()
        .zip(u.states().par_iter())
        .map(|(&t, s)| t.powf(gamma) * sup_magnitude(s))
        .reduce(|| 0.0, f64::max)
}

pub fn gx_norm(u: &TrajectoryField, alpha: f64) -> f64 {
    weighted_sup(u, gx_exponent(alpha))
}

pub fn gy_norm(f: &TrajectoryField, alpha: f64) -> f64 {
    weighted_sup(f, 2.0 - 1.0 / alpha)
}

/// Weight exponent `(1 - 1/2α) + k/2α` of `GX^k`.
pub fn gxk_exponent(alpha: f64, k: usize) -> f64 {
    gx_exponent(alpha) + k as f64 / (2.0 * alpha)
}

/// Largest derivative order the lattice resolves: the dealiasing cutoff
/// in integer frequency.
pub fn max_resolved_order(lattice: &WavenumberLattice) -> usize {
    lattice.dealias_cutoff().max(0) as usize
}

fn check_order(u: &TrajectoryField, k: usize) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    let lattice = u.lattice();
    if k > max_resolved_order(lattice) {
        return Err(Error::UnresolvedDerivative { k });
    }
    let resolved = u.states().iter().any(|s| {
        (0..s.rank()).any(|c| {
            s.component(c)
                .iter()
                .enumerate()
                .any(|(idx, v)| lattice.in_dealias(idx) && lattice.norm(idx) > 0.0 && v.norm() > 0.0)
        })
    });
    let nonzero = u.states().iter().any(|s| !s.is_zero());
    if nonzero && !resolved {
        return Err(Error::UnresolvedDerivative { k });
    }
    Ok(())
}

/// `‖∂^β u(t)‖_∞` maximized over multi-indices `|β| = k`, per sample.
pub fn derivative_profile(u: &TrajectoryField, k: usize) -> Result<Vec<f64>> {
    check_order(u, k)?;
    if k == 0 {
        return Ok(u.states().par_iter().map(sup_magnitude).collect());
    }
    let indices = multi_indices(u.lattice().dim(), k);
    Ok(u.states()
        .par_iter()
        .map(|s| {
            indices
                .iter()
                .map(|beta| sup_magnitude(&derivative(s, beta)))
                .fold(0.0, f64::max)
        })
        .collect())
}

/// `‖u‖_{GX^k}`; `k = 0` is [`gx_norm`].
pub fn gxk_norm(u: &TrajectoryField, k: usize, alpha: f64) -> Result<f64> {
    let gamma = gxk_exponent(alpha, k);
    let profile = derivative_profile(u, k)?;
    Ok(u.times()
        .iter()
        .zip(&profile)
        .map(|(&t, &v)| t.powf(gamma) * v)
        .fold(0.0, f64::max))
}

/// Default sup-in-time grid: ratio `2^{1/8}` on `[1e-4, 1e4]`.
pub fn default_time_grid() -> TimeGrid {
    TimeGrid::spanning(1e-4, 1e4, 8).expect("static grid")
}

/// `max_t t^{1-1/2α} ‖S(t)v0‖_∞` over `grid`.
pub fn semigroup_gx_norm(v0: &SpectralField, alpha: f64, grid: &TimeGrid) -> Result<f64> {
    let gamma = gx_exponent(alpha);
    let values = grid
        .points()
        .par_iter()
        .map(|&t| Ok(t.powf(gamma) * sup_magnitude(&semigroup_apply(v0, t, alpha)?)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Sampling of the Carleson-type norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonSampling {
    /// Centres per axis on a uniform sub-lattice.
    pub x_per_axis: usize,
    pub radii_per_octave: usize,
    /// Gauss–Legendre nodes per time panel.
    pub nodes: usize,
}

impl Default for CarlesonSampling {
    fn default() -> Self {
        Self {
            x_per_axis: 8,
            radii_per_octave: 4,
            nodes: 6,
        }
    }
}

impl CarlesonSampling {
    pub fn refined(&self) -> Self {
        Self {
            x_per_axis: 2 * self.x_per_axis,
            radii_per_octave: 2 * self.radii_per_octave,
            nodes: self.nodes + 4,
        }
    }

    /// Geometric radii from `4 L/M` to `L/4`; a single radius `L/4` when the
    /// grid is too coarse for both ends.
    pub fn radii(&self, lattice: &WavenumberLattice) -> Vec<f64> {
        let r_max = lattice.period() / 4.0;
        let r_min = 4.0 * lattice.spacing();
        if r_min >= r_max {
            return vec![r_max];
        }
        let octaves = (r_max / r_min).log2();
        let count = (octaves * self.radii_per_octave as f64).ceil().max(1.0) as usize;
        (0..=count)
            .map(|i| r_min * (r_max / r_min).powf(i as f64 / count as f64))
            .collect()
    }
}

/// `∫_{B(0,R)} e^{i k·y} dy` as a function of `q = |k| R`.
fn ball_transform(n: usize, k: f64, r: f64) -> f64 {
    let q = k * r;
    match n {
        1 => {
            if q < 1e-8 {
                2.0 * r
            } else {
                2.0 * r * q.sin() / q
            }
        }
        2 => {
            let area = std::f64::consts::PI * r * r;
            if q < 1e-8 {
                area
            } else {
                2.0 * area * bessel_j(1, q) / q
            }
        }
        _ => {
            let vol = 4.0 / 3.0 * std::f64::consts::PI * r.powi(3);
            if q < 1e-3 {
                vol * (1.0 - q * q / 10.0 + q.powi(4) / 280.0)
            } else {
                3.0 * vol * (q.sin() - q * q.cos()) / q.powi(3)
            }
        }
    }
}

/// Carleson-type norm at the given radii: the max over centres and radii of
/// `(R^{-(n+2-2α)} ∫_0^{R^{2α}} ∫_{B(x,R)} |S(t)v0|^2 dy dt)^{1/2}`.
///
/// `|S(t)v0|^2` is formed exactly on a twice-finer grid and integrated over
/// balls through its Fourier series; the time integral is composite
/// Gauss–Legendre graded toward `t = 0`.
pub fn carleson_at_radii(v0: &SpectralField, alpha: f64, radii: &[f64], x_per_axis: usize, nodes: usize) -> Result<f64> {
    require_mean_free(v0)?;
    let lattice = v0.lattice().clone();
    let n = lattice.dim();
    let limit = lattice.period() / 4.0;
    if radii.is_empty() {
        return Err(invalid("radii", "at least one radius is required"));
    }
    if let Some(&bad) = radii.iter().find(|&&r| !(r > 0.0) || r > limit * (1.0 + 1e-12)) {
        return Err(invalid("radius", format!("{bad} must lie in (0, L/4 = {limit}]")));
    }
    if x_per_axis == 0 || nodes == 0 {
        return Err(invalid("sampling", "centre and node counts must be positive"));
    }
    if v0.is_zero() {
        return Ok(0.0);
    }
    let padded = lattice.with_modes(2 * lattice.modes())?;
    let w0 = v0.resample(&padded)?;

    // fastest decay rate present in |S(t)v0|^2
    let mut k_top: f64 = 0.0;
    for c in 0..v0.rank() {
        for (idx, v) in v0.component(c).iter().enumerate() {
            if v.norm() > 0.0 {
                k_top = k_top.max(lattice.norm(idx));
            }
        }
    }
    let mut ends: Vec<f64> = radii.iter().map(|r| r.powf(2.0 * alpha)).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let t_max = *ends.last().expect("nonempty");
    let lambda = 2.0 * k_top.powf(2.0 * alpha);
    let levels = (lambda * t_max).max(1.0).log2().ceil() as usize + 4;
    let panels = split_at(panels_toward_left(0.0, t_max, levels, 2.0), &ends);
    let rule = GaussRule::new(nodes);

    let density = |t: f64| -> Result<SpectralField> {
        let w = semigroup_apply(&w0, t, alpha)?;
        let phys = inverse_transform(&w);
        let plen = padded.len();
        let vals = phys.values();
        let sq: Vec<f64> = (0..plen)
            .map(|i| (0..w.rank()).map(|c| vals[c * plen + i].powi(2)).sum())
            .collect();
        Ok(forward_transform(&PhysicalField::from_values(&padded, 1, sq)?))
    };

    // ∫_0^{T} of the density spectrum, for every distinct end point T
    let contributions: Vec<(f64, SpectralField)> = panels
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = SpectralField::zeros(&padded, 1);
            for (s, w) in rule.on(a, b) {
                acc = acc.axpy(w, &density(s)?)?;
            }
            Ok((b, acc))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut running = SpectralField::zeros(&padded, 1);
    let mut cumulative: Vec<(f64, SpectralField)> = Vec::with_capacity(ends.len());
    let mut next = 0;
    for (b, piece) in &contributions {
        running = running.add(piece)?;
        while next < ends.len() && (*b - ends[next]).abs() <= 1e-12 * ends[next] {
            cumulative.push((ends[next], running.clone()));
            next += 1;
        }
    }

    let m2 = padded.modes();
    let stride = (m2 / x_per_axis).max(1);
    let exponent = n as f64 + 2.0 - 2.0 * alpha;
    let mut best: f64 = 0.0;
    for &r in radii {
        let end = r.powf(2.0 * alpha);
        let spectrum = &cumulative
            .iter()
            .find(|(e, _)| (e - end).abs() <= 1e-12 * end)
            .expect("every end point is a panel boundary")
            .1;
        let mut ball = spectrum.clone();
        for (idx, v) in ball.component_mut(0).iter_mut().enumerate() {
            *v *= Complex64::new(ball_transform(n, padded.norm(idx), r), 0.0);
        }
        let integral = inverse_transform(&ball);
        for (idx, &val) in integral.values().iter().enumerate() {
            let on_sublattice = (0..n).all(|axis| {
                let stride_axis = m2.pow((n - 1 - axis) as u32);
                (idx / stride_axis) % m2 % stride == 0
            });
            if on_sublattice {
                best = best.max(val * r.powf(-exponent));
            }
        }
    }
    Ok(best.max(0.0).sqrt())
}

/// Carleson-type norm with the sampling's radii and centres.
pub fn carleson_norm(v0: &SpectralField, alpha: f64, sampling: &CarlesonSampling) -> Result<f64> {
    let radii = sampling.radii(v0.lattice());
    carleson_at_radii(v0, alpha, &radii, sampling.x_per_axis, sampling.nodes)
}

/// Dyadic Littlewood–Paley partition built from the quintic smoothstep in
/// `log2 |ξ|`: `ψ(ξ) = θ(log2|ξ|) - θ(log2|ξ| + 1)` with `θ = 1` below 0
/// and `θ = 0` above 1. The blocks telescope to exactly one on `ξ ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LittlewoodPaley {
    pub j_min: i32,
    pub j_max: i32,
}

fn low_pass(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// `ψ(ξ)` at `|ξ| = xi`.
pub fn lp_bump(xi: f64) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    let s = xi.log2();
    low_pass(s) - low_pass(s + 1.0)
}

impl LittlewoodPaley {
    /// Every block that meets a nonzero frequency of the lattice.
    pub fn for_lattice(lattice: &WavenumberLattice) -> Self {
        let k_min = 2.0 * std::f64::consts::PI / lattice.period();
        let k_max = lattice.norms().iter().copied().fold(0.0, f64::max);
        Self {
            j_min: k_min.log2().floor() as i32,
            j_max: k_max.log2().ceil() as i32,
        }
    }

    /// Weight of block `j` at `|ξ| = xi`.
    pub fn weight(&self, j: i32, xi: f64) -> f64 {
        lp_bump(xi * 2f64.powi(-j))
    }

    /// `max |Σ_j ψ_j(k) - 1|` over the nonzero frequencies of the lattice.
    pub fn partition_residue(&self, lattice: &WavenumberLattice) -> f64 {
        lattice
            .norms()
            .iter()
            .filter(|&&k| k > 0.0)
            .map(|&k| ((self.j_min..=self.j_max).map(|j| self.weight(j, k)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The block `P_j g`.
    pub fn block(&self, g: &SpectralField, j: i32) -> SpectralField {
        let lattice = g.lattice().clone();
        let weights: Vec<f64> = lattice.norms().iter().map(|&k| self.weight(j, k)).collect();
        let mut out = g.clone();
        let len = lattice.len();
        for c in 0..g.rank() {
            let comp = out.component_mut(c);
            for idx in 0..len {
                comp[idx] *= weights[idx];
            }
        }
        out
    }
}

/// `max_j 2^{jσ} ‖P_j v0‖_∞`.
pub fn besov_norm(v0: &SpectralField, sigma: f64, lp: &LittlewoodPaley) -> Result<f64> {
    require_mean_free(v0)?;
    Ok((lp.j_min..=lp.j_max)
        .into_par_iter()
        .map(|j| 2f64.powf(j as f64 * sigma) * sup_magnitude(&lp.block(v0, j)))
        .reduce(|| 0.0, f64::max))
}

/// Regularity index `σ = 1 - 2α` of the critical Besov space.
pub fn besov_index(alpha: f64) -> f64 {
    1.0 - 2.0 * alpha
}

/// Time and Carleson sampling used by the norm certifications.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSampling {
    pub time_grid: TimeGrid,
    pub carleson: CarlesonSampling,
}

impl Default for NormSampling {
    fn default() -> Self {
        Self {
            time_grid: default_time_grid(),
            carleson: CarlesonSampling::default(),
        }
    }
}

impl NormSampling {
    pub fn refined(&self) -> Self {
        Self {
            time_grid: self.time_grid.refined(),
            carleson: self.carleson.refined(),
        }
    }
}

/// All norms of the semigroup flow `t ↦ S(t)v0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub label: String,
    pub alpha: f64,
    pub dim: usize,
    /// `‖S(·)v0‖_{GX}`.
    pub gx: f64,
    /// `‖N(S(·)v0)‖_{GY}`.
    pub gy: f64,
    /// `‖S(·)v0‖_{GX^k}`, `k = 0..`.
    pub gx_k: Vec<f64>,
    pub carleson: f64,
    pub besov: f64,
    pub time_samples: usize,
    pub carleson_samples: usize,
    pub j_range: (i32, i32),
}

pub const NORM_HEADER: &str = "label,alpha,n,gx,gy,carleson,besov,gx_k";

impl NormReport {
    pub fn for_flow(label: impl Into<String>, v0: &SpectralField, alpha: f64, k_max: usize, sampling: &NormSampling) -> Result<Self> {
        require_mean_free(v0)?;
        let flow = TrajectoryField::semigroup_flow(v0, &sampling.time_grid, alpha)?;
        let gx_k = (0..=k_max).map(|k| gxk_norm(&flow, k, alpha)).collect::<Result<Vec<_>>>()?;
        let gy = if v0.rank() == v0.lattice().dim() {
            gy_norm(&flow.try_map(nonlinearity)?, alpha)
        } else {
            0.0
        };
        let lp = LittlewoodPaley::for_lattice(v0.lattice());
        let radii = sampling.carleson.radii(v0.lattice());
        let centres = sampling.carleson.x_per_axis.pow(v0.lattice().dim() as u32);
        Ok(Self {
            label: label.into(),
            alpha,
            dim: v0.lattice().dim(),
            gx: gx_k[0],
            gy,
            gx_k,
            carleson: carleson_norm(v0, alpha, &sampling.carleson)?,
            besov: besov_norm(v0, besov_index(alpha), &lp)?,
            time_samples: sampling.time_grid.len(),
            carleson_samples: radii.len() * centres,
            j_range: (lp.j_min, lp.j_max),
        })
    }

    pub fn to_csv(&self) -> String {
        let gxk: Vec<String> = self.gx_k.iter().map(|v| format!("{v:.14e}")).collect();
        format!(
            "{},{:.14e},{},{:.14e},{:.14e},{:.14e},{:.14e},{}",
            self.label,
            self.alpha,
            self.dim,
            self.gx,
            self.gy,
            self.carleson,
            self.besov,
            gxk.join(";")
        )
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: GX {:.6e}  GY {:.6e}  E {:.6e}  Besov {:.6e}  ({} times, {} (x,R) samples, j in [{}, {}])",
            self.label,
            self.gx,
            self.gy,
            self.carleson,
            self.besov,
            self.time_samples,
            self.carleson_samples,
            self.j_range.0,
            self.j_range.1
        )
    }
}

pub fn write_norm_reports(mut w: impl Write, reports: &[NormReport]) -> io::Result<()> {
    writeln!(w, "{NORM_HEADER}")?;
    for r in reports {
        writeln!(w, "{}", r.to_csv())?;
    }
    Ok(())
}

/// The three critical norms of one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalNorms {
    pub besov: f64,
    pub carleson: f64,
    pub gx: f64,
}

impl CriticalNorms {
    pub fn compute(v0: &SpectralField, alpha: f64, sampling: &NormSampling) -> Result<Self> {
        let lp = LittlewoodPaley::for_lattice(v0.lattice());
        Ok(Self {
            besov: besov_norm(v0, besov_index(alpha), &lp)?,
            carleson: carleson_norm(v0, alpha, &sampling.carleson)?,
            gx: semigroup_gx_norm(v0, alpha, &sampling.time_grid)?,
        })
    }

    /// `(Besov/E, E/GX, Besov/GX)`.
    pub fn ratios(&self) -> [f64; 3] {
        [self.besov / self.carleson, self.carleson / self.gx, self.besov / self.gx]
    }
}

pub const RATIO_NAMES: [&str; 3] = ["besov/carleson", "carleson/gx", "besov/gx"];

/// Range of one pairwise norm ratio over a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRange {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
}

impl RatioRange {
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub alpha: f64,
    pub norms: Vec<CriticalNorms>,
    pub ranges: Vec<RatioRange>,
    pub factor: f64,
    pub pass: bool,
}

impl EquivalenceReport {
    pub fn max_spread(&self) -> f64 {
        self.ranges.iter().map(RatioRange::spread).fold(0.0, f64::max)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "field,alpha,besov,carleson,gx")?;
        for (i, m) in self.norms.iter().enumerate() {
            writeln!(w, "{i},{:.14e},{:.14e},{:.14e},{:.14e}", self.alpha, m.besov, m.carleson, m.gx)?;
        }
        Ok(())
    }
}

fn require_nonzero_family(family: &[SpectralField]) -> Result<()> {
    if family.is_empty() {
        return Err(invalid("family", "at least one field is required"));
    }
    if let Some(i) = family.iter().position(SpectralField::is_zero) {
        return Err(invalid("family", format!("field {i} is zero; norm ratios are undefined")));
    }
    Ok(())
}

/// Besov, Carleson and semigroup-GX norms over a family; passes iff every
/// pairwise ratio varies by at most `factor` (max/min) across the family.
pub fn certify_equivalence(family: &[SpectralField], alpha: f64, sampling: &NormSampling, factor: f64) -> Result<EquivalenceReport> {
    require_nonzero_family(family)?;
    let norms = family
        .iter()
        .map(|v| CriticalNorms::compute(v, alpha, sampling))
        .collect::<Result<Vec<_>>>()?;
    let ranges: Vec<RatioRange> = (0..3)
        .map(|p| {
            let vals = norms.iter().map(|m| m.ratios()[p]);
            RatioRange {
                name: RATIO_NAMES[p],
                min: vals.clone().fold(f64::INFINITY, f64::min),
                max: vals.fold(0.0, f64::max),
            }
        })
        .collect();
    let pass = ranges.iter().all(|r| r.spread().is_finite() && r.spread() <= factor);
    Ok(EquivalenceReport {
        alpha,
        norms,
        ranges,
        factor,
        pass,
    })
}

fn pointwise_rows(family: &[SpectralField], alpha: f64, sampling: &NormSampling) -> Result<Vec<SampleRow>> {
    let gamma = gx_exponent(alpha);
    let mut rows = Vec::new();
    for v0 in family {
        let e = carleson_norm(v0, alpha, &sampling.carleson)?;
        let n = v0.lattice().dim();
        for &t in sampling.time_grid.points() {
            let value = t.powf(gamma) * sup_magnitude(&semigroup_apply(v0, t, alpha)?);
            rows.push(SampleRow {
                alpha,
                n,
                t,
                r: 0.0,
                k: 0,
                value,
                bound_value: e,
                ratio: value / e,
            });
        }
    }
    Ok(rows)
}

/// `sup t^{1-1/2α} |S(t)u0(x)| / ‖u0‖_E` over the family and the time and
/// grid samples, rerun with refined sampling; passes iff both are finite and
/// agree to `tolerance`.
pub fn check_pointwise_semigroup_bound(family: &[SpectralField], alpha: f64, sampling: &NormSampling, tolerance: f64) -> Result<BoundCheckResult> {
    require_nonzero_family(family)?;
    let coarse = BoundCheckResult::from_rows("pointwise semigroup / E", pointwise_rows(family, alpha, sampling)?);
    let fine = BoundCheckResult::from_rows("pointwise semigroup / E", pointwise_rows(family, alpha, &sampling.refined())?);
    Ok(coarse.with_refinement(&fine, tolerance))
}

/// The same coefficients on a box `factor` times longer, i.e. the dilation
/// `x ↦ v0(x / factor)`.
pub fn dilated(v0: &SpectralField, factor: f64) -> Result<SpectralField> {
    let lattice: Arc<WavenumberLattice> = v0.lattice().with_period(v0.lattice().period() * factor)?;
    SpectralField::from_coeffs(&lattice, v0.rank(), v0.coeffs().to_vec())
}

#[cfg(test)]
mod tests;
