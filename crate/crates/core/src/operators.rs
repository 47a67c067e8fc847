//! Exact per-mode multipliers and the time-integral operators built on them.
//!
//! Sign convention: the mild form is `u = S(t)u0 + B(u, u)` with
//! `B(u, v)(t) = -∫_0^t S(t-s) Π ∇·(u ⊗ v)(s) ds`, so `B` already carries the
//! minus sign of the equation.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{cap_width, panels_toward_right, split_at, GaussRule};
use crate::spectral::{dealias, forward_transform, inverse_transform, PhysicalField, SpectralField, WavenumberLattice};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|k|^{2α}` at every lattice index.
pub fn dissipation_symbol(lattice: &WavenumberLattice, alpha: f64) -> Vec<f64> {
    lattice.norms().iter().map(|&k| if k == 0.0 { 0.0 } else { k.powf(2.0 * alpha) }).collect()
}

fn map_modes(g: &SpectralField, f: impl Fn(usize) -> Complex64) -> SpectralField {
    let mut out = g.clone();
    let len = g.lattice().len();
    for c in 0..g.rank() {
        for (idx, v) in out.component_mut(c).iter_mut().enumerate() {
            *v *= f(idx % len);
        }
    }
    out
}

pub fn fractional_laplacian(g: &SpectralField, alpha: f64) -> SpectralField {
    let symbol = dissipation_symbol(g.lattice(), alpha);
    map_modes(g, |idx| Complex64::new(symbol[idx], 0.0))
}

/// `S(t) = exp(-t (-Δ)^α)`.
pub fn semigroup_apply(g: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(g.clone());
    }
    let symbol = dissipation_symbol(g.lattice(), alpha);
    Ok(map_modes(g, |idx| Complex64::new((-t * symbol[idx]).exp(), 0.0)))
}

fn require_vector(g: &SpectralField) -> Result<usize> {
    let n = g.lattice().dim();
    if g.rank() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("vector field of rank {n}"),
            actual: format!("rank {}", g.rank()),
        });
    }
    Ok(n)
}

/// Leray projection `δ_ij - k_i k_j / |k|²`, rejecting fields with a mean.
pub fn leray_project(g: &SpectralField) -> Result<SpectralField> {
    require_vector(g)?;
    let mean = g.mean_magnitude();
    let scale = g.max_abs().max(1.0);
    if mean > 1e-14 * scale {
        return Err(Error::NonzeroMean { magnitude: mean });
    }
    let mut out = g.clone();
    project_in_place(&mut out);
    Ok(out)
}

/// Projects every nonzero mode and clears the zero mode.
pub(crate) fn project_in_place(g: &mut SpectralField) {
    let lattice = g.lattice().clone();
    let n = lattice.dim();
    let len = lattice.len();
    let coeffs = g.coeffs_mut();
    for idx in 0..len {
        let k = lattice.wavevector(idx);
        let k2: f64 = k[..n].iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            for c in 0..n {
                coeffs[c * len + idx] = ZERO;
            }
            continue;
        }
        let dot: Complex64 = (0..n).map(|c| coeffs[c * len + idx] * k[c]).sum();
        for c in 0..n {
            coeffs[c * len + idx] -= dot * (k[c] / k2);
        }
    }
}

/// `∂_axis`, i.e. multiplication by `i k_axis`.
pub fn gradient(g: &SpectralField, axis: usize) -> SpectralField {
    let lattice = g.lattice().clone();
    map_modes(g, |idx| Complex64::new(0.0, lattice.wavevector(idx)[axis]))
}

/// Full gradient; component `c * n + axis` holds `∂_axis g_c`.
pub fn full_gradient(g: &SpectralField) -> SpectralField {
    let lattice = g.lattice().clone();
    let n = lattice.dim();
    let len = lattice.len();
    let mut out = SpectralField::zeros(&lattice, g.rank() * n);
    for c in 0..g.rank() {
        let src = g.component(c);
        for axis in 0..n {
            let dst = out.component_mut(c * n + axis);
            for idx in 0..len {
                dst[idx] = src[idx] * Complex64::new(0.0, lattice.wavevector(idx)[axis]);
            }
        }
    }
    out
}

/// Mixed derivative `∂^β` with `orders[axis] = β_axis`.
pub fn derivative(g: &SpectralField, orders: &[usize]) -> SpectralField {
    let lattice = g.lattice().clone();
    map_modes(g, |idx| {
        let k = lattice.wavevector(idx);
        let mut m = Complex64::new(1.0, 0.0);
        for (axis, &o) in orders.iter().enumerate() {
            m *= Complex64::new(0.0, k[axis]).powu(o as u32);
        }
        m
    })
}

/// All multi-indices of total order `k` in `n` variables.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == n {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in (0..=k).rev() {
            prefix.push(i);
            rec(n, k - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// Row divergence of a tensor field: `(∇·T)_i = Σ_j ∂_j T_ij`.
pub fn divergence(t: &SpectralField) -> Result<SpectralField> {
    let lattice = t.lattice().clone();
    let n = lattice.dim();
    if t.rank() != n * n {
        return Err(Error::ShapeMismatch {
            expected: format!("tensor field of rank {}", n * n),
            actual: format!("rank {}", t.rank()),
        });
    }
    let len = lattice.len();
    let mut out = SpectralField::zeros(&lattice, n);
    for i in 0..n {
        let dst = out.component_mut(i);
        for j in 0..n {
            let src = t.component(i * n + j);
            for idx in 0..len {
                dst[idx] += src[idx] * Complex64::new(0.0, lattice.wavevector(idx)[j]);
            }
        }
    }
    Ok(out)
}

/// Dealiased spectrum of the pointwise product `u ⊗ v`; component `i n + j`
/// holds `u_i v_j`.
pub fn outer_product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.check_compatible(v)?;
    let lattice = u.lattice().clone();
    let len = lattice.len();
    let (cu, cv) = (u.rank(), v.rank());
    let pu = inverse_transform(u);
    let pv = if std::ptr::eq(u, v) { pu.clone() } else { inverse_transform(v) };
    let mut values = vec![0.0; cu * cv * len];
    for i in 0..cu {
        let a = pu.component(i);
        for j in 0..cv {
            let b = pv.component(j);
            let dst = &mut values[(i * cv + j) * len..(i * cv + j + 1) * len];
            for idx in 0..len {
                dst[idx] = a[idx] * b[idx];
            }
        }
    }
    let product = PhysicalField::from_values(&lattice, cu * cv, values)?;
    Ok(dealias(&forward_transform(&product)))
}

/// `N(u) = u ⊗ u`, dealiased.
pub fn nonlinearity(u: &SpectralField) -> Result<SpectralField> {
    outer_product(u, u)
}

/// `-Π ∇·(u ⊗ v)`: the integrand of `B` before time integration.
pub fn bilinear_forcing(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let mut f = divergence(&outer_product(u, v)?)?;
    project_in_place(&mut f);
    Ok(f.scaled(-1.0))
}

/// `Π ∇·f` for a tensor field (no sign flip).
pub fn projected_divergence(f: &SpectralField) -> Result<SpectralField> {
    let mut out = divergence(f)?;
    project_in_place(&mut out);
    Ok(out)
}

/// Strictly increasing positive sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// `t_m = t_min ρ^m`, `m = 0..count`.
    pub fn geometric(t_min: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min.is_finite()) {
            return Err(invalid("t_min", format!("{t_min} must be positive")));
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(invalid("ratio", format!("{ratio} must exceed 1")));
        }
        if count == 0 {
            return Err(invalid("count", "time grid needs at least one point"));
        }
        Ok(Self {
            points: (0..count).map(|m| t_min * ratio.powi(m as i32)).collect(),
        })
    }

    /// Geometric grid from `t_min` through at least `t_max` with
    /// `per_octave` points per doubling.
    pub fn spanning(t_min: f64, t_max: f64, per_octave: usize) -> Result<Self> {
        if t_max <= t_min {
            return Err(invalid("t_max", format!("{t_max} must exceed t_min = {t_min}")));
        }
        let ratio = 2f64.powf(1.0 / per_octave.max(1) as f64);
        let count = ((t_max / t_min).ln() / ratio.ln() - 1e-9).ceil() as usize + 1;
        Self::geometric(t_min, ratio, count)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("points", "time grid needs at least one point"));
        }
        if points[0] <= 0.0 || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("points", "times must be positive and strictly increasing"));
        }
        Ok(Self { points })
    }

    /// Prepends `count` points continuing the geometric progression with
    /// `ratio` below the first point (a graded sub-mesh on `(0, t_min]`).
    pub fn with_submesh(&self, count: usize, ratio: f64) -> Result<Self> {
        if !(ratio > 1.0) {
            return Err(invalid("ratio", "sub-mesh ratio must exceed 1"));
        }
        let first = self.points[0];
        let mut pts: Vec<f64> = (1..=count).rev().map(|j| first / ratio.powi(j as i32)).collect();
        pts.extend_from_slice(&self.points);
        Self::from_points(pts)
    }

    /// Inserts the geometric midpoint of every interval.
    pub fn refined(&self) -> Self {
        let mut pts = Vec::with_capacity(2 * self.points.len());
        for w in self.points.windows(2) {
            pts.push(w[0]);
            pts.push((w[0] * w[1]).sqrt());
        }
        pts.push(*self.points.last().expect("nonempty"));
        Self { points: pts }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().expect("nonempty")
    }

    /// Index of the grid point closest to `t` in log scale.
    pub fn nearest(&self, t: f64) -> usize {
        let lt = t.ln();
        (0..self.points.len())
            .min_by(|&a, &b| {
                (self.points[a].ln() - lt).abs().total_cmp(&(self.points[b].ln() - lt).abs())
            })
            .expect("nonempty")
    }
}

/// A field sampled on a [`TimeGrid`], optionally with its value at `t = 0`.
///
/// Between samples the field is interpolated linearly in `log t`; on
/// `(0, t_0]` it is linear in `t` toward the initial value when one is
/// stored, constant otherwise.
#[derive(Debug, Clone)]
pub struct TrajectoryField {
    grid: TimeGrid,
    initial: Option<SpectralField>,
    states: Vec<SpectralField>,
}

impl TrajectoryField {
    pub fn new(grid: TimeGrid, states: Vec<SpectralField>, initial: Option<SpectralField>) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} states", grid.len()),
                actual: format!("{}", states.len()),
            });
        }
        for s in states.iter().skip(1).chain(initial.iter()) {
            states[0].check_compatible(s)?;
        }
        Ok(Self { grid, initial, states })
    }

    /// `t ↦ S(t) u0` sampled on the grid, with `u0` as initial value.
    pub fn semigroup_flow(u0: &SpectralField, grid: &TimeGrid, alpha: f64) -> Result<Self> {
        let states = grid
            .points()
            .par_iter()
            .map(|&t| semigroup_apply(u0, t, alpha))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid.clone(), states, Some(u0.clone()))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn initial(&self) -> Option<&SpectralField> {
        self.initial.as_ref()
    }

    pub fn lattice(&self) -> &Arc<WavenumberLattice> {
        self.states[0].lattice()
    }

    pub fn rank(&self) -> usize {
        self.states[0].rank()
    }

    /// Applies `f` to every state (and to the initial value).
    pub fn try_map(&self, f: impl Fn(&SpectralField) -> Result<SpectralField> + Sync) -> Result<Self> {
        let states = self.states.par_iter().map(&f).collect::<Result<Vec<_>>>()?;
        let initial = self.initial.as_ref().map(&f).transpose()?;
        Self::new(self.grid.clone(), states, initial)
    }

    /// Pointwise `self - other` (grids must agree).
    pub fn sub(&self, other: &TrajectoryField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        let initial = match (&self.initial, &other.initial) {
            (Some(a), Some(b)) => Some(a.sub(b)?),
            _ => None,
        };
        Self::new(self.grid.clone(), states, initial)
    }

    /// Pointwise `self + other` (grids must agree).
    pub fn add(&self, other: &TrajectoryField) -> Result<Self> {
        self.sub(&other.scaled(-1.0))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            initial: self.initial.as_ref().map(|s| s.scaled(a)),
            states: self.states.iter().map(|s| s.scaled(a)).collect(),
        }
    }

    /// Interpolation weights `(lower, upper, w)` for time `s`; the value is
    /// `(1-w) lower + w upper`. `lower == None` stands for the initial value.
    fn bracket(&self, s: f64) -> Result<(Option<usize>, usize, f64)> {
        let pts = self.grid.points();
        let last = self.grid.last();
        if s > last * (1.0 + 1e-12) || s.is_nan() {
            return Err(Error::TimeNotCovered { t: s, last });
        }
        if s < 0.0 {
            return Err(Error::NegativeTime(s));
        }
        if s <= pts[0] {
            return Ok(match self.initial {
                Some(_) => (None, 0, s / pts[0]),
                None => (Some(0), 0, 0.0),
            });
        }
        let upper = pts.partition_point(|&p| p < s).min(pts.len() - 1);
        let lower = upper - 1;
        let w = (s / pts[lower]).ln() / (pts[upper] / pts[lower]).ln();
        Ok((Some(lower), upper, w.clamp(0.0, 1.0)))
    }

    pub fn sample(&self, s: f64) -> Result<SpectralField> {
        let (lower, upper, w) = self.bracket(s)?;
        let lo = match lower {
            Some(i) => &self.states[i],
            None => self.initial.as_ref().expect("bracket returns None only with an initial value"),
        };
        lo.scaled(1.0 - w).axpy(w, &self.states[upper])
    }

    /// Largest divergence residue over the states, relative to the largest
    /// coefficient.
    pub fn divergence_residue(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.divergence_residue() / s.max_abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// Composite Gauss–Legendre layout for the Duhamel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub nodes: usize,
    pub grading: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 16,
            nodes: 4,
            grading: 2.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.nodes == 0 {
            return Err(invalid("quadrature", "panels and nodes must be positive"));
        }
        if !(self.grading > 1.0) {
            return Err(invalid("quadrature", "grading ratio must exceed 1"));
        }
        Ok(())
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self {
            panels: self.panels * factor,
            ..*self
        }
    }

    /// Panels on `[0, t]`: geometric toward `t`, no panel wider than
    /// `t / panels`, split at the forcing breakpoints.
    fn layout(&self, t: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
        let graded = panels_toward_right(0.0, t, self.panels, self.grading);
        let capped = cap_width(graded, t / self.panels as f64);
        split_at(capped, breakpoints)
    }
}

/// A time-dependent spectral forcing.
pub trait Forcing {
    fn sample(&self, s: f64) -> Result<SpectralField>;
    /// Times where the forcing may have kinks.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

impl Forcing for TrajectoryField {
    fn sample(&self, s: f64) -> Result<SpectralField> {
        TrajectoryField::sample(self, s)
    }

    fn breakpoints(&self) -> &[f64] {
        self.times()
    }
}

/// Forcing given by a closure.
pub struct FnForcing<F>(pub F);

impl<F: Fn(f64) -> SpectralField> Forcing for FnForcing<F> {
    fn sample(&self, s: f64) -> Result<SpectralField> {
        Ok((self.0)(s))
    }
}

/// `(V f)(t) = ∫_0^t S(t-s) f(s) ds` by composite Gauss–Legendre.
pub fn duhamel_apply(
    forcing: &dyn Forcing,
    t: f64,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<SpectralField> {
    quad.validate()?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let probe = forcing.sample(t)?;
    let mut acc = SpectralField::zeros(probe.lattice(), probe.rank());
    if t == 0.0 {
        return Ok(acc);
    }
    let symbol = dissipation_symbol(probe.lattice(), alpha);
    let len = symbol.len();
    let rule = GaussRule::new(quad.nodes);
    let breaks: Vec<f64> = forcing.breakpoints().iter().copied().filter(|&b| b < t).collect();
    for (a, b) in quad.layout(t, &breaks) {
        for (s, w) in rule.on(a, b) {
            let f = forcing.sample(s)?;
            let lag = t - s;
            let decay: Vec<f64> = symbol.iter().map(|&l| w * (-lag * l).exp()).collect();
            for c in 0..f.rank() {
                let src = f.component(c);
                let dst = &mut acc.coeffs_mut()[c * len..(c + 1) * len];
                for idx in 0..len {
                    dst[idx] += src[idx] * decay[idx];
                }
            }
        }
    }
    Ok(acc)
}

/// `V f` at every grid time of a trajectory forcing, by the semigroup
/// recursion `I(t_m) = S(t_m - t_{m-1}) I(t_{m-1}) + ∫_{t_{m-1}}^{t_m} …`.
pub fn duhamel_trajectory(
    forcing: &TrajectoryField,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<SpectralField>> {
    quad.validate()?;
    let lattice = forcing.lattice().clone();
    let symbol = dissipation_symbol(&lattice, alpha);
    let lambda_max = symbol.iter().copied().fold(0.0, f64::max);
    let len = lattice.len();
    let rank = forcing.rank();
    let times = forcing.times();
    let rule = GaussRule::new(quad.nodes);
    // modes the forcing never touches need no weights
    let mut active = vec![false; len];
    for s in forcing.states().iter().chain(forcing.initial()) {
        for c in 0..rank {
            for (idx, v) in s.component(c).iter().enumerate() {
                active[idx] |= v.re != 0.0 || v.im != 0.0;
            }
        }
    }
    let active_modes: Vec<usize> = (0..len).filter(|&i| active[i]).collect();

    // Per-interval contributions, computed independently.
    let pieces: Vec<SpectralField> = (0..times.len())
        .into_par_iter()
        .map(|m| {
            let (a, b) = if m == 0 { (0.0, times[0]) } else { (times[m - 1], times[m]) };
            let levels = ((lambda_max * (b - a)).max(1.0).log2().ceil() as usize + 2).clamp(2, quad.panels.max(2));
            let panels = panels_toward_right(a, b, levels, quad.grading);
            // weights multiplying the left and right endpoint states
            let mut left = vec![0.0; len];
            let mut right = vec![0.0; len];
            for (pa, pb) in panels {
                for (s, w) in rule.on(pa, pb) {
                    let theta = if m == 0 {
                        if forcing.initial().is_some() { s / b } else { 1.0 }
                    } else {
                        (s / a).ln() / (b / a).ln()
                    };
                    let lag = b - s;
                    for &idx in &active_modes {
                        let e = w * (-lag * symbol[idx]).exp();
                        left[idx] += e * (1.0 - theta);
                        right[idx] += e * theta;
                    }
                }
            }
            let lo = if m == 0 {
                forcing.initial().unwrap_or(&forcing.states()[0])
            } else {
                &forcing.states()[m - 1]
            };
            let hi = &forcing.states()[m];
            let mut out = SpectralField::zeros(&lattice, rank);
            for c in 0..rank {
                let (l, h) = (lo.component(c), hi.component(c));
                let dst = out.component_mut(c);
                for &idx in &active_modes {
                    dst[idx] = l[idx] * left[idx] + h[idx] * right[idx];
                }
            }
            out
        })
        .collect();

    let mut result = Vec::with_capacity(times.len());
    let mut acc = pieces[0].clone();
    result.push(acc.clone());
    for m in 1..times.len() {
        let dt = times[m] - times[m - 1];
        let coeffs = acc.coeffs_mut();
        for c in 0..rank {
            for idx in 0..len {
                coeffs[c * len + idx] *= (-dt * symbol[idx]).exp();
            }
        }
        acc = acc.add(&pieces[m])?;
        result.push(acc.clone());
    }
    Ok(result)
}

/// Forcing trajectory `-Π∇·(u ⊗ v)` sampled on the common grid.
pub fn bilinear_forcing_trajectory(u: &TrajectoryField, v: &TrajectoryField) -> Result<TrajectoryField> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let states = u
        .states()
        .par_iter()
        .zip(v.states().par_iter())
        .map(|(a, b)| bilinear_forcing(a, b))
        .collect::<Result<Vec<_>>>()?;
    let initial = match (u.initial(), v.initial()) {
        (Some(a), Some(b)) => Some(bilinear_forcing(a, b)?),
        _ => None,
    };
    TrajectoryField::new(u.grid().clone(), states, initial)
}

/// `B(u, v)(t)` at a single time.
pub fn bilinear_b(
    u: &TrajectoryField,
    v: &TrajectoryField,
    t: f64,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<SpectralField> {
    let forcing = bilinear_forcing_trajectory(u, v)?;
    let mut out = duhamel_apply(&forcing, t, alpha, quad)?;
    project_in_place(&mut out);
    Ok(out)
}

/// `B(u, v)` at every grid time.
pub fn bilinear_b_trajectory(
    u: &TrajectoryField,
    v: &TrajectoryField,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<TrajectoryField> {
    let forcing = bilinear_forcing_trajectory(u, v)?;
    let states = duhamel_trajectory(&forcing, alpha, quad)?;
    let lattice = u.lattice().clone();
    let rank = u.rank();
    TrajectoryField::new(u.grid().clone(), states, Some(SpectralField::zeros(&lattice, rank)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Parameters;
    use crate::spectral::build_lattice;
    use std::f64::consts::PI;

    fn lattice(n: usize, m: usize) -> Arc<WavenumberLattice> {
        build_lattice(&Parameters::new(0.75, n, m, 2.0 * PI)).unwrap()
    }

    fn single_mode(lat: &Arc<WavenumberLattice>, m: [i32; 3]) -> SpectralField {
        let mut f = SpectralField::zeros(lat, 1);
        f.set_real_mode(0, m, Complex64::new(1.0, 0.0)).unwrap();
        f
    }

    #[test]
    fn fractional_laplacian_examples() {
        let lat = lattice(2, 16);
        assert!(fractional_laplacian(&SpectralField::zeros(&lat, 1), 0.75).is_zero());
        let f = single_mode(&lat, [2, 0, 0]);
        let idx = lat.index_of([2, 0, 0]).unwrap();
        let g = fractional_laplacian(&f, 0.75);
        assert!((g.coeffs()[idx].re - 2f64.powf(1.5)).abs() < 1e-12);
        assert!((g.coeffs()[idx].re - 2.828_427_1).abs() < 1e-7);
        // α = 1 is -Δ
        let h = single_mode(&lat, [1, 2, 0]);
        let lap = fractional_laplacian(&h, 1.0);
        let idx = lat.index_of([1, 2, 0]).unwrap();
        assert!((lap.coeffs()[idx].re - 5.0).abs() < 1e-12);
    }

    #[test]
    fn semigroup_examples() {
        let lat = lattice(1, 16);
        let f = single_mode(&lat, [2, 0, 0]);
        let idx = lat.index_of([2, 0, 0]).unwrap();
        let g = semigroup_apply(&f, 0.5, 0.75).unwrap();
        assert!((g.coeffs()[idx].re - 0.243_116_7).abs() < 1e-7);
        assert_eq!(semigroup_apply(&f, 0.0, 0.75).unwrap().coeffs(), f.coeffs());
        assert!(matches!(semigroup_apply(&f, -1.0, 0.75), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn leray_examples() {
        let lat = lattice(2, 8);
        // pure gradient mode
        let mut g = SpectralField::zeros(&lat, 2);
        g.set_real_mode(0, [1, 2, 0], Complex64::new(1.0, 0.0)).unwrap();
        g.set_real_mode(1, [1, 2, 0], Complex64::new(2.0, 0.0)).unwrap();
        assert!(leray_project(&g).unwrap().max_abs() < 1e-15);
        // η = (1, 1), v = (1, 0) -> (1/2, -1/2)
        let mut v = SpectralField::zeros(&lat, 2);
        v.set_real_mode(0, [1, 1, 0], Complex64::new(1.0, 0.0)).unwrap();
        let p = leray_project(&v).unwrap();
        let idx = lat.index_of([1, 1, 0]).unwrap();
        assert!((p.component(0)[idx].re - 0.5).abs() < 1e-15);
        assert!((p.component(1)[idx].re + 0.5).abs() < 1e-15);
        // fixes its range
        assert!((leray_project(&p).unwrap().sub(&p).unwrap()).max_abs() < 1e-15);
        // mean rejected
        let mut mean = SpectralField::zeros(&lat, 2);
        mean.component_mut(0)[0] = Complex64::new(1.0, 0.0);
        assert!(matches!(leray_project(&mean), Err(Error::NonzeroMean { .. })));
    }

    #[test]
    fn gradient_examples() {
        let lat = lattice(1, 16);
        let mut c = SpectralField::zeros(&lat, 1);
        c.coeffs_mut()[0] = Complex64::new(3.0, 0.0);
        assert!(gradient(&c, 0).is_zero());
        let sin = forward_transform(&PhysicalField::from_fn(&lat, 1, |x, _| x[0].sin()));
        let d = inverse_transform(&gradient(&sin, 0));
        for idx in 0..lat.len() {
            let x = lat.grid_point(idx)[0];
            assert!((d.values()[idx] - x.cos()).abs() < 1e-12);
        }
        // divergence of (-∂_y ψ, ∂_x ψ) vanishes
        let lat2 = lattice(2, 16);
        let psi = forward_transform(&PhysicalField::from_fn(&lat2, 1, |x, _| {
            (x[0] + 2.0 * x[1]).sin() * (3.0 * x[1]).cos()
        }));
        let ux = gradient(&psi, 1).scaled(-1.0);
        let uy = gradient(&psi, 0);
        let div = gradient(&ux, 0).add(&gradient(&uy, 1)).unwrap();
        assert!(inverse_transform(&div).max_abs() < 1e-12);
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(1, 5), vec![vec![5]]);
    }

    #[test]
    fn nonlinearity_examples() {
        let lat = lattice(2, 16);
        assert!(nonlinearity(&SpectralField::zeros(&lat, 2)).unwrap().is_zero());
        let mut c = SpectralField::zeros(&lat, 2);
        c.component_mut(0)[0] = Complex64::new(2.0, 0.0);
        c.component_mut(1)[0] = Complex64::new(-3.0, 0.0);
        let n = nonlinearity(&c).unwrap();
        let expect = [4.0, -6.0, -6.0, 9.0];
        for (comp, &e) in expect.iter().enumerate() {
            assert!((n.component(comp)[0].re - e).abs() < 1e-12);
            assert!(n.component(comp)[1..].iter().all(|v| v.norm() < 1e-12));
        }
    }

    #[test]
    fn product_of_two_modes_populates_sum_and_difference() {
        let lat = lattice(2, 32);
        let mut u = SpectralField::zeros(&lat, 2);
        u.set_real_mode(0, [1, 2, 0], Complex64::new(1.0, 0.0)).unwrap();
        u.set_real_mode(1, [3, -1, 0], Complex64::new(0.5, 0.2)).unwrap();
        let n = nonlinearity(&u).unwrap();
        // direct convolution of the two-mode spectra
        let support: Vec<[i32; 3]> = vec![[1, 2, 0], [-1, -2, 0], [3, -1, 0], [-3, 1, 0]];
        let mut allowed = std::collections::HashSet::new();
        for a in &support {
            for b in &support {
                allowed.insert([a[0] + b[0], a[1] + b[1], 0]);
            }
        }
        for comp in 0..4 {
            for idx in 0..lat.len() {
                if n.component(comp)[idx].norm() > 1e-12 {
                    assert!(allowed.contains(&lat.integer(idx)), "unexpected mode {:?}", lat.integer(idx));
                }
            }
        }
        let k = lat.index_of([4, 1, 0]).unwrap();
        // u_x u_y at k+l: (1/2)(0.5+0.2i)/... product of the two positive halves
        let expect = Complex64::new(1.0, 0.0) * Complex64::new(0.5, 0.2);
        assert!((n.component(1)[k] - expect).norm() < 1e-12);
    }

    #[test]
    fn time_grids() {
        let g = TimeGrid::geometric(0.1, 2.0, 4).unwrap();
        assert_eq!(g.points(), &[0.1, 0.2, 0.4, 0.8]);
        let s = g.with_submesh(2, 2.0).unwrap();
        assert!((s.first() - 0.025).abs() < 1e-15);
        assert_eq!(s.len(), 6);
        let r = g.refined();
        assert_eq!(r.len(), 7);
        assert!((r.points()[1] - (0.02f64).sqrt()).abs() < 1e-15);
        assert!(TimeGrid::from_points(vec![1.0, 1.0]).is_err());
        let sp = TimeGrid::spanning(1e-2, 1.0, 4).unwrap();
        assert!(sp.last() >= 1.0 - 1e-12);
    }

    #[test]
    fn duhamel_constant_single_mode() {
        let lat = lattice(1, 16);
        let f = single_mode(&lat, [2, 0, 0]);
        let idx = lat.index_of([2, 0, 0]).unwrap();
        let forcing = FnForcing(|_s: f64| f.clone());
        let v = duhamel_apply(&forcing, 1.0, 0.75, &QuadratureSpec::default()).unwrap();
        let lam = 2f64.powf(1.5);
        let exact = (1.0 - (-lam).exp()) / lam;
        assert!((v.coeffs()[idx].re - exact).abs() < 1e-12);
        assert!((v.coeffs()[idx].re - 0.332_656_4).abs() < 1e-7);
        let zero = FnForcing(|_s: f64| SpectralField::zeros(&lat, 1));
        assert!(duhamel_apply(&zero, 1.0, 0.75, &QuadratureSpec::default()).unwrap().is_zero());
    }

    #[test]
    fn duhamel_rejects_uncovered_time() {
        let lat = lattice(1, 16);
        let grid = TimeGrid::geometric(0.1, 2.0, 3).unwrap();
        let traj = TrajectoryField::semigroup_flow(&single_mode(&lat, [1, 0, 0]), &grid, 0.75).unwrap();
        assert!(matches!(
            duhamel_apply(&traj, 1.0, 0.75, &QuadratureSpec::default()),
            Err(Error::TimeNotCovered { .. })
        ));
    }

    #[test]
    fn trajectory_recursion_matches_direct_quadrature() {
        let lat = lattice(2, 16);
        let mut u0 = SpectralField::zeros(&lat, 2);
        u0.set_real_mode(0, [0, 1, 0], Complex64::new(1.0, 0.0)).unwrap();
        u0.set_real_mode(1, [3, 0, 0], Complex64::new(0.0, 0.7)).unwrap();
        let grid = TimeGrid::spanning(1e-3, 2.0, 8).unwrap();
        let traj = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap();
        let quad = QuadratureSpec::default();
        let all = duhamel_trajectory(&traj, 0.75, &quad).unwrap();
        for &m in &[0usize, 10, grid.len() - 1] {
            let direct = duhamel_apply(&traj, grid.points()[m], 0.75, &quad.refined(4)).unwrap();
            let err = direct.sub(&all[m]).unwrap().max_abs();
            assert!(err < 1e-10 * direct.max_abs().max(1e-300), "m = {m}: {err:e}");
        }
    }
}
