//! Small-data solutions of the mild equation `u = S(t)u0 + B(u, u)` by
//! Picard iteration, an exponential time stepper used as an independent
//! oracle, and the studies run on the resulting trajectories.

mod data;
mod studies;

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::norms::{gx_norm, gxk_norm, sup_magnitude};
use crate::operators::{
    bilinear_b_trajectory, bilinear_forcing, dissipation_symbol, project_in_place, QuadratureSpec, TimeGrid,
    TrajectoryField,
};
use crate::params::{validate_alpha, AlphaRange};
use crate::spectral::{inverse_transform, SpectralField};

pub use data::{power_law_shear, seeded_pairs, taylor_green, with_static_contamination, TG_PERTURBATION};
pub use studies::{
    analyticity_study, check_bilinear_boundedness, decay_study, persistence_check, smoothing_constants,
    AnalyticityStudyResult, BilinearPair, BilinearReport, DecayOptions, DecayStudyResult, PersistenceReport,
    SlopeFit, SnapshotNorms, WeightedBound, MAX_ANALYTICITY_ORDER,
};

/// Relative divergence tolerated in initial data.
const DIVERGENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOptions {
    /// Stop once `‖v^{j+1} - v^j‖_{GX}` is at most this.
    pub tol: f64,
    pub max_iter: usize,
    pub quad: QuadratureSpec,
    /// Highest `GX^k` order recorded in the trace.
    pub trace_order: usize,
    /// `false` drops the bilinear term, leaving the linear flow.
    pub nonlinear: bool,
    /// Data with `‖S(t)u0‖_{GX}` above this are flagged as outside the
    /// proven regime (the solve still runs).
    pub smallness: Option<f64>,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 40,
            quad: QuadratureSpec::default(),
            trace_order: 0,
            nonlinear: true,
            smallness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardTrace {
    /// `iterates[j][k] = ‖v^j‖_{GX^k}`.
    pub iterates: Vec<Vec<f64>>,
    /// `diffs[j][k] = ‖v^{j+1} - v^j‖_{GX^k}`.
    pub diffs: Vec<Vec<f64>>,
    /// Successive quotients of the `GX` differences.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub j_final: usize,
    /// `‖u - S(t)u0 - B(u, u)‖_{GX}` for the returned trajectory.
    pub residual: f64,
    pub tol: f64,
    /// `‖S(t)u0‖_{GX}`.
    pub data_size: f64,
    pub outside_proven_regime: bool,
}

impl PicardTrace {
    /// `exp` of the least-squares slope of `log diff_j` against `j`, over the
    /// positive differences; `None` with fewer than two of them.
    pub fn geometric_ratio(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .diffs
            .iter()
            .enumerate()
            .filter(|(_, d)| d[0] > 0.0)
            .map(|(j, d)| (j as f64, d[0].ln()))
            .collect();
        fit_slope(&pts).map(f64::exp)
    }

    /// True iff the ratios end in a nonempty run of values at most `bound`.
    pub fn eventually_contracting(&self, bound: f64) -> bool {
        self.contraction_ratios.last().is_some_and(|&r| r <= bound)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let orders = self.iterates.first().map_or(1, Vec::len);
        let mut header = String::from("j");
        for k in 0..orders {
            header += &format!(",norm_k{k}");
        }
        for k in 0..orders {
            header += &format!(",diff_k{k}");
        }
        writeln!(w, "{header},contraction")?;
        for (j, norms) in self.iterates.iter().enumerate() {
            let mut line = j.to_string();
            for v in norms {
                line += &format!(",{v:.14e}");
            }
            for k in 0..orders {
                match self.diffs.get(j) {
                    Some(d) => line += &format!(",{:.14e}", d[k]),
                    None => line += ",",
                }
            }
            match j.checked_sub(1).and_then(|i| self.contraction_ratios.get(i)) {
                Some(r) => line += &format!(",{r:.14e}"),
                None => line += ",",
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let last = self.diffs.last().map_or(0.0, |d| d[0]);
        let mut s = format!(
            "picard: {} after {} iterations, last GX difference {last:.3e}, residual {:.3e}, data size {:.3e}",
            if self.converged { "converged" } else { "NOT converged" },
            self.j_final,
            self.residual,
            self.data_size,
        );
        if let Some(r) = self.geometric_ratio() {
            s += &format!(", geometric ratio {r:.3}");
        }
        if self.outside_proven_regime {
            s += " (outside proven regime)";
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn check_initial(u0: &SpectralField, alpha: f64) -> Result<()> {
    validate_alpha(alpha, AlphaRange::Dynamics)?;
    let dim = u0.lattice().dim();
    if u0.rank() != dim {
        return Err(Error::ShapeMismatch {
            expected: format!("a vector field with {dim} components"),
            actual: format!("{} components", u0.rank()),
        });
    }
    let scale = u0.max_abs().max(f64::MIN_POSITIVE);
    let mean = u0.mean_magnitude();
    if mean > 1e-12 * scale {
        return Err(Error::NonzeroMean { magnitude: mean });
    }
    if u0.divergence_residue() > DIVERGENCE_TOLERANCE * scale {
        return Err(Error::Precondition(format!(
            "initial velocity is not divergence-free (residue {:.3e})",
            u0.divergence_residue()
        )));
    }
    Ok(())
}

fn trace_norms(v: &TrajectoryField, alpha: f64, order: usize) -> Result<Vec<f64>> {
    (0..=order)
        .map(|k| if k == 0 { Ok(gx_norm(v, alpha)) } else { gxk_norm(v, k, alpha) })
        .collect()
}

/// `v0 + B(v, v)`.
fn picard_map(v0: &TrajectoryField, v: &TrajectoryField, alpha: f64, opts: &PicardOptions) -> Result<TrajectoryField> {
    if !opts.nonlinear {
        return Ok(v0.clone());
    }
    v0.add(&bilinear_b_trajectory(v, v, alpha, &opts.quad)?)
}

/// Iterates `v^{j+1} = S(t)u0 + B(v^j, v^j)` from `v^0 = S(t)u0`.
///
/// Running out of iterations is not an error: the trace then has
/// `converged == false` and the last iterate is returned.
pub fn picard_solve(
    u0: &SpectralField,
    alpha: f64,
    grid: &TimeGrid,
    opts: &PicardOptions,
) -> Result<(TrajectoryField, PicardTrace)> {
    picard_solve_from(u0, alpha, grid, opts, None)
}

/// As [`picard_solve`], starting the iteration at `start` instead of the
/// linear flow.
pub fn picard_solve_from(
    u0: &SpectralField,
    alpha: f64,
    grid: &TimeGrid,
    opts: &PicardOptions,
    start: Option<&TrajectoryField>,
) -> Result<(TrajectoryField, PicardTrace)> {
    check_initial(u0, alpha)?;
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(crate::error::invalid("picard", "tol must be positive and max_iter at least 1"));
    }
    let v0 = TrajectoryField::semigroup_flow(u0, grid, alpha)?;
    let data_size = gx_norm(&v0, alpha);
    let mut v = match start {
        Some(s) if s.grid() != grid => return Err(Error::GridMismatch),
        Some(s) => s.clone(),
        None => v0.clone(),
    };
    let mut iterates = vec![trace_norms(&v, alpha, opts.trace_order)?];
    let mut diffs: Vec<Vec<f64>> = Vec::new();
    let mut converged = false;
    let mut j_final = 0;
    for j in 0..opts.max_iter {
        let next = picard_map(&v0, &v, alpha, opts)?;
        let d = trace_norms(&next.sub(&v)?, alpha, opts.trace_order)?;
        let diverged = !d[0].is_finite();
        v = next;
        iterates.push(trace_norms(&v, alpha, opts.trace_order)?);
        let done = d[0] <= opts.tol;
        diffs.push(d);
        j_final = j + 1;
        if diverged {
            break;
        }
        if done {
            converged = true;
            break;
        }
    }
    let contraction_ratios = diffs
        .windows(2)
        .filter(|w| w[0][0] > 0.0)
        .map(|w| w[1][0] / w[0][0])
        .collect();
    let residual = gx_norm(&v.sub(&picard_map(&v0, &v, alpha, opts)?)?, alpha);
    let trace = PicardTrace {
        iterates,
        diffs,
        contraction_ratios,
        converged,
        j_final,
        residual,
        tol: opts.tol,
        data_size,
        outside_proven_regime: opts.smallness.is_some_and(|eps| data_size > eps),
    };
    Ok((v, trace))
}

/// `(φ1(z), φ2(z))` with `φ1 = (e^z - 1)/z` and `φ2 = (e^z - 1 - z)/z²`.
fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 1e-2 {
        let (mut p1, mut p2, mut term) = (0.0, 0.0, 1.0);
        for j in 0..8 {
            // term = z^j / (j+1)!
            term /= (j + 1) as f64;
            p1 += term;
            p2 += term / (j + 2) as f64;
            term *= z;
        }
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

fn scale_modes(g: &SpectralField, w: &[f64]) -> SpectralField {
    let mut out = g.clone();
    let len = w.len();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= w[i % len];
    }
    out
}

fn add_scaled_modes(acc: &mut SpectralField, g: &SpectralField, w: &[f64]) {
    let len = w.len();
    for (i, (a, b)) in acc.coeffs_mut().iter_mut().zip(g.coeffs()).enumerate() {
        *a += b * w[i % len];
    }
}

/// Second-order exponential Runge–Kutta (ETD2RK) for
/// `∂_t u = -(-Δ)^α u - Π∇·(u ⊗ u)`, reporting the state at every grid
/// time. Steps are uniform between consecutive output times and at most
/// `dt_max` long. The linear part is propagated exactly per mode.
pub fn timestep_solve(
    u0: &SpectralField,
    alpha: f64,
    grid: &TimeGrid,
    dt_max: f64,
    nonlinear: bool,
) -> Result<TrajectoryField> {
    check_initial(u0, alpha)?;
    if !(dt_max > 0.0 && dt_max.is_finite()) {
        return Err(crate::error::invalid("dt", format!("{dt_max} must be positive")));
    }
    let lattice = u0.lattice().clone();
    let symbol = dissipation_symbol(&lattice, alpha);
    let forcing = |g: &SpectralField| -> Result<SpectralField> {
        if nonlinear {
            bilinear_forcing(g, g)
        } else {
            Ok(SpectralField::zeros(&lattice, g.rank()))
        }
    };
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut states = Vec::with_capacity(grid.len());
    for &target in grid.points() {
        let steps = (((target - t) / dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = (target - t) / steps as f64;
        let mut decay = Vec::with_capacity(symbol.len());
        let mut w1 = Vec::with_capacity(symbol.len());
        let mut w2 = Vec::with_capacity(symbol.len());
        for &lam in &symbol {
            let z = -lam * h;
            let (p1, p2) = phi_functions(z);
            decay.push(z.exp());
            w1.push(h * p1);
            w2.push(h * p2);
        }
        for _ in 0..steps {
            let before = u.l2_coeff_norm();
            let n0 = forcing(&u)?;
            let mut a = scale_modes(&u, &decay);
            add_scaled_modes(&mut a, &n0, &w1);
            project_in_place(&mut a);
            let diff = forcing(&a)?.sub(&n0)?;
            add_scaled_modes(&mut a, &diff, &w2);
            project_in_place(&mut a);
            let after = a.l2_coeff_norm();
            t += h;
            if !after.is_finite() || (before > 0.0 && after > 10.0 * before) {
                return Err(Error::Blowup { t, before, after });
            }
            u = a;
        }
        t = target;
        states.push(u.clone());
    }
    TrajectoryField::new(grid.clone(), states, Some(u0.clone()))
}

/// Relative L² distance `‖a - b‖ / ‖b‖` of two states.
pub fn relative_l2(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let d = a.sub(b)?.l2_coeff_norm();
    let scale = b.l2_coeff_norm();
    Ok(if scale == 0.0 { d } else { d / scale })
}

/// One row per (time, component): `t,component,v_0,...,v_{N-1}` with the
/// physical grid values in lattice order.
pub fn write_trajectory_csv(mut w: impl Write, u: &TrajectoryField) -> io::Result<()> {
    let len = u.lattice().len();
    let mut header = String::from("t,component");
    for i in 0..len {
        header += &format!(",x{i}");
    }
    writeln!(w, "{header}")?;
    for (&t, s) in u.times().iter().zip(u.states()) {
        let phys = inverse_transform(s);
        for c in 0..s.rank() {
            let mut line = format!("{t:.14e},{c}");
            for v in phys.component(c) {
                line += &format!(",{v:.14e}");
            }
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

/// Sup norm of each state, a convenience for summaries.
pub fn sup_profile(u: &TrajectoryField) -> Vec<f64> {
    u.states().iter().map(sup_magnitude).collect()
}

#[cfg(test)]
mod tests;
