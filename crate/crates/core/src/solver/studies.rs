//! Bilinear constants, decay, persistence and analyticity studies.

use std::io::{self, Write};

use rayon::prelude::*;

use super::fit_slope;
use crate::error::{invalid, Error, Result};
use crate::norms::{
    besov_index, besov_norm, derivative_profile, gx_norm, gxk_exponent, gxk_norm, gy_norm, max_resolved_order,
    CriticalNorms, LittlewoodPaley, NormSampling,
};
use crate::operators::{bilinear_b_trajectory, dissipation_symbol, outer_product, QuadratureSpec, TimeGrid, TrajectoryField};
use crate::report::{write_samples, SampleRow, Verdict};
use crate::spectral::SpectralField;

/// Bilinear ratios of one pair of initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearPair {
    /// `‖u ⊗ v‖_{GY} / (‖u‖_{GX} ‖v‖_{GX})` with `u, v` the linear flows.
    pub product_ratio: f64,
    /// `‖V∇Π(u ⊗ v)‖_{GX} / ‖u ⊗ v‖_{GY}`.
    pub duhamel_ratio: f64,
    pub refined_product_ratio: f64,
    pub refined_duhamel_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearReport {
    pub alpha: f64,
    pub pairs: Vec<BilinearPair>,
    pub product_sup: f64,
    pub duhamel_sup: f64,
    pub refined_product_sup: f64,
    pub refined_duhamel_sup: f64,
    /// Largest relative change of the two sups under refinement.
    pub drift: f64,
    pub drift_tolerance: f64,
    /// `Ĉ = product_sup · duhamel_sup`.
    pub constant: f64,
    /// `1 / (4Ĉ² + 1)`.
    pub smallness: f64,
    pub pass: bool,
}

impl BilinearReport {
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "pair,alpha,product_ratio,duhamel_ratio,refined_product_ratio,refined_duhamel_ratio")?;
        for (i, p) in self.pairs.iter().enumerate() {
            writeln!(
                w,
                "{i},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                self.alpha, p.product_ratio, p.duhamel_ratio, p.refined_product_ratio, p.refined_duhamel_ratio
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "bilinear: product sup {:.4e} (refined {:.4e}), duhamel sup {:.4e} (refined {:.4e}), drift {:.2}%, C = {:.4e}, smallness {:.4e}: {}",
            self.product_sup,
            self.refined_product_sup,
            self.duhamel_sup,
            self.refined_duhamel_sup,
            100.0 * self.drift,
            self.constant,
            self.smallness,
            Verdict::from_pass(self.pass)
        )
    }
}

fn product_trajectory(u: &TrajectoryField, v: &TrajectoryField) -> Result<TrajectoryField> {
    let states = u
        .states()
        .par_iter()
        .zip(v.states().par_iter())
        .map(|(a, b)| outer_product(a, b))
        .collect::<Result<Vec<_>>>()?;
    TrajectoryField::new(u.grid().clone(), states, None)
}

fn pair_ratios(u0: &SpectralField, v0: &SpectralField, alpha: f64, grid: &TimeGrid, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let u = TrajectoryField::semigroup_flow(u0, grid, alpha)?;
    let v = TrajectoryField::semigroup_flow(v0, grid, alpha)?;
    let product = gy_norm(&product_trajectory(&u, &v)?, alpha);
    let duhamel = gx_norm(&bilinear_b_trajectory(&u, &v, alpha, quad)?, alpha);
    Ok((product / (gx_norm(&u, alpha) * gx_norm(&v, alpha)), duhamel / product))
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Sup over the pairs of the two bilinear ratios, recomputed on the refined
/// time grid with doubled quadrature; passes iff every ratio is finite and
/// both sups move by less than `drift_tolerance`.
pub fn check_bilinear_boundedness(
    pairs: &[(SpectralField, SpectralField)],
    alpha: f64,
    grid: &TimeGrid,
    quad: &QuadratureSpec,
    drift_tolerance: f64,
) -> Result<BilinearReport> {
    if pairs.is_empty() {
        return Err(invalid("pairs", "at least one pair of fields is required"));
    }
    if let Some(i) = pairs.iter().position(|(u, v)| u.is_zero() || v.is_zero()) {
        return Err(invalid("pairs", format!("pair {i} contains a zero field")));
    }
    let fine_grid = grid.refined();
    let fine_quad = quad.refined(2);
    let mut rows = Vec::with_capacity(pairs.len());
    for (u0, v0) in pairs {
        let (p, d) = pair_ratios(u0, v0, alpha, grid, quad)?;
        let (rp, rd) = pair_ratios(u0, v0, alpha, &fine_grid, &fine_quad)?;
        rows.push(BilinearPair {
            product_ratio: p,
            duhamel_ratio: d,
            refined_product_ratio: rp,
            refined_duhamel_ratio: rd,
        });
    }
    let sup = |f: fn(&BilinearPair) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let product_sup = sup(|p| p.product_ratio);
    let duhamel_sup = sup(|p| p.duhamel_ratio);
    let refined_product_sup = sup(|p| p.refined_product_ratio);
    let refined_duhamel_sup = sup(|p| p.refined_duhamel_ratio);
    let finite = rows.iter().all(|p| {
        [p.product_ratio, p.duhamel_ratio, p.refined_product_ratio, p.refined_duhamel_ratio]
            .iter()
            .all(|v| v.is_finite())
    });
    let drift = relative_change(product_sup, refined_product_sup).max(relative_change(duhamel_sup, refined_duhamel_sup));
    let constant = product_sup * duhamel_sup;
    Ok(BilinearReport {
        alpha,
        pairs: rows,
        product_sup,
        duhamel_sup,
        refined_product_sup,
        refined_duhamel_sup,
        drift,
        drift_tolerance,
        constant,
        smallness: 1.0 / (4.0 * constant * constant + 1.0),
        pass: finite && drift < drift_tolerance,
    })
}

/// Fit window and acceptance thresholds of [`decay_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    /// The window starts at `lo_factor / λ_max`.
    pub lo_factor: f64,
    /// The window ends at `hi_factor / λ_min`.
    pub hi_factor: f64,
    /// Largest accepted relative deviation of a fitted slope.
    pub tolerance: f64,
    /// Slopes are fitted for `k ≤ fit_order`.
    pub fit_order: usize,
    pub min_samples: usize,
    pub min_decades: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            lo_factor: 1.25,
            hi_factor: 0.15,
            tolerance: 0.05,
            fit_order: 2,
            min_samples: 8,
            min_decades: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedBound {
    pub k: usize,
    /// `max_t t^{(1-1/2α)+k/2α} ‖∇^k u(t)‖_∞` over the whole run.
    pub max: f64,
    pub argmax_t: f64,
    /// Every weighted sample is finite.
    pub finite: bool,
    /// Finite and attained strictly inside the run.
    pub bounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub k: usize,
    pub slope: f64,
    pub predicted: f64,
    pub deviation: f64,
    /// `deviation / |predicted|`.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayStudyResult {
    pub alpha: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub decades: f64,
    pub bounds: Vec<WeightedBound>,
    /// Empty when the window is too short.
    pub fits: Vec<SlopeFit>,
    pub verdict: Verdict,
    /// `value = ‖∇^k u(t)‖_∞`, `bound_value = t^{-γ_k}`, `ratio` the weighted value.
    pub rows: Vec<SampleRow>,
}

impl DecayStudyResult {
    pub fn write_csv(&self, w: impl Write) -> io::Result<()> {
        write_samples(w, &self.rows)
    }

    pub fn write_fits_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "alpha,k,slope,predicted,deviation,relative")?;
        for f in &self.fits {
            writeln!(
                w,
                "{:.14e},{},{:.14e},{:.14e},{:.14e},{:.14e}",
                self.alpha, f.k, f.slope, f.predicted, f.deviation, f.relative
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "decay alpha={}: window [{:.3e}, {:.3e}] ({} samples, {:.2} decades): {}",
            self.alpha, self.window.0, self.window.1, self.samples, self.decades, self.verdict
        );
        for b in &self.bounds {
            s += &format!("\n  k={} weighted max {:.4e} at t={:.3e}{}", b.k, b.max, b.argmax_t, if b.bounded { "" } else { " (UNBOUNDED)" });
        }
        for f in &self.fits {
            s += &format!(
                "\n  k={} slope {:.4} vs {:.4} ({:.2}%)",
                f.k,
                f.slope,
                f.predicted,
                100.0 * f.relative
            );
        }
        s
    }
}

/// Active-mode symbol range `(λ_min, λ_max)` of a state.
fn symbol_range(g: &SpectralField, alpha: f64) -> Option<(f64, f64)> {
    let symbol = dissipation_symbol(g.lattice(), alpha);
    let len = symbol.len();
    let floor = 1e-12 * g.max_abs();
    let mut range: Option<(f64, f64)> = None;
    for (i, v) in g.coeffs().iter().enumerate() {
        let lam = symbol[i % len];
        if lam > 0.0 && v.norm() > floor {
            range = Some(match range {
                None => (lam, lam),
                Some((a, b)) => (a.min(lam), b.max(lam)),
            });
        }
    }
    range
}

/// Weighted derivative norms of a trajectory and power-law fits of
/// `‖∇^k u(t)‖_∞` over the intermediate window
/// `[lo_factor/λ_max, hi_factor/λ_min]` of the initial spectrum.
///
/// FAIL if some weighted norm is non-finite; otherwise INCONCLUSIVE if the
/// window holds too few samples or decades; otherwise FAIL if some weighted
/// norm peaks at an end of the run, and PASS iff every slope is within the relative tolerance of
/// `-(1 - 1/2α) - k/2α`.
pub fn decay_study(u: &TrajectoryField, alpha: f64, k_max: usize, opts: &DecayOptions) -> Result<DecayStudyResult> {
    let reference = u.initial().unwrap_or(&u.states()[0]);
    let (lam_min, lam_max) =
        symbol_range(reference, alpha).ok_or_else(|| invalid("trajectory", "the initial state has no active mode"))?;
    let window = (opts.lo_factor / lam_max, opts.hi_factor / lam_min);
    let times = u.times();
    let n = u.lattice().dim();
    let inside: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= window.0 && times[i] <= window.1).collect();
    let decades = match (inside.first(), inside.last()) {
        (Some(&a), Some(&b)) => (times[b] / times[a]).log10(),
        _ => 0.0,
    };
    let enough = inside.len() >= opts.min_samples && decades >= opts.min_decades;

    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    let mut fits = Vec::new();
    for k in 0..=k_max {
        let profile = derivative_profile(u, k)?;
        let gamma = gxk_exponent(alpha, k);
        let (mut max, mut arg) = (0.0, 0);
        let mut finite = true;
        for (i, (&t, &v)) in times.iter().zip(&profile).enumerate() {
            let weighted = t.powf(gamma) * v;
            finite &= weighted.is_finite();
            if weighted > max {
                max = weighted;
                arg = i;
            }
            rows.push(SampleRow {
                alpha,
                n,
                t,
                r: 0.0,
                k,
                value: v,
                bound_value: t.powf(-gamma),
                ratio: weighted,
            });
        }
        bounds.push(WeightedBound {
            k,
            max,
            argmax_t: times[arg],
            finite,
            bounded: finite && arg > 0 && arg + 1 < times.len(),
        });
        if enough && k <= opts.fit_order {
            let pts: Vec<(f64, f64)> = inside.iter().map(|&i| (times[i].ln(), profile[i].ln())).collect();
            let slope = fit_slope(&pts).unwrap_or(f64::NAN);
            let predicted = -gamma;
            let deviation = (slope - predicted).abs();
            fits.push(SlopeFit {
                k,
                slope,
                predicted,
                deviation,
                relative: deviation / predicted.abs(),
            });
        }
    }
    let verdict = if !bounds.iter().all(|b| b.finite) {
        Verdict::Fail
    } else if !enough {
        Verdict::Inconclusive
    } else if !bounds.iter().all(|b| b.bounded) {
        Verdict::Fail
    } else {
        Verdict::from_pass(fits.iter().all(|f| f.relative <= opts.tolerance))
    };
    Ok(DecayStudyResult {
        alpha,
        window,
        samples: inside.len(),
        decades,
        bounds,
        fits,
        verdict,
        rows,
    })
}

/// Critical norms of one snapshot `u(t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotNorms {
    pub t0: f64,
    pub norms: CriticalNorms,
    /// Each norm divided by `‖u‖_{GX} + ‖u‖_{GX}²` (zero when both vanish).
    pub ratios: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceReport {
    pub alpha: f64,
    pub gx: f64,
    /// `‖u‖_{GX} + ‖u‖_{GX}²`.
    pub scale: f64,
    pub snapshots: Vec<SnapshotNorms>,
    pub max_ratio: f64,
    pub pass: bool,
}

impl PersistenceReport {
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "t0,alpha,besov,carleson,gx,ratio_besov,ratio_carleson,ratio_gx")?;
        for s in &self.snapshots {
            writeln!(
                w,
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                s.t0, self.alpha, s.norms.besov, s.norms.carleson, s.norms.gx, s.ratios[0], s.ratios[1], s.ratios[2]
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "persistence: |u|_GX = {:.4e}, max snapshot ratio {:.4e}: {}",
            self.gx,
            self.max_ratio,
            Verdict::from_pass(self.pass)
        );
        for snap in &self.snapshots {
            s += &format!(
                "\n  t0={}: besov {:.4e}, carleson {:.4e}, gx {:.4e}",
                snap.t0, snap.norms.besov, snap.norms.carleson, snap.norms.gx
            );
        }
        s
    }
}

/// Besov, Carleson and semigroup-GX norms of `u(t0)` for each `t0`,
/// relative to `‖u‖_{GX} + ‖u‖_{GX}²`; passes iff all are finite.
pub fn persistence_check(u: &TrajectoryField, t0_list: &[f64], alpha: f64, sampling: &NormSampling) -> Result<PersistenceReport> {
    if t0_list.is_empty() {
        return Err(invalid("t0", "at least one snapshot time is required"));
    }
    let gx = gx_norm(u, alpha);
    let scale = gx + gx * gx;
    let mut snapshots = Vec::with_capacity(t0_list.len());
    for &t0 in t0_list {
        if !(t0 > 0.0) {
            return Err(invalid("t0", format!("{t0} must be positive")));
        }
        let snap = u.sample(t0)?;
        let norms = if snap.is_zero() {
            CriticalNorms {
                besov: 0.0,
                carleson: 0.0,
                gx: 0.0,
            }
        } else {
            CriticalNorms::compute(&snap, alpha, sampling)?
        };
        let ratio = |v: f64| if v == 0.0 { 0.0 } else { v / scale };
        snapshots.push(SnapshotNorms {
            t0,
            norms,
            ratios: [ratio(norms.besov), ratio(norms.carleson), ratio(norms.gx)],
        });
    }
    let max_ratio = snapshots.iter().flat_map(|s| s.ratios).fold(0.0, f64::max);
    let pass = snapshots
        .iter()
        .all(|s| s.ratios.iter().chain([&s.norms.besov, &s.norms.carleson, &s.norms.gx]).all(|v| v.is_finite()));
    Ok(PersistenceReport {
        alpha,
        gx,
        scale,
        snapshots,
        max_ratio,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticityStudyResult {
    pub alpha: f64,
    /// `a[k] = ‖u‖_{GX^k}`, `k = 0..=k_max`.
    pub a: Vec<f64>,
    /// `b[k-1] = (a_k / a_0)^{1/k} / k`, `k = 1..=k_max`.
    pub b: Vec<f64>,
    pub max_b: f64,
    pub slack: f64,
    pub verdict: Verdict,
}

impl AnalyticityStudyResult {
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "alpha,k,a_k,b_k")?;
        for (k, a) in self.a.iter().enumerate() {
            let b = if k == 0 { String::new() } else { format!("{:.14e}", self.b[k - 1]) };
            writeln!(w, "{:.14e},{k},{a:.14e},{b}", self.alpha)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let b: Vec<String> = self.b.iter().map(|v| format!("{v:.3}")).collect();
        format!("analyticity: b_k = [{}], max {:.4}: {}", b.join(", "), self.max_b, self.verdict)
    }
}

/// Largest order accepted by [`analyticity_study`].
pub const MAX_ANALYTICITY_ORDER: usize = 8;

/// `b_k = (‖u‖_{GX^k}/‖u‖_{GX})^{1/k}/k` for `k ≤ k_max`; passes iff all are
/// finite and `b_{k+1} ≤ (1 + slack) b_k` for every `k ≥ 3`.
pub fn analyticity_study(u: &TrajectoryField, alpha: f64, k_max: usize, slack: f64) -> Result<AnalyticityStudyResult> {
    if k_max == 0 || k_max > MAX_ANALYTICITY_ORDER {
        return Err(invalid("k_max", format!("{k_max} must lie in 1..={MAX_ANALYTICITY_ORDER}")));
    }
    if k_max > max_resolved_order(u.lattice()) {
        return Err(Error::UnresolvedDerivative { k: k_max });
    }
    let a = (0..=k_max)
        .map(|k| gxk_norm(u, k, alpha))
        .collect::<Result<Vec<f64>>>()?;
    if a[0] == 0.0 {
        return Err(invalid("trajectory", "the trajectory vanishes; b_k is undefined"));
    }
    let b: Vec<f64> = (1..=k_max).map(|k| (a[k] / a[0]).powf(1.0 / k as f64) / k as f64).collect();
    let max_b = b.iter().copied().fold(0.0, f64::max);
    let finite = b.iter().chain(&a).all(|v| v.is_finite());
    // b[k-1] holds b_k; compare b_{k+1} with b_k from k = 3 on
    let monotone = (3..k_max).all(|k| b[k] <= (1.0 + slack) * b[k - 1]);
    Ok(AnalyticityStudyResult {
        alpha,
        a,
        b,
        max_b,
        slack,
        verdict: Verdict::from_pass(finite && monotone),
    })
}

/// `max over the family of ‖S(t)u0‖_{GX^k} / ‖u0‖_B` for `k = 0..=k_max`,
/// with the Besov norm of index `1 - 2α`.
pub fn smoothing_constants(family: &[SpectralField], alpha: f64, k_max: usize, grid: &TimeGrid) -> Result<Vec<f64>> {
    if family.is_empty() {
        return Err(invalid("family", "at least one field is required"));
    }
    let mut out = vec![0.0f64; k_max + 1];
    for u0 in family {
        let lp = LittlewoodPaley::for_lattice(u0.lattice());
        let b = besov_norm(u0, besov_index(alpha), &lp)?;
        let flow = TrajectoryField::semigroup_flow(u0, grid, alpha)?;
        for (k, slot) in out.iter_mut().enumerate() {
            let g = if k == 0 { gx_norm(&flow, alpha) } else { gxk_norm(&flow, k, alpha)? };
            *slot = slot.max(g / b);
        }
    }
    Ok(out)
}
