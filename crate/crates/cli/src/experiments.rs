//! Dispatch from a validated configuration to the studies in `fns_core`.

use std::f64::consts::PI;
use std::io::{self, Write as _};
use std::sync::Arc;
use std::time::Instant;

use fns_core::kernel_lab::{
    check_bound, check_combinatorial_lemma, eval_phi, eval_pi_phi, k_growth, radial_grid,
    verify_convolution_inequality, Bound, BoundKind, KernelQuadrature, KernelTable,
};
use fns_core::norms::{certify_equivalence, dilated, CriticalNorms, NormSampling, RATIO_NAMES};
use fns_core::random::{band_limited, solenoidal, FieldRng};
use fns_core::report::write_samples;
use fns_core::solver::{
    analyticity_study, check_bilinear_boundedness, decay_study, persistence_check, picard_solve, power_law_shear,
    relative_l2, seeded_pairs, taylor_green, timestep_solve, with_static_contamination, write_trajectory_csv,
    DecayOptions,
};
use fns_core::{
    build_lattice, Error, Parameters, PicardOptions, PicardTrace, QuadratureSpec, Result, SampleRow, SpectralField, TimeGrid,
    TrajectoryField, Verdict, WavenumberLattice,
};

use crate::config::{ExperimentConfig, ExperimentKind};

/// One file produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// One verdict-bearing check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

/// Everything a study produced, before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
    /// Wall-clock seconds per stage.
    pub stages: Vec<(String, f64)>,
}

impl Outcome {
    fn csv(&mut self, name: impl Into<String>, write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) {
        let mut bytes = Vec::new();
        write(&mut bytes).expect("writing to memory cannot fail");
        self.artifacts.push(Artifact { name: name.into(), bytes });
    }

    fn check(&mut self, name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            verdict,
            detail: detail.into(),
        });
    }

    fn timed<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        self.stages.push((stage.into(), start.elapsed().as_secs_f64()));
        out
    }
}

/// Runs the configured study. Errors abort the whole run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    match cfg.kind {
        ExperimentKind::Solve => solve(cfg, &mut out)?,
        ExperimentKind::KernelCheck => kernel_check(cfg, &mut out)?,
        ExperimentKind::NormEquiv => norm_equiv(cfg, &mut out)?,
        ExperimentKind::BilinearCheck => bilinear(cfg, &mut out)?,
        ExperimentKind::DecayStudy => decay(cfg, &mut out)?,
        ExperimentKind::PersistenceCheck => persistence(cfg, &mut out)?,
        ExperimentKind::AnalyticityStudy => analyticity(cfg, &mut out)?,
        ExperimentKind::CombinatorialCheck => combinatorial(cfg, &mut out)?,
    }
    Ok(out)
}

fn params(cfg: &ExperimentConfig) -> &Parameters {
    cfg.parameters.as_ref().expect("validated config carries parameters for this kind")
}

fn kappa(lattice: &WavenumberLattice) -> f64 {
    2.0 * PI / lattice.period()
}

/// The configured grid with `extra` times merged in.
fn time_grid(cfg: &ExperimentConfig, extra: &[f64]) -> Result<TimeGrid> {
    let listed = cfg.list("time_grid", "points");
    let base = if listed.is_empty() {
        TimeGrid::spanning(
            cfg.real("time_grid", "t_min"),
            cfg.real("time_grid", "t_max"),
            cfg.int("time_grid", "per_octave"),
        )?
    } else {
        TimeGrid::from_points(listed.to_vec())?
    };
    let last = base.last();
    let mut points = base.points().to_vec();
    for &t in extra {
        if t > 0.0 && t <= last && points.iter().all(|p| (p / t - 1.0).abs() > 1e-12) {
            points.push(t);
        }
    }
    if points.len() == base.len() {
        return Ok(base);
    }
    points.sort_by(f64::total_cmp);
    TimeGrid::from_points(points)
}

fn quadrature(cfg: &ExperimentConfig) -> QuadratureSpec {
    QuadratureSpec {
        panels: cfg.int("quadrature", "panels"),
        nodes: cfg.int("quadrature", "nodes"),
        grading: cfg.real("quadrature", "grading"),
    }
}

fn picard_options(cfg: &ExperimentConfig) -> PicardOptions {
    let smallness = cfg.real("solver", "smallness");
    PicardOptions {
        tol: cfg.real("solver", "tol"),
        max_iter: cfg.int("solver", "max_iter"),
        quad: quadrature(cfg),
        trace_order: cfg.int("solver", "trace_order"),
        nonlinear: true,
        smallness: (smallness > 0.0).then_some(smallness),
    }
}

fn initial_field(cfg: &ExperimentConfig, lattice: &Arc<WavenumberLattice>) -> Result<SpectralField> {
    let amplitude = cfg.real("initial", "amplitude");
    match cfg.text("initial", "field") {
        "zero" => Ok(SpectralField::zeros(lattice, lattice.dim())),
        "random" => {
            let k = kappa(lattice);
            let mut rng = FieldRng::new(cfg.seed);
            solenoidal(
                lattice,
                k * cfg.real("initial", "k_lo"),
                k * cfg.real("initial", "k_hi"),
                amplitude,
                &mut rng,
            )
        }
        _ => taylor_green(lattice, amplitude, cfg.real("initial", "perturbation")),
    }
}

fn not_converged(trace: &PicardTrace) -> Error {
    Error::NotConverged {
        iterations: trace.j_final,
        last_diff: trace.diffs.last().and_then(|d| d.first()).copied().unwrap_or(f64::NAN),
    }
}

/// Picard solution with its trace written out. Non-convergence is a
/// numerical abort.
fn solve_on(
    cfg: &ExperimentConfig,
    out: &mut Outcome,
    extra_times: &[f64],
) -> Result<(TrajectoryField, SpectralField, TimeGrid)> {
    let p = params(cfg);
    let lattice = build_lattice(p)?;
    let u0 = initial_field(cfg, &lattice)?;
    let grid = time_grid(cfg, extra_times)?;
    let opts = picard_options(cfg);
    let (u, trace) = out.timed("picard", || picard_solve(&u0, p.alpha, &grid, &opts))?;
    out.csv("picard_trace.csv", |w| trace.write_csv(w));
    if !trace.converged {
        return Err(not_converged(&trace));
    }
    let residual_ok = trace.residual <= 2.0 * trace.tol;
    let mut detail = trace.summary();
    if trace.outside_proven_regime {
        detail += " (data above the smallness threshold)";
    }
    out.check("picard", Verdict::from_pass(residual_ok), detail);
    Ok((u, u0, grid))
}

fn solve(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let alpha = params(cfg).alpha;
    let oracle_times = cfg.list("solve", "oracle_times").to_vec();
    let mut snapshot_times = cfg.list("solve", "snapshot_times").to_vec();
    if snapshot_times.is_empty() {
        snapshot_times = oracle_times.clone();
    }
    let extra: Vec<f64> = oracle_times.iter().chain(&snapshot_times).copied().collect();
    let (u, u0, grid) = solve_on(cfg, out, &extra)?;

    let snaps: Vec<f64> = snapshot_times.into_iter().filter(|&t| t <= grid.last()).collect();
    if !snaps.is_empty() {
        let states = snaps.iter().map(|&t| u.states()[grid.nearest(t)].clone()).collect();
        let picked = TrajectoryField::new(TimeGrid::from_points(snaps)?, states, None)?;
        out.csv("trajectory.csv", |w| write_trajectory_csv(w, &picked));
    }

    let dt = cfg.real("solve", "oracle_dt");
    let checked: Vec<f64> = oracle_times.into_iter().filter(|&t| t <= grid.last()).collect();
    if dt > 0.0 && !checked.is_empty() {
        let oracle_grid = TimeGrid::from_points(checked.clone())?;
        let oracle = out.timed("oracle", || timestep_solve(&u0, alpha, &oracle_grid, dt, true))?;
        let tolerance = cfg.real("solve", "oracle_tolerance");
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for (&t, s) in checked.iter().zip(oracle.states()) {
            let err = relative_l2(&u.states()[grid.nearest(t)], s)?;
            worst = worst.max(err);
            rows.push((t, err));
        }
        out.csv("oracle.csv", |w| {
            writeln!(w, "t,relative_l2")?;
            for (t, e) in &rows {
                writeln!(w, "{t:.14e},{e:.14e}")?;
            }
            Ok(())
        });
        out.check(
            "oracle",
            Verdict::from_pass(worst <= tolerance),
            format!("max relative L2 distance to the time stepper {worst:.3e} (tolerance {tolerance:e}, dt {dt:e})"),
        );
    }
    Ok(())
}

fn kernel_tables(
    alpha: f64,
    n: usize,
    times: &[f64],
    radii: &[f64],
    quad: &KernelQuadrature,
) -> Result<[Vec<KernelTable>; 3]> {
    let mut phi = Vec::new();
    let mut pi = Vec::new();
    let mut grad = Vec::new();
    for &t in times {
        phi.push(eval_phi(alpha, n, t, radii, quad)?);
        pi.push(eval_pi_phi(alpha, n, t, radii, None, quad)?);
        grad.push(eval_pi_phi(alpha, n, t, radii, Some(0), quad)?);
    }
    Ok([phi, pi, grad])
}

fn gaussian(n: usize, r: f64) -> f64 {
    (4.0 * PI).powf(-(n as f64) / 2.0) * (-r * r / 4.0).exp()
}

fn poisson(n: usize, r: f64) -> f64 {
    // Γ((n+1)/2) for n = 1, 2, 3
    let gamma = match n {
        2 => PI.sqrt() / 2.0,
        _ => 1.0,
    };
    let a = (n as f64 + 1.0) / 2.0;
    gamma * PI.powf(-a) * (1.0 + r * r).powf(-a)
}

fn kernel_check(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let s = "kernel-check";
    let quad = KernelQuadrature {
        panels: cfg.int(s, "panels"),
        nodes: cfg.int(s, "nodes"),
    };
    let fine = quad.refined(2);
    let radii = radial_grid(cfg.real(s, "r_min"), cfg.real(s, "r_max"), cfg.int(s, "per_decade"));
    let times = cfg.list(s, "times").to_vec();
    let dims: Vec<usize> = cfg.list(s, "dims").iter().map(|&d| d as usize).collect();
    let drift_tol = cfg.real(s, "drift_tolerance");

    if cfg.flag(s, "calibration") {
        let calib_radii = radial_grid(1e-2, 10.0, 20);
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        out.timed("calibration", || {
            for &n in &dims {
                for (alpha, exact) in [(1.0, gaussian as fn(usize, f64) -> f64), (0.5, poisson)] {
                    let table = eval_phi(alpha, n, 1.0, &calib_radii, &quad)?;
                    for (&r, &v) in table.radii.iter().zip(&table.values) {
                        let e = exact(n, r);
                        worst = worst.max((v / e - 1.0).abs());
                        rows.push(SampleRow {
                            alpha,
                            n,
                            t: 1.0,
                            r,
                            k: 0,
                            value: v,
                            bound_value: e,
                            ratio: v / e,
                        });
                    }
                }
            }
            Ok(())
        })?;
        out.csv("calibration.csv", |w| write_samples(w, &rows));
        out.check(
            "calibration",
            Verdict::from_pass(worst <= 1e-6),
            format!("max relative error against the Gaussian and Poisson kernels {worst:.3e}"),
        );
    }

    let kinds = [
        (BoundKind::HeatDecay, "heat_decay"),
        (BoundKind::PiPhi, "pi_phi"),
        (BoundKind::PiGradient, "pi_gradient"),
    ];
    let mut rows: [Vec<SampleRow>; 3] = Default::default();
    let mut results: Vec<(usize, f64, usize, fns_core::BoundCheckResult)> = Vec::new();
    for &alpha in cfg.list(s, "alphas") {
        for &n in &dims {
            let (coarse, refined) = out.timed(format!("kernels/alpha{alpha}/n{n}"), || {
                Ok((
                    kernel_tables(alpha, n, &times, &radii, &quad)?,
                    kernel_tables(alpha, n, &times, &radii, &fine)?,
                ))
            })?;
            for (i, (kind, _)) in kinds.iter().enumerate() {
                let bound = Bound::new(*kind);
                let res = check_bound(&coarse[i], bound).with_refinement(&check_bound(&refined[i], bound), drift_tol);
                rows[i].extend(res.rows.iter().cloned());
                results.push((i, alpha, n, res));
            }
        }
    }
    for (i, (_, file)) in kinds.iter().enumerate() {
        if !rows[i].is_empty() {
            out.csv(format!("bound_{file}.csv"), |w| write_samples(w, &rows[i]));
        }
    }
    for (i, alpha, n, res) in results {
        out.check(
            format!("bound/{}/alpha{alpha}/n{n}", kinds[i].1),
            Verdict::from_pass(res.pass),
            format!(
                "{}: sup ratio {:.4e} over {} samples, refinement drift {:.3}%",
                res.bound_name,
                res.sup_ratio,
                res.samples,
                100.0 * res.drift().unwrap_or(f64::NAN)
            ),
        );
    }

    let k_max = cfg.int(s, "k_max");
    if k_max > 0 {
        let spread = cfg.real(s, "k_spread");
        let growth_radii = radial_grid(1e-2, 1e2, 10);
        let mut growth_rows = Vec::new();
        let mut constants = Vec::new();
        for &alpha in cfg.list(s, "alphas") {
            let rep = out.timed(format!("k-growth/alpha{alpha}"), || {
                k_growth(alpha, &growth_radii, k_max, spread, &quad)
            })?;
            growth_rows.extend(rep.rows.iter().cloned());
            for &(k, sup, c) in &rep.per_order {
                constants.push((alpha, k, sup, c));
            }
            let list: Vec<String> = rep.per_order.iter().map(|p| format!("{:.4}", p.2)).collect();
            out.check(
                format!("k-growth/alpha{alpha}"),
                Verdict::from_pass(rep.pass),
                format!("C_k = [{}], max/min {:.3} (limit {spread})", list.join(", "), rep.spread),
            );
        }
        out.csv("k_growth.csv", |w| write_samples(w, &growth_rows));
        out.csv("k_growth_constants.csv", |w| {
            writeln!(w, "alpha,k,sup_ratio,constant")?;
            for (alpha, k, sup, c) in &constants {
                writeln!(w, "{alpha:.14e},{k},{sup:.14e},{c:.14e}")?;
            }
            Ok(())
        });
    }

    let (a_list, b_list) = (cfg.list(s, "convolution_a"), cfg.list(s, "convolution_b"));
    if !a_list.is_empty() {
        let xs = radial_grid(1e-2, 1e3, 6);
        let mut conv_rows = Vec::new();
        for (&a, &b) in a_list.iter().zip(b_list) {
            for &n in &dims {
                let rep = out.timed(format!("convolution/a{a}/b{b}/n{n}"), || {
                    verify_convolution_inequality(a, b, &xs, n, 1e-8)
                })?;
                conv_rows.extend(rep.rows.iter().cloned());
                out.check(
                    format!("convolution/a{a}/b{b}/n{n}"),
                    Verdict::from_pass(rep.pass),
                    format!("sup ratio {:.4e}", rep.sup_ratio),
                );
            }
        }
        out.csv("convolution.csv", |w| write_samples(w, &conv_rows));
    }
    Ok(())
}

fn norm_equiv(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let s = "norm-equiv";
    let p = params(cfg);
    let lattice = build_lattice(p)?;
    let k = kappa(&lattice);
    let count = cfg.int(s, "count");
    let (k_lo, k_hi) = (cfg.real(s, "k_lo"), cfg.real(s, "k_hi"));
    let span = (k_hi / (2.0 * k_lo)).max(1.0);
    let mut rng = FieldRng::new(cfg.seed);
    let family = (0..count)
        .map(|i| {
            let frac = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            let lo = k_lo * span.powf(frac);
            band_limited(&lattice, 1, k * lo, k * (2.0 * lo).min(k_hi), &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let sampling = NormSampling::default();
    let factor = cfg.real(s, "factor");
    let report = out.timed("norms", || certify_equivalence(&family, p.alpha, &sampling, factor))?;
    out.csv("norm_equivalence.csv", |w| report.write_csv(w));
    out.check(
        "equivalence",
        Verdict::from_pass(report.pass),
        format!("max ratio spread {:.3} (limit {factor})", report.max_spread()),
    );

    let tolerance = cfg.real(s, "rescale_tolerance");
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    out.timed("rescaling", || {
        for (i, (v, norms)) in family.iter().zip(&report.norms).enumerate() {
            let scaled = CriticalNorms::compute(&dilated(v, 2.0)?, p.alpha, &sampling)?.ratios();
            let base = norms.ratios();
            for j in 0..RATIO_NAMES.len() {
                let change = scaled[j] / base[j] - 1.0;
                worst = worst.max(change.abs());
                rows.push((i, RATIO_NAMES[j], base[j], scaled[j], change));
            }
        }
        Ok(())
    })?;
    out.csv("rescaling.csv", |w| {
        writeln!(w, "field,ratio,base,dilated,relative_change")?;
        for (i, name, base, scaled, change) in &rows {
            writeln!(w, "{i},{name},{base:.14e},{scaled:.14e},{change:.14e}")?;
        }
        Ok(())
    });
    out.check(
        "rescaling",
        Verdict::from_pass(worst <= tolerance),
        format!("largest ratio change under dilation {:.3}% (limit {:.3}%)", 100.0 * worst, 100.0 * tolerance),
    );
    Ok(())
}

fn bilinear(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let s = "bilinear-check";
    let p = params(cfg);
    let lattice = build_lattice(p)?;
    let pairs = seeded_pairs(&lattice, cfg.int(s, "pairs"), cfg.seed)?;
    let grid = time_grid(cfg, &[])?;
    let quad = quadrature(cfg);
    let drift = cfg.real(s, "drift_tolerance");
    let rep = out.timed("bilinear", || check_bilinear_boundedness(&pairs, p.alpha, &grid, &quad, drift))?;
    out.csv("bilinear.csv", |w| rep.write_csv(w));
    out.check("bilinear", Verdict::from_pass(rep.pass), rep.summary());
    Ok(())
}

fn decay(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let s = "decay-study";
    let p = params(cfg);
    let mut alphas = cfg.list(s, "alphas").to_vec();
    if alphas.is_empty() {
        alphas.push(p.alpha);
    }
    let opts = DecayOptions {
        lo_factor: cfg.real(s, "lo_factor"),
        hi_factor: cfg.real(s, "hi_factor"),
        tolerance: cfg.real(s, "tolerance"),
        min_samples: cfg.int(s, "min_samples"),
        min_decades: cfg.real(s, "min_decades"),
        ..DecayOptions::default()
    };
    let grid = time_grid(cfg, &[])?;
    let solver = picard_options(cfg);
    for alpha in alphas {
        let lattice = build_lattice(&p.clone().with_alpha(alpha))?;
        let u0 = power_law_shear(&lattice, alpha, cfg.int(s, "shells"), cfg.real(s, "amplitude"))?;
        let (u, trace) = out.timed(format!("picard/alpha{alpha}"), || picard_solve(&u0, alpha, &grid, &solver))?;
        out.csv(format!("picard_trace_alpha{alpha}.csv"), |w| trace.write_csv(w));
        if !trace.converged {
            return Err(not_converged(&trace));
        }
        let res = out.timed(format!("decay/alpha{alpha}"), || decay_study(&u, alpha, cfg.int(s, "k_max"), &opts))?;
        out.csv(format!("decay_alpha{alpha}.csv"), |w| res.write_csv(w));
        out.csv(format!("decay_fits_alpha{alpha}.csv"), |w| res.write_fits_csv(w));
        out.check(format!("decay/alpha{alpha}"), res.verdict, res.summary());
    }
    Ok(())
}

fn persistence(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let alpha = params(cfg).alpha;
    let t0 = cfg.list("persistence-check", "t0").to_vec();
    let (u, _, _) = solve_on(cfg, out, &t0)?;
    let rep = out.timed("persistence", || persistence_check(&u, &t0, alpha, &NormSampling::default()))?;
    out.csv("persistence.csv", |w| rep.write_csv(w));
    out.check("persistence", Verdict::from_pass(rep.pass), rep.summary());
    Ok(())
}

fn analyticity(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let s = "analyticity-study";
    let alpha = params(cfg).alpha;
    let (u, _, _) = solve_on(cfg, out, &[])?;
    let (k_max, slack) = (cfg.int(s, "k_max"), cfg.real(s, "slack"));
    let clean = out.timed("analyticity", || analyticity_study(&u, alpha, k_max, slack))?;
    out.csv("analyticity.csv", |w| clean.write_csv(w));
    out.check("analyticity", clean.verdict, clean.summary());
    let delta = cfg.real(s, "contamination");
    if delta > 0.0 {
        let control = out.timed("white-control", || {
            analyticity_study(&with_static_contamination(&u, delta, cfg.seed)?, alpha, k_max, slack)
        })?;
        out.csv("analyticity_control.csv", |w| control.write_csv(w));
        out.check(
            "white-control-rejected",
            Verdict::from_pass(control.verdict == Verdict::Fail),
            control.summary(),
        );
    }
    Ok(())
}

fn combinatorial(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let s = "combinatorial-check";
    let delta = cfg.real(s, "delta");
    let degree = cfg.int(s, "max_degree");
    let mut rows = Vec::new();
    for &d in cfg.list(s, "dims") {
        let n = d as usize;
        let rep = out.timed(format!("enumeration/n{n}"), || check_combinatorial_lemma(delta, degree, n))?;
        rows.extend(rep.rows.iter().cloned());
        out.check(
            format!("combinatorial/n{n}"),
            Verdict::from_pass(rep.pass),
            format!("sup ratio {:.6} over {} multi-indices", rep.sup_ratio, rep.samples),
        );
    }
    out.csv("combinatorial.csv", |w| write_samples(w, &rows));
    Ok(())
}
