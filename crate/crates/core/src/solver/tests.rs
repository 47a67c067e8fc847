use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::norms::{semigroup_gx_norm, NormSampling};
use crate::operators::semigroup_apply;
use crate::params::Parameters;
use crate::report::Verdict;
use crate::spectral::{build_lattice, WavenumberLattice};

fn lattice(m: usize) -> Arc<WavenumberLattice> {
    build_lattice(&Parameters::new(0.75, 2, m, 2.0 * PI)).unwrap()
}

fn short_grid() -> TimeGrid {
    TimeGrid::spanning(1.0 / 1024.0, 4.0, 8).unwrap()
}

fn tg(m: usize, eps: f64) -> SpectralField {
    taylor_green(&lattice(m), eps, TG_PERTURBATION).unwrap()
}

#[test]
fn zero_data_converge_at_once() {
    let u0 = SpectralField::zeros(&lattice(16), 2);
    let (u, trace) = picard_solve(&u0, 0.75, &short_grid(), &PicardOptions::default()).unwrap();
    assert!(trace.converged);
    assert_eq!(trace.j_final, 1);
    assert_eq!(trace.residual, 0.0);
    assert!(u.states().iter().all(SpectralField::is_zero));
}

#[test]
fn linear_hook_reproduces_the_semigroup() {
    let u0 = tg(16, 0.1);
    let grid = short_grid();
    let opts = PicardOptions {
        nonlinear: false,
        ..PicardOptions::default()
    };
    let (u, trace) = picard_solve(&u0, 0.75, &grid, &opts).unwrap();
    assert!(trace.converged);
    let flow = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap();
    let diff = gx_norm(&u.sub(&flow).unwrap(), 0.75);
    assert_eq!(diff, 0.0);
}

#[test]
fn unperturbed_vortex_is_steady_for_the_nonlinearity() {
    let u0 = taylor_green(&lattice(16), 1.0, 0.0).unwrap();
    let f = bilinear_forcing(&u0, &u0).unwrap();
    assert!(f.max_abs() < 1e-15, "{}", f.max_abs());
    let p = tg(16, 1.0);
    assert!(p.divergence_residue() < 1e-14);
    assert!(bilinear_forcing(&p, &p).unwrap().max_abs() > 0.1);
}

#[test]
fn rejects_bad_initial_data() {
    let lat = lattice(16);
    let mut g = SpectralField::zeros(&lat, 2);
    g.set_real_mode(0, [1, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
    let err = picard_solve(&g, 0.75, &short_grid(), &PicardOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
    let mut m = tg(16, 0.1);
    m.component_mut(0)[0] = Complex64::new(0.5, 0.0);
    assert!(matches!(
        timestep_solve(&m, 0.75, &short_grid(), 0.01, true),
        Err(Error::NonzeroMean { .. })
    ));
    assert!(picard_solve(&tg(16, 0.1), 1.0, &short_grid(), &PicardOptions::default()).is_err());
}

#[test]
fn iterates_stay_solenoidal_and_real() {
    let u0 = tg(16, 0.05);
    let grid = short_grid();
    let opts = PicardOptions {
        max_iter: 3,
        ..PicardOptions::default()
    };
    let (u, _) = picard_solve(&u0, 0.75, &grid, &opts).unwrap();
    for s in u.states() {
        assert!(s.divergence_residue() < 1e-12 * s.max_abs().max(1e-300));
        assert!(s.hermitian_residue() < 1e-12 * s.max_abs().max(1e-300));
    }
}

#[test]
fn picard_contracts_and_matches_the_stepper() {
    let u0 = tg(16, 1e-2);
    let grid = TimeGrid::spanning(1.0 / 1024.0, 2.0, 16).unwrap();
    let (u, trace) = picard_solve(&u0, 0.75, &grid, &PicardOptions::default()).unwrap();
    assert!(trace.converged, "{}", trace.summary());
    assert!(trace.eventually_contracting(0.9));
    assert!(trace.geometric_ratio().unwrap() < 1.0);
    assert!(trace.residual <= 2.0 * trace.tol, "{}", trace.summary());
    let oracle = timestep_solve(&u0, 0.75, &TimeGrid::from_points(vec![0.5, 1.0, 2.0]).unwrap(), 1e-3, true).unwrap();
    for (t, s) in [0.5, 1.0, 2.0].iter().zip(oracle.states()) {
        let err = relative_l2(&u.states()[grid.nearest(*t)], s).unwrap();
        assert!(err < 1e-4, "t={t}: {err:e}");
    }
}

#[test]
fn distinct_starting_iterates_reach_the_same_fixed_point() {
    let u0 = tg(16, 1e-2);
    let grid = short_grid();
    let opts = PicardOptions::default();
    let (a, _) = picard_solve(&u0, 0.75, &grid, &opts).unwrap();
    let zero = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap().scaled(0.0);
    let (b, trace) = picard_solve_from(&u0, 0.75, &grid, &opts, Some(&zero)).unwrap();
    assert!(trace.converged);
    assert!(gx_norm(&a.sub(&b).unwrap(), 0.75) < 1e-7);
}

#[test]
fn stepper_is_exact_on_the_linear_part() {
    let u0 = tg(16, 1.0);
    let grid = TimeGrid::from_points(vec![0.3, 1.0, 2.5]).unwrap();
    let u = timestep_solve(&u0, 0.75, &grid, 0.07, false).unwrap();
    for (&t, s) in grid.points().iter().zip(u.states()) {
        let exact = semigroup_apply(&u0, t, 0.75).unwrap();
        assert!(relative_l2(s, &exact).unwrap() < 1e-12);
    }
}

#[test]
fn stepper_is_second_order_and_solenoidal() {
    let u0 = tg(16, 1.0);
    let grid = TimeGrid::from_points(vec![1.0]).unwrap();
    let run = |dt: f64| timestep_solve(&u0, 0.75, &grid, dt, true).unwrap().states()[0].clone();
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let ratio = a.sub(&b).unwrap().l2_coeff_norm() / b.sub(&c).unwrap().l2_coeff_norm();
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
    assert!(c.divergence_residue() < 1e-12);
}

#[test]
fn phi_functions_are_continuous_across_the_series_switch() {
    for z in [-1e-2 * (1.0 - 1e-9), -1e-2 * (1.0 + 1e-9)] {
        let (p1, p2) = phi_functions(z);
        let e = z.exp_m1();
        assert!((p1 - e / z).abs() < 1e-13);
        assert!((p2 - (e - z) / (z * z)).abs() < 1e-10);
    }
    assert_eq!(phi_functions(0.0), (1.0, 0.5));
}

#[test]
fn single_mode_weighted_sup_peaks_at_one_third() {
    let lat = lattice(16);
    let mut u0 = SpectralField::zeros(&lat, 2);
    u0.set_real_mode(0, [0, 1, 0], Complex64::new(0.5, 0.0)).unwrap();
    let grid = TimeGrid::spanning(1.0 / 1024.0, 64.0, 16).unwrap();
    let u = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap();
    let res = decay_study(&u, 0.75, 0, &DecayOptions::default()).unwrap();
    let b = res.bounds[0];
    assert!(b.bounded);
    assert!((b.argmax_t / (1.0 / 3.0)).ln().abs() < 0.05, "{}", b.argmax_t);
    let exact = (1.0f64 / 3.0).powf(1.0 / 3.0) * (-1.0f64 / 3.0).exp();
    assert!((b.max - exact).abs() < 1e-3, "{} {exact}", b.max);
    // a single mode has no intermediate window
    assert_eq!(res.verdict, Verdict::Inconclusive);
    assert!(res.fits.is_empty());
}

#[test]
fn short_runs_are_inconclusive() {
    let u0 = tg(16, 1e-2);
    let grid = TimeGrid::from_points(vec![0.1, 1.0]).unwrap();
    let u = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap();
    let res = decay_study(&u, 0.75, 2, &DecayOptions::default()).unwrap();
    assert_eq!(res.verdict, Verdict::Inconclusive);
    assert!(res.fits.is_empty());
}

#[test]
fn power_law_shear_follows_the_predicted_slopes() {
    let lat = lattice(256);
    let u0 = power_law_shear(&lat, 0.75, 7, 1e-2).unwrap();
    assert!(bilinear_forcing(&u0, &u0).unwrap().max_abs() < 1e-16);
    let grid = TimeGrid::spanning(1.0 / 16384.0, 16.0, 8).unwrap();
    let u = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap();
    let res = decay_study(&u, 0.75, 2, &DecayOptions::default()).unwrap();
    assert_eq!(res.verdict, Verdict::Pass, "{}", res.summary());
    assert!(res.decades >= 1.5);
}

#[test]
fn analyticity_of_smooth_and_contaminated_fields() {
    let lat = lattice(32);
    let grid = short_grid();
    // single mode: b_k = |k| c_k / k with c_k from the weight, decreasing
    let mut single = SpectralField::zeros(&lat, 2);
    single.set_real_mode(1, [3, 0, 0], Complex64::new(0.5, 0.0)).unwrap();
    let flow = TrajectoryField::semigroup_flow(&single, &grid, 0.75).unwrap();
    let res = analyticity_study(&flow, 0.75, 8, 0.2).unwrap();
    assert_eq!(res.verdict, Verdict::Pass, "{}", res.summary());
    assert!(res.b.windows(2).all(|w| w[1] < w[0]));

    // spectrum e^{-|k|}
    let mut gevrey = SpectralField::zeros(&lat, 2);
    for m1 in -10..=10i32 {
        for m0 in 1..=10i32 {
            let k = ((m0 * m0 + m1 * m1) as f64).sqrt();
            gevrey.set_real_mode(1, [m0, m1, 0], Complex64::new((-k).exp(), 0.0)).unwrap();
        }
    }
    let gevrey = crate::operators::leray_project(&gevrey).unwrap();
    let flow = TrajectoryField::semigroup_flow(&gevrey, &grid, 0.75).unwrap();
    let res = analyticity_study(&flow, 0.75, 8, 0.2).unwrap();
    assert_eq!(res.verdict, Verdict::Pass, "{}", res.summary());

    let dirty = with_static_contamination(&flow, 1e-5, 5).unwrap();
    let res = analyticity_study(&dirty, 0.75, 8, 0.2).unwrap();
    assert_eq!(res.verdict, Verdict::Fail, "{}", res.summary());

    assert!(analyticity_study(&flow, 0.75, 9, 0.2).is_err());
    let coarse = TrajectoryField::semigroup_flow(&SpectralField::zeros(&lattice(8), 2), &grid, 0.75).unwrap();
    assert!(analyticity_study(&coarse, 0.75, 4, 0.2).is_err());
}

#[test]
fn persistence_of_zero_and_linear_flows() {
    let grid = TimeGrid::spanning(1.0 / 1024.0, 16.0, 8).unwrap();
    let sampling = NormSampling::default();
    let zero = TrajectoryField::semigroup_flow(&SpectralField::zeros(&lattice(16), 2), &grid, 0.75).unwrap();
    let rep = persistence_check(&zero, &[0.1, 1.0, 10.0], 0.75, &sampling).unwrap();
    assert!(rep.pass);
    assert!(rep.snapshots.iter().all(|s| s.norms.gx == 0.0 && s.norms.besov == 0.0 && s.norms.carleson == 0.0));

    let u0 = tg(16, 0.1);
    let flow = TrajectoryField::semigroup_flow(&u0, &grid, 0.75).unwrap();
    let rep = persistence_check(&flow, &[0.1, 1.0, 10.0], 0.75, &sampling).unwrap();
    assert!(rep.pass);
    let gx: Vec<f64> = rep.snapshots.iter().map(|s| s.norms.gx).collect();
    assert!(gx.windows(2).all(|w| w[1] <= w[0]), "{gx:?}");
    assert!(gx[0] <= semigroup_gx_norm(&u0, 0.75, &sampling.time_grid).unwrap());
}

#[test]
fn bilinear_ratios_are_homogeneous() {
    let lat = lattice(16);
    let grid = TimeGrid::spanning(1.0 / 256.0, 8.0, 4).unwrap();
    let quad = QuadratureSpec::default();
    let pairs = seeded_pairs(&lat, 2, 11).unwrap();
    let rep = check_bilinear_boundedness(&pairs, 0.75, &grid, &quad, 0.1).unwrap();
    let scaled: Vec<_> = pairs.iter().map(|(u, v)| (u.scaled(7.0), v.scaled(0.3))).collect();
    let rep2 = check_bilinear_boundedness(&scaled, 0.75, &grid, &quad, 0.1).unwrap();
    for (a, b) in rep.pairs.iter().zip(&rep2.pairs) {
        assert!((a.product_ratio - b.product_ratio).abs() <= 1e-10 * a.product_ratio);
        assert!((a.duhamel_ratio - b.duhamel_ratio).abs() <= 1e-10 * a.duhamel_ratio);
    }
    assert!(rep.pass, "{}", rep.summary());
    assert!(rep.smallness > 0.0 && rep.smallness < 1.0);
    assert!(check_bilinear_boundedness(&[], 0.75, &grid, &quad, 0.1).is_err());
}

#[test]
fn trace_csv_lists_every_iterate() {
    let u0 = tg(16, 1e-2);
    let (_, trace) = picard_solve(&u0, 0.75, &short_grid(), &PicardOptions::default()).unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), trace.iterates.len() + 1);
    assert!(text.starts_with("j,norm_k0,diff_k0,contraction"));
}
