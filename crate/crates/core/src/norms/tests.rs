use std::f64::consts::PI;

use super::*;
use crate::params::Parameters;
use crate::quadrature::integrate_adaptive;
use crate::random::{band_limited, FieldRng};
use crate::spectral::build_lattice;

fn lattice(n: usize, m: usize) -> Arc<WavenumberLattice> {
    build_lattice(&Parameters::new(0.75, n, m, 2.0 * PI)).unwrap()
}

/// `cos(m·x)` (amplitude one) as a scalar field.
fn cosine(lat: &Arc<WavenumberLattice>, m: [i32; 3]) -> SpectralField {
    let mut f = SpectralField::zeros(lat, 1);
    f.set_real_mode(0, m, Complex64::new(0.5, 0.0)).unwrap();
    f
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn gx_envelope_cancels() {
    let lat = lattice(2, 8);
    let g = cosine(&lat, [1, 0, 0]);
    let alpha = 0.75;
    let grid = TimeGrid::geometric(0.01, 1.5, 20).unwrap();
    let states = grid
        .points()
        .iter()
        .map(|&t| g.scaled(t.powf(-gx_exponent(alpha))))
        .collect();
    let u = TrajectoryField::new(grid.clone(), states, None).unwrap();
    assert!((gx_norm(&u, alpha) - 1.0).abs() < 1e-14);
    assert_eq!(gx_norm(&u.scaled(0.0), alpha), 0.0);
    assert_eq!(gxk_norm(&u, 0, alpha).unwrap(), gx_norm(&u, alpha));
}

#[test]
fn gx_of_single_mode_flow() {
    let lat = lattice(2, 16);
    let g = cosine(&lat, [1, 0, 0]);
    let alpha = 0.75;
    let oracle = golden_max(|t| t.powf(1.0 / 3.0) * (-t).exp(), 1e-3, 10.0);
    assert!((oracle - (1.0f64 / 3.0).powf(1.0 / 3.0) * (-1.0f64 / 3.0).exp()).abs() < 1e-12);
    assert!((oracle - 0.4968151).abs() < 1e-7);
    // default grid: within the discretization of the sup
    let flow = TrajectoryField::semigroup_flow(&g, &default_time_grid(), alpha).unwrap();
    let coarse = gx_norm(&flow, alpha);
    assert!(coarse <= oracle + 1e-15 && oracle - coarse < 5e-4, "{coarse}");
    // a dense grid around t* = 1/3
    let dense = TimeGrid::spanning(0.3, 0.4, 2000).unwrap();
    let flow = TrajectoryField::semigroup_flow(&g, &dense, alpha).unwrap();
    assert!((gx_norm(&flow, alpha) - oracle).abs() < 1e-9);
    assert!((semigroup_gx_norm(&g, alpha, &dense).unwrap() - oracle).abs() < 1e-9);
}

#[test]
fn gxk_ratio_of_single_mode() {
    let lat = lattice(2, 16);
    let g = cosine(&lat, [1, 0, 0]);
    let alpha = 0.75;
    let grid = TimeGrid::spanning(0.2, 1.5, 4000).unwrap();
    let flow = TrajectoryField::semigroup_flow(&g, &grid, alpha).unwrap();
    let env = |gamma: f64| golden_max(move |t| t.powf(gamma) * (-t).exp(), 1e-3, 10.0);
    let expected = env(gxk_exponent(alpha, 1)) / env(gxk_exponent(alpha, 0));
    let ratio = gxk_norm(&flow, 1, alpha).unwrap() / gxk_norm(&flow, 0, alpha).unwrap();
    assert!((ratio - expected).abs() < 1e-8, "{ratio} vs {expected}");
    assert_eq!(gxk_norm(&flow.scaled(0.0), 2, alpha).unwrap(), 0.0);
}

#[test]
fn gxk_rejects_unresolved_orders() {
    let lat = lattice(1, 8);
    let g = cosine(&lat, [1, 0, 0]);
    let flow = TrajectoryField::semigroup_flow(&g, &TimeGrid::geometric(0.1, 2.0, 4).unwrap(), 0.75).unwrap();
    assert!(gxk_norm(&flow, 2, 0.75).is_ok());
    assert!(matches!(gxk_norm(&flow, 3, 0.75), Err(Error::UnresolvedDerivative { k: 3 })));
    // all content outside the dealiasing mask
    let h = cosine(&lat, [3, 0, 0]);
    let flow = TrajectoryField::semigroup_flow(&h, &TimeGrid::geometric(0.1, 2.0, 4).unwrap(), 0.75).unwrap();
    assert!(matches!(gxk_norm(&flow, 1, 0.75), Err(Error::UnresolvedDerivative { .. })));
}

fn carleson_1d_oracle(alpha: f64, radii: &[f64]) -> f64 {
    // v0 = cos x: |S(t)v0(y)|^2 = e^{-2t} cos^2 y
    radii
        .iter()
        .map(|&r| {
            let time = (1.0 - (-2.0 * r.powf(2.0 * alpha)).exp()) / 2.0;
            let space = r + (2.0 * r).sin().abs() / 2.0;
            (r.powf(-(3.0 - 2.0 * alpha)) * time * space).sqrt()
        })
        .fold(0.0, f64::max)
}

#[test]
fn carleson_single_mode_matches_closed_form() {
    let alpha = 0.75;
    let lat = lattice(1, 32);
    let g = cosine(&lat, [1, 0, 0]);
    let s = CarlesonSampling::default();
    let radii = s.radii(&lat);
    let value = carleson_norm(&g, alpha, &s).unwrap();
    let oracle = carleson_1d_oracle(alpha, &radii);
    assert!((value / oracle - 1.0).abs() < 1e-3, "{value} vs {oracle}");
}

#[test]
fn carleson_two_dimensions_matches_chord_integral() {
    let alpha = 0.6;
    let lat = lattice(2, 16);
    let g = cosine(&lat, [1, 0, 0]);
    let r = PI / 2.0;
    let value = carleson_at_radii(&g, alpha, &[r], 8, 8).unwrap();
    // centre 0: ∫_B cos^2 y1 dy = ∫ cos^2(y1) 2 sqrt(R^2 - y1^2) dy1
    let chord = |x0: f64| {
        integrate_adaptive(
            |y: f64| (x0 + y).cos().powi(2) * 2.0 * (r * r - y * y).max(0.0).sqrt(),
            -r,
            r,
            1e-12,
            1e-14,
            10_000,
        )
        .unwrap()
        .0
    };
    let space = (0..8).map(|j| chord(j as f64 * PI / 4.0)).fold(0.0, f64::max);
    let time = (1.0 - (-2.0 * r.powf(2.0 * alpha)).exp()) / 2.0;
    let oracle = (r.powf(-(4.0 - 2.0 * alpha)) * time * space).sqrt();
    assert!((value / oracle - 1.0).abs() < 1e-3, "{value} vs {oracle}");
}

#[test]
fn carleson_rejects_large_radii_and_means() {
    let lat = lattice(2, 16);
    let g = cosine(&lat, [1, 0, 0]);
    assert!(carleson_at_radii(&g, 0.75, &[2.0], 8, 6).is_err());
    let mut biased = g.clone();
    biased.component_mut(0)[0] = Complex64::new(1.0, 0.0);
    assert!(matches!(carleson_norm(&biased, 0.75, &CarlesonSampling::default()), Err(Error::NonzeroMean { .. })));
    assert_eq!(carleson_norm(&g.scaled(0.0), 0.75, &CarlesonSampling::default()).unwrap(), 0.0);
}

#[test]
fn carleson_scaling_law() {
    let lat = lattice(2, 32);
    let v0 = band_limited(&lat, 1, 1.0, 6.0, &mut FieldRng::new(11)).unwrap();
    let s = CarlesonSampling::default();
    for alpha in [0.6, 0.9] {
        let base = carleson_norm(&v0, alpha, &s).unwrap();
        for lambda in [2.0f64, 4.0] {
            let scaled = dilated(&v0, lambda.powf(1.0 / (2.0 * alpha))).unwrap();
            let ratio = base / carleson_norm(&scaled, alpha, &s).unwrap();
            let expected = lambda.powf(-gx_exponent(alpha));
            assert!((ratio / expected - 1.0).abs() < 0.02, "α={alpha} λ={lambda}: {ratio} vs {expected}");
        }
    }
}

#[test]
fn partition_of_unity() {
    for (n, m) in [(1, 64), (2, 32), (3, 16)] {
        let lat = lattice(n, m);
        let lp = LittlewoodPaley::for_lattice(&lat);
        assert!(lp.partition_residue(&lat) < 1e-12);
    }
    assert_eq!(lp_bump(1.0), 1.0);
    assert_eq!(lp_bump(0.5), 0.0);
    assert_eq!(lp_bump(2.0), 0.0);
    assert!(lp_bump(1.5) > 0.0 && lp_bump(1.5) < 1.0);
}

#[test]
fn besov_single_mode_and_dilation() {
    let alpha = 0.75;
    let sigma = besov_index(alpha);
    let lat = lattice(2, 64);
    let lp = LittlewoodPaley::for_lattice(&lat);
    for j in 0..4 {
        let g = cosine(&lat, [1 << j, 0, 0]);
        let b = besov_norm(&g, sigma, &lp).unwrap();
        assert!((b - 2f64.powf(j as f64 * sigma)).abs() < 1e-13, "j={j}: {b}");
    }
    // v(2x) has the coefficients of v moved from m to 2m; on a grid twice
    // as fine its samples are exactly those of v
    let v = band_limited(&lat, 1, 1.0, 7.0, &mut FieldRng::new(5)).unwrap();
    let fine = lattice(2, 128);
    let mut w = SpectralField::zeros(&fine, 1);
    for idx in 0..lat.len() {
        let m = lat.integer(idx);
        let c = v.component(0)[idx];
        if c.norm() > 0.0 {
            let t = fine.index_of([2 * m[0], 2 * m[1], 0]).unwrap();
            w.component_mut(0)[t] = c;
        }
    }
    let lp_fine = LittlewoodPaley::for_lattice(&fine);
    let ratio = besov_norm(&w, sigma, &lp_fine).unwrap() / besov_norm(&v, sigma, &lp).unwrap();
    assert!((ratio / 2f64.powf(sigma) - 1.0).abs() < 0.01, "{ratio}");
    assert_eq!(besov_norm(&v.scaled(0.0), sigma, &lp).unwrap(), 0.0);
}

#[test]
fn norms_are_homogeneous() {
    let alpha = 0.75;
    let lat = lattice(2, 16);
    let v = band_limited(&lat, 2, 1.0, 4.0, &mut FieldRng::new(2)).unwrap();
    let sampling = NormSampling::default();
    let a = CriticalNorms::compute(&v, alpha, &sampling).unwrap();
    let b = CriticalNorms::compute(&v.scaled(-3.5), alpha, &sampling).unwrap();
    for (x, y) in [(a.besov, b.besov), (a.carleson, b.carleson), (a.gx, b.gx)] {
        assert!((y - 3.5 * x).abs() <= 1e-12 * y, "{x} {y}");
    }
}

#[test]
fn single_modes_have_finite_spread() {
    let alpha = 0.75;
    let lat = lattice(2, 32);
    let family: Vec<_> = [1, 2, 4, 8].iter().map(|&m| cosine(&lat, [m, 0, 0])).collect();
    let report = certify_equivalence(&family, alpha, &NormSampling::default(), 50.0).unwrap();
    assert!(report.max_spread().is_finite());
    assert_eq!(report.norms.len(), 4);
    assert!(report.pass, "{:?}", report.ranges);
    let mut family = family;
    family.push(SpectralField::zeros(&lat, 1));
    assert!(certify_equivalence(&family, alpha, &NormSampling::default(), 50.0).is_err());
}

#[test]
fn ratios_survive_dyadic_rescaling() {
    let alpha = 0.75;
    let lat = lattice(2, 32);
    let v = band_limited(&lat, 1, 1.0, 8.0, &mut FieldRng::new(9)).unwrap();
    let sampling = NormSampling::default();
    let a = CriticalNorms::compute(&v, alpha, &sampling).unwrap().ratios();
    let b = CriticalNorms::compute(&dilated(&v, 2.0).unwrap(), alpha, &sampling).unwrap().ratios();
    for p in 0..3 {
        assert!((a[p] / b[p] - 1.0).abs() < 0.02, "{}: {} vs {}", RATIO_NAMES[p], a[p], b[p]);
    }
}

#[test]
fn pointwise_bound_for_single_mode() {
    let alpha = 0.75;
    let lat = lattice(2, 32);
    let g = cosine(&lat, [1, 0, 0]);
    let sampling = NormSampling::default();
    let res = check_pointwise_semigroup_bound(&[g.clone()], alpha, &sampling, 0.05).unwrap();
    let e = carleson_norm(&g, alpha, &sampling.carleson).unwrap();
    let envelope = golden_max(|t| t.powf(1.0 / 3.0) * (-t).exp(), 1e-3, 10.0);
    assert!((res.sup_ratio - envelope / e).abs() < 1e-3 * envelope / e);
    assert!(res.pass, "{:?}", res.drift());
    let scaled = check_pointwise_semigroup_bound(&[dilated(&g, 2.0).unwrap()], alpha, &sampling, 0.05).unwrap();
    assert!((scaled.sup_ratio / res.sup_ratio - 1.0).abs() < 0.02);
    assert!(check_pointwise_semigroup_bound(&[SpectralField::zeros(&lat, 1)], alpha, &sampling, 0.05).is_err());
}

#[test]
fn norm_report_row() {
    let lat = lattice(2, 16);
    let u = crate::random::solenoidal(&lat, 1.0, 3.0, 0.1, &mut FieldRng::new(4)).unwrap();
    let report = NormReport::for_flow("u0", &u, 0.75, 2, &NormSampling::default()).unwrap();
    assert_eq!(report.gx_k.len(), 3);
    assert_eq!(report.gx, report.gx_k[0]);
    assert!(report.gy > 0.0 && report.carleson > 0.0 && report.besov > 0.0);
    let mut buf = Vec::new();
    write_norm_reports(&mut buf, &[report.clone()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with(NORM_HEADER));
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 8);
    assert!(report.summary().starts_with("u0: GX"));
}
