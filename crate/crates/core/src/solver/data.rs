//! Initial data and trajectory families used by the studies.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::norms::sup_magnitude;
use crate::operators::{leray_project, TrajectoryField};
use crate::random::{band_limited, solenoidal, FieldRng};
use crate::spectral::{forward_transform, PhysicalField, SpectralField, WavenumberLattice};

/// Default weight of the symmetry-breaking mode added to Taylor–Green data.
pub const TG_PERTURBATION: f64 = 0.5;

fn angular_coords(lattice: &WavenumberLattice, x: [f64; 3]) -> [f64; 3] {
    let kappa = 2.0 * PI / lattice.period();
    [kappa * x[0], kappa * x[1], kappa * x[2]]
}

/// Taylor–Green vortex scaled by `eps`, plus `perturbation` times a
/// divergence-free oblique mode.
///
/// In two dimensions `u = eps (-sin x cos y - 2p sin(x+2y), cos x sin y + p sin(x+2y))`;
/// in three `u = eps (sin x cos y cos z, -cos x sin y cos z, p sin(x+y))`.
/// Coordinates are measured in units of `L/2π`. The unperturbed vortex is
/// a steady state of the nonlinearity, so `p = 0` makes the bilinear term
/// vanish in two dimensions.
pub fn taylor_green(lattice: &Arc<WavenumberLattice>, eps: f64, perturbation: f64) -> Result<SpectralField> {
    let n = lattice.dim();
    if n < 2 {
        return Err(invalid("dim", "Taylor–Green data need at least two dimensions"));
    }
    if lattice.dealias_cutoff() < 2 {
        return Err(invalid("modes_per_axis", "the grid does not resolve frequency 2"));
    }
    let p = perturbation;
    let phys = PhysicalField::from_fn(lattice, n, |x, c| {
        let [x, y, z] = angular_coords(lattice, x);
        let v = match (n, c) {
            (2, 0) => -x.sin() * y.cos() - 2.0 * p * (x + 2.0 * y).sin(),
            (2, _) => x.cos() * y.sin() + p * (x + 2.0 * y).sin(),
            (_, 0) => x.sin() * y.cos() * z.cos(),
            (_, 1) => -x.cos() * y.sin() * z.cos(),
            _ => p * (x + y).sin(),
        };
        eps * v
    });
    leray_project(&forward_transform(&phys))
}

/// Shear flow `u = (f(y), 0, ...)` with `f(y) = Σ_j c_j cos(2^j y)`,
/// `j < shells`, normalized to `sup |u| = amplitude`.
///
/// With `λ_j = |2^j|^{2α}` and `b = 1 - 1/2α`, `c_j = λ_j^b`, and the lowest
/// shell additionally carries the geometric sum of the missing shells below
/// it, `λ_0^b / (ρ^b - 1)` with `ρ = λ_1/λ_0`. The sup norm of `S(t)u`
/// then follows `t^{-b}` across `1/λ_max ≲ t ≲ 1/λ_0`. Shear flows have
/// `Π∇·(u⊗u) = 0`, so `S(t)u` is an exact solution.
pub fn power_law_shear(lattice: &Arc<WavenumberLattice>, alpha: f64, shells: usize, amplitude: f64) -> Result<SpectralField> {
    let n = lattice.dim();
    if n < 2 {
        return Err(invalid("dim", "a shear flow needs at least two dimensions"));
    }
    if shells < 2 {
        return Err(invalid("shells", "at least two shells are required"));
    }
    let top = 1i64 << (shells - 1);
    if top > lattice.dealias_cutoff() as i64 {
        return Err(invalid(
            "shells",
            format!("frequency {top} exceeds the dealiasing cutoff {}", lattice.dealias_cutoff()),
        ));
    }
    let kappa = 2.0 * PI / lattice.period();
    let b = 1.0 - 1.0 / (2.0 * alpha);
    let lambda = |j: usize| ((1u64 << j) as f64 * kappa).powf(2.0 * alpha);
    let mut coeffs: Vec<f64> = (0..shells).map(|j| lambda(j).powf(b)).collect();
    let rho = lambda(1) / lambda(0);
    coeffs[0] += lambda(0).powf(b) / (rho.powf(b) - 1.0);
    let phys = PhysicalField::from_fn(lattice, n, |x, c| {
        if c != 0 {
            return 0.0;
        }
        let y = angular_coords(lattice, x)[1];
        coeffs
            .iter()
            .enumerate()
            .map(|(j, cj)| cj * ((1u64 << j) as f64 * y).cos())
            .sum()
    });
    let field = leray_project(&forward_transform(&phys))?;
    Ok(field.scaled(amplitude / sup_magnitude(&field)))
}

/// Adds the same white-spectrum field, every resolved frequency with a
/// Gaussian amplitude, to every state. Its sup norm is `delta` times the
/// largest sup norm along `u`. The result is not a solution; it serves as a
/// rough control.
pub fn with_static_contamination(u: &TrajectoryField, delta: f64, seed: u64) -> Result<TrajectoryField> {
    let lattice = u.lattice();
    let peak = u.states().iter().chain(u.initial()).map(sup_magnitude).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(invalid("trajectory", "a vanishing trajectory has no scale for the contamination"));
    }
    let delta = delta * peak;
    let kappa = 2.0 * PI / lattice.period();
    let cutoff = lattice.dealias_cutoff() as f64 * kappa;
    let w = band_limited(lattice, u.rank(), kappa, cutoff, &mut FieldRng::new(seed))?;
    let w = w.scaled(delta / sup_magnitude(&w));
    u.try_map(|s| s.add(&w))
}

/// `count` pairs of solenoidal fields with frequencies in `[1, 4]` (units
/// of `2π/L`) and amplitudes log-uniform in `[1e-2, 1]`.
pub fn seeded_pairs(lattice: &Arc<WavenumberLattice>, count: usize, seed: u64) -> Result<Vec<(SpectralField, SpectralField)>> {
    let kappa = 2.0 * PI / lattice.period();
    let mut rng = FieldRng::new(seed);
    (0..count)
        .map(|_| {
            let a = 10f64.powf(-2.0 + 2.0 * rng.uniform());
            let u = solenoidal(lattice, kappa, 4.0 * kappa, a, &mut rng)?;
            let b = 10f64.powf(-2.0 + 2.0 * rng.uniform());
            let v = solenoidal(lattice, kappa, 4.0 * kappa, b, &mut rng)?;
            Ok((u, v))
        })
        .collect()
}
