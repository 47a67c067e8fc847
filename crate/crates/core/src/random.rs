//! Seeded random field families.
//!
//! The generator is Xoshiro256++ seeded through SplitMix64 (the
//! `seed_from_u64` convention of `rand_core`). With state `s[0..4]` one step
//! returns `rotl(s0 + s3, 23) + s0` and updates
//!
//! ```text
//! t = s1 << 17
//! s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
//! ```
//!
//! Uniforms take the top 53 bits; Gaussians use the Box–Muller pair
//! `sqrt(-2 ln u1) (cos 2πu2, sin 2πu2)` with `u1 ∈ (0, 1]`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{invalid, Result};
use crate::operators::leray_project;
use crate::spectral::{SpectralField, WavenumberLattice};

#[derive(Debug, Clone)]
pub struct FieldRng {
    inner: Xoshiro256PlusPlus,
}

impl FieldRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals.
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let rad = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        (rad * c, rad * s)
    }

    /// Complex normal with `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.gaussian_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Real, mean-free field whose modes with `k_lo ≤ |k| ≤ k_hi` carry
/// independent complex Gaussian amplitudes and every other mode is zero.
/// Frequencies are visited in lattice order, so a seed fixes the field.
pub fn band_limited(
    lattice: &Arc<WavenumberLattice>,
    rank: usize,
    k_lo: f64,
    k_hi: f64,
    rng: &mut FieldRng,
) -> Result<SpectralField> {
    if !(k_lo > 0.0 && k_hi >= k_lo) {
        return Err(invalid("band", format!("[{k_lo}, {k_hi}] must be a nonempty positive band")));
    }
    let mut out = SpectralField::zeros(lattice, rank);
    let len = lattice.len();
    let mut any = false;
    for idx in 0..len {
        let neg = lattice.negated_index(idx);
        let k = lattice.norm(idx);
        if neg <= idx || lattice.is_nyquist(idx) || k < k_lo * (1.0 - 1e-12) || k > k_hi * (1.0 + 1e-12) {
            continue;
        }
        any = true;
        for c in 0..rank {
            let z = rng.complex_gaussian();
            let comp = out.component_mut(c);
            comp[idx] = z;
            comp[neg] = z.conj();
        }
    }
    if !any {
        return Err(invalid("band", format!("no resolved frequency in [{k_lo}, {k_hi}]")));
    }
    Ok(out)
}

/// Divergence-free band-limited vector field, rescaled so its largest
/// physical value is `amplitude`.
pub fn solenoidal(
    lattice: &Arc<WavenumberLattice>,
    k_lo: f64,
    k_hi: f64,
    amplitude: f64,
    rng: &mut FieldRng,
) -> Result<SpectralField> {
    let raw = band_limited(lattice, lattice.dim(), k_lo, k_hi, rng)?;
    let projected = leray_project(&raw)?;
    let peak = crate::norms::sup_magnitude(&projected);
    if peak == 0.0 {
        return Err(invalid("band", "projection removed every mode (one-dimensional box?)"));
    }
    Ok(projected.scaled(amplitude / peak))
}
