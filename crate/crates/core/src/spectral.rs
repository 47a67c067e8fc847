//! Grids, wavenumber lattices, field containers and the discrete Fourier
//! transform on the periodic box `[0, L)^n`.
//!
//! The forward transform divides by `M^n`, so spectral coefficients are the
//! Fourier-series coefficients of the sampled function. Every multiplier in
//! [`crate::operators`] is applied to these coefficients directly.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::params::Parameters;

pub struct WavenumberLattice {
    dim: usize,
    modes: usize,
    period: f64,
    dealias_fraction: f64,
    integers: Vec<[i32; 3]>,
    wavevectors: Vec<[f64; 3]>,
    norms: Vec<f64>,
    nyquist_mask: Vec<bool>,
    dealias_mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for WavenumberLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WavenumberLattice")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("period", &self.period)
            .field("dealias_fraction", &self.dealias_fraction)
            .finish()
    }
}

/// Builds the lattice of integer frequencies `m ∈ [-M/2, M/2)^n` with
/// wavevectors `k = (2π/L) m`, stored in FFT order along each axis.
pub fn build_lattice(p: &Parameters) -> Result<Arc<WavenumberLattice>> {
    p.validate_grid()?;
    let (n, m) = (p.dim, p.modes_per_axis);
    let len = m.pow(n as u32);
    let unit = 2.0 * std::f64::consts::PI / p.period;
    // |m_i| <= fraction * M/2; the Nyquist row has no partner under m -> -m
    // and is always excluded so the mask stays symmetric.
    let cutoff = p.dealias_fraction * (m / 2) as f64;
    let half = (m / 2) as i32;

    let mut integers = Vec::with_capacity(len);
    let mut wavevectors = Vec::with_capacity(len);
    let mut norms = Vec::with_capacity(len);
    let mut nyquist_mask = Vec::with_capacity(len);
    let mut dealias_mask = Vec::with_capacity(len);
    for idx in 0..len {
        let mut ints = [0i32; 3];
        let mut rem = idx;
        for axis in (0..n).rev() {
            let i = (rem % m) as i32;
            rem /= m;
            ints[axis] = if i < half { i } else { i - m as i32 };
        }
        let k = [
            unit * ints[0] as f64,
            unit * ints[1] as f64,
            unit * ints[2] as f64,
        ];
        let nyq = ints[..n].iter().any(|&i| i == -half);
        let keep = !nyq && ints[..n].iter().all(|&i| (i.abs() as f64) <= cutoff + 1e-12);
        integers.push(ints);
        norms.push((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt());
        wavevectors.push(k);
        nyquist_mask.push(nyq);
        dealias_mask.push(keep);
    }

    let mut planner = FftPlanner::new();
    Ok(Arc::new(WavenumberLattice {
        dim: n,
        modes: m,
        period: p.period,
        dealias_fraction: p.dealias_fraction,
        integers,
        wavevectors,
        norms,
        nyquist_mask,
        dealias_mask,
        forward: planner.plan_fft_forward(m),
        inverse: planner.plan_fft_inverse(m),
    }))
}

impl WavenumberLattice {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of lattice points, `M^n`.
    pub fn len(&self) -> usize {
        self.integers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.integers.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.modes as f64
    }

    pub fn integer(&self, idx: usize) -> [i32; 3] {
        self.integers[idx]
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.wavevectors[idx]
    }

    /// `|k|` at a lattice index.
    pub fn norm(&self, idx: usize) -> f64 {
        self.norms[idx]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.nyquist_mask[idx]
    }

    pub fn in_dealias(&self, idx: usize) -> bool {
        self.dealias_mask[idx]
    }

    /// Largest |m_i| kept by the dealiasing mask.
    pub fn dealias_cutoff(&self) -> i32 {
        (self.dealias_fraction * (self.modes / 2) as f64 + 1e-12).floor() as i32
    }

    /// Lattice index of an integer frequency, if it is representable.
    pub fn index_of(&self, m: [i32; 3]) -> Option<usize> {
        let half = (self.modes / 2) as i32;
        let mut idx = 0usize;
        for axis in 0..self.dim {
            let v = m[axis];
            if v < -half || v >= half {
                return None;
            }
            let i = if v < 0 { v + self.modes as i32 } else { v } as usize;
            idx = idx * self.modes + i;
        }
        if m[self.dim..].iter().any(|&v| v != 0) {
            return None;
        }
        Some(idx)
    }

    /// Index of `-m`; Nyquist entries map to themselves.
    pub fn negated_index(&self, idx: usize) -> usize {
        let m = self.integers[idx];
        let half = (self.modes / 2) as i32;
        let neg = m.map(|v| if v == -half { v } else { -v });
        self.index_of(neg).expect("negated frequency is on the lattice")
    }

    /// Physical coordinates of grid point `idx` (same linear ordering).
    pub fn grid_point(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let mut x = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = (rem % self.modes) as f64 * h;
            rem /= self.modes;
        }
        x
    }

    /// A lattice with the same integer frequencies but another period.
    pub fn with_period(&self, period: f64) -> Result<Arc<WavenumberLattice>> {
        build_lattice(&self.parameters_like().with_period(period))
    }

    /// A lattice with the same period and `modes` points per axis.
    pub fn with_modes(&self, modes: usize) -> Result<Arc<WavenumberLattice>> {
        let mut p = self.parameters_like();
        p.modes_per_axis = modes;
        build_lattice(&p)
    }

    fn parameters_like(&self) -> Parameters {
        Parameters::new(0.75, self.dim, self.modes, self.period).with_dealias(self.dealias_fraction)
    }

    pub fn same_as(&self, other: &WavenumberLattice) -> bool {
        std::ptr::eq(self, other)
            || (self.dim == other.dim
                && self.modes == other.modes
                && self.period == other.period
                && self.dealias_fraction == other.dealias_fraction)
    }

    /// In-place n-dimensional DFT of one component (no normalization).
    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let m = self.modes;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Contiguous last axis: process every line in one call.
        plan.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..self.dim.saturating_sub(1) {
            let stride = m.pow((self.dim - 1 - axis) as u32);
            let block = stride * m;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Complex Fourier coefficients of a field with `rank` components.
#[derive(Debug, Clone)]
pub struct SpectralField {
    rank: usize,
    coeffs: Vec<Complex64>,
    lattice: Arc<WavenumberLattice>,
}

impl SpectralField {
    pub fn zeros(lattice: &Arc<WavenumberLattice>, rank: usize) -> Self {
        Self {
            rank,
            coeffs: vec![Complex64::new(0.0, 0.0); rank * lattice.len()],
            lattice: lattice.clone(),
        }
    }

    pub fn from_coeffs(
        lattice: &Arc<WavenumberLattice>,
        rank: usize,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if coeffs.len() != rank * lattice.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", rank * lattice.len()),
                actual: format!("{}", coeffs.len()),
            });
        }
        Ok(Self {
            rank,
            coeffs,
            lattice: lattice.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lattice(&self) -> &Arc<WavenumberLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.lattice.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.lattice.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Sets the coefficient of integer frequency `m` in component `c` and its
    /// Hermitian partner, so the field stays real.
    pub fn set_real_mode(&mut self, c: usize, m: [i32; 3], value: Complex64) -> Result<()> {
        let idx = self.lattice.index_of(m).ok_or_else(|| Error::Precondition(format!(
            "frequency {m:?} is not on the lattice"
        )))?;
        let neg = self.lattice.negated_index(idx);
        let comp = self.component_mut(c);
        if neg == idx {
            comp[idx] = Complex64::new(value.re, 0.0);
        } else {
            comp[idx] = value;
            comp[neg] = value.conj();
        }
        Ok(())
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if !self.lattice.same_as(&other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        if self.rank != other.rank {
            return Err(Error::ShapeMismatch {
                expected: format!("rank {}", self.rank),
                actual: format!("rank {}", other.rank),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(x, y)| *x += y * a);
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sqrt(Σ |ĉ|²)` over all components and modes.
    pub fn l2_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L² norm over the box, `sqrt(L^n Σ |ĉ|²)` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.lattice.period.powi(self.lattice.dim as i32)).sqrt() * self.l2_coeff_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest zero-mode magnitude over the components.
    pub fn mean_magnitude(&self) -> f64 {
        (0..self.rank).map(|c| self.component(c)[0].norm()).fold(0.0, f64::max)
    }

    /// `max |ĉ(-m) - conj(ĉ(m))|`; zero for real-valued fields.
    pub fn hermitian_residue(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.rank {
            let comp = self.component(c);
            for idx in 0..self.lattice.len() {
                let neg = self.lattice.negated_index(idx);
                worst = worst.max((comp[neg] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    /// `max_k |k · û(k)|` for a vector field.
    pub fn divergence_residue(&self) -> f64 {
        let n = self.lattice.dim;
        assert_eq!(self.rank, n, "divergence of a non-vector field");
        (0..self.lattice.len())
            .map(|idx| {
                let k = self.lattice.wavevector(idx);
                (0..n)
                    .map(|c| self.component(c)[idx] * k[c])
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Same integer coefficients on another lattice; frequencies missing from
    /// the target are dropped. Used for zero padding and for rescaled boxes.
    pub fn resample(&self, target: &Arc<WavenumberLattice>) -> Result<Self> {
        if target.dim() != self.lattice.dim() {
            return Err(Error::LatticeMismatch);
        }
        let mut out = SpectralField::zeros(target, self.rank);
        let target_half = (target.modes() / 2) as i32;
        for idx in 0..self.lattice.len() {
            let m = self.lattice.integer(idx);
            if self.lattice.is_nyquist(idx) && target.modes() != self.lattice.modes() {
                continue;
            }
            if m.iter().any(|&v| v.abs() >= target_half && v != -target_half) {
                continue;
            }
            if let Some(t) = target.index_of(m) {
                for c in 0..self.rank {
                    out.component_mut(c)[t] = self.component(c)[idx];
                }
            }
        }
        Ok(out)
    }
}

/// Real samples of a field on the uniform `M^n` grid.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    rank: usize,
    values: Vec<f64>,
    lattice: Arc<WavenumberLattice>,
}

impl PhysicalField {
    pub fn from_values(lattice: &Arc<WavenumberLattice>, rank: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rank * lattice.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} values", rank * lattice.len()),
                actual: format!("{}", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("physical field has non-finite values".into()));
        }
        Ok(Self {
            rank,
            values,
            lattice: lattice.clone(),
        })
    }

    /// Samples `f(x, component)` at every grid point.
    pub fn from_fn(
        lattice: &Arc<WavenumberLattice>,
        rank: usize,
        f: impl Fn([f64; 3], usize) -> f64,
    ) -> Self {
        let len = lattice.len();
        let mut values = vec![0.0; rank * len];
        for c in 0..rank {
            for idx in 0..len {
                values[c * len + idx] = f(lattice.grid_point(idx), c);
            }
        }
        Self {
            rank,
            values,
            lattice: lattice.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lattice(&self) -> &Arc<WavenumberLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.lattice.len();
        &self.values[c * len..(c + 1) * len]
    }

    /// Sup norm over grid points and components.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

pub fn forward_transform(f: &PhysicalField) -> SpectralField {
    let lattice = &f.lattice;
    let len = lattice.len();
    let scale = 1.0 / len as f64;
    let mut coeffs: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for c in 0..f.rank {
        let comp = &mut coeffs[c * len..(c + 1) * len];
        lattice.transform(comp, false);
        comp.iter_mut().for_each(|v| *v *= scale);
    }
    SpectralField {
        rank: f.rank,
        coeffs,
        lattice: lattice.clone(),
    }
}

/// Inverse transform keeping the imaginary part; used to measure how far a
/// spectrum is from describing a real field.
pub fn inverse_transform_complex(g: &SpectralField) -> Vec<Complex64> {
    let len = g.lattice.len();
    let mut data = g.coeffs.clone();
    for c in 0..g.rank {
        g.lattice.transform(&mut data[c * len..(c + 1) * len], true);
    }
    data
}

pub fn inverse_transform(g: &SpectralField) -> PhysicalField {
    let values = inverse_transform_complex(g).into_iter().map(|c| c.re).collect();
    PhysicalField {
        rank: g.rank,
        values,
        lattice: g.lattice.clone(),
    }
}

/// Zeroes every coefficient outside the 2/3-rule mask.
pub fn dealias(g: &SpectralField) -> SpectralField {
    let mut out = g.clone();
    let lattice = g.lattice.clone();
    for c in 0..g.rank {
        for (idx, v) in out.component_mut(c).iter_mut().enumerate() {
            if !lattice.in_dealias(idx) {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
    out
}
