//! Physical and numerical configuration shared by every module.

use crate::error::{invalid, Result};

/// Which consumer is validating the parameters; the admissible range of the
/// dissipation exponent differs between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaRange {
    /// Open interval (1/2, 1): solver and norms.
    Dynamics,
    /// Closed interval [1/2, 1]: kernel evaluations, which admit the
    /// Poisson and Gaussian calibration endpoints.
    Kernel,
}

impl AlphaRange {
    pub fn contains(self, alpha: f64) -> bool {
        match self {
            AlphaRange::Dynamics => alpha > 0.5 && alpha < 1.0,
            AlphaRange::Kernel => (0.5..=1.0).contains(&alpha),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            AlphaRange::Dynamics => "(0.5, 1.0)",
            AlphaRange::Kernel => "[0.5, 1.0]",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    /// Dissipation exponent of `(-Δ)^alpha`.
    pub alpha: f64,
    /// Ambient dimension, 1 to 3.
    pub dim: usize,
    /// Grid points per axis; a power of two, at least 8.
    pub modes_per_axis: usize,
    /// Side length of the periodic box.
    pub period: f64,
    pub dealias_fraction: f64,
    pub tol_spectral: f64,
}

impl Parameters {
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;
    pub const DEFAULT_TOL: f64 = 1e-12;

    pub fn new(alpha: f64, dim: usize, modes_per_axis: usize, period: f64) -> Self {
        Self {
            alpha,
            dim,
            modes_per_axis,
            period,
            dealias_fraction: Self::DEFAULT_DEALIAS,
            tol_spectral: Self::DEFAULT_TOL,
        }
    }

    pub fn with_dealias(mut self, fraction: f64) -> Self {
        self.dealias_fraction = fraction;
        self
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = period;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Checks the grid-related invariants only.
    pub fn validate_grid(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(invalid("dim", format!("{} is not in {{1, 2, 3}}", self.dim)));
        }
        let m = self.modes_per_axis;
        if m < 8 || !m.is_power_of_two() {
            return Err(invalid(
                "modes_per_axis",
                format!("{m} must be a power of two and at least 8"),
            ));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(invalid("period", format!("{} must be positive", self.period)));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(invalid(
                "dealias_fraction",
                format!("{} must lie in (0, 1]", self.dealias_fraction),
            ));
        }
        if !(self.tol_spectral > 0.0) {
            return Err(invalid("tol_spectral", "must be positive"));
        }
        Ok(())
    }

    pub fn validate(&self, range: AlphaRange) -> Result<()> {
        validate_alpha(self.alpha, range)?;
        self.validate_grid()
    }

    /// Grid spacing `L / M`.
    pub fn spacing(&self) -> f64 {
        self.period / self.modes_per_axis as f64
    }

    /// Exponent `1 - 1/(2 alpha)` of the GX weight.
    pub fn gx_exponent(&self) -> f64 {
        gx_exponent(self.alpha)
    }
}

pub fn validate_alpha(alpha: f64, range: AlphaRange) -> Result<()> {
    if range.contains(alpha) {
        Ok(())
    } else {
        Err(invalid(
            "alpha",
            format!("{alpha} is outside the admissible interval {}", range.describe()),
        ))
    }
}

pub fn gx_exponent(alpha: f64) -> f64 {
    1.0 - 1.0 / (2.0 * alpha)
}

/// Time weight exponent of the `GX^k` norm: `(1 - 1/2α) + k/2α`.
pub fn gxk_exponent(alpha: f64, k: usize) -> f64 {
    gx_exponent(alpha) + k as f64 / (2.0 * alpha)
}

/// Time weight exponent of the GY norm: `2 - 1/α`.
pub fn gy_exponent(alpha: f64) -> f64 {
    2.0 - 1.0 / alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        let p = Parameters::new(0.75, 2, 12, 1.0);
        assert!(p.validate(AlphaRange::Dynamics).is_err());
        let p = Parameters::new(0.75, 4, 16, 1.0);
        assert!(p.validate(AlphaRange::Dynamics).is_err());
        let p = Parameters::new(0.75, 2, 4, 1.0);
        assert!(p.validate(AlphaRange::Dynamics).is_err());
    }

    #[test]
    fn alpha_ranges() {
        assert!(validate_alpha(0.5, AlphaRange::Kernel).is_ok());
        assert!(validate_alpha(1.0, AlphaRange::Kernel).is_ok());
        assert!(validate_alpha(0.5, AlphaRange::Dynamics).is_err());
        let err = validate_alpha(1.2, AlphaRange::Dynamics).unwrap_err();
        assert!(err.to_string().contains("(0.5, 1.0)"));
    }

    #[test]
    fn exponents() {
        assert!((gx_exponent(0.75) - 1.0 / 3.0).abs() < 1e-15);
        assert!((gxk_exponent(0.75, 1) - 1.0).abs() < 1e-15);
        assert!((gxk_exponent(0.75, 2) - 5.0 / 3.0).abs() < 1e-15);
        assert!((gy_exponent(0.75) - 2.0 / 3.0).abs() < 1e-15);
    }
}
