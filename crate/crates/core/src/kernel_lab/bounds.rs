//! Sup-ratio certification of kernel tables against named bounds.

use std::io::{self, Write};

use super::{eval_pi_phi, KernelKind, KernelQuadrature, KernelTable};
use crate::error::{Error, Result};
use crate::report::{write_samples, SampleRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `t / (t^{1/α} + r²)^{(n+2α)/2}`
    HeatDecay,
    /// `(t^{1/2α} + r)^{-n}`
    PiPhi,
    /// `(t^{1/2α} + r)^{-(n+k+1)}`
    PiGradient,
    /// `k^{k/2α} t^{-k/2α} ((t/k)^{1/2α} + r)^{-(n+1)}`
    PreciseGrowth,
}

/// A bound with its constant set to one; `exponent_shift > 0` lowers the
/// decay power, giving a weaker bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub kind: BoundKind,
    pub exponent_shift: f64,
}

impl Bound {
    pub fn new(kind: BoundKind) -> Self {
        Self { kind, exponent_shift: 0.0 }
    }

    pub fn weakened(self, shift: f64) -> Self {
        Self {
            exponent_shift: self.exponent_shift + shift,
            ..self
        }
    }

    pub fn name(&self) -> String {
        let base = match self.kind {
            BoundKind::HeatDecay => "heat_decay",
            BoundKind::PiPhi => "pi_phi_decay",
            BoundKind::PiGradient => "pi_gradient_decay",
            BoundKind::PreciseGrowth => "precise_k_growth",
        };
        if self.exponent_shift == 0.0 {
            base.to_string()
        } else {
            format!("{base}_shift{}", self.exponent_shift)
        }
    }

    pub fn value(&self, alpha: f64, n: usize, t: f64, r: f64, k: usize) -> f64 {
        let nf = n as f64;
        let a2 = 2.0 * alpha;
        let s = self.exponent_shift;
        match self.kind {
            BoundKind::HeatDecay => t * (t.powf(1.0 / alpha) + r * r).powf(-((nf + a2) / 2.0 - s)),
            BoundKind::PiPhi => (t.powf(1.0 / a2) + r).powf(-(nf - s)),
            BoundKind::PiGradient => (t.powf(1.0 / a2) + r).powf(-(nf + k as f64 + 1.0 - s)),
            BoundKind::PreciseGrowth => {
                let kf = k.max(1) as f64;
                kf.powf(kf / a2) * t.powf(-kf / a2) * ((t / kf).powf(1.0 / a2) + r).powf(-(nf + 1.0 - s))
            }
        }
    }
}

/// Outcome of a sup-ratio certification.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckResult {
    pub bound_name: String,
    pub sup_ratio: f64,
    /// `(r, t, k)` of the largest ratio.
    pub argmax: (f64, f64, usize),
    pub samples: usize,
    pub refined_sup_ratio: Option<f64>,
    pub pass: bool,
    pub rows: Vec<SampleRow>,
}

impl BoundCheckResult {
    pub fn from_rows(bound_name: impl Into<String>, rows: Vec<SampleRow>) -> Self {
        let mut sup = 0.0;
        let mut argmax = (0.0, 0.0, 0);
        let mut finite = true;
        for row in &rows {
            if !row.ratio.is_finite() {
                finite = false;
            } else if row.ratio > sup {
                sup = row.ratio;
                argmax = (row.r, row.t, row.k);
            }
        }
        Self {
            bound_name: bound_name.into(),
            sup_ratio: if finite { sup } else { f64::INFINITY },
            argmax,
            samples: rows.len(),
            refined_sup_ratio: None,
            pass: finite && !rows.is_empty(),
            rows,
        }
    }

    /// Relative change of the sup ratio under refinement.
    pub fn drift(&self) -> Option<f64> {
        let refined = self.refined_sup_ratio?;
        if self.sup_ratio == 0.0 && refined == 0.0 {
            return Some(0.0);
        }
        Some((refined - self.sup_ratio).abs() / self.sup_ratio.abs().max(refined.abs()))
    }

    /// Records the refined run; passes iff both are finite and the drift is
    /// below `tolerance`.
    pub fn with_refinement(mut self, refined: &BoundCheckResult, tolerance: f64) -> Self {
        self.refined_sup_ratio = Some(refined.sup_ratio);
        let drift = self.drift().unwrap_or(f64::INFINITY);
        self.pass = self.pass && refined.pass && drift < tolerance;
        self
    }

    pub fn write_csv(&self, w: impl Write) -> io::Result<()> {
        write_samples(w, &self.rows)
    }
}

/// `sup |value| / bound` over every sample of the tables.
pub fn check_bound(tables: &[KernelTable], bound: Bound) -> BoundCheckResult {
    let mut rows = Vec::new();
    for table in tables {
        let k = table.kind.order();
        for (&r, &v) in table.radii.iter().zip(&table.values) {
            let b = bound.value(table.alpha, table.dim, table.t, r, k);
            rows.push(SampleRow {
                alpha: table.alpha,
                n: table.dim,
                t: table.t,
                r,
                k,
                value: v,
                bound_value: b,
                ratio: v.abs() / b,
            });
        }
    }
    BoundCheckResult::from_rows(bound.name(), rows)
}

/// Per-order constants of the precise growth bound in two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrowthReport {
    pub alpha: f64,
    /// `(k, sup ratio, Ĉ_k = sup ratio^{1/k})`
    pub per_order: Vec<(usize, f64, f64)>,
    /// `max Ĉ_k / min Ĉ_k`
    pub spread: f64,
    pub pass: bool,
    pub rows: Vec<SampleRow>,
}

/// Fits `Ĉ_k` for `k = 1..=k_max` at `t = 1`; passes iff the spread is at
/// most `max_spread`.
pub fn k_growth(alpha: f64, radii: &[f64], k_max: usize, max_spread: f64, quad: &KernelQuadrature) -> Result<KGrowthReport> {
    if k_max == 0 || k_max > 8 {
        return Err(Error::Precondition(format!("k_max = {k_max} must lie in 1..=8")));
    }
    let mut per_order = Vec::new();
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let table = eval_pi_phi(alpha, 2, 1.0, radii, Some(k), quad)?;
        debug_assert_eq!(table.kind, KernelKind::PiGradient { order: k });
        let res = check_bound(&[table], Bound::new(BoundKind::PreciseGrowth));
        per_order.push((k, res.sup_ratio, res.sup_ratio.powf(1.0 / k as f64)));
        rows.extend(res.rows);
    }
    let max = per_order.iter().map(|p| p.2).fold(0.0, f64::max);
    let min = per_order.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let spread = max / min;
    Ok(KGrowthReport {
        alpha,
        per_order,
        spread,
        pass: spread.is_finite() && spread <= max_spread,
        rows,
    })
}
