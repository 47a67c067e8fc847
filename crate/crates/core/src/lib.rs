pub mod error;
pub mod kernel_lab;
pub mod norms;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod solver;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{AlphaRange, Parameters};
pub use spectral::{
    build_lattice, dealias, forward_transform, inverse_transform, PhysicalField, SpectralField,
    WavenumberLattice,
};
pub use kernel_lab::BoundCheckResult;
pub use norms::{CriticalNorms, EquivalenceReport, NormReport, NormSampling};
pub use operators::{QuadratureSpec, TimeGrid, TrajectoryField};
pub use report::{SampleRow, Verdict};
pub use solver::{PicardOptions, PicardTrace};
