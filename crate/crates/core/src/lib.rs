//! Supersymmetric quantum mechanics with conventional shape-invariant
//! superpotentials.
//!
//! The crate covers the analytic side (closed-form superpotentials, the
//! additive shape-invariance identity, discrete parameter maps, phase
//! classification and the resulting spectra) and two independent numerical
//! checks: the SWKB / BSWKB quantization integrals and a finite-difference
//! Schrödinger solver.
//!
//! ```
//! use susy_lab::{spectra, superpotentials};
//!
//! let osc = superpotentials::lookup("oscillator-3d").unwrap();
//! let e1 = spectra::broken_energy(&osc, 1).unwrap();
//! assert!((e1 - 9.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod error;
pub mod invariance;
pub mod numerics;
pub mod oracle;
pub mod quadrature;
pub mod spectra;
pub mod superpotentials;

pub use error::{Error, Result};
pub use invariance::{BswkbApplicability, DiscreteMap, Phase, PhaseReport};
pub use oracle::{GridSpec, OracleSpectrum};
pub use quadrature::{QuantizationReport, TurningPoints};
pub use spectra::{EnergyLevel, SpectrumResult};
pub use superpotentials::{
    catalog, ClassTag, DomainSpec, ParamRecord, Partner, SuperpotentialInstance,
};
