//! Exact spectral analysis of Schrödinger densities on flat tori.
//!
//! States are finite trigonometric polynomials, so the flow acts by exact
//! phases and every space-time Fourier coefficient of `|e^{itΔ}u|^2` is a
//! finite sum. The crate provides:
//!
//! - [`lattice`]: exact integer geometry of the discrete paraboloid —
//!   chords, origin hyperplanes, affine rank, submodules, resonance order;
//! - [`state`]: Fourier states, evolution, grids, and the coefficient
//!   tables computed by two independent routes;
//! - [`density`]: density-matrix kernels, their conjugation dynamics,
//!   trace densities and eigendecomposition;
//! - [`estimates`]: the quantitative bounds as executable checks;
//! - [`experiments`]: oscillating-sequence generators and windowed
//!   coefficient trend reports.

pub mod density;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod lattice;
pub mod state;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use estimates::{BoundReport, EigenfunctionReport, ParsevalCheck};
pub use experiments::{
    AmplitudeRule, HRule, LocalizationReport, SequenceKind, SequenceSpec, TrendReport,
};
pub use lattice::{affine_rank, resonance_order, Chord, Frequency, Submodule};
pub use state::{CoefficientTable, FourierState, OscillationProfile};
