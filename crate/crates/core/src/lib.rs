//! Spectral and combinatorial toolkit for the Boltzmann equation.
//!
//! The crate is organised by concern:
//!
//! * [`spectral_core`] grids, phase-space fields, transforms, the free-transport
//!   propagator, Littlewood-Paley projectors, scaling and norms.
//! * [`collision`] gain and loss operators in velocity space and in the Fourier
//!   (Bobylev) form.
//! * [`estimates`] numerical harness for the Strichartz and bilinear estimates.
//! * [`hierarchy`] collapsing maps, Duhamel trees, board-game classes and
//!   expansion evaluators.
//! * [`solver`] split-step Boltzmann solver.
//! * [`cli`] configuration parsing and experiment runners.

pub mod cli;
pub mod collision;
pub mod error;
pub mod estimates;
pub mod hierarchy;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod spectral_core;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Version tag of the numerical conventions (transform normalisation, ordering,
/// kernel constants). Embedded in every report.
pub const CONVENTION_VERSION: &str = "boltzkit-conventions/1";
