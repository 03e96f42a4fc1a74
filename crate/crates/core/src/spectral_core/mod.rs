//! Grids, representations, transforms, free transport, Littlewood-Paley
//! projectors, scaling operators and norms.

pub(crate) mod fft;
pub mod field;
pub mod grid;
pub mod norm;
pub mod projector;
pub mod propagator;
pub mod scaling;

pub use field::{transform, PhaseField, Repr};
pub use grid::{fft_index, make_grid, DomainKind, SpectralGrid};
pub use norm::{lp_spacetime_norm, norm, propagated_lp_norm, sobolev_norm, NormInput, NormKind, NormSpec};
pub use projector::{chi, lp_project, phi, DyadicLevel, ProjAxis, ProjMode};
pub use propagator::{propagate, trajectory};
pub use scaling::scale_xi;
