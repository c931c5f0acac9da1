//! Decay semigroups and resonances of scattering matrices on a discretized
//! Hardy space.
//!
//! The modules build on each other from the bottom up: [`grid_hardy`] is
//! the numerical substrate, [`semigroup_engine`] realizes the semigroups on
//! H²₊, [`smatrix_models`] supplies scattering matrices, [`resonance_finder`]
//! locates their poles and [`decay_subspace`] assembles the invariant
//! subspace on which the characteristic semigroup decays.

pub mod decay_subspace;
pub mod error;
pub mod grid_hardy;
pub mod linalg;
pub mod resonance_finder;
pub mod semigroup_engine;
pub mod smatrix_models;

pub use error::{Error, Result};
pub use grid_hardy::{Grid, GridFunction, KVector, Sign};
pub use num_complex::Complex64;
pub use resonance_finder::{PoleKind, Resonance, ScanRegion};
pub use smatrix_models::{SMatrixModel, Sheet, Side};
