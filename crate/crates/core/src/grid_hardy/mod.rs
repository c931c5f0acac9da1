//! Discretized real line, Fourier transform, half-line and Hardy
//! projections, Cauchy evaluation and the rational basis of H²₊.

mod basis;
mod cauchy;
mod fourier;
mod grid;
mod projector;

pub use basis::{max_resolved_index, mt_basis, mt_value};
pub use cauchy::cauchy_eval;
pub use fourier::{fourier, Direction};
pub use grid::{inner, make_grid, rel_error, Grid, GridFunction, KVector};
pub use projector::{project_half_line, project_hardy, project_hardy_uncorrected, Sign};
