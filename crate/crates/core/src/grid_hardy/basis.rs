use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{Grid, GridFunction};

/// φ_j(λ) = π^{-1/2} (λ - i)^j / (λ + i)^{j+1}.
pub fn mt_value(j: usize, lambda: f64) -> Complex64 {
    // (λ - i)/(λ + i) is unimodular; raise it through its argument
    let theta = (-1.0f64).atan2(lambda) - 1.0f64.atan2(lambda);
    Complex64::from_polar(1.0 / PI.sqrt(), j as f64 * theta) / Complex64::new(lambda, 1.0)
}

/// Malmquist-Takenaka function φ_j placed in component `component` of 𝒦.
pub fn mt_basis(j: usize, grid: Grid, dim_k: usize, component: usize) -> GridFunction {
    GridFunction::from_fn_in_component(grid, dim_k, component, |l| mt_value(j, l))
}

/// Largest index whose oscillation is still resolved on the grid
/// (φ_j varies on the scale 1/j near λ = 0; require Δ < π/(2j)).
pub fn max_resolved_index(grid: Grid) -> usize {
    (PI / (2.0 * grid.spacing())).floor() as usize
}
