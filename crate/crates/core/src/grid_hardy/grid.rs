use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value in the coefficient space 𝒦 (one entry per component).
pub type KVector = DVector<Complex64>;

/// Uniform grid on [-L, L) with a power-of-two number of points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n_points: usize,
    half_extent: f64,
}

pub fn make_grid(n_points: usize, half_extent: f64) -> Result<Grid> {
    Grid::new(n_points, half_extent)
}

impl Grid {
    pub fn new(n_points: usize, half_extent: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be a power of two >= 2"
            )));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half extent {half_extent} must be positive and finite"
            )));
        }
        Ok(Self {
            n_points,
            half_extent,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n_points as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    /// Index of the sample at x = 0.
    pub fn origin(&self) -> usize {
        self.n_points / 2
    }

    /// Conjugate grid under the Fourier transform: same point count,
    /// half extent π/Δ. Taking the dual twice returns the original grid.
    pub fn dual(&self) -> Grid {
        Grid {
            n_points: self.n_points,
            half_extent: PI / self.spacing(),
        }
    }
}

/// 𝒦-valued samples on a grid. Stored component-major: component `c`
/// occupies `data[c * n .. (c + 1) * n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    dim_k: usize,
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid, dim_k: usize) -> Self {
        assert!(dim_k > 0, "dim_k must be positive");
        Self {
            grid,
            dim_k,
            data: vec![Complex64::new(0.0, 0.0); grid.n_points() * dim_k],
        }
    }

    pub fn from_components(grid: Grid, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("no components".into()));
        }
        let n = grid.n_points();
        if components.iter().any(|c| c.len() != n) {
            return Err(Error::GridMismatch);
        }
        let dim_k = components.len();
        Ok(Self {
            grid,
            dim_k,
            data: components.into_iter().flatten().collect(),
        })
    }

    /// Scalar function sampled at the grid points.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            dim_k: 1,
            data: grid.points().map(f).collect(),
        }
    }

    /// Scalar profile `f` placed in one component of an m-dimensional 𝒦.
    pub fn from_fn_in_component(
        grid: Grid,
        dim_k: usize,
        component: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Self {
        assert!(component < dim_k, "component out of range");
        let mut out = Self::zeros(grid, dim_k);
        for (j, v) in out.component_mut(component).iter_mut().enumerate() {
            *v = f(grid.point(j));
        }
        out
    }

    /// The profile `f(λ)·k` for a fixed vector k ∈ 𝒦.
    pub fn from_profile(grid: Grid, k: &KVector, f: impl Fn(f64) -> Complex64) -> Self {
        let profile: Vec<Complex64> = grid.points().map(f).collect();
        let comps = k
            .iter()
            .map(|kc| profile.iter().map(|p| p * kc).collect())
            .collect();
        Self::from_components(grid, comps).expect("consistent shapes")
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn len(&self) -> usize {
        self.grid.n_points()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn sample(&self, j: usize) -> KVector {
        KVector::from_iterator(self.dim_k, (0..self.dim_k).map(|c| self.component(c)[j]))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.grid == other.grid && self.dim_k == other.dim_k
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.spacing() * self.data.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiply every component by a scalar function of the grid variable.
    pub fn mul_fn(&self, f: impl Fn(f64) -> Complex64) -> Self {
        let weights: Vec<Complex64> = self.grid.points().map(f).collect();
        let mut out = self.clone();
        for c in 0..self.dim_k {
            for (v, w) in out.component_mut(c).iter_mut().zip(&weights) {
                *v *= w;
            }
        }
        out
    }

    /// Pointwise action of a matrix-valued function, (Af)(λ) = A(λ) f(λ).
    pub fn apply_matrix_fn(&self, f: impl Fn(f64) -> Result<DMatrix<Complex64>>) -> Result<Self> {
        let m = self.dim_k;
        let mut out = Self::zeros(self.grid, m);
        for j in 0..self.len() {
            let a = f(self.grid.point(j))?;
            if a.nrows() != m || a.ncols() != m {
                return Err(Error::GridMismatch);
            }
            let v = a * self.sample(j);
            for c in 0..m {
                out.component_mut(c)[j] = v[c];
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// self += a·x
    pub fn axpy(&mut self, a: Complex64, x: &Self) {
        assert!(self.same_shape(x), "shape mismatch in axpy");
        for (v, w) in self.data.iter_mut().zip(&x.data) {
            *v += a * w;
        }
    }

    /// Add the constant vector k at every grid point.
    pub fn add_constant(&mut self, k: &KVector) {
        for c in 0..self.dim_k {
            let kc = k[c];
            self.component_mut(c).iter_mut().for_each(|v| *v += kc);
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        inner(self, other)
    }
}

/// L² inner product Δ·Σ⟨f_j, g_j⟩, antilinear in the first argument.
pub fn inner(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if !f.same_shape(g) {
        return Err(Error::GridMismatch);
    }
    let s: Complex64 = f.data.iter().zip(&g.data).map(|(a, b)| a.conj() * b).sum();
    Ok(s * f.grid.spacing())
}

impl Add<&GridFunction> for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub<&GridFunction> for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: Complex64) -> GridFunction {
        self.scaled(rhs)
    }
}

/// Relative L² distance ‖a − b‖/‖b‖.
pub fn rel_error(a: &GridFunction, b: &GridFunction) -> f64 {
    (a - b).norm() / b.norm()
}
