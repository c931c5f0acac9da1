//! The semigroups T₊(t) = e^{itλ} and C₊(t) = Q₊ e^{-itλ} on H²₊, the
//! generator's offset vector, and the polar isometry onto L²(ℝ₊, 𝒦).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid_hardy::{
    inner, max_resolved_index, mt_basis, project_hardy, Grid, GridFunction, KVector, Sign,
};
use crate::linalg::{orthonormalize, sample_matrix, Cutoff};

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time {t} must be finite and non-negative"
        )))
    }
}

/// T₊(t)f = e^{itλ} f.
pub fn apply_t(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    Ok(f.mul_fn(|l| Complex64::from_polar(1.0, t * l)))
}

/// C₊(t)f = Q₊(e^{-itλ} f). C₊(0) is the identity of H²₊, and f is
/// returned unchanged there instead of being re-projected.
pub fn apply_c(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(project_hardy(
        &f.mul_fn(|l| Complex64::from_polar(1.0, -t * l)),
        Sign::Plus,
    ))
}

#[derive(Clone, Debug)]
pub struct GeneratorSample {
    pub input: GridFunction,
    pub offset: KVector,
    /// g(λ) = λ f(λ) + k₀
    pub image: GridFunction,
    /// ‖Q₋g‖ / ‖g‖
    pub residual: f64,
}

pub const GENERATOR_RESIDUAL_TOL: f64 = 1e-2;

/// Finds the k₀ ∈ 𝒦 that makes λf + k₀ square integrable and analytic in
/// ℂ₊, i.e. minimizes ‖Q₋(λf + k₀)‖ componentwise.
///
/// The constant is represented by its grid samples. On the grid its inverse
/// transform is a single spike at x = 0, so Q₋ maps it to itself and the
/// minimization is a one-dimensional least-squares problem per component.
pub fn generator_offset(f: &GridFunction) -> Result<GeneratorSample> {
    generator_offset_with_tol(f, GENERATOR_RESIDUAL_TOL)
}

pub fn generator_offset_with_tol(f: &GridFunction, tol: f64) -> Result<GeneratorSample> {
    let grid = f.grid();
    let lf = f.mul_fn(|l| Complex64::new(l, 0.0));
    let q = project_hardy(&lf, Sign::Minus);
    let extent = 2.0 * grid.half_extent();
    let mut offset = KVector::zeros(f.dim_k());
    for c in 0..f.dim_k() {
        let s: Complex64 = q.component(c).iter().sum::<Complex64>() * grid.spacing();
        offset[c] = -s / extent;
    }
    let mut image = lf;
    image.add_constant(&offset);
    let norm = image.norm();
    let residual = if norm > 0.0 {
        project_hardy(&image, Sign::Minus).norm() / norm
    } else {
        0.0
    };
    if residual > tol {
        return Err(Error::NoConvergence(format!(
            "generator offset residual {residual:.3e} exceeds {tol:.3e}; f is not in the generator domain at this resolution"
        )));
    }
    Ok(GeneratorSample {
        input: f.clone(),
        offset,
        image,
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryDiagnostics {
    pub retained: Vec<f64>,
    pub discarded: usize,
    pub cutoff: f64,
}

/// Finite section of sgn(P₊Q₊) on span{φ_0, …, φ_{r-1}} ⊗ 𝒦.
///
/// forward = R, adjoint = R*. Functions are stored on the λ grid; the
/// half line is λ ≥ 0.
#[derive(Clone, Debug)]
pub struct IsometryPair {
    grid: Grid,
    dim_k: usize,
    /// orthonormal Hardy frame, Δ-weighted samples as columns
    frame: DMatrix<Complex64>,
    /// left singular vectors restricted to the half-line rows
    u: DMatrix<Complex64>,
    /// right singular vectors in frame coordinates
    v: DMatrix<Complex64>,
    pub diagnostics: IsometryDiagnostics,
}

pub const ISOMETRY_CUTOFF: f64 = 1e-8;

pub fn build_polar_isometry(grid: Grid, dim_k: usize, rank_budget: usize) -> Result<IsometryPair> {
    build_polar_isometry_with_cutoff(grid, dim_k, rank_budget, ISOMETRY_CUTOFF)
}

/// As [`build_polar_isometry`] with an explicit relative singular-value cutoff.
pub fn build_polar_isometry_with_cutoff(
    grid: Grid,
    dim_k: usize,
    rank_budget: usize,
    rel_cutoff: f64,
) -> Result<IsometryPair> {
    if rank_budget == 0 || dim_k == 0 {
        return Err(Error::InvalidArgument(
            "rank budget and dim_k must be positive".into(),
        ));
    }
    if rank_budget > max_resolved_index(grid) + 1 {
        return Err(Error::InvalidArgument(format!(
            "rank budget {rank_budget} exceeds the {} basis functions resolved by the grid",
            max_resolved_index(grid) + 1
        )));
    }
    let mut funcs = Vec::with_capacity(rank_budget * dim_k);
    for c in 0..dim_k {
        for j in 0..rank_budget {
            funcs.push(mt_basis(j, grid, dim_k, c));
        }
    }
    let ortho = orthonormalize(&funcs, Cutoff::Relative(1e-10))?;
    let frame = sample_matrix(&ortho.basis)?;

    let n = grid.n_points();
    let half = n - grid.origin();
    let rows: Vec<usize> = (0..dim_k)
        .flat_map(|c| (grid.origin()..n).map(move |j| c * n + j))
        .collect();
    let b = DMatrix::<Complex64>::from_fn(rows.len(), frame.ncols(), |i, j| frame[(rows[i], j)]);
    debug_assert_eq!(rows.len(), half * dim_k);

    let qr = b.qr();
    let svd = qr.r().svd(true, true);
    let ur = svd.u.as_ref().expect("requested U");
    let v = svd.v_t.as_ref().expect("requested V").adjoint();
    let sigma = &svd.singular_values;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let level = rel_cutoff * smax;
    let kept: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > level).collect();
    if kept.is_empty() {
        return Err(Error::RankCollapse(
            "P₊Q₊ has no singular value above the cutoff".into(),
        ));
    }
    let q = qr.q();
    let u_full = &q * ur;
    let u = u_full.select_columns(&kept);
    let v = v.select_columns(&kept);
    let mut retained: Vec<f64> = kept.iter().map(|&i| sigma[i]).collect();
    retained.sort_by(|a, b| b.total_cmp(a));

    Ok(IsometryPair {
        grid,
        dim_k,
        frame,
        u,
        v,
        diagnostics: IsometryDiagnostics {
            retained,
            discarded: sigma.len() - kept.len(),
            cutoff: level,
        },
    })
}

impl IsometryPair {
    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// The i-th retained right singular direction, an element of the
    /// initial space on which R is isometric.
    pub fn initial_direction(&self, i: usize) -> GridFunction {
        let col = &self.frame * self.v.column(i);
        self.unweighted(&col)
    }

    fn weighted(&self, f: &GridFunction) -> Result<DVector<Complex64>> {
        if f.grid() != self.grid || f.dim_k() != self.dim_k {
            return Err(Error::GridMismatch);
        }
        let w = self.grid.spacing().sqrt();
        Ok(DVector::from_iterator(
            f.raw().len(),
            f.raw().iter().map(|v| v * w),
        ))
    }

    fn unweighted(&self, data: &DVector<Complex64>) -> GridFunction {
        let mut out = GridFunction::zeros(self.grid, self.dim_k);
        let w = 1.0 / self.grid.spacing().sqrt();
        for (dst, v) in out.raw_mut().iter_mut().zip(data.iter()) {
            *dst = v * w;
        }
        out
    }

    fn half_rows(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.grid.n_points();
        let o = self.grid.origin();
        (0..self.dim_k).flat_map(move |c| (o..n).map(move |j| c * n + j))
    }

    /// R: Hardy function → half-line function.
    pub fn forward(&self, f: &GridFunction) -> Result<GridFunction> {
        let x = self.weighted(f)?;
        let a = self.frame.ad_mul(&x);
        let y = &self.u * self.v.ad_mul(&a);
        let mut full = DVector::<Complex64>::zeros(x.len());
        for (i, r) in self.half_rows().enumerate() {
            full[r] = y[i];
        }
        Ok(self.unweighted(&full))
    }

    /// R*: half-line function → Hardy function.
    pub fn adjoint(&self, g: &GridFunction) -> Result<GridFunction> {
        let x = self.weighted(g)?;
        let half = DVector::from_iterator(self.u.nrows(), self.half_rows().map(|r| x[r]));
        let b = &self.v * self.u.ad_mul(&half);
        Ok(self.unweighted(&(&self.frame * b)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    T,
    C,
}

/// R ∘ (T₊(t) or C₊(t)) ∘ R*.
pub fn transfer_apply(
    iso: &IsometryPair,
    f: &GridFunction,
    t: f64,
    which: Which,
) -> Result<GridFunction> {
    let h = iso.adjoint(f)?;
    let evolved = match which {
        Which::T => apply_t(&h, t)?,
        Which::C => apply_c(&h, t)?,
    };
    iso.forward(&evolved)
}

/// ⟨f, e^{-itλ} f⟩ restricted to λ ≥ 0: the free evolution e^{-itM₊} on a
/// half-line representative.
pub fn half_line_overlap(f: &GridFunction, t: f64) -> Result<Complex64> {
    check_time(t)?;
    let evolved = f.mul_fn(|l| {
        if l >= 0.0 {
            Complex64::from_polar(1.0, -t * l)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    inner(f, &evolved)
}
