//! Dense helpers shared by the subspace and isometry code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_hardy::{inner, Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// Keep singular values above this fraction of the largest one.
    Relative(f64),
    /// Keep singular values above this absolute level.
    Absolute(f64),
}

#[derive(Clone, Debug)]
pub struct Orthonormalized {
    pub basis: Vec<GridFunction>,
    /// Full singular spectrum of the input family, descending.
    pub singular_values: Vec<f64>,
    /// basis[i] = Σ_j coefficients[(j, i)] · input[j]
    pub coefficients: DMatrix<Complex64>,
}

/// Stack the Δ-weighted samples as columns, so the Euclidean structure of
/// the matrix is the L² structure of the grid functions.
pub fn sample_matrix(funcs: &[GridFunction]) -> Result<DMatrix<Complex64>> {
    let first = funcs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    if funcs.iter().any(|f| !f.same_shape(first)) {
        return Err(Error::GridMismatch);
    }
    let rows = first.raw().len();
    let w = first.grid().spacing().sqrt();
    let mut a = DMatrix::<Complex64>::zeros(rows, funcs.len());
    for (j, f) in funcs.iter().enumerate() {
        for (i, v) in f.raw().iter().enumerate() {
            a[(i, j)] = v * w;
        }
    }
    Ok(a)
}

fn column_function(template: &GridFunction, col: &[Complex64]) -> GridFunction {
    let mut out = GridFunction::zeros(template.grid(), template.dim_k());
    let w = 1.0 / template.grid().spacing().sqrt();
    for (dst, v) in out.raw_mut().iter_mut().zip(col) {
        *dst = v * w;
    }
    out
}

/// Rank-revealing orthonormalization: Householder QR followed by an SVD of
/// the small triangular factor.
pub fn orthonormalize(funcs: &[GridFunction], cutoff: Cutoff) -> Result<Orthonormalized> {
    let a = sample_matrix(funcs)?;
    let k = funcs.len();
    if a.nrows() < k {
        return Err(Error::InvalidArgument(
            "more functions than grid samples".into(),
        ));
    }
    let qr = a.qr();
    let q = qr.q();
    let r = qr.r();
    let svd = r.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v = svd.v_t.as_ref().expect("requested V").adjoint();
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let level = match cutoff {
        Cutoff::Relative(r) => r * smax,
        Cutoff::Absolute(a) => a,
    };
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| sigma[i] > level)
        .collect();

    let qu = &q * u;
    let mut basis = Vec::with_capacity(kept.len());
    let mut coefficients = DMatrix::<Complex64>::zeros(k, kept.len());
    for (col, &i) in kept.iter().enumerate() {
        let c: Vec<Complex64> = qu.column(i).iter().copied().collect();
        basis.push(column_function(&funcs[0], &c));
        for j in 0..k {
            coefficients[(j, col)] = v[(j, i)] / sigma[i];
        }
    }
    let singular_values = order.iter().map(|&i| sigma[i]).collect();
    Ok(Orthonormalized {
        basis,
        singular_values,
        coefficients,
    })
}

pub fn gram(funcs: &[GridFunction]) -> Result<DMatrix<Complex64>> {
    let k = funcs.len();
    let mut g = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = inner(&funcs[i], &funcs[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Coefficients ⟨b_i, f⟩ against an orthonormal family.
pub fn coefficients(basis: &[GridFunction], f: &GridFunction) -> Result<DVector<Complex64>> {
    let mut c = DVector::<Complex64>::zeros(basis.len());
    for (i, b) in basis.iter().enumerate() {
        c[i] = inner(b, f)?;
    }
    Ok(c)
}

/// Σ c_i b_i
pub fn combine(basis: &[GridFunction], c: &[Complex64]) -> Result<GridFunction> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
    let mut out = GridFunction::zeros(first.grid(), first.dim_k());
    for (b, ci) in basis.iter().zip(c) {
        out.axpy(*ci, b);
    }
    Ok(out)
}

/// Orthogonal projection onto the span of an orthonormal family.
pub fn project_onto(basis: &[GridFunction], f: &GridFunction) -> Result<GridFunction> {
    if basis.is_empty() {
        return Ok(GridFunction::zeros(f.grid(), f.dim_k()));
    }
    let c = coefficients(basis, f)?;
    combine(basis, c.as_slice())
}

/// Largest principal angle (radians) between span(a) and span(b), both
/// orthonormal, measured from the smaller family into the larger.
pub fn subspace_angle(a: &[GridFunction], b: &[GridFunction]) -> Result<f64> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return Ok(0.0);
    }
    let mut m = DMatrix::<Complex64>::zeros(large.len(), small.len());
    for (j, s) in small.iter().enumerate() {
        for (i, l) in large.iter().enumerate() {
            m[(i, j)] = inner(l, s)?;
        }
    }
    let sv = m.singular_values();
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min).min(1.0);
    Ok(smin.acos())
}

// Tail-corrected L² structure.
//
// The grid sum stops at ±L, which costs O(1/L) relative accuracy on 1/λ
// tails. Each function is augmented by four coordinates per component:
// λf ≈ c₁ + c₂/λ is fitted at each end (end sample and half-extent sample)
// and the exact moments ∫_a^∞ of the fitted tails enter through the
// Cholesky factor of [[1/a, 1/2a²], [1/2a², 1/3a³]]. The Euclidean product
// of augmented vectors is then the grid sum plus both tail integrals.

const TAIL_ROWS: usize = 4;

fn tail_fit(la: f64, fa: Complex64, lb: f64, fb: Complex64) -> (Complex64, Complex64) {
    let (ya, yb) = (fa * la, fb * lb);
    let c2 = (ya - yb) / (1.0 / la - 1.0 / lb);
    (ya - c2 / la, c2)
}

fn tail_coords(a: f64, c1: Complex64, c2: Complex64) -> [Complex64; 2] {
    let r11 = 1.0 / a.sqrt();
    let r12 = 0.5 / a.powf(1.5);
    let r22 = 1.0 / (a.powf(1.5) * 12f64.sqrt());
    [c1 * r11 + c2 * r12, c2 * r22]
}

pub fn augmented_len(f: &GridFunction) -> usize {
    f.dim_k() * (f.grid().n_points() + TAIL_ROWS)
}

/// Augmented coordinates of f; see the note above.
pub fn augment(f: &GridFunction) -> Vec<Complex64> {
    let grid = f.grid();
    let n = grid.n_points();
    let d = grid.spacing();
    let w = d.sqrt();
    let (right, left) = (grid.half_extent() - 0.5 * d, grid.half_extent() + 0.5 * d);
    let mut out = Vec::with_capacity(augmented_len(f));
    for c in 0..f.dim_k() {
        let v = f.component(c);
        out.extend(v.iter().map(|x| x * w));
        let (c1, c2) = tail_fit(
            grid.point(n - 1),
            v[n - 1],
            grid.point(3 * n / 4),
            v[3 * n / 4],
        );
        out.extend(tail_coords(right, c1, c2));
        // λ = -u on the left: c₁/λ + c₂/λ² = -c₁/u + c₂/u²
        let (c1, c2) = tail_fit(grid.point(0), v[0], grid.point(n / 4), v[n / 4]);
        out.extend(tail_coords(left, -c1, c2));
    }
    out
}

/// Inverse of [`augment`] on its range: the sample part, unweighted.
pub fn from_augmented(grid: Grid, dim_k: usize, col: &[Complex64]) -> GridFunction {
    let n = grid.n_points();
    let w = 1.0 / grid.spacing().sqrt();
    let comps = (0..dim_k)
        .map(|c| {
            let start = c * (n + TAIL_ROWS);
            col[start..start + n].iter().map(|x| x * w).collect()
        })
        .collect();
    GridFunction::from_components(grid, comps).expect("consistent shapes")
}

pub fn augmented_matrix(funcs: &[GridFunction]) -> Result<DMatrix<Complex64>> {
    let first = funcs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    if funcs.iter().any(|f| !f.same_shape(first)) {
        return Err(Error::GridMismatch);
    }
    let rows = augmented_len(first);
    let mut a = DMatrix::<Complex64>::zeros(rows, funcs.len());
    for (j, f) in funcs.iter().enumerate() {
        a.set_column(j, &DVector::from_vec(augment(f)));
    }
    Ok(a)
}

/// Tail-corrected L² inner product, antilinear in f.
pub fn tail_inner(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if !f.same_shape(g) {
        return Err(Error::GridMismatch);
    }
    Ok(augment(f)
        .iter()
        .zip(augment(g))
        .map(|(a, b)| a.conj() * b)
        .sum())
}

fn split(a: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

fn join(re: DMatrix<f64>, im: DMatrix<f64>) -> DMatrix<Complex64> {
    re.zip_map(&im, Complex64::new)
}

/// A* B through real products, which go to the blocked f64 kernel.
pub fn adjoint_mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    // explicit transposes: tr_mul does not use the blocked kernel
    let (art, ait) = (ar.transpose(), ai.transpose());
    let re = &art * &br + &ait * &bi;
    let im = &art * &bi - &ait * &br;
    join(re, im)
}

/// A B through real products.
pub fn mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(re, im)
}

/// Columns of `a` orthonormalized by two passes of eigen-decomposed Gram
/// matrices. Singular values come from the first pass and are resolved
/// down to about 1e-8 of the largest. Returns (Q, singular values
/// descending, C) with Q = A C.
pub fn orthonormalize_columns(
    a: &DMatrix<Complex64>,
    cutoff: Cutoff,
) -> Result<(DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>)> {
    let k = a.ncols();
    let g = adjoint_mul(a, a);
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let sigma: Vec<f64> = order
        .iter()
        .map(|&i| eig.eigenvalues[i].max(0.0).sqrt())
        .collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let level = match cutoff {
        Cutoff::Relative(r) => r * smax,
        Cutoff::Absolute(a) => a,
    };
    let kept: Vec<usize> = (0..k).filter(|&i| sigma[i] > level).collect();
    let mut c1 = DMatrix::<Complex64>::zeros(k, kept.len());
    for (col, &i) in kept.iter().enumerate() {
        let v = eig.eigenvectors.column(order[i]);
        c1.set_column(col, &(v / Complex64::new(sigma[i], 0.0)));
    }
    if kept.is_empty() {
        return Ok((DMatrix::zeros(a.nrows(), 0), sigma, c1));
    }
    let q1 = mul(a, &c1);
    // second pass: q1 is orthonormal to about 1e-8 / σ_min
    let g2 = adjoint_mul(&q1, &q1);
    let e2 = g2.symmetric_eigen();
    // G₂^{-1/2}, the symmetric choice, keeps each column closest to q1
    let mut scaled = e2.eigenvectors.clone();
    for (j, lam) in e2.eigenvalues.iter().enumerate() {
        if *lam <= 0.0 {
            return Err(Error::RankCollapse("Gram matrix lost definiteness".into()));
        }
        let s = Complex64::new(1.0 / lam.sqrt(), 0.0);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= s);
    }
    let c2 = scaled * e2.eigenvectors.adjoint();
    let q = mul(&q1, &c2);
    let coeffs = mul(&c1, &c2);
    Ok((q, sigma, coeffs))
}
