//! 𝒩, ℳ = S𝒩 and 𝒯 = H²₊ ⊖ ℳ in a Malmquist-Takenaka truncation; the
//! decay semigroup on 𝒯, Gamov vectors, the resolvent of B₊ and
//! transition-probability curves.
//!
//! Truncation: W = span{φ_0..φ_{n-1}} ⊗ 𝒦 is the working piece of H²₊ and
//! 𝒩 is built from n + headroom members, so that ℳ resolves W well enough
//! for 𝒯 = range((I - P_ℳ)P_W) to have a clean numerical rank.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid_hardy::{
    cauchy_eval, max_resolved_index, mt_basis, mt_value, Grid, GridFunction, KVector,
};
use crate::linalg::{
    adjoint_mul, augment, augmented_matrix, from_augmented, mul, orthonormalize_columns,
    tail_inner, Cutoff,
};
use crate::resonance_finder::Resonance;
use crate::semigroup_engine::{
    apply_c, generator_offset_with_tol, half_line_overlap, IsometryPair,
};
use crate::smatrix_models::{SMatrixModel, Sheet};

pub const T_CUTOFF: f64 = 1e-6;
/// full-rank test for the 𝒩 and ℳ families (Gram-resolved singular values)
const N_CUTOFF: f64 = 1e-7;
pub const DEFAULT_BASIS_N: usize = 32;
pub const DEFAULT_HEADROOM: usize = 32;
pub const RESOLVENT_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    N,
    M,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NMode {
    /// q(λ) = Π(λ - ξ_j)^{g_j} / (λ + i)^{deg q} over the poles in ℂ₊
    UpperPoles,
    /// additionally p(λ) from the poles of S(· + i0) on ℝ₋
    RimPoles,
}

/// Poles of the physical S that 𝒩 has to cancel.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PoleData {
    pub upper: Vec<(Complex64, u32)>,
    pub rim: Vec<(f64, u32)>,
}

impl PoleData {
    /// Upper poles are found poles in ℂ₊ of the physical sheet; rim poles
    /// are found poles on ℝ₋ + i0 plus the model's form-factor rim poles.
    pub fn from_resonances(model: &SMatrixModel, found: &[Resonance]) -> Self {
        let mut d = PoleData::default();
        let physical = |r: &Resonance| !model.is_two_sheeted() || r.sheet == Sheet::First;
        for r in found.iter().filter(|r| physical(r)) {
            let g = r.multiplicity.max(1) as u32;
            if r.zeta.im > 0.0 {
                d.upper.push((r.zeta, g));
            } else if r.zeta.im == 0.0 && r.zeta.re < 0.0 {
                d.add_rim(r.zeta.re, g);
            }
        }
        for (mu, g) in model.form_factor_rim_poles() {
            d.add_rim(mu, g);
        }
        d
    }

    fn add_rim(&mut self, mu: f64, g: u32) {
        match self
            .rim
            .iter_mut()
            .find(|(m, _)| (m - mu).abs() < 1e-9 * (1.0 + mu.abs()))
        {
            Some(e) => e.1 += g,
            None => self.rim.push((mu, g)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty() && self.rim.is_empty()
    }

    pub fn mode(&self) -> NMode {
        if self.rim.is_empty() {
            NMode::UpperPoles
        } else {
            NMode::RimPoles
        }
    }

    fn order(&self, mode: NMode) -> u32 {
        let up: u32 = self.upper.iter().map(|p| p.1).sum();
        match mode {
            NMode::UpperPoles => up,
            NMode::RimPoles => up + self.rim.iter().map(|p| p.1).sum::<u32>(),
        }
    }

    /// The scalar factor multiplying φ_j in the 𝒩 family.
    pub fn factor(&self, mode: NMode, lambda: f64) -> Complex64 {
        let l = Complex64::new(lambda, 0.0);
        let w = Complex64::new(lambda, 1.0);
        let mut q = Complex64::new(1.0, 0.0);
        for &(xi, g) in &self.upper {
            q *= ((l - xi) / w).powu(g);
        }
        if mode == NMode::RimPoles {
            for &(mu, g) in &self.rim {
                q *= ((l - mu) / w).powu(g);
            }
        }
        q
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionParams {
    pub n: usize,
    pub headroom: usize,
    pub mode: NMode,
    pub poles: PoleData,
}

#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub role: Role,
    pub members: Vec<GridFunction>,
    pub source_model: String,
    pub params: ConstructionParams,
    /// singular spectrum of the family the members were extracted from
    pub singular_values: Vec<f64>,
    pub cutoff: Cutoff,
    /// members in augmented coordinates, orthonormal columns
    frame: DMatrix<Complex64>,
    /// 𝒩 only: member m = Σ_i coeffs[(i, m)] · factor · φ_j e_c, i = j·dim_k + c
    family_coeffs: Option<DMatrix<Complex64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceDiagnostics {
    pub role: Role,
    pub dim: usize,
    pub source_model: String,
    pub params: ConstructionParams,
    pub singular_values: Vec<f64>,
    pub cutoff: f64,
    pub gram_offdiag_max: f64,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.is_empty()
    }

    #[allow(clippy::too_many_arguments)]
    fn from_frame(
        role: Role,
        frame: DMatrix<Complex64>,
        grid: Grid,
        dim_k: usize,
        source_model: String,
        params: ConstructionParams,
        singular_values: Vec<f64>,
        cutoff: Cutoff,
    ) -> Self {
        let members = frame
            .column_iter()
            .map(|c| from_augmented(grid, dim_k, c.as_slice()))
            .collect();
        Self {
            role,
            members,
            source_model,
            params,
            singular_values,
            cutoff,
            frame,
            family_coeffs: None,
        }
    }

    /// Values of all members at off-grid points, one column per member
    /// and dim_k rows per point. Only 𝒩 bases carry closed forms.
    fn eval_members(&self, lambdas: &[f64]) -> Result<DMatrix<Complex64>> {
        let coeffs = self
            .family_coeffs
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("basis has no closed form".into()))?;
        let dim_k = self.members.first().map_or(1, |m| m.dim_k());
        let count = coeffs.nrows() / dim_k;
        let mode = self.params.mode;
        let mut rows = DMatrix::zeros(lambdas.len() * dim_k, coeffs.nrows());
        for (p, &l) in lambdas.iter().enumerate() {
            let w = self.params.poles.factor(mode, l);
            for j in 0..count {
                let v = w * mt_value(j, l);
                for c in 0..dim_k {
                    rows[(p * dim_k + c, j * dim_k + c)] = v;
                }
            }
        }
        Ok(mul(&rows, coeffs))
    }

    /// Tail-corrected coefficients ⟨b_i, f⟩.
    pub fn coefficients(&self, f: &GridFunction) -> Result<DVector<Complex64>> {
        let first = self
            .members
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        if !f.same_shape(first) {
            return Err(Error::GridMismatch);
        }
        Ok(self.frame.ad_mul(&DVector::from_vec(augment(f))))
    }

    pub fn project(&self, f: &GridFunction) -> Result<GridFunction> {
        if self.members.is_empty() {
            return Ok(GridFunction::zeros(f.grid(), f.dim_k()));
        }
        let c = self.coefficients(f)?;
        let col = &self.frame * c;
        Ok(from_augmented(f.grid(), f.dim_k(), col.as_slice()))
    }

    /// Angle between f and the subspace, in tail-corrected norms.
    pub fn angle_to(&self, f: &GridFunction) -> Result<f64> {
        let nf = tail_inner(f, f)?.re.sqrt();
        if nf == 0.0 {
            return Err(Error::InvalidArgument("zero function has no angle".into()));
        }
        if self.members.is_empty() {
            return Ok(PI / 2.0);
        }
        let c = self.coefficients(f)?;
        Ok((c.norm() / nf).min(1.0).acos())
    }

    pub fn diagnostics(&self) -> Result<SubspaceDiagnostics> {
        let mut off = 0.0f64;
        if !self.members.is_empty() {
            let g = adjoint_mul(&self.frame, &self.frame);
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    if i != j {
                        off = off.max(g[(i, j)].norm());
                    }
                }
            }
        }
        Ok(SubspaceDiagnostics {
            role: self.role,
            dim: self.dim(),
            source_model: self.source_model.clone(),
            params: self.params.clone(),
            singular_values: self.singular_values.clone(),
            cutoff: match self.cutoff {
                Cutoff::Relative(c) | Cutoff::Absolute(c) => c,
            },
            gram_offdiag_max: off,
        })
    }
}

/// S(λ + i0) sampled once per grid point.
#[derive(Clone, Debug)]
pub struct SampledS {
    grid: Grid,
    values: Vec<DMatrix<Complex64>>,
    /// S(λ + i0) behaves like a + b√|λ| at 0 (two-sheeted models)
    branch_point: bool,
}

impl SampledS {
    pub fn new(model: &SMatrixModel, grid: Grid) -> Result<Self> {
        let values = grid
            .points()
            .map(|l| model.on_real_line(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            values,
            branch_point: model.is_two_sheeted(),
        })
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid() != self.grid || f.dim_k() != self.values[0].nrows() {
            return Err(Error::GridMismatch);
        }
        let m = f.dim_k();
        if m == 1 {
            let mut out = f.clone();
            for (v, s) in out.component_mut(0).iter_mut().zip(&self.values) {
                *v *= s[(0, 0)];
            }
            return Ok(out);
        }
        let mut out = GridFunction::zeros(self.grid, m);
        for (j, s) in self.values.iter().enumerate() {
            let v = s * f.sample(j);
            for c in 0..m {
                out.component_mut(c)[j] = v[c];
            }
        }
        Ok(out)
    }
}

fn mt_family(
    grid: Grid,
    dim_k: usize,
    count: usize,
    factor: impl Fn(f64) -> Complex64,
) -> Vec<GridFunction> {
    let weights: Vec<Complex64> = grid.points().map(factor).collect();
    let mut out = Vec::with_capacity(count * dim_k);
    for j in 0..count {
        for c in 0..dim_k {
            let mut f = mt_basis(j, grid, dim_k, c);
            for (v, w) in f.component_mut(c).iter_mut().zip(&weights) {
                *v *= w;
            }
            out.push(f);
        }
    }
    out
}

pub fn build_n_basis(
    model: &SMatrixModel,
    grid: Grid,
    n: usize,
    headroom: usize,
    poles: &PoleData,
    mode: NMode,
) -> Result<SubspaceBasis> {
    let count = n + headroom;
    if n == 0 {
        return Err(Error::InvalidArgument("basis size must be positive".into()));
    }
    if (n as u32) <= poles.order(mode) {
        return Err(Error::InvalidArgument(format!(
            "basis size {n} does not exceed the number of constraints {}",
            poles.order(mode)
        )));
    }
    if count > max_resolved_index(grid) + 1 {
        return Err(Error::InvalidArgument(format!(
            "{count} basis members are not resolved on this grid (max {})",
            max_resolved_index(grid) + 1
        )));
    }
    let family = mt_family(grid, model.dim_k(), count, |l| poles.factor(mode, l));
    let (q, sv, coeffs) =
        orthonormalize_columns(&augmented_matrix(&family)?, Cutoff::Relative(N_CUTOFF))?;
    if q.ncols() < family.len() {
        return Err(Error::RankCollapse(format!(
            "𝒩 family has rank {} of {}",
            q.ncols(),
            family.len()
        )));
    }
    let mut basis = SubspaceBasis::from_frame(
        Role::N,
        q,
        grid,
        model.dim_k(),
        model.name(),
        ConstructionParams {
            n,
            headroom,
            mode,
            poles: poles.clone(),
        },
        sv,
        Cutoff::Relative(N_CUTOFF),
    );
    basis.family_coeffs = Some(coeffs);
    Ok(basis)
}

/// ℳ = S𝒩 orthonormalized, and 𝒯 = range((I - P_ℳ)P_W) at absolute
/// cutoff [`T_CUTOFF`].
pub fn build_m_and_t(
    s: &SampledS,
    n_basis: &SubspaceBasis,
) -> Result<(SubspaceBasis, SubspaceBasis)> {
    if n_basis.role != Role::N {
        return Err(Error::InvalidArgument(
            "build_m_and_t needs an 𝒩 basis".into(),
        ));
    }
    let first = n_basis
        .members
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty 𝒩 basis".into()))?;
    let (grid, dim_k) = (first.grid(), first.dim_k());
    let images = n_basis
        .members
        .iter()
        .map(|v| s.apply(v))
        .collect::<Result<Vec<_>>>()?;
    let (qm, msv, _) =
        orthonormalize_columns(&augmented_matrix(&images)?, Cutoff::Relative(N_CUTOFF))?;
    if qm.ncols() < images.len() {
        return Err(Error::RankCollapse(format!(
            "ℳ has numerical rank {} of {}",
            qm.ncols(),
            images.len()
        )));
    }
    let w = mt_family(grid, dim_k, n_basis.params.n, |_| Complex64::new(1.0, 0.0));
    let (qw, _, _) = orthonormalize_columns(&augmented_matrix(&w)?, Cutoff::Relative(N_CUTOFF))?;
    // (I - P_M) Q_W, twice against loss of orthogonality
    let mut r = &qw - mul(&qm, &adjoint_mul(&qm, &qw));
    r = &r - mul(&qm, &adjoint_mul(&qm, &r));
    let (qt, tsv, _) = orthonormalize_columns(&r, Cutoff::Absolute(T_CUTOFF))?;
    let m = SubspaceBasis::from_frame(
        Role::M,
        qm,
        grid,
        dim_k,
        n_basis.source_model.clone(),
        n_basis.params.clone(),
        msv,
        Cutoff::Relative(N_CUTOFF),
    );
    let t = SubspaceBasis::from_frame(
        Role::T,
        qt,
        grid,
        dim_k,
        n_basis.source_model.clone(),
        n_basis.params.clone(),
        tsv,
        Cutoff::Absolute(T_CUTOFF),
    );
    Ok((m, t))
}

/// The three subspaces of one model on one grid.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub s: SampledS,
    pub n: SubspaceBasis,
    pub m: SubspaceBasis,
    pub t: SubspaceBasis,
}

pub fn decompose(
    model: &SMatrixModel,
    grid: Grid,
    n: usize,
    headroom: usize,
    poles: &PoleData,
) -> Result<Decomposition> {
    let s = SampledS::new(model, grid)?;
    let nb = build_n_basis(model, grid, n, headroom, poles, poles.mode())?;
    let (m, t) = build_m_and_t(&s, &nb)?;
    Ok(Decomposition { s, n: nb, m, t })
}

/// e_{ζ,k}(λ) = k/(λ - ζ).
pub fn gamov(zeta: Complex64, k: &KVector, grid: Grid) -> Result<GridFunction> {
    if zeta.im >= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Gamov vectors need Im ζ < 0, got {zeta}"
        )));
    }
    if k.norm() == 0.0 {
        return Err(Error::InvalidArgument("zero kernel vector".into()));
    }
    Ok(GridFunction::from_profile(grid, k, |l| 1.0 / (l - zeta)))
}

// S(λ + i0) of a two-sheeted model has a √|λ| kink at 0, which the grid
// sum resolves only to O(Δ^{3/2}). The overlap is split by a smooth window
// w: (1 - w)F goes on the grid, wF is integrated in s = √|λ|, where it is
// smooth, by composite Gauss-Legendre on closed forms.
const WINDOW_EDGE: f64 = 1.0;
const WINDOW_WIDTH: f64 = 0.15;
const GL_ORDER: usize = 16;

fn window(lambda: f64) -> f64 {
    0.5 * libm::erfc((lambda.abs() - WINDOW_EDGE) / WINDOW_WIDTH)
}

/// max over 𝒩 members v of |⟨e_{ζ,k}, S v⟩| / (‖e‖‖v‖).
pub fn gamov_overlap(
    model: &SMatrixModel,
    s: &SampledS,
    n_basis: &SubspaceBasis,
    zeta: Complex64,
    k: &KVector,
) -> Result<f64> {
    let grid = n_basis
        .members
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty 𝒩 basis".into()))?
        .grid();
    let e = gamov(zeta, k, grid)?;
    let ne = tail_inner(&e, &e)?.re.sqrt();
    let mut overlaps = Vec::with_capacity(n_basis.dim());
    let windowed = s.branch_point && n_basis.family_coeffs.is_some();
    let outer: Vec<f64> = grid.points().map(|l| 1.0 - window(l)).collect();
    for v in &n_basis.members {
        let mut sv = s.apply(v)?;
        if windowed {
            for c in 0..sv.dim_k() {
                for (x, w) in sv.component_mut(c).iter_mut().zip(&outer) {
                    *x *= w;
                }
            }
        }
        overlaps.push(tail_inner(&e, &sv)?);
    }
    if windowed {
        let inner = windowed_overlaps(model, n_basis, zeta, k)?;
        for (o, i) in overlaps.iter_mut().zip(inner) {
            *o += i;
        }
    }
    let mut worst = 0.0f64;
    for (o, v) in overlaps.iter().zip(&n_basis.members) {
        worst = worst.max(o.norm() / (ne * tail_inner(v, v)?.re.sqrt()));
    }
    Ok(worst)
}

/// ∫ w conj(e) S v dλ for every member v, with λ = ±s².
fn windowed_overlaps(
    model: &SMatrixModel,
    n_basis: &SubspaceBasis,
    zeta: Complex64,
    k: &KVector,
) -> Result<Vec<Complex64>> {
    let reach = WINDOW_EDGE + 7.0 * WINDOW_WIDTH;
    let smax = reach.sqrt();
    let count = n_basis.params.n + n_basis.params.headroom;
    // phase of φ_j grows at most 2j per unit λ, i.e. 4j·s per unit s
    let panels = (count as f64 * reach / 2.0).ceil() as usize + 4;
    let gl = GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("nonzero"));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for side in [1.0, -1.0] {
        for p in 0..panels {
            let (a, b) = (
                smax * p as f64 / panels as f64,
                smax * (p + 1) as f64 / panels as f64,
            );
            for (x, w) in gl.iter() {
                let sv = 0.5 * ((b - a) * x + (b + a));
                nodes.push(side * sv * sv);
                weights.push(0.5 * (b - a) * w * 2.0 * sv);
            }
        }
    }
    let vals = n_basis.eval_members(&nodes)?;
    let dim_k = k.len();
    let mut out = vec![Complex64::new(0.0, 0.0); vals.ncols()];
    for (p, (&l, &wq)) in nodes.iter().zip(&weights).enumerate() {
        let sm = model.on_real_line(l)?;
        let ek = k.map(|x| x.conj() / (Complex64::new(l, 0.0) - zeta).conj());
        // row vector conj(e)ᵀ S
        let row = ek.transpose() * &sm;
        let f = wq * window(l);
        for (m, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..dim_k {
                acc += row[c] * vals[(p * dim_k + c, m)];
            }
            *o += f * acc;
        }
    }
    Ok(out)
}

fn require_t(t_basis: &SubspaceBasis) -> Result<()> {
    if t_basis.role != Role::T {
        return Err(Error::InvalidArgument("expected a 𝒯 basis".into()));
    }
    if t_basis.is_trivial() {
        return Err(Error::InvalidArgument("𝒯 = {0}".into()));
    }
    Ok(())
}

/// P_T C₊(t) P_T f.
pub fn restricted_apply(t_basis: &SubspaceBasis, f: &GridFunction, t: f64) -> Result<GridFunction> {
    require_t(t_basis)?;
    let p = t_basis.project(f)?;
    if p.norm() < 0.5 * f.norm() {
        return Err(Error::InvalidArgument(format!(
            "f is essentially orthogonal to 𝒯 (keeps {:.3} of its norm)",
            p.norm() / f.norm()
        )));
    }
    if t == 0.0 {
        return Ok(p);
    }
    t_basis.project(&apply_c(&p, t)?)
}

/// ‖P_ℳ C₊(t) f‖ / ‖f‖.
pub fn invariance_leakage(m_basis: &SubspaceBasis, f: &GridFunction, t: f64) -> Result<f64> {
    Ok(m_basis.project(&apply_c(f, t)?)?.norm() / f.norm())
}

/// Matrix ⟨t_i, C₊(t) t_j⟩ of the decay semigroup on the 𝒯 basis.
pub fn restricted_matrix(t_basis: &SubspaceBasis, t: f64) -> Result<DMatrix<Complex64>> {
    require_t(t_basis)?;
    let d = t_basis.dim();
    let mut a = DMatrix::zeros(d, d);
    for j in 0..d {
        let cj = apply_c(&t_basis.members[j], t)?;
        a.set_column(j, &t_basis.coefficients(&cj)?);
    }
    Ok(a)
}

/// Spectrum of B₊ on 𝒯: i·log(μ)/t over the eigenvalues μ of the
/// restricted semigroup at time t.
pub fn b_spectrum(t_basis: &SubspaceBasis, t: f64) -> Result<Vec<Complex64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("b_spectrum needs t > 0".into()));
    }
    let a = restricted_matrix(t_basis, t)?;
    let mu = a
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::NoConvergence("Schur form".into()))?;
    let mut out: Vec<Complex64> = mu
        .iter()
        .map(|m| Complex64::new(0.0, 1.0) * m.ln() / t)
        .collect();
    out.sort_by(|a, b| b.im.total_cmp(&a.im));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ResolventSolution {
    pub f: GridFunction,
    pub k0: KVector,
    /// ‖(B₊ - z)f - g‖ / ‖g‖ with B₊f = λf + k̂₀ from the generator offset
    pub residual: f64,
}

fn interpolate(g: &GridFunction, mu: f64) -> Result<KVector> {
    let grid = g.grid();
    let d = grid.spacing();
    let x = (mu - grid.point(0)) / d;
    if x < 0.0 || x > (grid.n_points() - 1) as f64 {
        return Err(Error::InvalidArgument(format!("{mu} is outside the grid")));
    }
    let j = (x.floor() as usize).min(grid.n_points() - 2);
    let s = x - j as f64;
    Ok(g.sample(j) * Complex64::new(1.0 - s, 0.0) + g.sample(j + 1) * Complex64::new(s, 0.0))
}

/// f = (g - k₀)/(λ - z) with k₀ chosen so that f lies in 𝒯:
/// z ∈ ℂ₊ uses k₀ = g(z) (Cauchy evaluation), real z the interpolated
/// sample g(z), z ∈ ℂ₋ the least-squares k₀ making f ⟂ ℳ.
pub fn resolve_b(
    t_basis: &SubspaceBasis,
    m_basis: &SubspaceBasis,
    g: &GridFunction,
    z: Complex64,
    resonances: &[Complex64],
) -> Result<ResolventSolution> {
    resolve_b_with_tol(t_basis, m_basis, g, z, resonances, RESOLVENT_TOL)
}

pub fn resolve_b_with_tol(
    t_basis: &SubspaceBasis,
    m_basis: &SubspaceBasis,
    g: &GridFunction,
    z: Complex64,
    resonances: &[Complex64],
    tol: f64,
) -> Result<ResolventSolution> {
    require_t(t_basis)?;
    if let Some(r) = resonances.iter().find(|r| (*r - z).norm() < 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "{z} is the resonance {r}, not a resolvent point"
        )));
    }
    let grid = g.grid();
    let m = g.dim_k();
    let over = |k: &KVector| -> GridFunction {
        let mut f = g.clone();
        let k0 = -k.clone();
        f.add_constant(&k0);
        f.mul_fn(|l| 1.0 / (l - z))
    };
    let (k0, f) = if z.im > 0.0 {
        let k0 = cauchy_eval(g, z)?;
        let f = over(&k0);
        (k0, f)
    } else if z.im < 0.0 {
        // min ‖P_ℳ(g/(λ-z)) - Σ_c k_c P_ℳ(e_c/(λ-z))‖
        let rhs = m_basis.coefficients(&g.mul_fn(|l| 1.0 / (l - z)))?;
        let mut a = DMatrix::<Complex64>::zeros(rhs.len(), m);
        for c in 0..m {
            let mut e = KVector::zeros(m);
            e[c] = Complex64::new(1.0, 0.0);
            let col =
                m_basis.coefficients(&GridFunction::from_profile(grid, &e, |l| 1.0 / (l - z)))?;
            a.set_column(c, &col);
        }
        let k0: DVector<Complex64> = a
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::NoConvergence(e.to_string()))?;
        let f = over(&k0);
        (k0, f)
    } else {
        let k0 = interpolate(g, z.re)?;
        let mut f = over(&k0);
        // the removable point, if z is a grid node
        let j = ((z.re - grid.point(0)) / grid.spacing()).round() as usize;
        if j > 0 && j + 1 < grid.n_points() && grid.point(j) == z.re {
            for c in 0..m {
                let col = f.component_mut(c);
                col[j] = 0.5 * (col[j - 1] + col[j + 1]);
            }
        }
        (k0, f)
    };
    // f is checked as constructed: re-projecting it onto the truncated 𝒯
    // leaves tails whose λ-multiples do not match at ±∞
    let gen = generator_offset_with_tol(&f, f64::INFINITY)?;
    let mut image = gen.image;
    image.axpy(-z, &f);
    let residual = (&image - g).norm() / g.norm();
    if residual > tol {
        return Err(Error::NoConvergence(format!(
            "resolvent round trip residual {residual:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(ResolventSolution { f, k0, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    Unitary,
    Decay,
}

pub enum Evolution<'a> {
    /// e^{-itM₊} on the half-line representative Rf
    Unitary(&'a IsometryPair),
    /// e^{-itB₊} = P_T C₊(t) on 𝒯
    Decay(&'a SubspaceBasis),
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    pub mode: CurveMode,
    pub times: Vec<f64>,
    pub overlaps: Vec<Complex64>,
    pub norms: Vec<f64>,
    /// e^{-t|Im ζ|}·‖f‖² for a tagged Gamov vector
    pub reference: Option<Vec<f64>>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidArgument(
            "times must be non-negative and increasing".into(),
        ));
    }
    Ok(())
}

/// ⟨f, U(t)f⟩ along a time grid. In decay mode the state is P_T f.
pub fn transition_curve(
    f: &GridFunction,
    times: &[f64],
    evolution: Evolution<'_>,
    zeta: Option<Complex64>,
) -> Result<DecayCurve> {
    check_times(times)?;
    let (mode, overlaps, norms, norm_sqr) = match evolution {
        Evolution::Decay(tb) => {
            require_t(tb)?;
            let state = restricted_apply(tb, f, 0.0)?;
            let mut ov = Vec::with_capacity(times.len());
            let mut nr = Vec::with_capacity(times.len());
            for &t in times {
                let e = restricted_apply(tb, &state, t)?;
                ov.push(tail_inner(&state, &e)?);
                nr.push(tail_inner(&e, &e)?.re.sqrt());
            }
            (CurveMode::Decay, ov, nr, tail_inner(&state, &state)?.re)
        }
        Evolution::Unitary(iso) => {
            let h = iso.forward(f)?;
            let ov = times
                .iter()
                .map(|&t| half_line_overlap(&h, t))
                .collect::<Result<Vec<_>>>()?;
            (
                CurveMode::Unitary,
                ov,
                vec![h.norm(); times.len()],
                h.norm_sqr(),
            )
        }
    };
    let reference = zeta.map(|z| {
        times
            .iter()
            .map(|t| (-t * z.im.abs()).exp() * norm_sqr)
            .collect()
    });
    Ok(DecayCurve {
        mode,
        times: times.to_vec(),
        overlaps,
        norms,
        reference,
    })
}

impl DecayCurve {
    /// Columns t, re_overlap, im_overlap, abs_overlap, reference.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "re_overlap", "im_overlap", "abs_overlap", "reference"])?;
        for (i, t) in self.times.iter().enumerate() {
            let o = self.overlaps[i];
            let r = self
                .reference
                .as_ref()
                .map(|r| format!("{:.11e}", r[i]))
                .unwrap_or_default();
            wr.write_record([
                format!("{:.11e}", t),
                format!("{:.11e}", o.re),
                format!("{:.11e}", o.im),
                format!("{:.11e}", o.norm()),
                r,
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// ‖e_ζ‖² = π/|Im ζ| for a unit k.
pub fn gamov_norm_sqr(zeta: Complex64) -> f64 {
    PI / zeta.im.abs()
}
