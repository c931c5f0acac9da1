//! Trace-class perturbations V = BA* with L(z) = I − A*R₀(z)B evaluated by
//! quadrature over the spectral variable λ ∈ ℝ₊.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Sheet, Side};
use crate::error::{Error, Result};

type CMat = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Form factors A(z), B(z): 𝒦 ← ℱ.
#[derive(Clone, Debug)]
pub enum FormFactor {
    /// A = e, B = a·e with e(z) = √(2/π) z^{1/4} / (z + 1).
    RankOne {
        a: f64,
    },
    Sampled(SampledFormFactor),
}

/// A and B tabulated on increasing λ > 0, interpolated linearly and zero
/// outside the table.
#[derive(Clone, Debug)]
pub struct SampledFormFactor {
    lambda: Vec<f64>,
    a: Vec<CMat>,
    b: Vec<CMat>,
    dim_k: usize,
    dim_aux: usize,
}

/// Principal z^{1/4}; the sign of a zero imaginary part picks the rim.
fn quarter_power(z: Complex64) -> Complex64 {
    Complex64::from_polar(z.norm().powf(0.25), z.im.atan2(z.re) / 4.0)
}

fn rank_one_e(z: Complex64) -> Complex64 {
    (2.0 / PI).sqrt() * quarter_power(z) / (z + 1.0)
}

impl SampledFormFactor {
    pub fn new(lambda: Vec<f64>, a: Vec<CMat>, b: Vec<CMat>) -> Result<Self> {
        if lambda.len() < 2 || a.len() != lambda.len() || b.len() != lambda.len() {
            return Err(Error::ModelSpec(
                "form factor table needs ≥ 2 consistent rows".into(),
            ));
        }
        if lambda[0] <= 0.0 || lambda.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::ModelSpec(
                "λ column must be positive and increasing".into(),
            ));
        }
        let (dim_k, dim_aux) = a[0].shape();
        if a.iter().chain(&b).any(|m| m.shape() != (dim_k, dim_aux)) {
            return Err(Error::ModelSpec(
                "form factor shapes differ between rows".into(),
            ));
        }
        Ok(Self {
            lambda,
            a,
            b,
            dim_k,
            dim_aux,
        })
    }

    fn interp(&self, table: &[CMat], l: f64) -> CMat {
        let n = self.lambda.len();
        if !(l >= self.lambda[0] && l <= self.lambda[n - 1]) {
            return CMat::zeros(self.dim_k, self.dim_aux);
        }
        let j = self.lambda.partition_point(|&x| x <= l).clamp(1, n - 1);
        let (l0, l1) = (self.lambda[j - 1], self.lambda[j]);
        let w = (l - l0) / (l1 - l0);
        &table[j - 1] * c(1.0 - w) + &table[j] * c(w)
    }

    fn range(&self) -> (f64, f64) {
        (self.lambda[0], *self.lambda.last().unwrap())
    }
}

/// Log-grid quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    /// step in s = ln λ
    pub step: f64,
    pub lambda_min: f64,
    /// initial upper cutoff Λ
    pub lambda_max: f64,
    /// Λ is never grown beyond this
    pub lambda_limit: f64,
    pub tail_tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            step: 0.05,
            lambda_min: 1e-12,
            lambda_max: 1e4,
            lambda_limit: 1e13,
            tail_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceClassData {
    form: FormFactor,
    pub quadrature: Quadrature,
}

impl TraceClassData {
    pub fn new(form: FormFactor) -> Self {
        Self {
            form,
            quadrature: Quadrature::default(),
        }
    }

    pub fn rank_one(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::ModelSpec(format!(
                "rankone needs a finite a ≠ 0, got {a}"
            )));
        }
        Ok(Self::new(FormFactor::RankOne { a }))
    }

    /// Reads a table with header `lambda, re_a_i_j, im_a_i_j, re_b_i_j,
    /// im_b_i_j, ...` (indices from 0, i over 𝒦, j over ℱ).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = rdr.headers()?.clone();
        let mut lambda_col = None;
        // (part, re?, i, j, column)
        let mut cols = Vec::new();
        for (n, h) in headers.iter().enumerate() {
            if h == "lambda" || h == "λ" {
                lambda_col = Some(n);
                continue;
            }
            let parts: Vec<&str> = h.split('_').collect();
            let parsed = match parts.as_slice() {
                [ri @ ("re" | "im"), ab @ ("a" | "b"), i, j] => {
                    match (i.parse::<usize>(), j.parse::<usize>()) {
                        (Ok(i), Ok(j)) => Some((*ab == "a", *ri == "re", i, j, n)),
                        _ => None,
                    }
                }
                _ => None,
            };
            cols.push(parsed.ok_or_else(|| Error::ModelSpec(format!("unknown column {h:?}")))?);
        }
        let lambda_col =
            lambda_col.ok_or_else(|| Error::ModelSpec("missing lambda column".into()))?;
        let dim_k = cols.iter().map(|c| c.2 + 1).max().unwrap_or(0);
        let dim_aux = cols.iter().map(|c| c.3 + 1).max().unwrap_or(0);
        if dim_k == 0 || cols.len() != 4 * dim_k * dim_aux {
            return Err(Error::ModelSpec(
                "form factor columns must cover re/im of every A_ij and B_ij".into(),
            ));
        }
        let (mut lambda, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let num = |n: usize| -> Result<f64> {
                rec[n]
                    .parse::<f64>()
                    .map_err(|e| Error::ModelSpec(format!("{:?}: {e}", &rec[n])))
            };
            lambda.push(num(lambda_col)?);
            let mut ma = CMat::zeros(dim_k, dim_aux);
            let mut mb = CMat::zeros(dim_k, dim_aux);
            for &(is_a, is_re, i, j, n) in &cols {
                let v = num(n)?;
                let m = if is_a { &mut ma } else { &mut mb };
                if is_re {
                    m[(i, j)].re = v;
                } else {
                    m[(i, j)].im = v;
                }
            }
            a.push(ma);
            b.push(mb);
        }
        Ok(Self::new(FormFactor::Sampled(SampledFormFactor::new(
            lambda, a, b,
        )?)))
    }

    pub fn form(&self) -> &FormFactor {
        &self.form
    }

    pub fn dim_k(&self) -> usize {
        match &self.form {
            FormFactor::RankOne { .. } => 1,
            FormFactor::Sampled(s) => s.dim_k,
        }
    }

    pub fn dim_aux(&self) -> usize {
        match &self.form {
            FormFactor::RankOne { .. } => 1,
            FormFactor::Sampled(s) => s.dim_aux,
        }
    }

    /// Whether A and B can be evaluated off the real axis.
    pub fn continuable(&self) -> bool {
        matches!(self.form, FormFactor::RankOne { .. })
    }

    pub(crate) fn form_factor_rim_poles(&self) -> Vec<(f64, u32)> {
        match self.form {
            FormFactor::RankOne { .. } => vec![(-1.0, 2)],
            FormFactor::Sampled(_) => Vec::new(),
        }
    }

    fn a_at(&self, z: Complex64) -> Result<CMat> {
        match &self.form {
            FormFactor::RankOne { .. } => Ok(CMat::from_element(1, 1, rank_one_e(z))),
            FormFactor::Sampled(s) if z.im == 0.0 && z.re > 0.0 => Ok(s.interp(&s.a, z.re)),
            FormFactor::Sampled(_) => Err(Error::Unsupported(
                "sampled form factors off the positive real axis".into(),
            )),
        }
    }

    fn b_at(&self, z: Complex64) -> Result<CMat> {
        match &self.form {
            FormFactor::RankOne { a } => Ok(CMat::from_element(1, 1, *a * rank_one_e(z))),
            FormFactor::Sampled(s) if z.im == 0.0 && z.re > 0.0 => Ok(s.interp(&s.b, z.re)),
            FormFactor::Sampled(_) => Err(Error::Unsupported(
                "sampled form factors off the positive real axis".into(),
            )),
        }
    }

    /// A(λ)*B(λ) for λ > 0.
    fn density(&self, l: f64) -> CMat {
        match &self.form {
            FormFactor::RankOne { a } => {
                let e = rank_one_e(c(l));
                CMat::from_element(1, 1, c(a * e.norm_sqr()))
            }
            FormFactor::Sampled(s) => s.interp(&s.a, l).adjoint() * s.interp(&s.b, l),
        }
    }

    /// C(z) = A(z̄)*B(z), the continuation of the density.
    fn continued_density(&self, z: Complex64) -> Result<CMat> {
        if !self.continuable() {
            return Err(Error::Unsupported(
                "continuation of sampled form factors".into(),
            ));
        }
        Ok(self.a_at(z.conj())?.adjoint() * self.b_at(z)?)
    }

    fn support(&self) -> (f64, f64) {
        match &self.form {
            FormFactor::RankOne { .. } => (self.quadrature.lambda_min, f64::INFINITY),
            FormFactor::Sampled(s) => s.range(),
        }
    }
}

/// What the quadrature integrates against: an interior point z or a
/// boundary point μ approached from one side.
#[derive(Clone, Copy)]
enum Target {
    Interior(Complex64),
    Boundary(f64, Side),
}

/// ∫ A*B/(z − λ) dλ with the near-singular part subtracted analytically.
///
/// For Re z > 0 the reference profile φ(λ) = 2z/(λ + z) (with φ(z) = 1)
/// times the density at z is removed from the integrand and its integral
/// added in closed form. The nodes sit at half-integer steps from ln|z|,
/// so a boundary point μ is never a node.
fn integrate(data: &TraceClassData, target: Target) -> Result<CMat> {
    let q = &data.quadrature;
    let f = data.dim_aux();
    let (z, pivot) = match target {
        Target::Interior(z) => (z, z.norm().ln()),
        Target::Boundary(mu, _) => (c(mu), mu.ln()),
    };
    let subtract = match target {
        Target::Interior(z) => z.re > 0.0 && data.continuable(),
        Target::Boundary(..) => true,
    };
    let gz = if !subtract {
        CMat::zeros(f, f)
    } else {
        match target {
            Target::Interior(z) => data.continued_density(z)?,
            Target::Boundary(mu, _) => data.density(mu),
        }
    };
    let (lo, hi) = data.support();
    let h = q.step;
    let j_lo = ((lo.ln() - pivot) / h).floor() as i64;
    let s_lo = pivot + j_lo as f64 * h;
    let mut lambda_cut = q.lambda_max.max(100.0 * z.norm());
    if hi.is_finite() {
        lambda_cut = hi;
    }
    let mut sum = CMat::zeros(f, f);
    let mut j = j_lo;
    loop {
        let j_hi = ((lambda_cut.ln() - pivot) / h).ceil() as i64;
        while j < j_hi {
            let s = pivot + (j as f64 + 0.5) * h;
            let l = s.exp();
            let mut g = data.density(l);
            if subtract {
                let phi = 2.0 * z / (l + z);
                g -= &gz * phi;
            }
            sum += g * (l / (z - l) * h);
            j += 1;
        }
        let top = (pivot + j as f64 * h).exp();
        let (tail, estimate) = if hi.is_finite() {
            (CMat::zeros(f, f), 0.0)
        } else {
            tail(data, z, top)
        };
        if estimate <= q.tail_tol {
            let bottom = s_lo.exp();
            if subtract {
                let closed = match target {
                    Target::Interior(z) => {
                        ((top + z).ln() - (z - top).ln()) - ((bottom + z).ln() - (z - bottom).ln())
                    }
                    Target::Boundary(mu, side) => {
                        let pv =
                            ((top + mu) / (top - mu)).ln() - ((bottom + mu) / (mu - bottom)).ln();
                        let jump = match side {
                            Side::Plus => -I * PI,
                            Side::Minus => I * PI,
                        };
                        c(pv) + jump
                    }
                };
                sum += &gz * closed;
            }
            return Ok(sum + tail);
        }
        if top * 10.0 > q.lambda_limit {
            return Err(Error::QuadratureTail {
                estimate,
                tolerance: q.tail_tol,
            });
        }
        lambda_cut = top * 10.0;
    }
}

/// ∫_Λ^∞ g(λ)/(z − λ) dλ for a power-law density g ≈ g(Λ)(λ/Λ)^{−p}, and
/// an estimate of what the model misses.
fn tail(data: &TraceClassData, z: Complex64, top: f64) -> (CMat, f64) {
    let g0 = data.density(top);
    let n0 = g0.norm();
    if n0 == 0.0 {
        return (g0, 0.0);
    }
    let n1 = data.density(top / std::f64::consts::E).norm();
    let n2 = data
        .density(top / (std::f64::consts::E * std::f64::consts::E))
        .norm();
    let p1 = (n1 / n0).ln();
    let p2 = (n2 / n1).ln();
    if !(p1 > 0.05) || z.norm() >= top {
        return (CMat::zeros(g0.nrows(), g0.ncols()), f64::INFINITY);
    }
    let mut series = Complex64::new(0.0, 0.0);
    let mut zn = c(1.0);
    for n in 0..6 {
        series += zn / (p1 + n as f64);
        zn *= z / top;
    }
    let tail = &g0 * (-series);
    let estimate = n0 * ((z.norm() / top).powi(6) / p1 + (p1 - p2).abs() / (p1 * p1));
    (tail, estimate)
}

/// T(z) = ∫₀^∞ A(λ)*B(λ)/(z − λ) dλ for z ∉ [0, ∞).
pub fn trace_t(data: &TraceClassData, z: Complex64) -> Result<CMat> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::RealAxis(z));
    }
    integrate(data, Target::Interior(z))
}

/// T(μ ± i0) = PV ∫ A*B/(μ − λ) dλ ∓ iπ A(μ)*B(μ).
pub fn trace_t_boundary(data: &TraceClassData, mu: f64, side: Side) -> Result<CMat> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "boundary point μ = {mu} must be > 0"
        )));
    }
    integrate(data, Target::Boundary(mu, side))
}

fn sigma_min(l: &CMat) -> f64 {
    l.singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// L on the requested sheet and its smallest singular value. Sheet 1 is
/// L₀ = I − T. Sheet 2 is the continuation across ℝ₊: L₀ + 2πiC in ℂ₋
/// (and on ℝ₋ − i0), L₀ − 2πiC in ℂ₊, with C(z) = A(z̄)*B(z).
pub fn build_l(data: &TraceClassData, z: Complex64, sheet: Sheet) -> Result<(CMat, f64)> {
    let f = data.dim_aux();
    let id = CMat::identity(f, f);
    if z.im == 0.0 && z.re == 0.0 {
        return Err(Error::BranchPoint);
    }
    let l0 = |z: Complex64| -> Result<CMat> {
        if z.im == 0.0 && z.re > 0.0 {
            Err(Error::RealAxis(z))
        } else {
            Ok(&id - trace_t(data, z)?)
        }
    };
    let l = match sheet {
        Sheet::First => l0(z)?,
        Sheet::Second => {
            let lower = z.im < 0.0 || (z.im == 0.0 && z.re < 0.0);
            let zc = if z.im == 0.0 {
                Complex64::new(z.re, -0.0)
            } else {
                z
            };
            let cz = data.continued_density(zc)?;
            let sign = if lower { 1.0 } else { -1.0 };
            l0(z)? + cz * (sign * 2.0 * PI * I)
        }
    };
    let s = sigma_min(&l);
    Ok((l, s))
}

#[derive(Clone, Debug)]
pub struct TraceClassModel {
    data: TraceClassData,
}

impl TraceClassModel {
    pub fn new(data: TraceClassData) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &TraceClassData {
        &self.data
    }

    pub fn name(&self) -> String {
        match self.data.form {
            FormFactor::RankOne { a } => format!("traceclass(rankone, a={a})"),
            FormFactor::Sampled(_) => "traceclass(sampled)".into(),
        }
    }

    pub fn build_l(&self, z: Complex64, sheet: Sheet) -> Result<(CMat, f64)> {
        build_l(&self.data, z, sheet)
    }

    /// I − 2πi B(z) L⁻¹ A(z̄)* with B and A taken at the signed-zero point
    /// that encodes a rim.
    fn physical(&self, z: Complex64, l: CMat) -> Result<CMat> {
        let m = self.data.dim_k();
        let linv = l.try_inverse().ok_or(Error::NotAPole {
            point: z,
            minimum: 0.0,
        })?;
        let b = self.data.b_at(z)?;
        let a = self.data.a_at(z.conj())?;
        Ok(CMat::identity(m, m) - b * linv * a.adjoint() * (2.0 * PI * I))
    }

    fn invert(s: CMat, z: Complex64) -> Result<CMat> {
        s.try_inverse().ok_or(Error::NotAPole {
            point: z,
            minimum: 0.0,
        })
    }

    /// S(z) on a sheet. Off the physical quadrants (sheet 1 in ℂ₋, sheet 2
    /// in ℂ₊, sheet 2 on ℝ₊) the value is the inverse of the other sheet's.
    pub fn eval(&self, z: Complex64, sheet: Sheet) -> Result<CMat> {
        if z.im == 0.0 {
            if z.re > 0.0 {
                let s = self.boundary(z.re, Side::Plus)?;
                return match sheet {
                    Sheet::First => Ok(s),
                    Sheet::Second => Self::invert(s, z),
                };
            }
            if z.re == 0.0 {
                return Err(Error::BranchPoint);
            }
            return self.boundary(
                z.re,
                if sheet == Sheet::First {
                    Side::Plus
                } else {
                    Side::Minus
                },
            );
        }
        if !self.data.continuable() {
            return Err(Error::Unsupported(
                "S off the real axis for sampled form factors".into(),
            ));
        }
        if Sheet::physical(z) == sheet {
            let (l, _) = self.build_l(z, sheet)?;
            self.physical(z, l)
        } else {
            Self::invert(self.eval(z, sheet.other())?, z)
        }
    }

    pub fn boundary(&self, lambda: f64, side: Side) -> Result<CMat> {
        if lambda > 0.0 {
            let f = self.data.dim_aux();
            let l = CMat::identity(f, f) - trace_t_boundary(&self.data, lambda, Side::Plus)?;
            self.physical(c(lambda), l)
        } else if lambda < 0.0 {
            let (z, sheet) = match side {
                Side::Plus => (Complex64::new(lambda, 0.0), Sheet::First),
                Side::Minus => (Complex64::new(lambda, -0.0), Sheet::Second),
            };
            if sheet == Sheet::Second && !self.data.continuable() {
                return Err(Error::Unsupported(
                    "lower rim for sampled form factors".into(),
                ));
            }
            let (l, _) = self.build_l(z, sheet)?;
            self.physical(z, l)
        } else {
            Err(Error::BranchPoint)
        }
    }
}
