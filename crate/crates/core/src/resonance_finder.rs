//! Pole location: detector scan, argument-principle filter, Newton
//! refinement in the model's chart, classification and kernel extraction.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_hardy::KVector;
use crate::smatrix_models::{Chart, SMatrixModel, Sheet};

pub const NEWTON_MAX_ITER: usize = 50;
pub const NEWTON_STEP_TOL: f64 = 1e-12;
/// ‖S(ζ̄)*k‖ above this rejects a resonance.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleKind {
    Resonance,
    BoundState,
    RimPole,
    Antiresonance,
}

impl PoleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PoleKind::Resonance => "resonance",
            PoleKind::BoundState => "bound_state",
            PoleKind::RimPole => "rim_pole",
            PoleKind::Antiresonance => "antiresonance",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub zeta: Complex64,
    pub sheet: Sheet,
    pub kind: PoleKind,
    /// unit k ∈ ker S(ζ̄)*; only filled for resonances
    pub kernel: Vec<Complex64>,
    /// ‖S(ζ̄)*k‖ for the stored kernel
    pub kernel_residual: Option<f64>,
    /// |pole function| at ζ
    pub residual: f64,
    pub refinement_iterations: usize,
    /// argument-principle count of the cell it was found in
    pub multiplicity: usize,
}

impl Resonance {
    pub fn kernel_vector(&self) -> KVector {
        DVector::from_vec(self.kernel.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub sheet: Sheet,
    pub nx: usize,
    pub ny: usize,
}

impl ScanRegion {
    pub fn new(re: (f64, f64), im: (f64, f64), sheet: Sheet) -> Result<Self> {
        let r = Self {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            sheet,
            nx: 61,
            ny: 61,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn with_resolution(mut self, nx: usize, ny: usize) -> Result<Self> {
        self.nx = nx;
        self.ny = ny;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidArgument(format!(
                "degenerate scan region {self:?}"
            )));
        }
        if self.nx < 3 || self.ny < 3 {
            return Err(Error::InvalidArgument(
                "scan resolution must be at least 3×3".into(),
            ));
        }
        Ok(())
    }

    fn node(&self, i: usize, j: usize) -> Complex64 {
        let x = self.re_min + (self.re_max - self.re_min) * i as f64 / (self.nx - 1) as f64;
        let y = self.im_min + (self.im_max - self.im_min) * j as f64 / (self.ny - 1) as f64;
        Complex64::new(x, y)
    }

    fn step(&self) -> (f64, f64) {
        (
            (self.re_max - self.re_min) / (self.nx - 1) as f64,
            (self.im_max - self.im_min) / (self.ny - 1) as f64,
        )
    }

    fn contains(&self, z: Complex64) -> bool {
        let eps = 1e-12 * (1.0 + z.norm());
        z.re >= self.re_min - eps
            && z.re <= self.re_max + eps
            && z.im >= self.im_min - eps
            && z.im <= self.im_max + eps
    }
}

/// A 1-D scan of ℝ₋ on one sheet: sheet 1 is the upper rim, sheet 2 the
/// lower rim.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RimScan {
    pub mu_min: f64,
    pub mu_max: f64,
    pub sheet: Sheet,
    pub samples: usize,
}

impl RimScan {
    pub fn new(mu_min: f64, mu_max: f64, sheet: Sheet) -> Result<Self> {
        if !(mu_min < mu_max && mu_max < 0.0 && mu_min.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rim scan needs mu_min < mu_max < 0, got [{mu_min}, {mu_max}]"
            )));
        }
        Ok(Self {
            mu_min,
            mu_max,
            sheet,
            samples: 400,
        })
    }

    fn nodes(&self) -> Vec<f64> {
        // log-spaced in |μ|, ordered along the axis
        let (a, b) = (-self.mu_max, -self.mu_min);
        (0..self.samples)
            .map(|j| -(a * (b / a).powf(j as f64 / (self.samples - 1) as f64)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub z: Complex64,
    pub sheet: Sheet,
    /// argument-principle count around the candidate's cell
    pub winding: i64,
    pub cell: Cell,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Cell {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }

    fn quarters(&self) -> [Cell; 4] {
        let mx = 0.5 * (self.re.0 + self.re.1);
        let my = 0.5 * (self.im.0 + self.im.1);
        [
            Cell {
                re: (self.re.0, mx),
                im: (self.im.0, my),
            },
            Cell {
                re: (mx, self.re.1),
                im: (self.im.0, my),
            },
            Cell {
                re: (self.re.0, mx),
                im: (my, self.im.1),
            },
            Cell {
                re: (mx, self.re.1),
                im: (my, self.im.1),
            },
        ]
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }
}

fn check_region(model: &SMatrixModel, region: &ScanRegion) -> Result<()> {
    if model.is_two_sheeted() && region.im_min < 0.0 && region.im_max > 0.0 {
        return Err(Error::InvalidArgument(
            "scan regions of a two-sheeted model must not cross the real axis".into(),
        ));
    }
    Ok(())
}

fn pole_fn(model: &SMatrixModel, z: Complex64, sheet: Sheet) -> Result<Complex64> {
    let u = model.to_chart(z, sheet)?;
    model.pole_function(u, sheet)
}

/// Detector |pole function| at z.
pub fn detector(model: &SMatrixModel, z: Complex64, sheet: Sheet) -> Result<f64> {
    Ok(pole_fn(model, z, sheet)?.norm())
}

/// Winding number of the pole function around a cell boundary, by
/// summing argument increments; the point count doubles from 64 until the
/// rounded value repeats and sits within 1e-3 of an integer.
pub fn winding_number(model: &SMatrixModel, cell: Cell, sheet: Sheet) -> Result<f64> {
    let corners = [
        Complex64::new(cell.re.0, cell.im.0),
        Complex64::new(cell.re.1, cell.im.0),
        Complex64::new(cell.re.1, cell.im.1),
        Complex64::new(cell.re.0, cell.im.1),
    ];
    let contour = |n: usize| -> Result<f64> {
        let per_side = n / 4;
        let mut total = 0.0;
        let mut prev: Option<Complex64> = None;
        let mut first = None;
        for s in 0..4 {
            let (a, b) = (corners[s], corners[(s + 1) % 4]);
            for j in 0..per_side {
                let z = a + (b - a) * (j as f64 / per_side as f64);
                let v = pole_fn(model, z, sheet)?;
                if v.norm() == 0.0 || !v.norm().is_finite() {
                    return Err(Error::NoConvergence(
                        "pole function vanishes on a cell edge".into(),
                    ));
                }
                if let Some(p) = prev {
                    total += (v / p).arg();
                } else {
                    first = Some(v);
                }
                prev = Some(v);
            }
        }
        total += (first.unwrap() / prev.unwrap()).arg();
        Ok(total / (2.0 * PI))
    };
    let mut n = 64;
    let mut last = contour(n)?;
    while n < 8192 {
        n *= 2;
        let w = contour(n)?;
        if w.round() == last.round() && (w - w.round()).abs() < 1e-3 {
            return Ok(w);
        }
        last = w;
    }
    Err(Error::NoConvergence(format!(
        "winding number did not settle ({last:.4})"
    )))
}

/// Local minima of the detector on the region grid whose surrounding
/// cell has positive winding number.
pub fn scan_region(model: &SMatrixModel, region: &ScanRegion) -> Result<Vec<Candidate>> {
    check_region(model, region)?;
    let (nx, ny) = (region.nx, region.ny);
    let mut d = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            d[j * nx + i] = detector(model, region.node(i, j), region.sheet)?;
        }
    }
    let (dx, dy) = region.step();
    let mut out: Vec<Candidate> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = d[j * nx + i];
            let mut is_min = true;
            for (di, dj) in [
                (-1i64, -1i64),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                    continue;
                }
                if d[jj as usize * nx + ii as usize] < v {
                    is_min = false;
                    break;
                }
            }
            if !is_min {
                continue;
            }
            let z = region.node(i, j);
            // a cell of ±1.5 steps, clipped to the region, so that a zero
            // between nodes is not on its edge; other widths if one is
            let mut found = None;
            for scale in [1.5, 1.3, 1.7] {
                let cell = Cell {
                    re: (
                        (z.re - scale * dx).max(region.re_min),
                        (z.re + scale * dx).min(region.re_max),
                    ),
                    im: (
                        (z.im - scale * dy).max(region.im_min),
                        (z.im + scale * dy).min(region.im_max),
                    ),
                };
                match winding_number(model, cell, region.sheet) {
                    Ok(w) => {
                        found = Some((cell, w.round() as i64));
                        break;
                    }
                    Err(Error::NoConvergence(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            // a zero on the region boundary itself is not inside it
            let Some((cell, w)) = found else { continue };
            if out.iter().any(|c| c.cell == cell) {
                continue;
            }
            if w >= 1 {
                out.push(Candidate {
                    z,
                    sheet: region.sheet,
                    winding: w,
                    cell,
                });
            }
        }
    }
    Ok(out)
}

/// Newton on the pole function in the model's chart from (z0, sheet).
/// Returns the chart point, its residual and the iteration count.
fn newton(model: &SMatrixModel, u0: Complex64, sheet: Sheet) -> Result<(Complex64, f64, usize)> {
    let f = |u: Complex64| model.pole_function(u, sheet);
    let mut u = u0;
    for it in 1..=NEWTON_MAX_ITER {
        let h = 1e-6 * u.norm().max(1.0);
        let fu = f(u)?;
        if fu.norm() == 0.0 {
            return Ok((u, 0.0, it));
        }
        let hr = Complex64::new(h, 0.0);
        let df = (f(u + hr)? - f(u - hr)?) / (2.0 * hr);
        if df.norm() == 0.0 || !df.norm().is_finite() {
            return Err(Error::NoConvergence(format!("flat pole function at {u}")));
        }
        let step = fu / df;
        u -= step;
        if !(u.re.is_finite() && u.im.is_finite()) {
            return Err(Error::NoConvergence(
                "Newton iterate left the finite plane".into(),
            ));
        }
        if step.norm() < NEWTON_STEP_TOL * u.norm().max(1.0) {
            return Ok((u, f(u)?.norm(), it));
        }
    }
    Err(Error::NoConvergence(format!(
        "Newton from {u0} did not converge in {NEWTON_MAX_ITER} steps"
    )))
}

fn snap_real(z: Complex64) -> Complex64 {
    if z.im.abs() < 1e-11 * z.norm().max(1e-300) {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

fn classify(model: &SMatrixModel, z: Complex64, sheet: Sheet) -> Result<PoleKind> {
    if z.im < 0.0 {
        Ok(PoleKind::Resonance)
    } else if z.im > 0.0 {
        Ok(PoleKind::Antiresonance)
    } else if z.re < 0.0 {
        if model.is_two_sheeted() && sheet == Sheet::First {
            Ok(PoleKind::BoundState)
        } else {
            Ok(PoleKind::RimPole)
        }
    } else {
        Err(Error::NoConvergence(format!(
            "refinement ended on the non-negative axis at {z}"
        )))
    }
}

/// Unit k minimizing ‖S(ζ̄)*k‖ and that minimum. S(ζ̄) is the physical
/// value in ℂ₊. Fails when the minimum exceeds [`KERNEL_TOL`].
pub fn kernel_vector(model: &SMatrixModel, zeta: Complex64) -> Result<(KVector, f64)> {
    let (k, min) = kernel_candidate(model, zeta)?;
    if min > KERNEL_TOL {
        return Err(Error::NotAPole {
            point: zeta,
            minimum: min,
        });
    }
    Ok((k, min))
}

fn kernel_candidate(model: &SMatrixModel, zeta: Complex64) -> Result<(KVector, f64)> {
    if zeta.im >= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "kernel needs Im ζ < 0, got {zeta}"
        )));
    }
    let s = model.eval(zeta.conj(), Sheet::First)?;
    let sh = s.adjoint();
    let m = sh.ncols();
    let svd = sh.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::NoConvergence("SVD".into()))?;
    let (idx, &min) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut k: KVector = DVector::from_iterator(m, v_t.row(idx).iter().map(|x| x.conj()));
    // fix the phase so the largest component is real positive
    let (_, big) = k
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap();
    let phase = big.conj() / big.norm();
    k *= phase;
    Ok((k, min))
}

/// Refines a pole from z0 on `sheet` and classifies it.
pub fn refine(model: &SMatrixModel, z0: Complex64, sheet: Sheet) -> Result<Resonance> {
    let u0 = model.to_chart(z0, sheet)?;
    let (u, residual, iterations) = newton(model, u0, sheet)?;
    let u = match model.chart() {
        Chart::Momentum if u.re.abs() < 1e-11 * u.norm() => Complex64::new(0.0, u.im),
        _ => u,
    };
    let (z, sheet) = model.from_chart(u, sheet);
    let z = snap_real(z);
    resonance_at(model, z, sheet, residual, iterations)
}

fn resonance_at(
    model: &SMatrixModel,
    z: Complex64,
    sheet: Sheet,
    residual: f64,
    iterations: usize,
) -> Result<Resonance> {
    let kind = classify(model, z, sheet)?;
    let (kernel, kernel_residual) = if kind == PoleKind::Resonance {
        let (k, r) = kernel_vector(model, z)?;
        (k.iter().cloned().collect(), Some(r))
    } else {
        (Vec::new(), None)
    };
    Ok(Resonance {
        zeta: z,
        sheet,
        kind,
        kernel,
        kernel_residual,
        residual,
        refinement_iterations: iterations,
        multiplicity: 1,
    })
}

/// Poles on a rim. The momentum chart refines by Newton in k (the rim is
/// the imaginary k axis); the energy chart by golden-section search of
/// |pole function| along the axis.
pub fn scan_rim(model: &SMatrixModel, rim: &RimScan) -> Result<Vec<Resonance>> {
    let nodes = rim.nodes();
    let vals = nodes
        .iter()
        .map(|&mu| detector(model, Complex64::new(mu, 0.0), rim.sheet))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Resonance> = Vec::new();
    for j in 0..nodes.len() {
        let left = if j > 0 { vals[j - 1] } else { f64::INFINITY };
        let right = if j + 1 < nodes.len() {
            vals[j + 1]
        } else {
            f64::INFINITY
        };
        if !(vals[j] <= left && vals[j] <= right) {
            continue;
        }
        let lo = nodes[j.saturating_sub(1)];
        let hi = nodes[(j + 1).min(nodes.len() - 1)];
        let found = match model.chart() {
            Chart::Momentum => {
                let r = refine(model, Complex64::new(nodes[j], 0.0), rim.sheet);
                match r {
                    Ok(r) if r.zeta.im == 0.0 && r.sheet == rim.sheet && r.zeta.re < 0.0 => Some(r),
                    _ => None,
                }
            }
            Chart::Energy => {
                let (mu, v) = golden_min(
                    |mu| detector(model, Complex64::new(mu, 0.0), rim.sheet),
                    lo.min(hi),
                    lo.max(hi),
                )?;
                let scale = vals[j.saturating_sub(1)].max(vals[(j + 1).min(nodes.len() - 1)]);
                if v <= 1e-8 * scale.max(1e-300) {
                    Some(resonance_at(
                        model,
                        Complex64::new(mu, 0.0),
                        rim.sheet,
                        v,
                        0,
                    )?)
                } else {
                    None
                }
            }
        };
        if let Some(r) = found {
            if r.zeta.re >= rim.mu_min && r.zeta.re <= rim.mu_max && !is_duplicate(&out, &r) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

fn golden_min<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * a.abs().max(b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

fn is_duplicate(found: &[Resonance], r: &Resonance) -> bool {
    found
        .iter()
        .any(|q| q.sheet == r.sheet && (q.zeta - r.zeta).norm() < 1e-7 * (1.0 + r.zeta.norm()))
}

/// Result of a full search over one region.
#[derive(Clone, Debug)]
pub struct RegionReport {
    pub region: ScanRegion,
    pub candidates: Vec<Candidate>,
    pub poles: Vec<Resonance>,
    /// winding number of the whole region boundary
    pub total_winding: i64,
}

/// Scan, refine, deduplicate. When the candidate cells do not account
/// for the region's total winding number the region is searched again by
/// recursive subdivision.
pub fn find_in_region(model: &SMatrixModel, region: &ScanRegion) -> Result<RegionReport> {
    let candidates = scan_region(model, region)?;
    let mut poles: Vec<Resonance> = Vec::new();
    for c in &candidates {
        let mut r = match refine(model, c.z, c.sheet) {
            Ok(r) => r,
            Err(Error::NoConvergence(_)) => continue,
            Err(e) => return Err(e),
        };
        if !region.contains(r.zeta) || r.sheet != region.sheet && model.is_two_sheeted() {
            continue;
        }
        r.multiplicity = c.winding as usize;
        if !is_duplicate(&poles, &r) {
            poles.push(r);
        }
    }
    let whole = Cell {
        re: (region.re_min, region.re_max),
        im: (region.im_min, region.im_max),
    };
    let total = winding_number(model, whole, region.sheet)?.round() as i64;
    let counted: i64 = poles.iter().map(|p| p.multiplicity as i64).sum();
    if counted != total {
        let mut extra = Vec::new();
        subdivide(model, whole, region.sheet, 0, &mut extra)?;
        for mut r in extra {
            if region.contains(r.zeta) && !is_duplicate(&poles, &r) {
                r.multiplicity = r.multiplicity.max(1);
                poles.push(r);
            }
        }
    }
    poles.sort_by(|a, b| a.zeta.norm().total_cmp(&b.zeta.norm()));
    Ok(RegionReport {
        region: *region,
        candidates,
        poles,
        total_winding: total,
    })
}

fn subdivide(
    model: &SMatrixModel,
    cell: Cell,
    sheet: Sheet,
    depth: usize,
    out: &mut Vec<Resonance>,
) -> Result<()> {
    let w = match winding_number(model, cell, sheet) {
        Ok(w) => w.round() as i64,
        // a zero on the edge: nudge by splitting
        Err(Error::NoConvergence(_)) if depth < 8 => 2,
        Err(e) => return Err(e),
    };
    if w <= 0 {
        return Ok(());
    }
    if w == 1 || depth >= 8 {
        if let Ok(mut r) = refine(model, cell.center(), sheet) {
            r.multiplicity = w as usize;
            out.push(r);
        }
        return Ok(());
    }
    for q in cell.quarters() {
        subdivide(model, q, sheet, depth + 1, out)?;
    }
    Ok(())
}

/// Pairs (i, j) with ζᵢ ∈ ℂ₋ and ζⱼ = ζ̄ᵢ ∈ ℂ₊ both poles of the physical S
/// (ℂ₊ on sheet 1, ℂ₋ on sheet 2 for two-sheeted models).
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub flagged: Vec<(usize, usize)>,
    pub admissible: bool,
}

pub fn conjugate_pair_audit(resonances: &[Resonance], model: &SMatrixModel) -> AuditReport {
    let physical = |r: &Resonance| !model.is_two_sheeted() || r.sheet == Sheet::physical(r.zeta);
    let mut flagged = Vec::new();
    for (i, a) in resonances.iter().enumerate() {
        if !(a.zeta.im < 0.0 && physical(a)) {
            continue;
        }
        for (j, b) in resonances.iter().enumerate() {
            if b.zeta.im > 0.0
                && physical(b)
                && (b.zeta - a.zeta.conj()).norm() < 1e-6 * (1.0 + a.zeta.norm())
            {
                flagged.push((i, j));
            }
        }
    }
    let admissible = flagged.is_empty();
    AuditReport {
        flagged,
        admissible,
    }
}

/// All poles in the given regions and on the given rims, deduplicated.
pub fn find_poles(
    model: &SMatrixModel,
    regions: &[ScanRegion],
    rims: &[RimScan],
) -> Result<Vec<Resonance>> {
    let mut out: Vec<Resonance> = Vec::new();
    for region in regions {
        for r in find_in_region(model, region)?.poles {
            if !is_duplicate(&out, &r) {
                out.push(r);
            }
        }
    }
    for rim in rims {
        for r in scan_rim(model, rim)? {
            if !is_duplicate(&out, &r) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

pub fn to_json(resonances: &[Resonance]) -> Result<String> {
    Ok(serde_json::to_string_pretty(resonances)?)
}

pub fn from_json(text: &str) -> Result<Vec<Resonance>> {
    Ok(serde_json::from_str(text)?)
}

/// CSV with columns re_zeta, im_zeta, sheet, kind, residual; 12 significant
/// digits.
pub fn write_csv<W: std::io::Write>(w: W, resonances: &[Resonance]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["re_zeta", "im_zeta", "sheet", "kind", "residual"])?;
    for r in resonances {
        wr.write_record([
            format!("{:.11e}", r.zeta.re),
            format!("{:.11e}", r.zeta.im),
            r.sheet.index().to_string(),
            r.kind.as_str().to_string(),
            format!("{:.11e}", r.residual),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
