//! Scattering matrices with their continuation across ℝ₊.
//!
//! Two-sheeted models are parametrized by the momentum k = √z with
//! Im k > 0 on sheet 1 and Im k < 0 on sheet 2. The physical function is
//! sheet 1 on ℂ₊ joined across ℝ₊ to sheet 2 on ℂ₋. A real negative z
//! stands for the upper rim ℝ₋+i0 on sheet 1 and the lower rim ℝ₋−i0 on
//! sheet 2.

mod rankone;
mod rational;
mod squarewell;
mod traceclass;

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use rankone::{rankone_resolvent_elem, RankOneModel};
pub use rational::RationalModel;
pub use squarewell::{jost_f, jost_f_ode, SquareWellModel};
pub use traceclass::{
    build_l, trace_t, trace_t_boundary, FormFactor, Quadrature, SampledFormFactor, TraceClassData,
    TraceClassModel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Sheet {
    First,
    Second,
}

impl Sheet {
    pub fn index(self) -> u8 {
        match self {
            Sheet::First => 1,
            Sheet::Second => 2,
        }
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::First => Sheet::Second,
            Sheet::Second => Sheet::First,
        }
    }

    /// The sheet on which the physical S lives at z.
    pub fn physical(z: Complex64) -> Sheet {
        if z.im < 0.0 {
            Sheet::Second
        } else {
            Sheet::First
        }
    }
}

impl From<Sheet> for u8 {
    fn from(s: Sheet) -> u8 {
        s.index()
    }
}

impl TryFrom<u8> for Sheet {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sheet::First),
            2 => Ok(Sheet::Second),
            _ => Err(format!("sheet must be 1 or 2, got {v}")),
        }
    }
}

/// λ + i0 or λ − i0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// k with k² = z on the given sheet. Real positive z gives k = ±√z.
pub fn momentum(z: Complex64, sheet: Sheet) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::BranchPoint);
    }
    let k = if z.im == 0.0 {
        if z.re > 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        let k = z.sqrt();
        if k.im < 0.0 {
            -k
        } else {
            k
        }
    };
    Ok(match sheet {
        Sheet::First => k,
        Sheet::Second => -k,
    })
}

/// (z, sheet) of a momentum.
pub fn energy(k: Complex64) -> (Complex64, Sheet) {
    let sheet = if k.im > 0.0 || (k.im == 0.0 && k.re > 0.0) {
        Sheet::First
    } else {
        Sheet::Second
    };
    let mut z = k * k;
    if k.re == 0.0 {
        z.im = 0.0;
    }
    (z, sheet)
}

/// Coordinate in which a model's pole condition is analytic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Energy,
    Momentum,
}

#[derive(Clone, Debug)]
pub enum SMatrixModel {
    Rational(RationalModel),
    RankOne(RankOneModel),
    SquareWell(SquareWellModel),
    TraceClass(TraceClassModel),
}

fn scalar(v: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_element(1, 1, v)
}

impl SMatrixModel {
    pub fn name(&self) -> String {
        match self {
            SMatrixModel::Rational(m) => m.name().to_string(),
            SMatrixModel::RankOne(m) => format!("rankone(a={})", m.a()),
            SMatrixModel::SquareWell(m) => {
                format!("squarewell(v0={}, radius={})", m.depth(), m.radius())
            }
            SMatrixModel::TraceClass(m) => m.name(),
        }
    }

    pub fn dim_k(&self) -> usize {
        match self {
            SMatrixModel::TraceClass(m) => m.data().dim_k(),
            _ => 1,
        }
    }

    pub fn sheet_count(&self) -> usize {
        match self {
            SMatrixModel::Rational(_) => 1,
            SMatrixModel::TraceClass(m) if !m.data().continuable() => 1,
            _ => 2,
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            SMatrixModel::RankOne(_) | SMatrixModel::SquareWell(_) => Chart::Momentum,
            _ => Chart::Energy,
        }
    }

    pub fn is_two_sheeted(&self) -> bool {
        self.sheet_count() == 2
    }

    /// S(z) on the given sheet. One-sheeted models ignore the sheet.
    pub fn eval(&self, z: Complex64, sheet: Sheet) -> Result<DMatrix<Complex64>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite point {z}")));
        }
        match self {
            SMatrixModel::Rational(m) => Ok(scalar(m.eval(z))),
            SMatrixModel::RankOne(m) => Ok(scalar(m.s_of_k(momentum(z, sheet)?))),
            SMatrixModel::SquareWell(m) => Ok(scalar(m.s_of_k(momentum(z, sheet)?))),
            SMatrixModel::TraceClass(m) => m.eval(z, sheet),
        }
    }

    /// Boundary value S(λ ± i0) of the physical function. For λ > 0 both
    /// sides agree; for λ < 0 they are the two rims.
    pub fn boundary(&self, lambda: f64, side: Side) -> Result<DMatrix<Complex64>> {
        if self.is_two_sheeted() && lambda == 0.0 {
            return Err(Error::BranchPoint);
        }
        if let SMatrixModel::TraceClass(m) = self {
            return m.boundary(lambda, side);
        }
        let sheet = if lambda > 0.0 || side == Side::Plus {
            Sheet::First
        } else {
            Sheet::Second
        };
        self.eval(Complex64::new(lambda, 0.0), sheet)
    }

    /// Analytic scalar whose zeros are the poles of S, in the model's chart.
    /// For the energy chart the sheet selects the branch; for the momentum
    /// chart it is implied by u.
    pub fn pole_function(&self, u: Complex64, sheet: Sheet) -> Result<Complex64> {
        match self {
            SMatrixModel::Rational(m) => Ok(m.denominator(u)),
            SMatrixModel::RankOne(m) => Ok(m.pole_function(u)),
            SMatrixModel::SquareWell(m) => Ok(m.jost(u)),
            SMatrixModel::TraceClass(m) => {
                let (l, _) = m.build_l(u, sheet)?;
                Ok(l.determinant())
            }
        }
    }

    pub fn to_chart(&self, z: Complex64, sheet: Sheet) -> Result<Complex64> {
        match self.chart() {
            Chart::Energy => Ok(z),
            Chart::Momentum => momentum(z, sheet),
        }
    }

    pub fn from_chart(&self, u: Complex64, sheet: Sheet) -> (Complex64, Sheet) {
        match self.chart() {
            Chart::Energy if self.is_two_sheeted() => (u, sheet),
            Chart::Energy => (u, Sheet::First),
            Chart::Momentum => energy(u),
        }
    }

    /// Known pole positions, when the model has them in closed form.
    pub fn pole_hints(&self) -> Vec<(Complex64, Sheet)> {
        match self {
            SMatrixModel::Rational(m) => m.poles().iter().map(|&p| (p, Sheet::First)).collect(),
            SMatrixModel::RankOne(m) => m.exact_poles(),
            _ => Vec::new(),
        }
    }

    /// Poles of S(· + i0) on ℝ₋ + i0 that are not zeros of the pole
    /// function (they come from the form factors), with their orders.
    pub fn form_factor_rim_poles(&self) -> Vec<(f64, u32)> {
        match self {
            SMatrixModel::RankOne(_) => vec![(-1.0, 2)],
            SMatrixModel::TraceClass(m) => m.data().form_factor_rim_poles(),
            _ => Vec::new(),
        }
    }

    /// S evaluated on the real grid as the physical boundary value from
    /// above: S(λ) for λ > 0 and the upper rim for λ < 0.
    pub fn on_real_line(&self, lambda: f64) -> Result<DMatrix<Complex64>> {
        if lambda == 0.0 && self.is_two_sheeted() {
            // continuous at 0 for every model shipped here
            let h = 1e-12;
            let a = self.boundary(h, Side::Plus)?;
            let b = self.boundary(-h, Side::Plus)?;
            return Ok((a + b) * Complex64::new(0.5, 0.0));
        }
        self.boundary(lambda, Side::Plus)
    }
}

/// JSON model description.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Example1,
    Rational {
        #[serde(default)]
        zeros: Vec<[f64; 2]>,
        #[serde(default)]
        poles: Vec<[f64; 2]>,
    },
    Rankone {
        a: f64,
    },
    Squarewell {
        v0: f64,
        #[serde(alias = "a")]
        radius: f64,
    },
    Traceclass {
        #[serde(default)]
        form_factor: Option<String>,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        file: Option<PathBuf>,
    },
}

pub fn model_from_spec(spec: &ModelSpec) -> Result<SMatrixModel> {
    model_from_spec_in(spec, Path::new("."))
}

/// As [`model_from_spec`], resolving relative CSV paths against `base`.
pub fn model_from_spec_in(spec: &ModelSpec, base: &Path) -> Result<SMatrixModel> {
    let c = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
    Ok(match spec {
        ModelSpec::Example1 => SMatrixModel::Rational(RationalModel::example1()),
        ModelSpec::Rational { zeros, poles } => SMatrixModel::Rational(RationalModel::new(
            zeros.iter().map(c).collect(),
            poles.iter().map(c).collect(),
        )?),
        ModelSpec::Rankone { a } => SMatrixModel::RankOne(RankOneModel::new(*a)?),
        ModelSpec::Squarewell { v0, radius } => {
            SMatrixModel::SquareWell(SquareWellModel::new(*v0, *radius)?)
        }
        ModelSpec::Traceclass {
            form_factor,
            a,
            file,
        } => {
            let data = match (form_factor.as_deref(), file) {
                (Some("rankone"), None) => {
                    let a = a.ok_or_else(|| {
                        Error::ModelSpec("traceclass rankone form factor needs \"a\"".into())
                    })?;
                    TraceClassData::rank_one(a)?
                }
                (None, Some(path)) => {
                    let path = if path.is_relative() {
                        base.join(path)
                    } else {
                        path.clone()
                    };
                    TraceClassData::from_csv(&path)?
                }
                (Some(other), None) => {
                    return Err(Error::ModelSpec(format!("unknown form factor {other:?}")))
                }
                _ => {
                    return Err(Error::ModelSpec(
                        "traceclass needs exactly one of \"form_factor\" or \"file\"".into(),
                    ))
                }
            };
            SMatrixModel::TraceClass(TraceClassModel::new(data))
        }
    })
}

pub fn model_from_json(text: &str) -> Result<SMatrixModel> {
    let spec: ModelSpec =
        serde_json::from_str(text).map_err(|e| Error::ModelSpec(e.to_string()))?;
    model_from_spec(&spec)
}
