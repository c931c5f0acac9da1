//! Half-line projections P± and Hardy projections Q± = F P∓ F⁻¹.
//!
//! A bare FFT round trip misrepresents functions with 1/λ tails. Their
//! inverse transforms jump at x = 0, and the Gibbs ringing of that jump
//! straddles the cut. The projector below removes the jump before cutting:
//! the one-sided limits g(0-) and g(0+) are estimated from samples on each
//! side (low-order polynomial plus the discrete ringing shapes (-1)^m/m and
//! (-1)^m/m²). They are cancelled with the profiles 1/(λ+i) ∈ H²₊ and
//! 1/(λ-i) ∈ H²₋, and the cancelled part is added back exactly. The same is
//! done for the one-sided slopes with 1/(λ±i)², whose transforms have a kink
//! at x = 0; this takes the 1/λ² part of the tails. Each functional reads
//! only one side of the cut, so Q₊ stays idempotent and Q₊ + Q₋ = I holds
//! exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;

use super::fourier::{transform_slice, Direction};
use super::grid::{Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// P±: keep x ≥ 0 (Plus) or x < 0 (Minus). The x = 0 sample belongs to P₊.
pub fn project_half_line(f: &GridFunction, sign: Sign) -> GridFunction {
    let mut out = f.clone();
    let origin = f.grid().origin();
    for c in 0..f.dim_k() {
        let comp = out.component_mut(c);
        let range = match sign {
            Sign::Plus => 0..origin,
            Sign::Minus => origin..comp.len(),
        };
        comp[range]
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
    }
    out
}

const FIT_DEGREE: usize = 4;
const FIT_WIDTH: f64 = 0.05;

struct HardyProjector {
    spacing: f64,
    dual_spacing: f64,
    origin: usize,
    /// value and slope functionals at the cut
    weights: [Vec<f64>; 2],
    /// H²₊ profiles 1/(λ+i), 1/(λ+i)²
    w_plus: [Vec<Complex64>; 2],
    /// transforms of 1/(λ+i), 1/(λ-i), 1/(λ+i)², 1/(λ-i)²
    x_prof: [Vec<Complex64>; 4],
    coupling_inv: Matrix4<Complex64>,
}

impl HardyProjector {
    fn new(grid: Grid) -> Self {
        let n = grid.n_points();
        let origin = grid.origin();
        let dual = grid.dual();
        let k = ((FIT_WIDTH / dual.spacing()).round() as usize)
            .clamp(8, 64)
            .min(origin.saturating_sub(1));

        let ncols = FIT_DEGREE + 2;
        let design = DMatrix::<f64>::from_fn(k, ncols, |row, col| {
            let m = (row + 1) as f64;
            let alt = if (row + 1) % 2 == 0 { 1.0 } else { -1.0 };
            match col {
                c if c < FIT_DEGREE => (m / k as f64).powi(c as i32),
                c if c == FIT_DEGREE => alt / m,
                _ => alt / (m * m),
            }
        });
        let weights = match design.pseudo_inverse(1e-13) {
            Ok(p) if k > 0 => [0, 1].map(|r| p.row(r).iter().copied().collect()),
            _ => [vec![0.0; k], vec![0.0; k]],
        };

        let profile = |s: f64, p: i32| -> Vec<Complex64> {
            grid.points()
                .map(|l| Complex64::new(l, s).powi(-p))
                .collect()
        };
        let w_plus = [profile(1.0, 1), profile(1.0, 2)];
        let mut x_prof = [
            profile(1.0, 1),
            profile(-1.0, 1),
            profile(1.0, 2),
            profile(-1.0, 2),
        ];
        for x in x_prof.iter_mut() {
            transform_slice(x, grid.spacing(), Direction::Inverse);
        }

        let mut proj = Self {
            spacing: grid.spacing(),
            dual_spacing: dual.spacing(),
            origin,
            weights,
            w_plus,
            x_prof,
            coupling_inv: Matrix4::identity(),
        };
        let mut coupling = Matrix4::zeros();
        for (j, x) in proj.x_prof.iter().enumerate() {
            coupling.set_column(j, &proj.functionals(x));
        }
        proj.coupling_inv = coupling.try_inverse().unwrap_or_else(Matrix4::zeros);
        debug_assert_eq!(proj.w_plus[0].len(), n);
        proj
    }

    /// Extrapolated value and slope at x = 0, from the left and from the
    /// right: (left value, right value, left slope, right slope).
    fn functionals(&self, g: &[Complex64]) -> Vector4<Complex64> {
        let mut out = Vector4::zeros();
        for (r, weights) in self.weights.iter().enumerate() {
            for (i, w) in weights.iter().enumerate() {
                let m = i + 1;
                out[2 * r] += g[self.origin - m] * w;
                out[2 * r + 1] += g[self.origin + m] * w;
            }
        }
        out
    }

    /// Q₊ applied to one component, in place.
    fn apply_plus(&self, f: &mut [Complex64]) {
        let mut g = f.to_vec();
        transform_slice(&mut g, self.spacing, Direction::Inverse);
        let a = self.coupling_inv * self.functionals(&g);
        for (i, v) in g.iter_mut().enumerate() {
            *v = if i < self.origin {
                *v - (0..4).map(|j| a[j] * self.x_prof[j][i]).sum::<Complex64>()
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        transform_slice(&mut g, self.dual_spacing, Direction::Forward);
        for (i, v) in f.iter_mut().enumerate() {
            *v = g[i] + a[0] * self.w_plus[0][i] + a[2] * self.w_plus[1][i];
        }
    }
}

type ProjectorCache = Mutex<HashMap<(usize, u64), Arc<HardyProjector>>>;

fn projector_for(grid: Grid) -> Arc<HardyProjector> {
    static CACHE: OnceLock<ProjectorCache> = OnceLock::new();
    let key = (grid.n_points(), grid.half_extent().to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("projector cache poisoned").get(&key) {
        return p.clone();
    }
    let built = Arc::new(HardyProjector::new(grid));
    cache
        .lock()
        .expect("projector cache poisoned")
        .entry(key)
        .or_insert(built)
        .clone()
}

/// Q₊ (Plus) or Q₋ (Minus) of a function of λ.
pub fn project_hardy(f: &GridFunction, sign: Sign) -> GridFunction {
    let proj = projector_for(f.grid());
    let mut plus = f.clone();
    for c in 0..f.dim_k() {
        proj.apply_plus(plus.component_mut(c));
    }
    match sign {
        Sign::Plus => plus,
        Sign::Minus => f - &plus,
    }
}

/// The bare F P∓ F⁻¹ round trip, without the jump correction. Kept for
/// comparison; not used by the library.
pub fn project_hardy_uncorrected(f: &GridFunction, sign: Sign) -> GridFunction {
    let grid = f.grid();
    let origin = grid.origin();
    let mut out = f.clone();
    for c in 0..f.dim_k() {
        let comp = out.component_mut(c);
        transform_slice(comp, grid.spacing(), Direction::Inverse);
        for (i, v) in comp.iter_mut().enumerate() {
            let keep = match sign {
                Sign::Plus => i < origin,
                Sign::Minus => i >= origin,
            };
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        transform_slice(comp, grid.dual().spacing(), Direction::Forward);
    }
    out
}
