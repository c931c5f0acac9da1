//! Discrete realization of Ff(λ) = (2π)^{-1/2} ∫ e^{-iλx} f(x) dx.
//!
//! With x_j = -L + jΔ and λ_k = -Λ + kδ (Λ = π/Δ, δΔ = 2π/n) the kernel
//! factorizes as e^{-iΛL} (-1)^j (-1)^k e^{-2πijk/n}; ΛL = πn/2, so the
//! global phase is an exact power of -i.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: Direction) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match direction {
            Direction::Forward => p.plan_fft_forward(n),
            Direction::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// (-i)^n for the forward transform, i^n for the inverse.
fn global_phase(n: usize, direction: Direction) -> Complex64 {
    let unit = match direction {
        Direction::Forward => Complex64::new(0.0, -1.0),
        Direction::Inverse => Complex64::new(0.0, 1.0),
    };
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => unit,
        2 => Complex64::new(-1.0, 0.0),
        _ => -unit,
    }
}

/// Transform one component in place. The result lives on the dual grid.
pub(crate) fn transform_slice(buf: &mut [Complex64], spacing: f64, direction: Direction) {
    let n = buf.len();
    for v in buf.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
    plan(n, direction).process(buf);
    let scale = global_phase(n, direction) * (spacing / (2.0 * PI).sqrt());
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= if k % 2 == 0 { scale } else { -scale };
    }
}

/// Forward maps a function of x to a function of λ on the dual grid;
/// inverse maps back. Both are unitary for the Δ-weighted norm.
pub fn fourier(f: &GridFunction, direction: Direction) -> GridFunction {
    let grid = f.grid();
    let dual = grid.dual();
    let mut out = GridFunction::zeros(dual, f.dim_k());
    for c in 0..f.dim_k() {
        let dst = out.component_mut(c);
        dst.copy_from_slice(f.component(c));
        transform_slice(dst, grid.spacing(), direction);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_hardy::grid::make_grid;

    #[test]
    fn gaussian_is_self_dual() {
        let g = make_grid(1 << 12, 20.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0));
        let fh = fourier(&f, Direction::Forward);
        let dual = fh.grid();
        let err = fh
            .component(0)
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let l = dual.point(k);
                (v - Complex64::new((-l * l / 2.0).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "max error {err}");
    }

    #[test]
    fn shifted_gaussian_picks_up_phase() {
        // F[e^{-(x-a)^2/2}](λ) = e^{-iλa} e^{-λ²/2}
        let a = 1.5;
        let g = make_grid(1 << 11, 16.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new((-(x - a) * (x - a) / 2.0).exp(), 0.0));
        let fh = fourier(&f, Direction::Forward);
        for k in (0..g.n_points()).step_by(37) {
            let l = fh.grid().point(k);
            let want = Complex64::from_polar((-l * l / 2.0).exp(), -l * a);
            assert!((fh.component(0)[k] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn phase_is_exact_for_every_residue() {
        for n in [4usize, 5, 6, 7] {
            let p = global_phase(n, Direction::Forward) * global_phase(n, Direction::Inverse);
            assert_eq!(p, Complex64::new(1.0, 0.0));
        }
    }
}
