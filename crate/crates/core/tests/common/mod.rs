#![allow(dead_code)]

use gamov::grid_hardy::{Grid, GridFunction};
use gamov::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_function(grid: Grid, dim_k: usize, seed: u64) -> GridFunction {
    let mut rng = StdRng::seed_from_u64(seed);
    let comps = (0..dim_k)
        .map(|_| {
            (0..grid.n_points())
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect();
    GridFunction::from_components(grid, comps).unwrap()
}

/// k/(λ - ζ) as a scalar grid function.
pub fn pole(grid: Grid, zeta: Complex64) -> GridFunction {
    GridFunction::from_fn(grid, move |l| 1.0 / (l - zeta))
}

pub fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    (a - b).norm() / b.norm()
}

/// Composite Simpson rule on [a, b] with n (even) panels.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + j as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// ∫₀^∞ (2/π)√λ / ((λ+1)²(z−λ)) dλ for z off [0, ∞), after λ = tan²θ:
/// (4/π) ∫₀^{π/2} sin²θ cos²θ / (z cos²θ − sin²θ) dθ.
pub fn rankone_quad(z: Complex64) -> Complex64 {
    let f = |t: f64| {
        let (s, c2) = (t.sin(), t.cos());
        (s * s * c2 * c2) / (z * c2 * c2 - s * s) * (4.0 / std::f64::consts::PI)
    };
    simpson(f, 0.0, std::f64::consts::FRAC_PI_2, 20000)
}

/// The same integral at μ ± i0 by Sokhotski splitting: principal value
/// (simple zero of the denominator subtracted) ∓ iπ times the density.
pub fn rankone_quad_boundary(mu: f64, plus: bool) -> Complex64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let t0 = mu.sqrt().atan();
    let num = |t: f64| (t.sin() * t.cos()).powi(2) * (4.0 / PI);
    let den = |t: f64| mu * t.cos().powi(2) - t.sin().powi(2);
    let dden = -(mu + 1.0) * (2.0 * t0).sin();
    let r = num(t0) / dden;
    let f = |t: f64| {
        let d = t - t0;
        if d.abs() < 1e-7 {
            // removable point; neighbours average it out
            let e = 1e-6;
            let g = |t: f64| num(t) / den(t) - r / (t - t0);
            return c(0.5 * (g(t0 - e) + g(t0 + e)), 0.0);
        }
        c(num(t) / den(t) - r / d, 0.0)
    };
    let pv = simpson(f, 0.0, FRAC_PI_2, 20001 + 1) + c(r * ((FRAC_PI_2 - t0) / t0).ln(), 0.0);
    let density = (2.0 / PI) * mu.sqrt() / (mu + 1.0).powi(2);
    let jump = if plus { -PI * density } else { PI * density };
    pv + c(0.0, jump)
}

/// Bound states of the square well by shooting: RK4 from the origin,
/// matched to e^{−κr} outside, bisection on u'(a) + κ u(a).
pub fn shooting_bound_states(v0: f64, a: f64) -> Vec<f64> {
    let mismatch = |kappa: f64| {
        let q = -(v0 - kappa * kappa);
        let steps = 4000;
        let h = a / steps as f64;
        let (mut u, mut p) = (0.0f64, 1.0f64);
        for _ in 0..steps {
            let (k1u, k1p) = (p, q * u);
            let (k2u, k2p) = (p + 0.5 * h * k1p, q * (u + 0.5 * h * k1u));
            let (k3u, k3p) = (p + 0.5 * h * k2p, q * (u + 0.5 * h * k2u));
            let (k4u, k4p) = (p + h * k3p, q * (u + h * k3u));
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        p + kappa * u
    };
    let top = v0.sqrt();
    let n = 2000;
    let mut out = Vec::new();
    for j in 0..n {
        let (mut lo, mut hi) = (
            top * j as f64 / n as f64 + 1e-9,
            top * (j + 1) as f64 / n as f64,
        );
        let (mut flo, fhi) = (mismatch(lo), mismatch(hi));
        if flo * fhi > 0.0 {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let fm = mismatch(mid);
            if fm * flo <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Zero of the ODE Jost function near k0, by secant iteration.
pub fn ode_jost_zero(k0: Complex64, v0: f64, a: f64) -> Complex64 {
    let f = |k: Complex64| gamov::smatrix_models::jost_f_ode(k, v0, a, 4000);
    let (mut x0, mut x1) = (k0, k0 * 1.001);
    let (mut f0, mut f1) = (f(x0), f(x1));
    for _ in 0..100 {
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if (x1 - x0).norm() < 1e-13 * x1.norm() {
            break;
        }
    }
    x1
}
