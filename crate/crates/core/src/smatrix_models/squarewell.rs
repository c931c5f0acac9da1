use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// s-wave scattering off the attractive well V(r) = −V₀ for r < a.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareWellModel {
    v0: f64,
    radius: f64,
}

fn sinc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Jost function F(k) = e^{ika} (cos Ka − ik sin(Ka)/K), K = √(k² + V₀).
/// Even in K, so the branch of the root does not matter.
pub fn jost_f(k: Complex64, v0: f64, radius: f64) -> Complex64 {
    let kk = (k * k + v0).sqrt();
    let x = kk * radius;
    (I * k * radius).exp() * (x.cos() - I * k * radius * sinc(x))
}

/// The same Jost function from the regular solution of
/// u'' = −(k² + V₀) u, u(0) = 0, u'(0) = 1, integrated with RK4:
/// F(k) = e^{ika} (u'(a) − ik u(a)).
pub fn jost_f_ode(k: Complex64, v0: f64, radius: f64, steps: usize) -> Complex64 {
    let q = -(k * k + v0);
    let h = radius / steps as f64;
    let mut u = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..steps {
        let (k1u, k1p) = (p, q * u);
        let (k2u, k2p) = (p + 0.5 * h * k1p, q * (u + 0.5 * h * k1u));
        let (k3u, k3p) = (p + 0.5 * h * k2p, q * (u + 0.5 * h * k2u));
        let (k4u, k4p) = (p + h * k3p, q * (u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    (I * k * radius).exp() * (p - I * k * u)
}

impl SquareWellModel {
    pub fn new(v0: f64, radius: f64) -> Result<Self> {
        if !(v0 >= 0.0 && v0.is_finite()) {
            return Err(Error::ModelSpec(format!(
                "square well depth must be ≥ 0, got {v0}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::ModelSpec(format!(
                "square well radius must be > 0, got {radius}"
            )));
        }
        Ok(Self { v0, radius })
    }

    pub fn depth(&self) -> f64 {
        self.v0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn jost(&self, k: Complex64) -> Complex64 {
        jost_f(k, self.v0, self.radius)
    }

    pub fn s_of_k(&self, k: Complex64) -> Complex64 {
        self.jost(-k) / self.jost(k)
    }
}
