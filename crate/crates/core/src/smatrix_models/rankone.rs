use num_complex::Complex64;

use super::{energy, momentum, Sheet};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// V = a (e, ·) e on L²(ℝ₊) with e(λ) = √(2/π) λ^{1/4} / (λ + 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankOneModel {
    a: f64,
}

/// (e, R₀(z) e) = −1/(1 − ik)², k the momentum on `sheet`.
pub fn rankone_resolvent_elem(z: Complex64, sheet: Sheet) -> Result<Complex64> {
    let k = momentum(z, sheet)?;
    Ok(resolvent_elem_k(k))
}

pub(crate) fn resolvent_elem_k(k: Complex64) -> Complex64 {
    let d = ONE - I * k;
    -ONE / (d * d)
}

impl RankOneModel {
    pub fn new(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::ModelSpec(format!(
                "rankone needs a finite a ≠ 0, got {a}"
            )));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// L(k) = 1 − a (e, R₀ e).
    pub fn l_of_k(&self, k: Complex64) -> Complex64 {
        ONE - self.a * resolvent_elem_k(k)
    }

    /// S(k) = L(−k)/L(k), the closed form written without cancellation.
    pub fn s_of_k(&self, k: Complex64) -> Complex64 {
        let m = ONE - I * k;
        let p = ONE + I * k;
        (m * m * (p * p + self.a)) / (p * p * (m * m + self.a))
    }

    /// (1 − ik)² + a, whose zeros are the zeros of L.
    pub fn pole_function(&self, k: Complex64) -> Complex64 {
        let m = ONE - I * k;
        m * m + self.a
    }

    /// Roots of (1 − ik)² + a = 0 as (z, sheet).
    pub fn exact_poles(&self) -> Vec<(Complex64, Sheet)> {
        let s = Complex64::new(self.a, 0.0).sqrt();
        // 1 − ik = ±i√a
        [I * s, -I * s]
            .iter()
            .map(|&r| {
                let k = (ONE - r) / I;
                let k = if self.a < 0.0 {
                    Complex64::new(0.0, k.im)
                } else {
                    k
                };
                energy(k)
            })
            .collect()
    }
}
