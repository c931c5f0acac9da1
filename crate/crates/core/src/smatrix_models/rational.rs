use num_complex::Complex64;

use crate::error::{Error, Result};

/// One-sheeted scalar S(z) = Π(z − zⱼ) / Π(z − pⱼ).
#[derive(Clone, Debug, PartialEq)]
pub struct RationalModel {
    name: String,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl RationalModel {
    pub fn new(zeros: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        if zeros.len() != poles.len() {
            return Err(Error::ModelSpec(format!(
                "rational model needs as many zeros as poles, got {} and {}",
                zeros.len(),
                poles.len()
            )));
        }
        if zeros
            .iter()
            .chain(&poles)
            .any(|p| !(p.re.is_finite() && p.im.is_finite()))
        {
            return Err(Error::ModelSpec("non-finite zero or pole".into()));
        }
        Ok(Self {
            name: "rational".into(),
            zeros,
            poles,
        })
    }

    /// S(λ) = (λ+i)/(λ−i) · (λ−1−i)/(λ−1+i), poles i and 1−i.
    pub fn example1() -> Self {
        let c = Complex64::new;
        Self {
            name: "example1".into(),
            zeros: vec![c(0.0, -1.0), c(1.0, 1.0)],
            poles: vec![c(0.0, 1.0), c(1.0, -1.0)],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn numerator(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().map(|&w| z - w).product()
    }

    pub fn denominator(&self, z: Complex64) -> Complex64 {
        self.poles.iter().map(|&p| z - p).product()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // factor by factor keeps the modulus near one on the real line
        self.zeros
            .iter()
            .zip(&self.poles)
            .map(|(&w, &p)| (z - w) / (z - p))
            .product()
    }
}
