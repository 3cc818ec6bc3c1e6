//! Base measures on the real line.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A reference measure μ, described by its density relative to Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Standard Gaussian γ with density (2π)^{-1/2} e^{-x²/2}.
    GaussianStd,
    /// Uniform probability measure dx/2 on [-1, 1].
    UniformPM1,
    /// Lebesgue measure on ℝ.
    LebesgueR,
}

impl Measure {
    /// Closed support interval, with infinite endpoints where unbounded.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Measure::UniformPM1 => (-1.0, 1.0),
            Measure::GaussianStd | Measure::LebesgueR => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x >= lo && x <= hi
    }

    /// Density w(x) with respect to Lebesgue measure.
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Measure::GaussianStd => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Measure::UniformPM1 => {
                if (-1.0..=1.0).contains(&x) {
                    0.5
                } else {
                    0.0
                }
            }
            Measure::LebesgueR => 1.0,
        }
    }

    /// Total mass, `None` when infinite.
    pub fn total_mass(&self) -> Option<f64> {
        match self {
            Measure::GaussianStd | Measure::UniformPM1 => Some(1.0),
            Measure::LebesgueR => None,
        }
    }

    pub fn is_probability(&self) -> bool {
        self.total_mass() == Some(1.0)
    }

    /// Raw moment ∫ x^p dμ for the probability measures, by the moment recursions
    /// E X^p = (p-1) E X^{p-2} (Gaussian) and 1/(p+1) for even p (uniform).
    pub fn raw_moment(&self, p: u32) -> Option<f64> {
        match self {
            Measure::GaussianStd => {
                if p % 2 == 1 {
                    return Some(0.0);
                }
                let mut m = 1.0;
                let mut q = 2;
                while q <= p {
                    m *= (q - 1) as f64;
                    q += 2;
                }
                Some(m)
            }
            Measure::UniformPM1 => Some(if p % 2 == 1 { 0.0 } else { 1.0 / (p + 1) as f64 }),
            Measure::LebesgueR => None,
        }
    }
}
