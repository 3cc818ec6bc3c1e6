//! Orthonormal polynomial systems evaluated by their three-term recurrence
//!
//! ```text
//! x P_k(x) = b_{k+1} P_{k+1}(x) + a_k P_k(x) + b_k P_{k-1}(x),   P_0 = 1,  P_{-1} = 0.
//! ```
//!
//! Forward evaluation is stable in double precision for `k <= ~100` and
//! `|x| <= 12`; outside that range the caller is responsible for overflow.

use serde::{Deserialize, Serialize};

use crate::measure::Measure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Probabilists' Hermite polynomials He_k / √k!, orthonormal for the standard Gaussian.
    HermiteProbabilist,
    /// Legendre polynomials √(2k+1) L_k, orthonormal for dx/2 on [-1, 1].
    LegendreUniform,
}

/// Recurrence coefficients `(a_k, b_k)`. `b_0` is returned as 0.
pub fn recurrence_coeffs(family: Family, k: usize) -> (f64, f64) {
    let kf = k as f64;
    match family {
        Family::HermiteProbabilist => (0.0, kf.sqrt()),
        Family::LegendreUniform => {
            if k == 0 {
                (0.0, 0.0)
            } else {
                (0.0, kf / ((2.0 * kf - 1.0) * (2.0 * kf + 1.0)).sqrt())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    pub family: Family,
}

impl OrthonormalBasis {
    pub const HERMITE: Self = Self {
        family: Family::HermiteProbabilist,
    };
    pub const LEGENDRE: Self = Self {
        family: Family::LegendreUniform,
    };

    pub fn new(family: Family) -> Self {
        Self { family }
    }

    pub fn measure(&self) -> Measure {
        match self.family {
            Family::HermiteProbabilist => Measure::GaussianStd,
            Family::LegendreUniform => Measure::UniformPM1,
        }
    }

    pub fn recurrence(&self, k: usize) -> (f64, f64) {
        recurrence_coeffs(self.family, k)
    }

    pub fn in_support(&self, x: f64) -> bool {
        self.measure().contains(x)
    }

    /// `P_0(x), ..., P_{k_max}(x)`. Total: Legendre points outside [-1, 1]
    /// are evaluated too, which transported-domain code relies on.
    pub fn eval(&self, k_max: usize, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; k_max + 1];
        self.eval_into(x, &mut out);
        out
    }

    /// Fills `out[k] = P_k(x)` for `k < out.len()`.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        if out.len() == 1 {
            return;
        }
        let (a0, _) = self.recurrence(0);
        let (_, b1) = self.recurrence(1);
        out[1] = (x - a0) / b1;
        for k in 1..out.len() - 1 {
            let (ak, bk) = self.recurrence(k);
            let (_, bk1) = self.recurrence(k + 1);
            out[k + 1] = ((x - ak) * out[k] - bk * out[k - 1]) / bk1;
        }
    }

    /// Single value `P_k(x)`.
    pub fn eval_one(&self, k: usize, x: f64) -> f64 {
        self.eval(k, x)[k]
    }

    /// `Σ_k coeffs[k] P_k(x)` by Clenshaw's backward recurrence.
    pub fn eval_series(&self, coeffs: &[f64], x: f64) -> f64 {
        let n = coeffs.len();
        if n == 0 {
            return 0.0;
        }
        // y_k = c_k + (x - a_k)/b_{k+1} y_{k+1} - b_{k+1}/b_{k+2} y_{k+2}
        let mut y1 = 0.0;
        let mut y2 = 0.0;
        for k in (0..n).rev() {
            let (ak, _) = self.recurrence(k);
            let (_, bk1) = self.recurrence(k + 1);
            let (_, bk2) = self.recurrence(k + 2);
            let y = coeffs[k] + (x - ak) / bk1 * y1 - bk1 / bk2 * y2;
            y2 = y1;
            y1 = y;
        }
        y1
    }

    /// Pointwise envelope `sup_{k > K} |P_k(x)|` used by kernel tail bounds.
    ///
    /// Hermite: Cramér's inequality |He_k(x)| / √k! <= κ e^{x²/4}, κ = 1.086435.
    /// Legendre: |P_k(x)| <= √(2k+1) on [-1, 1], returned as a per-k weight
    /// through [`OrthonormalBasis::envelope_weight`].
    pub fn envelope(&self, x: f64) -> f64 {
        match self.family {
            Family::HermiteProbabilist => CRAMER_KAPPA * (0.25 * x * x).exp(),
            Family::LegendreUniform => {
                if x.abs() <= 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// k-dependent part of the envelope: 1 (Hermite) or √(2k+1) (Legendre).
    pub fn envelope_weight(&self, k: usize) -> f64 {
        match self.family {
            Family::HermiteProbabilist => 1.0,
            Family::LegendreUniform => ((2 * k + 1) as f64).sqrt(),
        }
    }
}

pub const CRAMER_KAPPA: f64 = 1.086_435;
