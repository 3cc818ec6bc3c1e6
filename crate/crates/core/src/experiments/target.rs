//! Target densities with known coefficients, and samplers for them.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::estimators::Sample;
use crate::orthopoly::{Family, OrthonormalBasis};

/// Points of the positivity / envelope grid.
pub const POSITIVITY_GRID: usize = 2001;
/// Half-width of the grid on unbounded supports.
pub const GRID_HALF_WIDTH: f64 = 8.0;
/// Lowest acceptable rejection-sampling acceptance rate.
pub const MIN_ACCEPTANCE: f64 = 0.01;
/// Multiplier on the grid maximum used as the rejection envelope.
pub const ENVELOPE_SLACK: f64 = 1.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum TargetDensity {
    /// `θ_0 = 1`, `θ_k = c (k+1)^{-(t+1/2)} (-1)^k` for `1 <= k <= k_max`.
    SobolevSeries {
        #[serde(default = "default_t")]
        t: f64,
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default = "default_k_max")]
        k_max: usize,
        /// Declared radius `R`; when given, `Σ θ_k² (k+1)^{2t} <= R²` is enforced.
        #[serde(default)]
        radius: Option<f64>,
    },
    /// Equal-weight mixture of unit-variance normals (Lebesgue density),
    /// represented relative to γ.
    BimodalGaussian {
        #[serde(default = "default_centers")]
        centers: [f64; 2],
    },
    /// `f ≡ 1` relative to μ.
    BaseMeasureItself,
}

fn default_t() -> f64 {
    1.0
}
fn default_scale() -> f64 {
    0.3
}
fn default_k_max() -> usize {
    40
}
fn default_centers() -> [f64; 2] {
    [-2.0, 2.0]
}

impl TargetDensity {
    pub fn sobolev_default() -> Self {
        TargetDensity::SobolevSeries {
            t: default_t(),
            scale: default_scale(),
            k_max: default_k_max(),
            radius: None,
        }
    }

    pub fn bimodal_default() -> Self {
        TargetDensity::BimodalGaussian { centers: default_centers() }
    }

    /// Smoothness index, where one is declared.
    pub fn smoothness(&self) -> Option<f64> {
        match self {
            TargetDensity::SobolevSeries { t, .. } => Some(*t),
            _ => None,
        }
    }
}

/// A target validated against a basis: positive on the grid, with a
/// rejection envelope when sampling needs one.
#[derive(Debug, Clone)]
pub struct Target {
    pub kind: TargetDensity,
    pub basis: OrthonormalBasis,
    /// Finite coefficient list for series targets.
    coefficients: Vec<f64>,
    /// Envelope constant `M >= sup f` for rejection against μ.
    envelope: f64,
}

impl Target {
    pub fn new(kind: TargetDensity, basis: OrthonormalBasis) -> Result<Self> {
        let coefficients = match &kind {
            TargetDensity::SobolevSeries { t, scale, k_max, radius } => {
                if !(*t > 0.0) || !scale.is_finite() {
                    return Err(Error::InvalidConfig(format!("invalid Sobolev target t={t}, scale={scale}")));
                }
                let th: Vec<f64> = (0..=*k_max)
                    .map(|k| {
                        if k == 0 {
                            1.0
                        } else {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            scale * ((k + 1) as f64).powf(-(t + 0.5)) * sign
                        }
                    })
                    .collect();
                if let Some(r) = radius {
                    let norm = sobolev_norm_sq(&th, *t);
                    if norm > r * r {
                        return Err(Error::InvalidConfig(format!("Sobolev norm² {norm} exceeds R² = {}", r * r)));
                    }
                }
                th
            }
            TargetDensity::BimodalGaussian { .. } => {
                if basis.family != Family::HermiteProbabilist {
                    return Err(Error::InvalidConfig("the bimodal target needs the Hermite basis".into()));
                }
                Vec::new()
            }
            TargetDensity::BaseMeasureItself => vec![1.0],
        };
        let mut target = Self {
            kind,
            basis,
            coefficients,
            envelope: 1.0,
        };
        if let TargetDensity::SobolevSeries { .. } = target.kind {
            let mut max = 0.0f64;
            for x in target.positivity_grid() {
                let v = target.density(x);
                if v < 0.0 {
                    return Err(Error::NegativeTarget { x, value: v });
                }
                max = max.max(v);
            }
            target.envelope = ENVELOPE_SLACK * max;
            let rate = 1.0 / target.envelope;
            if rate < MIN_ACCEPTANCE {
                return Err(Error::LowAcceptance { rate });
            }
        }
        Ok(target)
    }

    /// 2001 equally spaced points over the support (or `[-8, 8]`).
    pub fn positivity_grid(&self) -> Vec<f64> {
        let (lo, hi) = match self.basis.family {
            Family::LegendreUniform => (-1.0, 1.0),
            Family::HermiteProbabilist => (-GRID_HALF_WIDTH, GRID_HALF_WIDTH),
        };
        let step = (hi - lo) / (POSITIVITY_GRID - 1) as f64;
        (0..POSITIVITY_GRID).map(|i| lo + step * i as f64).collect()
    }

    /// Density relative to μ.
    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            TargetDensity::SobolevSeries { .. } => self.basis.eval_series(&self.coefficients, x),
            TargetDensity::BimodalGaussian { centers } => centers.iter().map(|&c| 0.5 * (c * x - 0.5 * c * c).exp()).sum(),
            TargetDensity::BaseMeasureItself => 1.0,
        }
    }

    /// Exact coefficient `θ_k = ⟨f, P_k⟩_{L²(μ)}`.
    pub fn coefficient(&self, k: usize) -> f64 {
        match &self.kind {
            TargetDensity::BimodalGaussian { centers } => {
                // exp(cx - c²/2) = Σ c^k He_k(x)/k!  ⇒  θ_k = c^k / √k!
                centers
                    .iter()
                    .map(|&c| {
                        if k == 0 {
                            0.5
                        } else if c == 0.0 {
                            0.0
                        } else {
                            let mag = (k as f64 * c.abs().ln() - 0.5 * ln_factorial(k as u64)).exp();
                            let sign = if c < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                            0.5 * sign * mag
                        }
                    })
                    .sum()
            }
            _ => self.coefficients.get(k).copied().unwrap_or(0.0),
        }
    }

    /// Highest index with a nonzero coefficient, `None` for infinite series.
    pub fn degree(&self) -> Option<usize> {
        match self.kind {
            TargetDensity::BimodalGaussian { .. } => None,
            _ => Some(self.coefficients.len() - 1),
        }
    }

    /// `Σ_{k>K} θ_k²`, the squared bias of the truncation-`K` series estimator.
    pub fn tail_sq(&self, k_cut: usize) -> f64 {
        let end = match self.degree() {
            Some(d) => d,
            None => {
                // terms decay like c^{2k}/k!; stop well past the peak
                let c = match self.kind {
                    TargetDensity::BimodalGaussian { centers } => centers[0].abs().max(centers[1].abs()),
                    _ => 0.0,
                };
                (k_cut + 1).max((4.0 * c * c) as usize + 200)
            }
        };
        // summed smallest-first
        (k_cut + 1..=end).rev().map(|k| self.coefficient(k).powi(2)).sum()
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// `n` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        match &self.kind {
            TargetDensity::BaseMeasureItself => {
                for _ in 0..n {
                    out.push(self.draw_base(rng));
                }
            }
            TargetDensity::BimodalGaussian { centers } => {
                for _ in 0..n {
                    let c = if rng.random::<bool>() { centers[1] } else { centers[0] };
                    let z: f64 = StandardNormal.sample(rng);
                    out.push(c + z);
                }
            }
            TargetDensity::SobolevSeries { .. } => {
                let mut proposals = 0usize;
                while out.len() < n {
                    let x = self.draw_base(rng);
                    let u: f64 = rng.random();
                    proposals += 1;
                    if u * self.envelope <= self.density(x) {
                        out.push(x);
                    }
                    if proposals >= 10_000 && (out.len() as f64) < MIN_ACCEPTANCE * proposals as f64 {
                        return Err(Error::LowAcceptance {
                            rate: out.len() as f64 / proposals as f64,
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Draws wrapped as a [`Sample`] tagged with `seed`.
    pub fn sample_with_seed<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, seed: u64) -> Result<Sample> {
        Sample::with_seed(self.sample(n, rng)?, seed)
    }

    fn draw_base<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.basis.family {
            Family::HermiteProbabilist => StandardNormal.sample(rng),
            Family::LegendreUniform => rng.random_range(-1.0..=1.0),
        }
    }
}

/// `Σ_k θ_k² (k+1)^{2t}`, the norm of the class with `λ_k = (k+1)^{-2}`.
pub fn sobolev_norm_sq(theta: &[f64], t: f64) -> f64 {
    theta.iter().enumerate().map(|(k, th)| th * th * ((k + 1) as f64).powf(2.0 * t)).sum()
}
