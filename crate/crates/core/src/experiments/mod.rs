//! Monte Carlo harness: bias–variance sweeps, rate studies, error invariance
//! under transport, and the multi-center comparison.
//!
//! Replicate `r` in cell `c` draws from a ChaCha8 stream seeded with
//! `mix(mix(master, r), c)`, where `mix(a, b) = splitmix64(a ^ splitmix64(b))`.
//! Cells run in parallel; results are gathered and reduced in index order, so
//! output does not depend on the thread count.

mod studies;
mod target;

pub use studies::*;
pub use target::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::orthopoly::{Family, OrthonormalBasis};

/// One step of the splitmix64 generator, used as a 64-bit mixing function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Seed of replicate `replicate` in cell `cell`.
pub fn stream_seed(master: u64, replicate: u64, cell: u64) -> u64 {
    mix(mix(master, replicate), cell)
}

pub fn stream_rng(master: u64, replicate: u64, cell: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, replicate, cell))
}

/// Truncation level as a function of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum KRule {
    /// Every listed `K` at every `n`.
    Fixed { values: Vec<usize> },
    /// `K = round(multiplier · n^exponent)`, exponent defaulting to `1/(2t+1)`.
    Scaling {
        #[serde(default = "one")]
        multiplier: f64,
        #[serde(default)]
        exponent: Option<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl KRule {
    pub fn values(&self, n: usize, smoothness: Option<f64>) -> Result<Vec<usize>> {
        match self {
            KRule::Fixed { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidConfig("empty K list".into()));
                }
                Ok(values.clone())
            }
            KRule::Scaling { multiplier, exponent } => {
                let e = match (exponent, smoothness) {
                    (Some(e), _) => *e,
                    (None, Some(t)) => 1.0 / (2.0 * t + 1.0),
                    (None, None) => return Err(Error::InvalidConfig("K scaling needs an exponent for this target".into())),
                };
                Ok(vec![(multiplier * (n as f64).powf(e)).round().max(0.0) as usize])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub target: TargetDensity,
    pub basis: Family,
    /// Transports compared against the base estimator (identity is always included).
    #[serde(default)]
    pub groups: Vec<GroupElement>,
    pub n_grid: Vec<usize>,
    pub k_rule: KRule,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Size of the Gauss rule used for error integrals; chosen automatically when absent.
    #[serde(default)]
    pub quadrature_nodes: Option<usize>,
    /// Centers of the multi-center estimator.
    #[serde(default = "default_mm_centers")]
    pub centers: Vec<f64>,
    /// Total dimensions compared in the multi-center study.
    #[serde(default = "default_dimensions")]
    pub dimensions: Vec<usize>,
    /// Additional center placement reported as its own scheme.
    #[serde(default)]
    pub comparison_centers: Option<Vec<f64>>,
    /// Clip estimates at zero and renormalize before computing ISE.
    #[serde(default)]
    pub positive_part: bool,
}

fn default_mm_centers() -> Vec<f64> {
    vec![-2.0, 2.0]
}

fn default_dimensions() -> Vec<usize> {
    vec![6, 10, 14]
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::InvalidConfig("n grid must be nonempty and positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("n grid must be strictly increasing".into()));
        }
        for g in &self.groups {
            g.validate()?;
        }
        Ok(())
    }

    pub fn basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::new(self.basis)
    }

    /// Identity followed by the configured non-identity groups.
    pub fn group_list(&self) -> Vec<GroupElement> {
        let mut out = vec![GroupElement::IDENTITY];
        out.extend(self.groups.iter().filter(|g| !g.is_identity()).copied());
        out
    }

    fn base(target: TargetDensity, basis: Family, groups: Vec<GroupElement>, n_grid: Vec<usize>, k_rule: KRule, replicates: usize) -> Self {
        Self {
            target,
            basis,
            groups,
            n_grid,
            k_rule,
            replicates,
            seed: 42,
            quadrature_nodes: None,
            centers: default_mm_centers(),
            dimensions: default_dimensions(),
            comparison_centers: None,
            positive_part: false,
        }
    }

    /// Sobolev target on Legendre, `K ∈ {4, 8, 16}`, `n ∈ {2000, 4000}`, 500 replicates.
    pub fn bias_variance_preset() -> Self {
        Self::base(
            TargetDensity::sobolev_default(),
            Family::LegendreUniform,
            vec![GroupElement::affine(0.5, 0.25)],
            vec![2000, 4000],
            KRule::Fixed { values: vec![4, 8, 16] },
            500,
        )
    }

    /// Sobolev target on Legendre, `n = 250·2^i` up to 16000, `K ∝ n^{1/3}`, 200 replicates.
    pub fn rates_preset() -> Self {
        Self::base(
            TargetDensity::sobolev_default(),
            Family::LegendreUniform,
            vec![GroupElement::affine(0.5, 0.25)],
            (0..7).map(|i| 250 << i).collect(),
            KRule::Scaling {
                multiplier: 1.0,
                exponent: None,
            },
            200,
        )
    }

    /// Bimodal target on Hermite under `Translation{2}` and `Dilation{0.8}`, 50 replicates.
    pub fn equivariance_preset() -> Self {
        Self::base(
            TargetDensity::bimodal_default(),
            Family::HermiteProbabilist,
            vec![GroupElement::translation(2.0), GroupElement::dilation(0.8)],
            vec![500],
            KRule::Fixed { values: vec![10] },
            50,
        )
    }

    /// Bimodal target, `n = 2000`, 50 replicates, dimensions 6, 10, 14.
    pub fn multimodal_preset() -> Self {
        Self {
            comparison_centers: Some(vec![0.0, 0.1]),
            ..Self::base(
                TargetDensity::bimodal_default(),
                Family::HermiteProbabilist,
                Vec::new(),
                vec![2000],
                KRule::Fixed { values: vec![9] },
                50,
            )
        }
    }
}

/// Short stable label for a group element.
pub fn group_label(g: &GroupElement) -> String {
    if g.is_identity() {
        return "identity".into();
    }
    match *g {
        GroupElement::Affine { a, b } => format!("affine(a={a},b={b})"),
        GroupElement::Dilation { alpha } => format!("dilation(alpha={alpha})"),
        GroupElement::Translation { b } => format!("translation(b={b})"),
    }
}

/// Fixed-precision float formatting for CSV output (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
