use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use twinkernel::experiments::ExperimentConfig;
use twinkernel::group::GroupElement;
use twinkernel::kernel::{EigenvalueProfile, SoftRate};
use twinkernel::orthopoly::Family;
use twinkernel::verify::VerifyConfig;

/// One JSON file per run; every section is optional and falls back to defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub estimate: Option<EstimateConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub transport: Option<TransportConfig>,
    #[serde(default)]
    pub kernel_table: Option<KernelTableConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Method {
    Series,
    SeriesTransported,
    Parzen,
    Soft,
    Multimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn for_family(family: Family) -> Self {
        match family {
            Family::HermiteProbabilist => Self { lo: -4.0, hi: 4.0, points: 81 },
            Family::LegendreUniform => Self { lo: -1.0, hi: 1.0, points: 81 },
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub method: Method,
    #[serde(default = "hermite")]
    pub basis: Family,
    /// Truncation level (per center for `multimodal`).
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub group: Option<GroupElement>,
    /// Bandwidth for `parzen` and `soft`.
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub rate: SoftRate,
    #[serde(default = "default_centers")]
    pub centers: Vec<f64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            method: Method::Series,
            basis: hermite(),
            k: default_k(),
            group: None,
            h: None,
            rate: SoftRate::Linear,
            centers: default_centers(),
            grid: None,
        }
    }
}

fn hermite() -> Family {
    Family::HermiteProbabilist
}
fn default_k() -> usize {
    5
}
fn default_centers() -> Vec<f64> {
    vec![-2.0, 2.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Study {
    BiasVariance,
    Rates,
    Equivariance,
    Multimodal,
}

impl Study {
    pub const ALL: [Study; 4] = [Study::BiasVariance, Study::Rates, Study::Equivariance, Study::Multimodal];

    pub fn file_stem(&self) -> &'static str {
        match self {
            Study::BiasVariance => "bias_variance",
            Study::Rates => "rates",
            Study::Equivariance => "equivariance_error",
            Study::Multimodal => "multimodal",
        }
    }

    pub fn preset(&self) -> ExperimentConfig {
        match self {
            Study::BiasVariance => ExperimentConfig::bias_variance_preset(),
            Study::Rates => ExperimentConfig::rates_preset(),
            Study::Equivariance => ExperimentConfig::equivariance_preset(),
            Study::Multimodal => ExperimentConfig::multimodal_preset(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Studies to run; all four when empty.
    #[serde(default)]
    pub studies: Vec<Study>,
    #[serde(default)]
    pub bias_variance: Option<ExperimentConfig>,
    #[serde(default)]
    pub rates: Option<ExperimentConfig>,
    #[serde(default)]
    pub equivariance: Option<ExperimentConfig>,
    #[serde(default)]
    pub multimodal: Option<ExperimentConfig>,
}

impl SimulateConfig {
    pub fn experiment(&self, study: Study) -> ExperimentConfig {
        let slot = match study {
            Study::BiasVariance => &self.bias_variance,
            Study::Rates => &self.rates,
            Study::Equivariance => &self.equivariance,
            Study::Multimodal => &self.multimodal,
        };
        slot.clone().unwrap_or_else(|| study.preset())
    }

    pub fn selected(&self) -> Vec<Study> {
        if self.studies.is_empty() {
            Study::ALL.to_vec()
        } else {
            self.studies.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    #[serde(default = "hermite")]
    pub basis: Family,
    #[serde(default = "default_transport_groups")]
    pub groups: Vec<GroupElement>,
    #[serde(default = "default_k")]
    pub k_max: usize,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

fn default_transport_groups() -> Vec<GroupElement> {
    vec![GroupElement::translation(2.0)]
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            basis: hermite(),
            groups: default_transport_groups(),
            k_max: default_k(),
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTableConfig {
    #[serde(default = "hermite")]
    pub basis: Family,
    #[serde(default = "default_profile")]
    pub profile: EigenvalueProfile,
    #[serde(default)]
    pub k_spec: Option<usize>,
    #[serde(default = "default_transport_groups")]
    pub groups: Vec<GroupElement>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

fn default_profile() -> EigenvalueProfile {
    EigenvalueProfile::Geometric { rho: 0.5 }
}

impl Default for KernelTableConfig {
    fn default() -> Self {
        Self {
            basis: hermite(),
            profile: default_profile(),
            k_spec: None,
            groups: default_transport_groups(),
            grid: None,
        }
    }
}
