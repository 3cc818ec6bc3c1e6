//! The invariant suite run by `twinkernel verify`: orthonormality, unitarity,
//! the conjugation identity, spectral equivariance, filter commutation and
//! estimator equivariance, for a basis, an eigenvalue profile and a list of
//! group elements.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimators::{transported_series_estimator, DensityEstimate, Sample};
use crate::experiments::{fmt_f64, group_label, CsvTable};
use crate::group::{dilation_form_deviation, forward_gram, DilationFormDeviation, GroupElement, Transport};
use crate::kernel::{mehler, EigenvalueProfile, Kernel, SpectralKernel, TransportedKernel};
use crate::orthopoly::{Family, OrthonormalBasis};
use crate::quadrature::{gauss_rule, DEFAULT_OVERSIZED_M};
use crate::spectral::{expansion_check, filter_commutation_error, gram_min_eigenvalue, test_grid, verify_spectral_equivariance, EquivarianceReport};

pub const ORTHONORMALITY_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-6;
pub const EIGENVALUE_TOL: f64 = 1e-6;
pub const ALIGNMENT_MIN: f64 = 0.999;
pub const MEHLER_TOL: f64 = 1e-8;
pub const FILTER_TOL: f64 = 1e-10;
pub const ESTIMATOR_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub basis: Family,
    pub profile: EigenvalueProfile,
    #[serde(default)]
    pub k_spec: Option<usize>,
    #[serde(default)]
    pub groups: Vec<GroupElement>,
    /// Size of the forward Gauss rule.
    #[serde(default = "default_m")]
    pub quadrature_nodes: usize,
    /// Highest eigen-index compared in the Nyström check.
    #[serde(default = "default_k_check")]
    pub k_check: usize,
    /// Highest degree in the unitarity Gram matrix.
    #[serde(default = "default_unitarity_k")]
    pub unitarity_k: usize,
    /// Hard cut used in the filter commutation check.
    #[serde(default = "default_filter_cut")]
    pub filter_cut: usize,
    #[serde(default = "default_estimator_k")]
    pub estimator_k: usize,
    #[serde(default)]
    pub seed: u64,
    /// Negative control: replace every `J_g` by `1/J_g`.
    #[serde(default)]
    pub corrupt_jacobian: bool,
}

fn default_m() -> usize {
    DEFAULT_OVERSIZED_M
}
fn default_k_check() -> usize {
    6
}
fn default_unitarity_k() -> usize {
    10
}
fn default_filter_cut() -> usize {
    10
}
fn default_estimator_k() -> usize {
    10
}

impl Default for VerifyConfig {
    /// Hermite, geometric `ρ = 0.5`, `g ∈ {identity, Translation{2}, Dilation{0.8}}`.
    fn default() -> Self {
        Self {
            basis: Family::HermiteProbabilist,
            profile: EigenvalueProfile::Geometric { rho: 0.5 },
            k_spec: None,
            groups: vec![GroupElement::IDENTITY, GroupElement::translation(2.0), GroupElement::dilation(0.8)],
            quadrature_nodes: default_m(),
            k_check: default_k_check(),
            unitarity_k: default_unitarity_k(),
            filter_cut: default_filter_cut(),
            estimator_k: default_estimator_k(),
            seed: 0,
            corrupt_jacobian: false,
        }
    }
}

impl VerifyConfig {
    pub fn kernel(&self) -> SpectralKernel {
        let basis = OrthonormalBasis::new(self.basis);
        let mut k = match (self.basis, self.profile) {
            (Family::HermiteProbabilist, EigenvalueProfile::Geometric { rho }) => SpectralKernel::mehler(rho),
            _ => SpectralKernel::new(basis, self.profile),
        };
        if let Some(ks) = self.k_spec {
            k = k.with_k_spec(ks);
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub group: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn at_most(name: &str, group: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            group: group.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn at_least(name: &str, group: &str, value: f64, tolerance: f64) -> Self {
        Self {
            passed: value >= tolerance,
            ..Self::at_most(name, group, value, tolerance)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub equivariance: Vec<EquivarianceReport>,
    /// Informational, not checked.
    pub dilation_forms: Vec<DilationFormDeviation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Equivariance rows, one per `(g, k)`.
impl CsvTable for VerifyReport {
    fn columns(&self) -> &'static [&'static str] {
        &["g", "k", "lambda_true", "mu_nystrom", "rel_err", "alignment"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.equivariance
            .iter()
            .flat_map(|rep| {
                let g = group_label(&rep.group);
                rep.rows
                    .iter()
                    .map(move |r| vec![g.clone(), r.k.to_string(), fmt_f64(r.lambda_true), fmt_f64(r.mu_nystrom), fmt_f64(r.rel_err), fmt_f64(r.alignment)])
            })
            .collect()
    }
}

/// `max |G - I|` for a square matrix.
pub fn identity_deviation(g: &DMatrix<f64>) -> f64 {
    (g - DMatrix::identity(g.nrows(), g.ncols())).amax()
}

/// `max_{j,k <= k_max} |⟨P_j, P_k⟩ - δ_jk|` on an `m`-node Gauss rule.
pub fn orthonormality_error(basis: OrthonormalBasis, k_max: usize, m: usize) -> Result<f64> {
    let rule = gauss_rule(basis, m)?;
    Ok(identity_deviation(&forward_gram(&Transport::identity(basis.measure()), basis, k_max, &rule)))
}

/// `max |f̂_{g,K}(x) - J_g(x)^{1/2} f̂_{e,K}(g⁻¹x)| / max(1, |f̂_{g,K}(x)|)` over
/// `samples` random samples and `points` random points of the test grid span.
pub fn estimator_equivariance_error(transport: &Transport, basis: OrthonormalBasis, k: usize, samples: usize, points: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = test_grid(transport);
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let values: Vec<f64> = (0..50)
            .map(|_| match basis.family {
                Family::HermiteProbabilist => rng.sample(rand_distr::StandardNormal),
                Family::LegendreUniform => rng.random_range(-1.0..=1.0),
            })
            .collect();
        let est = transported_series_estimator(&Sample::new(values)?, basis, k, transport.group)?;
        let base = est.base();
        for _ in 0..points {
            let x = rng.random_range(lo..=hi);
            let lhs = est.eval(x);
            let rhs = transport.sqrt_jacobian(x) * base.eval(transport.group.act_inverse(x));
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    Ok(worst)
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    config.profile.validate().map_err(crate::Error::InvalidConfig)?;
    let basis = OrthonormalBasis::new(config.basis);
    let measure = basis.measure();
    let kernel = config.kernel();
    let rule = gauss_rule(basis, config.quadrature_nodes)?;
    let mut checks = Vec::new();
    let mut equivariance = Vec::new();
    let mut dilation_forms = Vec::new();

    checks.push(CheckResult::at_most("orthonormality", "identity", orthonormality_error(basis, 30, 64)?, ORTHONORMALITY_TOL));

    if let (Family::HermiteProbabilist, EigenvalueProfile::Geometric { rho }) = (config.basis, config.profile) {
        let series = SpectralKernel::new(basis, config.profile).with_k_spec(kernel.k_spec);
        let grid: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
        let mut worst: f64 = 0.0;
        for &x in &grid {
            for &y in &grid {
                worst = worst.max((series.eval(x, y) - mehler(rho, x, y)).abs());
            }
        }
        checks.push(CheckResult::at_most("mehler_oracle", "identity", worst, MEHLER_TOL));
    }

    let psd_points = test_grid(&Transport::identity(measure));
    checks.push(CheckResult::at_least("psd", "identity", gram_min_eigenvalue(&kernel, &psd_points)?, -PSD_TOL));

    let mut groups = vec![GroupElement::IDENTITY];
    groups.extend(config.groups.iter().filter(|g| !g.is_identity()).copied());
    for g in groups {
        let label = group_label(&g);
        if let (GroupElement::Dilation { alpha }, Family::HermiteProbabilist) = (g, config.basis) {
            dilation_forms.push(dilation_form_deviation(alpha, config.unitarity_k)?);
        }
        let mut transport = Transport::new(g, measure)?;
        if config.corrupt_jacobian {
            transport = transport.corrupted();
        }

        let gram = forward_gram(&transport, basis, config.unitarity_k, &rule);
        checks.push(CheckResult::at_most("unitarity", &label, identity_deviation(&gram), UNITARITY_TOL));

        let tk = TransportedKernel::from_transport(kernel.clone(), transport);
        let exp = expansion_check(&tk);
        checks.push(CheckResult::at_most("conjugation", &label, exp.max_excess, crate::spectral::EXPANSION_SLACK));

        let rep = verify_spectral_equivariance(&kernel, &transport, &rule, config.k_check)?;
        checks.push(CheckResult::at_most("spectral_eigenvalues", &label, rep.max_rel_err(), EIGENVALUE_TOL));
        checks.push(CheckResult::at_least("spectral_alignment", &label, rep.min_alignment(), ALIGNMENT_MIN));
        equivariance.push(rep);

        let fc = filter_commutation_error(&kernel, &transport, config.filter_cut);
        checks.push(CheckResult::at_most("filter_commutation", &label, fc, FILTER_TOL));

        let pts: Vec<f64> = test_grid(&transport);
        checks.push(CheckResult::at_least(
            "transported_psd",
            &label,
            gram_min_eigenvalue(&tk, &pts)?,
            -PSD_TOL,
        ));

        let ee = estimator_equivariance_error(&transport, basis, config.estimator_k, 20, 100, config.seed)?;
        checks.push(CheckResult::at_most("estimator_equivariance", &label, ee, ESTIMATOR_TOL));
    }

    Ok(VerifyReport {
        checks,
        equivariance,
        dilation_forms,
    })
}
