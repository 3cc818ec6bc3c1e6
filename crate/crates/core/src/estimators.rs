//! Orthogonal series density estimators, their transported twins, Gaussian
//! kernel smoothing, and the multi-center least-squares estimator.
//!
//! Series densities are represented with respect to the base measure μ of the
//! basis: `f̂(x) = Σ θ̂_k P_k(x)` estimates `dF/dμ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::eigen::eig_sym;
use crate::error::{Error, Result};
use crate::group::{transported_basis_at, GroupElement, Transport};
use crate::kernel::{SoftRate, SpectralFilter};
use crate::measure::Measure;
use crate::orthopoly::OrthonormalBasis;
use crate::quadrature::{gauss_rule, QuadratureRule, DEFAULT_OVERSIZED_M};

/// Ridge added to the multi-center Gram matrix.
pub const DEFAULT_RIDGE: f64 = 1e-10;
/// Condition number of the regularized Gram matrix beyond which a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Observations `X_1..X_n` with an optional record of the RNG stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self { values, seed: None })
    }

    pub fn with_seed(values: Vec<f64>, seed: u64) -> Result<Self> {
        Ok(Self {
            seed: Some(seed),
            ..Self::new(values)?
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    fn check_support(&self, basis: OrthonormalBasis) -> Result<()> {
        if let Some((index, &value)) = self.values.iter().enumerate().find(|(_, &v)| !basis.in_support(v)) {
            return Err(Error::OutsideSupport {
                family: basis.family,
                index,
                value,
            });
        }
        Ok(())
    }
}

/// Anything that can be evaluated as a density estimate.
pub trait DensityEstimate {
    fn eval(&self, x: f64) -> f64;

    /// `(x, f̂(x))` on `points` equally spaced points of `[lo, hi]`.
    fn grid(&self, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
        let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
        (0..points)
            .map(|i| {
                let x = if i + 1 == points && points > 1 { hi } else { lo + step * i as f64 };
                (x, self.eval(x))
            })
            .collect()
    }
}

/// `θ̂_k = (1/n) Σ_i P_k(X_i)` for `k = 0..=k_max`.
pub fn empirical_coefficients(sample: &Sample, basis: OrthonormalBasis, k_max: usize) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    sample.check_support(basis)?;
    let mut sums = vec![0.0; k_max + 1];
    let mut buf = vec![0.0; k_max + 1];
    for &x in &sample.values {
        basis.eval_into(x, &mut buf);
        for (s, p) in sums.iter_mut().zip(&buf) {
            *s += p;
        }
    }
    let n = sample.len() as f64;
    sums.iter_mut().for_each(|s| *s /= n);
    sums[0] = 1.0;
    Ok(sums)
}

/// `θ_k = Σ_i w_i f(x_i) P_k(x_i)`: the `L²(μ)` projection of a function
/// known only at the nodes of `rule`.
pub fn projection_coefficients(values: &[f64], rule: &QuadratureRule, basis: OrthonormalBasis, k_max: usize) -> Result<Vec<f64>> {
    if values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            actual: values.len(),
        });
    }
    let mut out = vec![0.0; k_max + 1];
    let mut buf = vec![0.0; k_max + 1];
    for ((&x, &w), &f) in rule.nodes.iter().zip(&rule.weights).zip(values) {
        basis.eval_into(x, &mut buf);
        for (o, p) in out.iter_mut().zip(&buf) {
            *o += w * f * p;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeriesRepr {
    basis: OrthonormalBasis,
    group: GroupElement,
    k: usize,
    coefficients: Vec<f64>,
}

/// `f̂_{g,K}(x) = Σ_{k<=K} θ̂_k (U_g P_k)(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct SeriesEstimate {
    coefficients: Vec<f64>,
    basis: OrthonormalBasis,
    transport: Transport,
}

impl TryFrom<SeriesRepr> for SeriesEstimate {
    type Error = Error;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        if r.coefficients.len() != r.k + 1 {
            return Err(Error::LengthMismatch {
                expected: r.k + 1,
                actual: r.coefficients.len(),
            });
        }
        Self::new(r.coefficients, r.basis, r.group)
    }
}

impl From<SeriesEstimate> for SeriesRepr {
    fn from(e: SeriesEstimate) -> Self {
        SeriesRepr {
            basis: e.basis,
            group: e.transport.group,
            k: e.k(),
            coefficients: e.coefficients,
        }
    }
}

impl SeriesEstimate {
    pub fn new(coefficients: Vec<f64>, basis: OrthonormalBasis, group: GroupElement) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, actual: 0 });
        }
        let transport = Transport::new(group, basis.measure())?;
        Ok(Self {
            coefficients,
            basis,
            transport,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis(&self) -> OrthonormalBasis {
        self.basis
    }

    pub fn group(&self) -> GroupElement {
        self.transport.group
    }

    pub fn transport(&self) -> &Transport {
        &self.transport
    }

    /// Truncation level `K`.
    pub fn k(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// The same coefficients on the untransported basis.
    pub fn base(&self) -> Self {
        Self {
            transport: Transport::identity(self.basis.measure()),
            ..self.clone()
        }
    }

    /// Same coefficients, basis transported by `group`.
    pub fn transported(&self, group: GroupElement) -> Result<Self> {
        Self::new(self.coefficients.clone(), self.basis, group)
    }

    /// Density with respect to Lebesgue measure, `f̂(x) w_μ(x)`.
    pub fn eval_lebesgue(&self, x: f64) -> f64 {
        to_lebesgue_density(self.basis.measure(), x, self.eval(x))
    }
}

impl DensityEstimate for SeriesEstimate {
    fn eval(&self, x: f64) -> f64 {
        if self.transport.group.is_identity() {
            return self.basis.eval_series(&self.coefficients, x);
        }
        let vals = transported_basis_at(&self.transport, self.basis, self.k(), x);
        self.coefficients.iter().zip(&vals).map(|(t, p)| t * p).sum()
    }
}

/// `Σ θ̂_k P_k^{(g)}(x)`.
pub fn evaluate_series(estimate: &SeriesEstimate, x: f64) -> f64 {
    estimate.eval(x)
}

/// Base series estimator at truncation `k`.
pub fn series_estimator(sample: &Sample, basis: OrthonormalBasis, k: usize) -> Result<SeriesEstimate> {
    SeriesEstimate::new(empirical_coefficients(sample, basis, k)?, basis, GroupElement::IDENTITY)
}

/// Twin estimator: base coefficients on the basis transported by `group`.
pub fn transported_series_estimator(sample: &Sample, basis: OrthonormalBasis, k: usize, group: GroupElement) -> Result<SeriesEstimate> {
    // validate the pair before touching the sample
    Transport::new(group, basis.measure())?;
    SeriesEstimate::new(empirical_coefficients(sample, basis, k)?, basis, group)
}

/// Series estimate with coefficients attenuated by `exp(-c_k h²)`.
pub fn soft_filter_estimate(sample: &Sample, basis: OrthonormalBasis, h: f64, rate: &SoftRate, k: usize) -> Result<SeriesEstimate> {
    if h.is_nan() || h < 0.0 {
        return Err(Error::InvalidBandwidth(h));
    }
    let filter = SpectralFilter::Soft { h, rate: rate.clone() };
    let mut theta = empirical_coefficients(sample, basis, k)?;
    for (j, t) in theta.iter_mut().enumerate() {
        *t *= filter.factor(j);
    }
    SeriesEstimate::new(theta, basis, GroupElement::IDENTITY)
}

/// Gaussian kernel smoother with bandwidth `h`, realized as the base kernel
/// `κ(x - y)` on Lebesgue measure transported by `Dilation{h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    pub sample: Sample,
    pub h: f64,
    transport: Transport,
}

impl KernelEstimate {
    pub fn new(sample: Sample, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidBandwidth(h));
        }
        let transport = Transport::new(GroupElement::dilation(h), Measure::LebesgueR)?;
        Ok(Self { sample, h, transport })
    }
}

fn gaussian_bump(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

impl DensityEstimate for KernelEstimate {
    fn eval(&self, x: f64) -> f64 {
        let g = self.transport.group;
        // J_h(x)^{1/2} J_h(y)^{1/2} is constant
        let jac = self.transport.jacobian(x);
        let u = g.act_inverse(x);
        let s: f64 = self.sample.values.iter().map(|&xi| gaussian_bump(u - g.act_inverse(xi))).sum();
        jac * s / self.sample.len() as f64
    }
}

/// `f̂_h(x) = (1/n) Σ_i h⁻¹ κ((x - X_i)/h)`.
pub fn parzen_rosenblatt(sample: &Sample, h: f64, x: f64) -> Result<f64> {
    Ok(KernelEstimate::new(sample.clone(), h)?.eval(x))
}

/// Density relative to Lebesgue measure from one relative to `measure`.
pub fn to_lebesgue_density(measure: Measure, x: f64, value: f64) -> f64 {
    value * measure.density(x)
}

/// Density relative to `measure` from one relative to Lebesgue measure.
/// Zero outside the support.
pub fn from_lebesgue_density(measure: Measure, x: f64, value: f64) -> f64 {
    let w = measure.density(x);
    if w > 0.0 {
        value / w
    } else {
        0.0
    }
}

/// Clips node values at zero and rescales so that `Σ w_i f_i = 1`.
/// Returns the clipped values and the mass before rescaling.
pub fn positive_part_renormalize(values: &[f64], rule: &QuadratureRule) -> Result<(Vec<f64>, f64)> {
    if values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            actual: values.len(),
        });
    }
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let mass: f64 = clipped.iter().zip(&rule.weights).map(|(v, w)| v * w).sum();
    if mass <= 0.0 {
        return Ok((clipped, mass));
    }
    Ok((clipped.iter().map(|v| v / mass).collect(), mass))
}

/// The combined non-orthogonal system `{U_c P_k : c ∈ centers, k <= K}` on
/// `L²(γ)` with translations `U_c`, and its Gram matrix.
#[derive(Debug, Clone)]
pub struct MultiCenterSystem {
    pub centers: Vec<f64>,
    pub k: usize,
    pub ridge: f64,
    transports: Vec<Transport>,
    rule: QuadratureRule,
    gram: DMatrix<f64>,
    /// Eigen-decomposition of `G + εI`.
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl MultiCenterSystem {
    /// Gram matrix by forward quadrature on `rule` (a Gauss–Hermite rule).
    pub fn new(centers: &[f64], k: usize, rule: QuadratureRule, ridge: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidConfig("at least one center is required".into()));
        }
        if rule.measure != Measure::GaussianStd {
            return Err(Error::InvalidConfig("multi-center system needs a Gaussian rule".into()));
        }
        let transports = centers
            .iter()
            .map(|&c| Transport::new(GroupElement::translation(c), Measure::GaussianStd))
            .collect::<Result<Vec<_>>>()?;
        let dim = centers.len() * (k + 1);
        let mut b = DMatrix::zeros(dim, rule.len());
        for (i, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let sw = w.sqrt();
            for (c, t) in transports.iter().enumerate() {
                let v = transported_basis_at(t, OrthonormalBasis::HERMITE, k, x);
                for (j, p) in v.iter().enumerate() {
                    b[(c * (k + 1) + j, i)] = sw * p;
                }
            }
        }
        let gram = &b * b.transpose();
        let mut reg = gram.clone();
        for i in 0..dim {
            reg[(i, i)] += ridge;
        }
        let eig = eig_sym(&reg)?;
        let max = eig.values[0];
        let min = eig.values[dim - 1];
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(Error::SingularGram { condition });
        }
        Ok(Self {
            centers: centers.to_vec(),
            k,
            ridge,
            transports,
            rule,
            gram,
            values: eig.values,
            vectors: eig.vectors,
        })
    }

    /// Default rule (`m = 400`) and ridge.
    pub fn with_defaults(centers: &[f64], k: usize) -> Result<Self> {
        Self::new(centers, k, gauss_rule(OrthonormalBasis::HERMITE, DEFAULT_OVERSIZED_M)?, DEFAULT_RIDGE)
    }

    pub fn dimension(&self) -> usize {
        self.centers.len() * (self.k + 1)
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Condition number of `G + εI`.
    pub fn condition(&self) -> f64 {
        self.values[0] / self.values[self.values.len() - 1]
    }

    /// All combined basis functions at `x`, center-major.
    pub fn basis_at(&self, x: f64) -> Vec<f64> {
        self.transports
            .iter()
            .flat_map(|t| transported_basis_at(t, OrthonormalBasis::HERMITE, self.k, x))
            .collect()
    }

    /// Solves `(G + εI) θ = β`.
    pub fn solve(&self, beta: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                actual: beta.len(),
            });
        }
        let beta = DVector::from_column_slice(beta);
        let mut proj = self.vectors.tr_mul(&beta);
        for (p, l) in proj.iter_mut().zip(&self.values) {
            *p /= l;
        }
        Ok((&self.vectors * proj).iter().copied().collect())
    }

    /// Fit from a sample: `β_j = (1/n) Σ_i B_j(X_i)`.
    pub fn fit(&self, sample: &Sample) -> Result<MultimodalEstimate> {
        let mut beta = vec![0.0; self.dimension()];
        for &x in &sample.values {
            for (b, v) in beta.iter_mut().zip(self.basis_at(x)) {
                *b += v;
            }
        }
        let n = sample.len() as f64;
        beta.iter_mut().for_each(|b| *b /= n);
        self.estimate(beta)
    }

    /// Population fit for a density `f` relative to γ: `β_j = ⟨f, B_j⟩` by quadrature.
    pub fn fit_population<F: Fn(f64) -> f64>(&self, f: F) -> Result<MultimodalEstimate> {
        let mut beta = vec![0.0; self.dimension()];
        for (&x, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let fx = w * f(x);
            for (b, v) in beta.iter_mut().zip(self.basis_at(x)) {
                *b += fx * v;
            }
        }
        self.estimate(beta)
    }

    fn estimate(&self, beta: Vec<f64>) -> Result<MultimodalEstimate> {
        let theta = self.solve(&beta)?;
        Ok(MultimodalEstimate {
            centers: self.centers.clone(),
            k: self.k,
            coefficients: theta,
            transports: self.transports.clone(),
        })
    }
}

/// `f̂(x) = Σ_c Σ_k θ_{k,c} (U_c P_k)(x)`, a density relative to γ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultimodalEstimate {
    pub centers: Vec<f64>,
    pub k: usize,
    /// Center-major: `coefficients[c * (k + 1) + j]`.
    pub coefficients: Vec<f64>,
    #[serde(skip)]
    transports: Vec<Transport>,
}

impl DensityEstimate for MultimodalEstimate {
    fn eval(&self, x: f64) -> f64 {
        self.transports
            .iter()
            .enumerate()
            .map(|(c, t)| {
                let v = transported_basis_at(t, OrthonormalBasis::HERMITE, self.k, x);
                let th = &self.coefficients[c * (self.k + 1)..(c + 1) * (self.k + 1)];
                th.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum()
    }
}

/// Regularized least-squares fit on translated Hermite systems centered at
/// `centers`, each truncated at `k`.
pub fn multimodal_estimator(sample: &Sample, centers: &[f64], k: usize) -> Result<MultimodalEstimate> {
    MultiCenterSystem::with_defaults(centers, k)?.fit(sample)
}
