//! Spectral Mercer kernels `K_e(x, y) = Σ_k λ_k P_k(x) P_k(y)` and their
//! transported versions `K_g(x, y) = J_g(x)^{1/2} J_g(y)^{1/2} K_e(g⁻¹x, g⁻¹y)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::Result;
use crate::group::{GroupElement, Transport};
use crate::measure::Measure;
use crate::orthopoly::{Family, OrthonormalBasis};

/// Eigenvalue sequence `λ_k`, positive and nonincreasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum EigenvalueProfile {
    /// `ρ^k`, `0 < ρ < 1`.
    Geometric { rho: f64 },
    /// `(k+1)^{-2s}`, `s > 1/2`.
    Polynomial { s: f64 },
    /// `exp(-c k^a)`.
    Exponential { c: f64, a: f64 },
}

impl EigenvalueProfile {
    pub fn lambda(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            EigenvalueProfile::Geometric { rho } => rho.powi(k as i32),
            EigenvalueProfile::Polynomial { s } => (kf + 1.0).powf(-2.0 * s),
            EigenvalueProfile::Exponential { c, a } => (-c * kf.powf(a)).exp(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let ok = match *self {
            EigenvalueProfile::Geometric { rho } => rho > 0.0 && rho < 1.0,
            EigenvalueProfile::Polynomial { s } => s > 0.5,
            EigenvalueProfile::Exponential { c, a } => c > 0.0 && a > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid eigenvalue profile {self:?}"))
        }
    }

    /// Series cutoff used when no explicit one is given.
    pub fn default_k_spec(&self) -> usize {
        match *self {
            EigenvalueProfile::Geometric { .. } => 60,
            EigenvalueProfile::Polynomial { .. } => 200,
            EigenvalueProfile::Exponential { .. } => {
                // smallest K with tail below 1e-12, capped
                (1..=200).find(|&k| self.tail_sum(k, Family::HermiteProbabilist) < 1e-12).unwrap_or(200)
            }
        }
    }

    /// Upper bound on `Σ_{k>K} λ_k c_k` where `c_k = 1` for Hermite and
    /// `c_k = 2k+1` for Legendre (the squared k-dependent envelope).
    pub fn tail_sum(&self, k_cut: usize, family: Family) -> f64 {
        let n = (k_cut + 1) as f64;
        match (*self, family) {
            (EigenvalueProfile::Geometric { rho }, Family::HermiteProbabilist) => rho.powf(n) / (1.0 - rho),
            (EigenvalueProfile::Geometric { rho }, Family::LegendreUniform) => {
                // Σ_{k>=n} (2k+1) ρ^k
                let q = 1.0 - rho;
                rho.powf(n) * ((2.0 * n + 1.0) / q + 2.0 * rho / (q * q))
            }
            (EigenvalueProfile::Polynomial { s }, Family::HermiteProbabilist) => {
                // Σ_{j>=K+2} j^{-2s} <= ∫_{K+1}^∞ t^{-2s} dt
                n.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0)
            }
            (EigenvalueProfile::Polynomial { s }, Family::LegendreUniform) => {
                if s <= 1.0 {
                    f64::INFINITY
                } else {
                    // (2k+1) <= 2(k+1)
                    2.0 * n.powf(2.0 - 2.0 * s) / (2.0 * s - 2.0)
                }
            }
            (EigenvalueProfile::Exponential { c, a }, fam) => {
                // Σ_{k>K} f(k) <= ∫_K^∞ f(t) dt for decreasing f
                let kc = k_cut as f64;
                let x = c * kc.powf(a);
                let upper_gamma = |p: f64| gamma(p) * gamma_ur(p, x.max(1e-300));
                let base = c.powf(-1.0 / a) / a * upper_gamma(1.0 / a);
                match fam {
                    Family::HermiteProbabilist => base,
                    Family::LegendreUniform => {
                        // (2k+1) <= 2t + 3 for t in [k-1, k]
                        let first = c.powf(-2.0 / a) / a * upper_gamma(2.0 / a);
                        2.0 * first + 3.0 * base
                    }
                }
            }
        }
    }
}

/// Coefficients `c_k` of the soft cutoff `exp(-c_k h²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SoftRate {
    /// `c_k = k`.
    #[default]
    Linear,
    /// Explicit `c_k`; indices past the end reuse the last entry.
    Custom(Vec<f64>),
}

impl SoftRate {
    pub fn rate(&self, k: usize) -> f64 {
        match self {
            SoftRate::Linear => k as f64,
            SoftRate::Custom(c) => c.get(k).or(c.last()).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SpectralFilter {
    /// `λ_k 1_{k <= K}`.
    Hard { k: usize },
    /// `λ_k exp(-c_k h²)`.
    Soft {
        h: f64,
        #[serde(default)]
        rate: SoftRate,
    },
}

impl SpectralFilter {
    pub fn factor(&self, k: usize) -> f64 {
        match self {
            SpectralFilter::Hard { k: cut } => {
                if k <= *cut {
                    1.0
                } else {
                    0.0
                }
            }
            SpectralFilter::Soft { h, rate } => {
                let c = rate.rate(k);
                if c == 0.0 {
                    1.0
                } else {
                    (-c * h * h).exp()
                }
            }
        }
    }
}

/// Symmetric kernel on the line.
pub trait Kernel: Sync {
    fn measure(&self) -> Measure;

    /// `K(x, y) · exp(log_weight)`, computed so that huge kernel values times
    /// tiny weights neither overflow nor underflow prematurely.
    fn eval_weighted(&self, x: f64, y: f64, log_weight: f64) -> f64;

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_weighted(x, y, 0.0)
    }

    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `Σ ρ^k He_k(x) He_k(y) / k!`
    Mehler { rho: f64 },
}

/// Natural log of the Mehler kernel.
pub fn mehler_log(rho: f64, x: f64, y: f64) -> f64 {
    let q = 1.0 - rho * rho;
    -0.5 * q.ln() - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * q)
}

/// Closed-form Mehler kernel for the probabilists' orthonormal Hermite basis.
pub fn mehler(rho: f64, x: f64, y: f64) -> f64 {
    mehler_log(rho, x, y).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralKernel {
    pub basis: OrthonormalBasis,
    pub profile: EigenvalueProfile,
    /// Series cutoff used for evaluation.
    pub k_spec: usize,
    pub filters: Vec<SpectralFilter>,
    pub closed_form: Option<ClosedForm>,
}

impl SpectralKernel {
    pub fn new(basis: OrthonormalBasis, profile: EigenvalueProfile) -> Self {
        Self {
            basis,
            profile,
            k_spec: profile.default_k_spec(),
            filters: Vec::new(),
            closed_form: None,
        }
    }

    /// Geometric profile on the Hermite basis, evaluated in closed form.
    pub fn mehler(rho: f64) -> Self {
        Self {
            closed_form: Some(ClosedForm::Mehler { rho }),
            ..Self::new(OrthonormalBasis::HERMITE, EigenvalueProfile::Geometric { rho })
        }
    }

    pub fn with_k_spec(mut self, k_spec: usize) -> Self {
        self.k_spec = k_spec;
        self
    }

    /// Closed form, only when no filter has modified the spectrum.
    pub fn active_closed_form(&self) -> Option<ClosedForm> {
        if self.filters.is_empty() {
            self.closed_form
        } else {
            None
        }
    }

    /// Filtered eigenvalue `λ_k · Π filter factors`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.filters.iter().fold(self.profile.lambda(k), |l, f| l * f.factor(k))
    }

    pub fn eigenvalues(&self, k_max: usize) -> Vec<f64> {
        (0..=k_max).map(|k| self.eigenvalue(k)).collect()
    }

    /// `Σ_{k <= k_max} λ_k P_k(x) P_k(y)`.
    pub fn spectral_sum(&self, x: f64, y: f64, k_max: usize) -> f64 {
        let px = self.basis.eval(k_max, x);
        let py = self.basis.eval(k_max, y);
        (0..=k_max).map(|k| self.eigenvalue(k) * px[k] * py[k]).sum()
    }

    /// Largest index with a nonzero filtered eigenvalue, if finite.
    fn hard_cut(&self) -> Option<usize> {
        self.filters
            .iter()
            .filter_map(|f| match f {
                SpectralFilter::Hard { k } => Some(*k),
                SpectralFilter::Soft { .. } => None,
            })
            .min()
    }

    /// Bound on `|Σ_{k > k_cut} λ_k P_k(x) P_k(y)|`.
    pub fn tail_bound_from(&self, x: f64, y: f64, k_cut: usize) -> f64 {
        if self.hard_cut().is_some_and(|c| c <= k_cut) {
            return 0.0;
        }
        let env = self.basis.envelope(x) * self.basis.envelope(y);
        if env == 0.0 {
            return 0.0;
        }
        env * self.profile.tail_sum(k_cut, self.basis.family)
    }

    /// Bound on the truncation error of [`SpectralKernel::spectral_sum`] at `k_spec`.
    pub fn tail_bound(&self, x: f64, y: f64) -> f64 {
        self.tail_bound_from(x, y, self.k_spec)
    }

    /// Value and truncation bound together.
    pub fn eval_with_bound(&self, x: f64, y: f64) -> (f64, f64) {
        match self.active_closed_form() {
            Some(_) => (self.eval(x, y), 0.0),
            None => (self.eval(x, y), self.tail_bound(x, y)),
        }
    }

    /// High-accuracy evaluation: closed form when available, otherwise the
    /// spectral sum continued 200 terms past `k_spec`.
    pub fn reference_eval(&self, x: f64, y: f64) -> f64 {
        match self.active_closed_form() {
            Some(_) => self.eval(x, y),
            None => self.spectral_sum(x, y, self.k_spec + 200),
        }
    }
}

impl Kernel for SpectralKernel {
    fn measure(&self) -> Measure {
        self.basis.measure()
    }

    fn eval_weighted(&self, x: f64, y: f64, log_weight: f64) -> f64 {
        match self.active_closed_form() {
            Some(ClosedForm::Mehler { rho }) => (mehler_log(rho, x, y) + log_weight).exp(),
            None => {
                let s = (0.5 * log_weight).exp();
                let px = self.basis.eval(self.k_spec, x);
                let py = self.basis.eval(self.k_spec, y);
                (0..=self.k_spec).map(|k| self.eigenvalue(k) * (s * px[k]) * (s * py[k])).sum()
            }
        }
    }

    fn describe(&self) -> String {
        format!("{:?} {:?} K_spec={} filters={:?}", self.basis.family, self.profile, self.k_spec, self.filters)
    }
}

/// `K_e(x, y)` truncated at `K_spec` (or in closed form).
pub fn kernel_eval(kernel: &SpectralKernel, x: f64, y: f64) -> f64 {
    kernel.eval(x, y)
}

/// Returns a copy of `kernel` with `filter` applied to its spectrum.
pub fn spectral_filter(kernel: &SpectralKernel, filter: SpectralFilter) -> SpectralKernel {
    let mut out = kernel.clone();
    out.filters.push(filter);
    out
}

/// `K_g` for a base spectral kernel and a validated transport.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedKernel {
    pub base: SpectralKernel,
    pub transport: Transport,
}

impl TransportedKernel {
    pub fn new(base: SpectralKernel, group: GroupElement) -> Result<Self> {
        let transport = Transport::new(group, base.basis.measure())?;
        Ok(Self { base, transport })
    }

    pub fn from_transport(base: SpectralKernel, transport: Transport) -> Self {
        Self { base, transport }
    }

    /// `Σ_{k <= k_max} λ_k (U_g P_k)(x) (U_g P_k)(y)`, built from the transported basis.
    pub fn spectral_sum(&self, x: f64, y: f64, k_max: usize) -> f64 {
        let ux = crate::group::transported_basis_at(&self.transport, self.base.basis, k_max, x);
        let uy = crate::group::transported_basis_at(&self.transport, self.base.basis, k_max, y);
        (0..=k_max).map(|k| self.base.eigenvalue(k) * ux[k] * uy[k]).sum()
    }

    pub fn tail_bound(&self, x: f64, y: f64) -> f64 {
        let s = self.transport.sqrt_jacobian(x) * self.transport.sqrt_jacobian(y);
        if s == 0.0 {
            return 0.0;
        }
        let g = self.transport.group;
        s * self.base.tail_bound(g.act_inverse(x), g.act_inverse(y))
    }

    pub fn reference_eval(&self, x: f64, y: f64) -> f64 {
        let s = self.transport.sqrt_jacobian(x) * self.transport.sqrt_jacobian(y);
        if s == 0.0 {
            return 0.0;
        }
        let g = self.transport.group;
        s * self.base.reference_eval(g.act_inverse(x), g.act_inverse(y))
    }

    pub fn filtered(&self, filter: SpectralFilter) -> Self {
        Self {
            base: spectral_filter(&self.base, filter),
            transport: self.transport,
        }
    }
}

impl Kernel for TransportedKernel {
    fn measure(&self) -> Measure {
        self.transport.measure
    }

    fn eval_weighted(&self, x: f64, y: f64, log_weight: f64) -> f64 {
        let lj = 0.5 * (self.transport.log_jacobian(x) + self.transport.log_jacobian(y));
        if lj == f64::NEG_INFINITY {
            return 0.0;
        }
        let g = self.transport.group;
        self.base.eval_weighted(g.act_inverse(x), g.act_inverse(y), log_weight + lj)
    }

    fn describe(&self) -> String {
        format!("{} transported by {:?}", self.base.describe(), self.transport.group)
    }
}

/// `K_g(x, y)` for the pair `(kernel, g)`.
pub fn transported_kernel_eval(kernel: &SpectralKernel, group: GroupElement, x: f64, y: f64) -> Result<f64> {
    Ok(TransportedKernel::new(kernel.clone(), group)?.eval(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn geometric_at_origin_matches_long_direct_sum() {
        let k = SpectralKernel::new(OrthonormalBasis::HERMITE, EigenvalueProfile::Geometric { rho: 0.5 });
        assert_eq!(k.k_spec, 60);
        // P_{2j}(0)² = (2j-1)!!/(2j)!! ; odd terms vanish
        let mut oracle = 0.0;
        let mut p2 = 1.0;
        for j in 0..=130 {
            if j > 0 {
                p2 *= (2 * j - 1) as f64 / (2 * j) as f64;
            }
            oracle += 0.5f64.powi(2 * j) * p2;
        }
        let v = kernel_eval(&k, 0.0, 0.0);
        assert!((v - oracle).abs() <= k.tail_bound(0.0, 0.0) + 1e-15);
        assert_abs_diff_eq!(v, oracle, epsilon = 1e-15);
    }

    #[test]
    fn vanishing_rho_gives_constant_kernel() {
        let k = SpectralKernel::new(OrthonormalBasis::LEGENDRE, EigenvalueProfile::Geometric { rho: 1e-300 });
        assert_abs_diff_eq!(k.eval(0.3, -0.8), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mehler_matches_truncated_sum() {
        let sum = SpectralKernel::new(OrthonormalBasis::HERMITE, EigenvalueProfile::Geometric { rho: 0.5 });
        let closed = mehler(0.5, 1.0, -1.0);
        assert!((sum.eval(1.0, -1.0) - closed).abs() <= 1e-8);
        let explicit = (1.0f64 - 0.25).powf(-0.5) * (-(0.25f64 * 2.0 + 2.0 * 0.5) / (2.0 * 0.75)).exp();
        assert_abs_diff_eq!(closed, explicit, epsilon = 1e-15);
    }

    #[test]
    fn symmetry() {
        let k = SpectralKernel::new(OrthonormalBasis::LEGENDRE, EigenvalueProfile::Polynomial { s: 1.5 });
        assert_eq!(k.eval(0.2, -0.7), k.eval(-0.7, 0.2));
        let t = TransportedKernel::new(SpectralKernel::mehler(0.5), GroupElement::dilation(0.8)).unwrap();
        assert_abs_diff_eq!(t.eval(0.2, -1.7), t.eval(-1.7, 0.2), epsilon = 1e-15);
    }

    #[test]
    fn transported_identity_and_bandwidth() {
        let k = SpectralKernel::mehler(0.5);
        assert_eq!(transported_kernel_eval(&k, GroupElement::IDENTITY, 0.3, 1.1).unwrap(), k.eval(0.3, 1.1));

        // h⁻¹ K_e(x/h, y/h) on Lebesgue measure
        let h = 0.4;
        let t = Transport::new(GroupElement::dilation(h), Measure::LebesgueR).unwrap();
        let base = |x: f64, y: f64| (-(x - y).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for &(x, y) in &[(0.0, 0.1), (0.5, -0.3)] {
            let kg = t.sqrt_jacobian(x) * t.sqrt_jacobian(y) * base(t.group.act_inverse(x), t.group.act_inverse(y));
            assert_abs_diff_eq!(kg, base(x / h, y / h) / h, epsilon = 1e-14);
        }
    }

    #[test]
    fn transported_spectral_sum_within_tail() {
        let base = SpectralKernel::new(OrthonormalBasis::HERMITE, EigenvalueProfile::Geometric { rho: 0.5 });
        let t = TransportedKernel::new(base, GroupElement::translation(2.0)).unwrap();
        for &(x, y) in &[(0.3, 1.9), (-1.2, 0.4), (2.5, 2.0)] {
            let diff = (t.reference_eval(x, y) - t.spectral_sum(x, y, 60)).abs();
            assert!(diff <= t.tail_bound(x, y) + 1e-12);
        }
    }

    #[test]
    fn filters() {
        let base = SpectralKernel::new(OrthonormalBasis::HERMITE, EigenvalueProfile::Geometric { rho: 0.5 });
        let hard0 = spectral_filter(&base, SpectralFilter::Hard { k: 0 });
        assert_eq!(hard0.eval(1.3, -0.4), 1.0);
        let soft0 = spectral_filter(&base, SpectralFilter::Soft { h: 0.0, rate: SoftRate::Linear });
        assert_eq!(soft0.eigenvalues(20), base.eigenvalues(20));
        let soft1 = spectral_filter(&base, SpectralFilter::Soft { h: 1.0, rate: SoftRate::Linear });
        for k in 0..20 {
            assert_abs_diff_eq!(soft1.eigenvalue(k), 0.5f64.powi(k as i32) * (-(k as f64)).exp(), epsilon = 1e-16);
        }
        assert!(spectral_filter(&SpectralKernel::mehler(0.5), SpectralFilter::Hard { k: 3 })
            .active_closed_form()
            .is_none());
    }

    #[test]
    fn tail_sums_bound_partial_sums() {
        let profiles = [
            EigenvalueProfile::Geometric { rho: 0.7 },
            EigenvalueProfile::Polynomial { s: 1.5 },
            EigenvalueProfile::Exponential { c: 0.5, a: 1.0 },
            EigenvalueProfile::Exponential { c: 0.1, a: 2.0 },
        ];
        for p in profiles {
            for fam in [Family::HermiteProbabilist, Family::LegendreUniform] {
                for cut in [0usize, 5, 30] {
                    let w = |k: usize| if fam == Family::LegendreUniform { (2 * k + 1) as f64 } else { 1.0 };
                    let partial: f64 = (cut + 1..cut + 20000).map(|k| p.lambda(k) * w(k)).sum();
                    let bound = p.tail_sum(cut, fam);
                    assert!(partial <= bound * (1.0 + 1e-12), "{p:?} {fam:?} {cut}: {partial} > {bound}");
                }
            }
        }
        assert!(EigenvalueProfile::Geometric { rho: 0.5 }.tail_sum(60, Family::HermiteProbabilist) < 1e-12);
        assert!(EigenvalueProfile::Polynomial { s: 1.5 }.tail_sum(200, Family::HermiteProbabilist) < 1e-4);
    }
}
