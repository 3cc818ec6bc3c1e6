//! One-parameter groups acting on the line, their Radon–Nikodym Jacobians and
//! the unitary transport `(U_g f)(x) = J_g(x)^{1/2} f(g⁻¹·x)`.
//!
//! `J_g = d(μ∘τ_g⁻¹)/dμ` is the density of the pushforward of μ under
//! `x ↦ g·x`. For the supported pairs:
//!
//! | measure      | element          | `J_g(x)`                                  |
//! |--------------|------------------|-------------------------------------------|
//! | GaussianStd  | Translation{b}   | `exp(bx - b²/2)`                          |
//! | GaussianStd  | Dilation{α}      | `α⁻¹ exp(½(1 - α⁻²) x²)`                  |
//! | GaussianStd  | Affine{a, b}     | `a⁻¹ exp(x²/2 - ((x - b)/a)²/2)`          |
//! | LebesgueR    | Dilation{α}      | `α⁻¹`                                     |
//! | LebesgueR    | Translation{b}   | `1`                                       |
//! | LebesgueR    | Affine{a, b}     | `a⁻¹`                                     |
//! | UniformPM1   | Affine{a, b}     | `a⁻¹` on `[b - a, b + a]`, 0 elsewhere    |
//!
//! On `UniformPM1` the element must map `[-1, 1]` into itself (`a + |b| <= 1`);
//! the transported functions then live on the sub-interval `[b - a, b + a]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::orthopoly::OrthonormalBasis;
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", deny_unknown_fields)]
pub enum GroupElement {
    /// `x ↦ a x + b`, `a > 0`.
    Affine { a: f64, b: f64 },
    /// `x ↦ α x`, `α > 0`.
    Dilation { alpha: f64 },
    /// `x ↦ x + b`.
    Translation { b: f64 },
}

impl GroupElement {
    pub const IDENTITY: Self = GroupElement::Translation { b: 0.0 };

    pub fn translation(b: f64) -> Self {
        GroupElement::Translation { b }
    }

    pub fn dilation(alpha: f64) -> Self {
        GroupElement::Dilation { alpha }
    }

    pub fn affine(a: f64, b: f64) -> Self {
        GroupElement::Affine { a, b }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GroupElement::Affine { a, b } => a > 0.0 && a.is_finite() && b.is_finite(),
            GroupElement::Dilation { alpha } => alpha > 0.0 && alpha.is_finite(),
            GroupElement::Translation { b } => b.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGroupElement(format!("{self:?}")))
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            GroupElement::Affine { a, b } => a == 1.0 && b == 0.0,
            GroupElement::Dilation { alpha } => alpha == 1.0,
            GroupElement::Translation { b } => b == 0.0,
        }
    }

    /// `(scale, shift)` of the affine map `x ↦ scale·x + shift`.
    pub fn as_affine_params(&self) -> (f64, f64) {
        match *self {
            GroupElement::Affine { a, b } => (a, b),
            GroupElement::Dilation { alpha } => (alpha, 0.0),
            GroupElement::Translation { b } => (1.0, b),
        }
    }

    pub fn to_affine(&self) -> Self {
        let (a, b) = self.as_affine_params();
        GroupElement::Affine { a, b }
    }

    /// `g·x`.
    pub fn act(&self, x: f64) -> f64 {
        match *self {
            GroupElement::Affine { a, b } => a * x + b,
            GroupElement::Dilation { alpha } => alpha * x,
            GroupElement::Translation { b } => x + b,
        }
    }

    /// `g⁻¹·x`.
    pub fn act_inverse(&self, x: f64) -> f64 {
        match *self {
            GroupElement::Affine { a, b } => (x - b) / a,
            GroupElement::Dilation { alpha } => x / alpha,
            GroupElement::Translation { b } => x - b,
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GroupElement::Affine { a, b } => GroupElement::Affine { a: 1.0 / a, b: -b / a },
            GroupElement::Dilation { alpha } => GroupElement::Dilation { alpha: 1.0 / alpha },
            GroupElement::Translation { b } => GroupElement::Translation { b: -b },
        }
    }

    /// Group product `self · other`, acting as `x ↦ self·(other·x)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (*self, *other) {
            (GroupElement::Affine { a: a1, b: b1 }, GroupElement::Affine { a: a2, b: b2 }) => {
                Ok(GroupElement::Affine { a: a1 * a2, b: a1 * b2 + b1 })
            }
            (GroupElement::Dilation { alpha: a1 }, GroupElement::Dilation { alpha: a2 }) => {
                Ok(GroupElement::Dilation { alpha: a1 * a2 })
            }
            (GroupElement::Translation { b: b1 }, GroupElement::Translation { b: b2 }) => {
                Ok(GroupElement::Translation { b: b1 + b2 })
            }
            (g1, g2) => Err(Error::MixedVariants(g1, g2)),
        }
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::IDENTITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum JacobianForm {
    One,
    Constant(f64),
    /// `log J(x) = log_c + lin·x + quad·x²`
    Gaussian { log_c: f64, lin: f64, quad: f64 },
    /// Constant inside `[lo, hi]`, zero outside.
    Interval { value: f64, lo: f64, hi: f64 },
}

/// A validated (group element, measure) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transport {
    pub group: GroupElement,
    pub measure: Measure,
    form: JacobianForm,
    corrupted: bool,
}

impl Transport {
    pub fn new(group: GroupElement, measure: Measure) -> Result<Self> {
        group.validate()?;
        let unsupported = || Error::UnsupportedPair { group, measure };
        let form = if group.is_identity() {
            JacobianForm::One
        } else {
            match (measure, group) {
                (Measure::GaussianStd, GroupElement::Translation { b }) => JacobianForm::Gaussian {
                    log_c: -0.5 * b * b,
                    lin: b,
                    quad: 0.0,
                },
                (Measure::GaussianStd, GroupElement::Dilation { alpha }) => JacobianForm::Gaussian {
                    log_c: -alpha.ln(),
                    lin: 0.0,
                    quad: 0.5 * (1.0 - 1.0 / (alpha * alpha)),
                },
                (Measure::GaussianStd, GroupElement::Affine { a, b }) => {
                    // x²/2 - (x - b)²/(2a²)
                    let inv = 1.0 / (a * a);
                    JacobianForm::Gaussian {
                        log_c: -a.ln() - 0.5 * b * b * inv,
                        lin: b * inv,
                        quad: 0.5 * (1.0 - inv),
                    }
                }
                (Measure::LebesgueR, GroupElement::Translation { .. }) => JacobianForm::One,
                (Measure::LebesgueR, GroupElement::Dilation { alpha }) => JacobianForm::Constant(1.0 / alpha),
                (Measure::LebesgueR, GroupElement::Affine { a, .. }) => JacobianForm::Constant(1.0 / a),
                (Measure::UniformPM1, GroupElement::Affine { a, b }) => {
                    if a + b.abs() > 1.0 + 1e-12 {
                        return Err(unsupported());
                    }
                    JacobianForm::Interval {
                        value: 1.0 / a,
                        lo: b - a,
                        hi: b + a,
                    }
                }
                _ => return Err(unsupported()),
            }
        };
        Ok(Self {
            group,
            measure,
            form,
            corrupted: false,
        })
    }

    pub fn identity(measure: Measure) -> Self {
        Self::new(GroupElement::IDENTITY, measure).expect("identity is supported on every measure")
    }

    /// Negative control: replaces `J_g` by `1/J_g`, which breaks unitarity for
    /// every non-trivial element.
    pub fn corrupted(mut self) -> Self {
        self.corrupted = true;
        self
    }

    /// Interval on which the transported functions live.
    pub fn image_support(&self) -> (f64, f64) {
        match self.form {
            JacobianForm::Interval { lo, hi, .. } => (lo, hi),
            _ => self.measure.support(),
        }
    }

    /// `log J_g(x)`; `-∞` outside the image support.
    pub fn log_jacobian(&self, x: f64) -> f64 {
        let lj = match self.form {
            JacobianForm::One => 0.0,
            JacobianForm::Constant(c) => c.ln(),
            JacobianForm::Gaussian { log_c, lin, quad } => log_c + lin * x + quad * x * x,
            JacobianForm::Interval { value, lo, hi } => {
                if x >= lo && x <= hi {
                    value.ln()
                } else {
                    return f64::NEG_INFINITY;
                }
            }
        };
        if self.corrupted {
            -lj
        } else {
            lj
        }
    }

    pub fn jacobian(&self, x: f64) -> f64 {
        let j = match self.form {
            JacobianForm::One => 1.0,
            JacobianForm::Constant(c) => c,
            JacobianForm::Interval { value, lo, hi } => {
                if x >= lo && x <= hi {
                    value
                } else {
                    return 0.0;
                }
            }
            JacobianForm::Gaussian { .. } => return self.log_jacobian(x).exp(),
        };
        if self.corrupted {
            1.0 / j
        } else {
            j
        }
    }

    /// `J_g(x)^{1/2}`.
    pub fn sqrt_jacobian(&self, x: f64) -> f64 {
        (0.5 * self.log_jacobian(x)).exp()
    }

    /// `(U_g f)(x)`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> f64 {
        let s = self.sqrt_jacobian(x);
        if s == 0.0 {
            0.0
        } else {
            s * f(self.group.act_inverse(x))
        }
    }

    /// `∫ F dμ` computed on the pulled-back variable `x = g·y`:
    /// `Σ_i w_i F(g·y_i) / J_g(g·y_i)` over a rule for μ.
    ///
    /// For `F = (U_g f)(U_g h)` the integrand reduces to `f h` against the base
    /// weight, so a Gauss rule that is exact for `f h` stays exact.
    pub fn pullback_integrate<F: Fn(f64) -> f64>(&self, rule: &QuadratureRule, f: F) -> f64 {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&y, &w)| {
                let x = self.group.act(y);
                w * f(x) * (-self.log_jacobian(x)).exp()
            })
            .sum()
    }

    /// A rule for μ restricted to the image support, for forward integration of
    /// transported functions on `UniformPM1`. Other measures return `base`.
    pub fn forward_rule(&self, base: &QuadratureRule) -> QuadratureRule {
        match self.form {
            JacobianForm::Interval { lo, hi, .. } => {
                let half = 0.5 * (hi - lo);
                base.mapped(half, 0.5 * (hi + lo), half, self.measure)
            }
            _ => base.clone(),
        }
    }
}

/// `J_g(x)` for the pair `(g, measure)`.
pub fn jacobian(group: GroupElement, measure: Measure, x: f64) -> Result<f64> {
    Ok(Transport::new(group, measure)?.jacobian(x))
}

/// `U_g f` as an evaluable function.
#[derive(Clone)]
pub struct TransportedFunction<F> {
    pub base: F,
    pub transport: Transport,
}

impl<F: Fn(f64) -> f64> TransportedFunction<F> {
    pub fn eval(&self, x: f64) -> f64 {
        self.transport.apply(&self.base, x)
    }
}

pub fn transport<F: Fn(f64) -> f64>(group: GroupElement, f: F, measure: Measure) -> Result<TransportedFunction<F>> {
    Ok(TransportedFunction {
        base: f,
        transport: Transport::new(group, measure)?,
    })
}

/// Row `k`, column `i` holds `(U_g P_k)(x_i)`.
pub fn transported_basis_values(transport: &Transport, basis: OrthonormalBasis, k_max: usize, nodes: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(k_max + 1, nodes.len());
    let mut buf = vec![0.0; k_max + 1];
    for (i, &x) in nodes.iter().enumerate() {
        let s = transport.sqrt_jacobian(x);
        if s == 0.0 {
            continue;
        }
        basis.eval_into(transport.group.act_inverse(x), &mut buf);
        for k in 0..=k_max {
            out[(k, i)] = s * buf[k];
        }
    }
    out
}

/// `(U_g P_k)(x)` for `k = 0..=k_max` at one point.
pub fn transported_basis_at(transport: &Transport, basis: OrthonormalBasis, k_max: usize, x: f64) -> Vec<f64> {
    let s = transport.sqrt_jacobian(x);
    if s == 0.0 {
        return vec![0.0; k_max + 1];
    }
    let mut v = basis.eval(k_max, transport.group.act_inverse(x));
    v.iter_mut().for_each(|p| *p *= s);
    v
}

/// Gram matrix `⟨U_g P_j, U_g P_k⟩` integrated forward on `rule` (no pull-back).
pub fn forward_gram(transport: &Transport, basis: OrthonormalBasis, k_max: usize, rule: &QuadratureRule) -> DMatrix<f64> {
    let rule = transport.forward_rule(rule);
    let mut vals = transported_basis_values(transport, basis, k_max, &rule.nodes);
    for (i, &w) in rule.weights.iter().enumerate() {
        let sw = w.sqrt();
        vals.column_mut(i).scale_mut(sw);
    }
    &vals * vals.transpose()
}

/// Gram matrix `⟨U_g P_j, U_g P_k⟩` by pull-back integration.
pub fn pullback_gram(transport: &Transport, basis: OrthonormalBasis, k_max: usize, rule: &QuadratureRule) -> DMatrix<f64> {
    let pulled: Vec<f64> = rule.nodes.iter().map(|&y| transport.group.act(y)).collect();
    let mut vals = transported_basis_values(transport, basis, k_max, &pulled);
    for (i, (&w, &x)) in rule.weights.iter().zip(&pulled).enumerate() {
        let scale = (w * (-transport.log_jacobian(x)).exp()).sqrt();
        vals.column_mut(i).scale_mut(scale);
    }
    &vals * vals.transpose()
}

/// Maximum deviation of two closed-form alternatives for the dilated Hermite
/// basis from `U_g P_k`, over `|x| <= 2` and `k <= k_max`:
/// `scaled_argument` is `α^{-1/2} P_k(x/α)`, `gaussian_factor` is
/// `exp((1-α²)x²/4) P_k(x/α)`. Both vanish only at `α = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationFormDeviation {
    pub alpha: f64,
    pub k_max: usize,
    pub scaled_argument: f64,
    pub gaussian_factor: f64,
}

pub fn dilation_form_deviation(alpha: f64, k_max: usize) -> Result<DilationFormDeviation> {
    let t = Transport::new(GroupElement::dilation(alpha), Measure::GaussianStd)?;
    let basis = OrthonormalBasis::HERMITE;
    let mut out = DilationFormDeviation {
        alpha,
        k_max,
        scaled_argument: 0.0,
        gaussian_factor: 0.0,
    };
    for i in 0..=40 {
        let x = -2.0 + 0.1 * i as f64;
        let exact = transported_basis_at(&t, basis, k_max, x);
        let p = basis.eval(k_max, x / alpha);
        let gf = (0.25 * (1.0 - alpha * alpha) * x * x).exp();
        for (e, pk) in exact.iter().zip(&p) {
            out.scaled_argument = out.scaled_argument.max((e - pk / alpha.sqrt()).abs());
            out.gaussian_factor = out.gaussian_factor.max((e - gf * pk).abs());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternative_dilation_forms_agree_only_at_identity() {
        let d = dilation_form_deviation(1.0, 6).unwrap();
        assert!(d.scaled_argument < 1e-12 && d.gaussian_factor < 1e-12);
        let d = dilation_form_deviation(0.8, 6).unwrap();
        assert!(d.scaled_argument > 1e-3 && d.gaussian_factor > 1e-3);
    }
    use crate::quadrature::gauss_rule;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn group_law_examples() {
        assert_eq!(GroupElement::affine(2.0, 1.0).act(3.0), 7.0);
        assert_eq!(GroupElement::dilation(2.0).inverse(), GroupElement::dilation(0.5));
        assert_eq!(
            GroupElement::translation(1.0).compose(&GroupElement::translation(2.0)).unwrap(),
            GroupElement::translation(3.0)
        );
        assert!(matches!(
            GroupElement::translation(1.0).compose(&GroupElement::dilation(2.0)),
            Err(Error::MixedVariants(..))
        ));
        assert!(GroupElement::dilation(0.0).validate().is_err());
        assert!(GroupElement::affine(-1.0, 0.0).validate().is_err());
    }

    #[test]
    fn jacobian_examples() {
        for m in [Measure::GaussianStd, Measure::UniformPM1, Measure::LebesgueR] {
            assert_eq!(jacobian(GroupElement::IDENTITY, m, 0.3).unwrap(), 1.0);
        }
        // Bandwidth h acts by g_h⁻¹·x = x/h on Lebesgue measure with J ≡ 1/h.
        for h in [0.1, 0.5, 2.0] {
            assert_abs_diff_eq!(
                jacobian(GroupElement::dilation(h), Measure::LebesgueR, 1.7).unwrap(),
                1.0 / h,
                epsilon = 1e-15
            );
        }
        let j = jacobian(GroupElement::translation(1.0), Measure::GaussianStd, 0.0).unwrap();
        assert_abs_diff_eq!(j, (-0.5f64).exp(), epsilon = 1e-15);
        // φ(x - b)/φ(x)
        let g = Measure::GaussianStd;
        for &x in &[-1.3, 0.4, 2.2] {
            let ratio = g.density(x - 1.0) / g.density(x);
            assert_abs_diff_eq!(jacobian(GroupElement::translation(1.0), g, x).unwrap(), ratio, epsilon = 1e-13);
            let ratio = g.density(x / 0.8) / 0.8 / g.density(x);
            assert_abs_diff_eq!(jacobian(GroupElement::dilation(0.8), g, x).unwrap(), ratio, epsilon = 1e-13);
            let ratio = g.density((x - 0.3) / 1.4) / 1.4 / g.density(x);
            assert_abs_diff_eq!(jacobian(GroupElement::affine(1.4, 0.3), g, x).unwrap(), ratio, epsilon = 1e-13);
        }
        assert!(matches!(
            jacobian(GroupElement::translation(0.5), Measure::UniformPM1, 0.0),
            Err(Error::UnsupportedPair { .. })
        ));
        assert!(jacobian(GroupElement::affine(0.8, 0.5), Measure::UniformPM1, 0.0).is_err());
        let j = jacobian(GroupElement::affine(0.5, 0.25), Measure::UniformPM1, 0.0).unwrap();
        assert_eq!(j, 2.0);
        assert_eq!(jacobian(GroupElement::affine(0.5, 0.25), Measure::UniformPM1, 0.9).unwrap(), 0.0);
    }

    #[test]
    fn jacobian_integrates_to_one() {
        let rule = gauss_rule(OrthonormalBasis::HERMITE, 200).unwrap();
        for g in [GroupElement::translation(2.0), GroupElement::dilation(0.8), GroupElement::dilation(1.25)] {
            let t = Transport::new(g, Measure::GaussianStd).unwrap();
            assert_abs_diff_eq!(rule.integrate_fn(|x| t.jacobian(x)), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn transport_examples() {
        let basis = OrthonormalBasis::HERMITE;
        let p3 = |x: f64| basis.eval_one(3, x);
        let id = transport(GroupElement::IDENTITY, p3, Measure::GaussianStd).unwrap();
        assert_eq!(id.eval(0.7), p3(0.7));

        let t = transport(GroupElement::translation(2.0), |_| 1.0, Measure::GaussianStd).unwrap();
        assert_abs_diff_eq!(t.eval(2.0), E, epsilon = 1e-14);

        assert!(transport(GroupElement::dilation(0.5), p3, Measure::UniformPM1).is_err());
    }

    #[test]
    fn identity_basis_values() {
        let basis = OrthonormalBasis::LEGENDRE;
        let rule = gauss_rule(basis, 12).unwrap();
        let t = Transport::identity(Measure::UniformPM1);
        let vals = transported_basis_values(&t, basis, 6, &rule.nodes);
        for (i, &x) in rule.nodes.iter().enumerate() {
            let p = basis.eval(6, x);
            for k in 0..=6 {
                assert_eq!(vals[(k, i)], p[k]);
            }
        }
    }

    #[test]
    fn forward_unitarity() {
        let rule = gauss_rule(OrthonormalBasis::HERMITE, 400).unwrap();
        for g in [GroupElement::translation(2.0), GroupElement::dilation(0.8)] {
            let t = Transport::new(g, Measure::GaussianStd).unwrap();
            let gram = forward_gram(&t, OrthonormalBasis::HERMITE, 10, &rule);
            assert!((gram - DMatrix::identity(11, 11)).amax() <= 1e-6);
        }
        let leg = gauss_rule(OrthonormalBasis::LEGENDRE, 64).unwrap();
        let t = Transport::new(GroupElement::affine(0.5, 0.25), Measure::UniformPM1).unwrap();
        let gram = forward_gram(&t, OrthonormalBasis::LEGENDRE, 10, &leg);
        assert!((gram - DMatrix::identity(11, 11)).amax() <= 1e-10);
        let gram = pullback_gram(&t, OrthonormalBasis::LEGENDRE, 10, &leg);
        assert!((gram - DMatrix::identity(11, 11)).amax() <= 1e-10);
    }

    #[test]
    fn corrupted_jacobian_breaks_unitarity() {
        let rule = gauss_rule(OrthonormalBasis::HERMITE, 400).unwrap();
        let t = Transport::new(GroupElement::translation(2.0), Measure::GaussianStd)
            .unwrap()
            .corrupted();
        let gram = forward_gram(&t, OrthonormalBasis::HERMITE, 3, &rule);
        assert!((gram - DMatrix::identity(4, 4)).amax() > 1.0);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn gaussian_elements() -> impl Strategy<Value = GroupElement> {
            prop_oneof![
                (-3.0f64..3.0).prop_map(GroupElement::translation),
                (0.5f64..2.0).prop_map(GroupElement::dilation),
                ((0.5f64..2.0), (-2.0f64..2.0)).prop_map(|(a, b)| GroupElement::affine(a, b)),
            ]
        }

        proptest! {
            #[test]
            fn inverse_is_identity(g in gaussian_elements(), x in -5.0f64..5.0) {
                let id = g.compose(&g.inverse()).unwrap();
                prop_assert!((id.act(x) - x).abs() <= 1e-12 * x.abs().max(1.0));
                prop_assert!((g.act_inverse(g.act(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
            }

            #[test]
            fn transport_is_a_homomorphism(
                (g1, g2) in prop_oneof![
                    ((-2.0f64..2.0), (-2.0f64..2.0)).prop_map(|(a, b)| (GroupElement::translation(a), GroupElement::translation(b))),
                    ((0.6f64..1.6), (0.6f64..1.6)).prop_map(|(a, b)| (GroupElement::dilation(a), GroupElement::dilation(b))),
                    ((0.6f64..1.6), (-1.0f64..1.0), (0.6f64..1.6), (-1.0f64..1.0))
                        .prop_map(|(a1, b1, a2, b2)| (GroupElement::affine(a1, b1), GroupElement::affine(a2, b2))),
                ],
                x in -3.0f64..3.0,
            ) {
                let m = Measure::GaussianStd;
                let f = |y: f64| OrthonormalBasis::HERMITE.eval_one(4, y);
                let t12 = Transport::new(g1.compose(&g2).unwrap(), m).unwrap();
                let t1 = Transport::new(g1, m).unwrap();
                let t2 = Transport::new(g2, m).unwrap();
                let lhs = t12.apply(f, x);
                let rhs = t1.apply(|y| t2.apply(f, y), x);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
            }

            #[test]
            fn jacobian_is_positive(g in gaussian_elements(), x in -8.0f64..8.0) {
                prop_assert!(jacobian(g, Measure::GaussianStd, x).unwrap() > 0.0);
            }
        }
    }
}
