use nalgebra::DMatrix;
use proptest::prelude::*;
use twinkernel::group::{forward_gram, pullback_gram, transport, GroupElement, Transport};
use twinkernel::measure::Measure;
use twinkernel::orthopoly::{recurrence_coeffs, Family, OrthonormalBasis};
use twinkernel::quadrature::{gauss_rule, inner_product, DEFAULT_OVERSIZED_M};

fn max_dev(g: &DMatrix<f64>) -> f64 {
    (g - DMatrix::identity(g.nrows(), g.ncols())).amax()
}

#[test]
fn orthonormal_up_to_thirty_with_64_nodes() {
    for basis in [OrthonormalBasis::HERMITE, OrthonormalBasis::LEGENDRE] {
        let rule = gauss_rule(basis, 64).unwrap();
        let g = forward_gram(&Transport::identity(basis.measure()), basis, 30, &rule);
        assert!(max_dev(&g) <= 1e-10, "{:?}", basis.family);
    }
}

#[test]
fn recurrence_consistency() {
    for basis in [OrthonormalBasis::HERMITE, OrthonormalBasis::LEGENDRE] {
        let rule = gauss_rule(basis, 64).unwrap();
        for k in 0..30 {
            let xp: Vec<f64> = rule.nodes.iter().map(|&x| x * basis.eval_one(k, x)).collect();
            let next = rule.sample(|x| basis.eval_one(k + 1, x));
            let (_, b) = recurrence_coeffs(basis.family, k + 1);
            assert!((inner_product(&xp, &next, &rule).unwrap() - b).abs() <= 1e-10);
        }
    }
}

#[test]
fn unitarity_for_every_supported_element() {
    let hermite = gauss_rule(OrthonormalBasis::HERMITE, DEFAULT_OVERSIZED_M).unwrap();
    for g in [
        GroupElement::translation(2.0),
        GroupElement::translation(-2.0),
        GroupElement::dilation(0.8),
        GroupElement::dilation(1.25),
        GroupElement::affine(1.1, 0.5),
    ] {
        let t = Transport::new(g, Measure::GaussianStd).unwrap();
        assert!(max_dev(&forward_gram(&t, OrthonormalBasis::HERMITE, 10, &hermite)) <= 1e-6, "{g:?}");
        assert!(max_dev(&pullback_gram(&t, OrthonormalBasis::HERMITE, 10, &hermite)) <= 1e-12, "{g:?}");
    }
    let legendre = gauss_rule(OrthonormalBasis::LEGENDRE, DEFAULT_OVERSIZED_M).unwrap();
    let t = Transport::new(GroupElement::affine(0.5, 0.25), Measure::UniformPM1).unwrap();
    assert!(max_dev(&forward_gram(&t, OrthonormalBasis::LEGENDRE, 10, &legendre)) <= 1e-6);
}

#[test]
fn unsupported_pairs_are_named() {
    let err = Transport::new(GroupElement::translation(0.5), Measure::UniformPM1).unwrap_err();
    assert!(err.to_string().contains("Translation"));
    assert!(Transport::new(GroupElement::affine(0.8, 0.5), Measure::UniformPM1).is_err());
}

#[test]
fn norm_preserved_on_low_degree_span() {
    let rule = gauss_rule(OrthonormalBasis::HERMITE, DEFAULT_OVERSIZED_M).unwrap();
    let coeffs = [0.4, -1.2, 0.3, 0.0, 0.7, -0.25];
    let f = |x: f64| OrthonormalBasis::HERMITE.eval_series(&coeffs, x);
    let norm: f64 = coeffs.iter().map(|c| c * c).sum();
    for g in [GroupElement::translation(2.0), GroupElement::dilation(0.8)] {
        let tf = transport(g, f, Measure::GaussianStd).unwrap();
        let n2 = rule.integrate_fn(|x| tf.eval(x).powi(2));
        assert!((n2 - norm).abs() <= 1e-6 * norm, "{g:?}");
    }
}

proptest! {
    #[test]
    fn parity_of_both_families(x in -3.0f64..3.0, k in 0usize..=30) {
        let h = OrthonormalBasis::HERMITE;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (h.eval_one(k, -x), sign * h.eval_one(k, x));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let l = OrthonormalBasis::LEGENDRE;
        let y = x / 3.0;
        prop_assert!((l.eval_one(k, -y) - sign * l.eval_one(k, y)).abs() <= 1e-12);
    }

    #[test]
    fn compose_with_inverse_is_identity(
        a in 0.2f64..5.0, b in -4.0f64..4.0, x in -10.0f64..10.0,
    ) {
        for g in [GroupElement::affine(a, b), GroupElement::dilation(a), GroupElement::translation(b)] {
            let e = g.compose(&g.inverse()).unwrap();
            prop_assert!((e.act(x) - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn jacobians_positive_and_identity_trivial(b in -3.0f64..3.0, alpha in 0.3f64..3.0, x in -6.0f64..6.0) {
        for g in [GroupElement::translation(b), GroupElement::dilation(alpha)] {
            prop_assert!(Transport::new(g, Measure::GaussianStd).unwrap().jacobian(x) > 0.0);
        }
        for m in [Measure::GaussianStd, Measure::UniformPM1, Measure::LebesgueR] {
            prop_assert_eq!(Transport::identity(m).jacobian(x.clamp(-1.0, 1.0)), 1.0);
        }
    }

    #[test]
    fn gauss_rules_reproduce_moments(m in 1usize..40, fam in prop_oneof![Just(Family::HermiteProbabilist), Just(Family::LegendreUniform)]) {
        let basis = OrthonormalBasis::new(fam);
        let rule = gauss_rule(basis, m).unwrap();
        prop_assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
        for p in 0..(2 * m) as u32 {
            let exact = basis.measure().raw_moment(p).unwrap();
            let scale = basis.measure().raw_moment(p + p % 2).unwrap().max(1.0);
            let q = rule.integrate_fn(|x| x.powi(p as i32));
            prop_assert!((q - exact).abs() <= 1e-10 * scale, "m={} p={} {} vs {}", m, p, q, exact);
        }
    }
}
