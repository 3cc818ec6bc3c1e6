//! Gauss quadrature rules built from the three-term recurrence (Golub–Welsch).
//!
//! Nodes are the eigenvalues of the Jacobi matrix, polished by Newton steps on
//! `P_m`. Weights use the Christoffel form `w_i = mass / Σ_{k<m} P_k(x_i)²`,
//! which equals `mass · v_{0,i}²` for the normalized eigenvector `v_i` but keeps
//! full relative accuracy on the small tail weights. Nodes whose weight
//! underflows `f64` (large Hermite rules) are dropped; they cannot contribute
//! to any finite sum anyway.

use crate::eigen::{tridiagonal_eigenvalues, MAX_SWEEPS};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::orthopoly::OrthonormalBasis;

/// Rule size used for integrands that are not polynomial against the base weight.
pub const DEFAULT_OVERSIZED_M: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomials of degree up to this are integrated exactly.
    pub exact_degree: usize,
    pub measure: Measure,
    /// Requested number of nodes before underflow pruning.
    pub requested_nodes: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// `Σ w_i f(x_i)` for a closure.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine image `x ↦ scale·x + shift` with weights multiplied by `weight_scale`.
    pub fn mapped(&self, scale: f64, shift: f64, weight_scale: f64, measure: Measure) -> Self {
        Self {
            nodes: self.nodes.iter().map(|&x| scale * x + shift).collect(),
            weights: self.weights.iter().map(|&w| w * weight_scale).collect(),
            exact_degree: self.exact_degree,
            measure,
            requested_nodes: self.requested_nodes,
        }
    }
}

/// Gauss rule with `m` nodes for the measure of `basis`.
pub fn gauss_rule(basis: OrthonormalBasis, m: usize) -> Result<QuadratureRule> {
    assert!(m >= 1, "gauss_rule requires at least one node");
    let diag: Vec<f64> = (0..m).map(|k| basis.recurrence(k).0).collect();
    let off: Vec<f64> = (1..m).map(|k| basis.recurrence(k).1).collect();
    let mut nodes = tridiagonal_eigenvalues(&diag, &off).map_err(|_| Error::QuadratureNonConvergence {
        family: basis.family,
        m,
        iterations: MAX_SWEEPS,
    })?;

    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = scaled_value_and_derivative(basis, m, *x);
            if dp != 0.0 && dp.is_finite() && p.is_finite() {
                *x -= p / dp;
            }
        }
    }
    symmetrize(&mut nodes);

    let mass = basis.measure().total_mass().expect("orthonormal basis measure has finite mass");
    let mut out_nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for &x in &nodes {
        let w = mass * christoffel(basis, m, x);
        if w > 0.0 {
            out_nodes.push(x);
            weights.push(w);
        }
    }
    symmetrize_weights(&mut weights);
    Ok(QuadratureRule {
        nodes: out_nodes,
        weights,
        exact_degree: 2 * m - 1,
        measure: basis.measure(),
        requested_nodes: m,
    })
}

/// Gauss–Legendre rule with `m` nodes for Lebesgue measure on `[lo, hi]`.
pub fn lebesgue_interval_rule(lo: f64, hi: f64, m: usize) -> Result<QuadratureRule> {
    let base = gauss_rule(OrthonormalBasis::LEGENDRE, m)?;
    let half = 0.5 * (hi - lo);
    // dx/2 has mass 1 on [-1, 1], so Lebesgue mass of [lo, hi] is (hi - lo).
    Ok(base.mapped(half, 0.5 * (hi + lo), hi - lo, Measure::LebesgueR))
}

/// Σ w_i f(x_i) for values sampled at the rule's nodes.
pub fn integrate(values: &[f64], rule: &QuadratureRule) -> Result<f64> {
    check_len(values, rule)?;
    Ok(values.iter().zip(&rule.weights).map(|(f, w)| w * f).sum())
}

/// Σ w_i f(x_i) g(x_i).
pub fn inner_product(f: &[f64], g: &[f64], rule: &QuadratureRule) -> Result<f64> {
    check_len(f, rule)?;
    check_len(g, rule)?;
    Ok(f.iter().zip(g).zip(&rule.weights).map(|((a, b), w)| w * a * b).sum())
}

fn check_len(values: &[f64], rule: &QuadratureRule) -> Result<()> {
    if values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            actual: values.len(),
        });
    }
    Ok(())
}

const RESCALE_AT: f64 = 1e150;

/// `(P_m(x), P_m'(x))` up to a common positive factor.
fn scaled_value_and_derivative(basis: OrthonormalBasis, m: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 0..m {
        let (ak, bk) = basis.recurrence(k);
        let (_, bk1) = basis.recurrence(k + 1);
        let p_next = ((x - ak) * p - bk * p_prev) / bk1;
        let d_next = ((x - ak) * d + p - bk * d_prev) / bk1;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        if p.abs() > RESCALE_AT || d.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            p *= s;
            p_prev *= s;
            d *= s;
            d_prev *= s;
        }
    }
    (p, d)
}

/// `1 / Σ_{k<m} P_k(x)²` with rescaling against overflow.
fn christoffel(basis: OrthonormalBasis, m: usize, x: f64) -> f64 {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut log_scale = 0.0;
    for k in 0..m - 1 {
        let (ak, bk) = basis.recurrence(k);
        let (_, bk1) = basis.recurrence(k + 1);
        let p_next = ((x - ak) * p - bk * p_prev) / bk1;
        p_prev = p;
        p = p_next;
        sum += p * p;
        if p.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            p *= s;
            p_prev *= s;
            sum *= s * s;
            log_scale += 2.0 * RESCALE_AT.ln();
        }
    }
    (-(sum.ln() + log_scale)).exp()
}

fn symmetrize_weights(weights: &mut [f64]) {
    let n = weights.len();
    for i in 0..n / 2 {
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

/// Nodes of a symmetric measure come in ± pairs; average them out.
fn symmetrize(nodes: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let a = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -a;
        nodes[n - 1 - i] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_one_and_two_nodes() {
        let r = gauss_rule(OrthonormalBasis::HERMITE, 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-15);

        // Moment matching: w1 + w2 = 1, w1 x1² + w2 x2² = 1, symmetric ⇒ ±1 with 1/2.
        let r = gauss_rule(OrthonormalBasis::HERMITE, 2).unwrap();
        assert_abs_diff_eq!(r.nodes[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 0.5, epsilon = 1e-15);
        assert_eq!(r.exact_degree, 3);
    }

    #[test]
    fn legendre_two_nodes() {
        // ∫ x² dx/2 = 1/3 with two symmetric equal weights ⇒ ±1/√3.
        let r = gauss_rule(OrthonormalBasis::LEGENDRE, 2).unwrap();
        let node = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -node, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], node, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn integrate_examples() {
        let g = gauss_rule(OrthonormalBasis::HERMITE, 5).unwrap();
        assert_abs_diff_eq!(integrate(&g.sample(|_| 1.0), &g).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(integrate(&g.sample(|x| x * x), &g).unwrap(), 1.0, epsilon = 1e-14);
        let u = gauss_rule(OrthonormalBasis::LEGENDRE, 3).unwrap();
        assert_abs_diff_eq!(integrate(&u.sample(|x| x), &u).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            integrate(&[1.0, 2.0], &u),
            Err(Error::LengthMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn inner_product_examples() {
        let h = gauss_rule(OrthonormalBasis::HERMITE, 4).unwrap();
        let p3 = h.sample(|x| OrthonormalBasis::HERMITE.eval_one(3, x));
        assert_abs_diff_eq!(inner_product(&p3, &p3, &h).unwrap(), 1.0, epsilon = 1e-13);
        let x1 = h.sample(|x| x);
        let x3 = h.sample(|x| x * x * x);
        assert_abs_diff_eq!(inner_product(&x1, &x3, &h).unwrap(), 3.0, epsilon = 1e-13);
        assert_eq!(inner_product(&x1, &x3, &h).unwrap(), inner_product(&x3, &x1, &h).unwrap());

        let l = gauss_rule(OrthonormalBasis::LEGENDRE, 8).unwrap();
        let p2 = l.sample(|x| OrthonormalBasis::LEGENDRE.eval_one(2, x));
        let p5 = l.sample(|x| OrthonormalBasis::LEGENDRE.eval_one(5, x));
        assert!(inner_product(&p2, &p5, &l).unwrap().abs() <= 1e-10);
        assert!(inner_product(&p2, &x1, &l).is_err());
    }

    #[test]
    fn moments_reproduced_up_to_exact_degree() {
        for basis in [OrthonormalBasis::HERMITE, OrthonormalBasis::LEGENDRE] {
            for m in [1, 2, 3, 5, 8, 13, 20] {
                let rule = gauss_rule(basis, m).unwrap();
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                assert_abs_diff_eq!(rule.total_mass(), 1.0, epsilon = 1e-12);
                for p in 0..=(2 * m - 1) as u32 {
                    let exact = basis.measure().raw_moment(p).unwrap();
                    let approx = rule.integrate_fn(|x| x.powi(p as i32));
                    // odd moments vanish; measure their error against E|X|^p
                    let scale = rule.integrate_fn(|x| x.abs().powi(p as i32)).max(1.0);
                    assert!(
                        (approx - exact).abs() <= 1e-10 * scale,
                        "{basis:?} m={m} p={p}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        for basis in [OrthonormalBasis::HERMITE, OrthonormalBasis::LEGENDRE] {
            let rule = gauss_rule(basis, 16).unwrap();
            let vals: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| basis.eval(15, x)).collect();
            for j in 0..=15 {
                for k in 0..=15 {
                    let g: f64 = vals.iter().zip(&rule.weights).map(|(v, w)| w * v[j] * v[k]).sum();
                    let target = if j == k { 1.0 } else { 0.0 };
                    assert!((g - target).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn large_hermite_rule_prunes_underflow() {
        let rule = gauss_rule(OrthonormalBasis::HERMITE, 400).unwrap();
        assert!(rule.len() < 400 && rule.len() > 380);
        assert_eq!(rule.requested_nodes, 400);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        assert_abs_diff_eq!(rule.total_mass(), 1.0, epsilon = 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert_abs_diff_eq!(rule.integrate_fn(|x| x.powi(4)), 3.0, epsilon = 1e-11);
    }

    #[test]
    fn lebesgue_interval() {
        let r = lebesgue_interval_rule(-3.0, 5.0, 10).unwrap();
        assert_abs_diff_eq!(r.total_mass(), 8.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.integrate_fn(|x| x * x), (125.0 + 27.0) / 3.0, epsilon = 1e-11);
    }
}
