//! Nyström discretization of kernel integral operators and the numerical
//! checks of spectral equivariance: the transported operator has the base
//! eigenvalues, with eigenfunctions `U_g P_k`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::eig_sym;
use crate::error::Result;
use crate::group::{transported_basis_values, GroupElement, Transport};
use crate::kernel::{Kernel, SpectralFilter, SpectralKernel, TransportedKernel};
use crate::measure::Measure;
use crate::quadrature::QuadratureRule;

/// Eigenvalue ratios closer than this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-6;
/// Absolute slack added to the analytic tail in expansion checks.
pub const EXPANSION_SLACK: f64 = 1e-8;
pub const TEST_GRID_POINTS: usize = 21;

/// `M_ij = √w_i K(x_i, x_j) √w_j`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kernel: String,
}

pub fn nystrom_matrix<K: Kernel + ?Sized>(kernel: &K, rule: &QuadratureRule) -> OperatorMatrix {
    let n = rule.len();
    let log_w: Vec<f64> = rule.weights.iter().map(|w| w.ln()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..=i)
                .map(|j| kernel.eval_weighted(rule.nodes[i], rule.nodes[j], 0.5 * (log_w[i] + log_w[j])))
                .collect()
        })
        .collect();
    let mut matrix = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    OperatorMatrix {
        matrix,
        nodes: rule.nodes.clone(),
        weights: rule.weights.clone(),
        kernel: kernel.describe(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceRow {
    pub k: usize,
    pub lambda_true: f64,
    pub mu_nystrom: f64,
    pub rel_err: f64,
    pub alignment: f64,
    /// `true` when alignment is the principal-angle cosine of a degenerate cluster.
    pub subspace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub group: GroupElement,
    pub measure: Measure,
    pub rule_nodes: usize,
    pub rule_requested: usize,
    pub rows: Vec<EquivarianceRow>,
    pub expansion: ExpansionCheck,
}

impl EquivarianceReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    pub fn min_alignment(&self) -> f64 {
        self.rows.iter().map(|r| r.alignment).fold(1.0, f64::min)
    }
}

/// Pointwise comparison of a kernel against its (transported) spectral sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCheck {
    pub grid_points: usize,
    pub max_residual: f64,
    pub max_tail_bound: f64,
    /// `max(|residual| - tail_bound)`; nonpositive-ish when the check passes.
    pub max_excess: f64,
    pub passed: bool,
}

/// 21 points over `[-2, 2]` (Gaussian and Lebesgue) or the image interval of
/// the transport (uniform measure).
pub fn test_grid(transport: &Transport) -> Vec<f64> {
    let (lo, hi) = match transport.measure {
        Measure::UniformPM1 => transport.image_support(),
        Measure::GaussianStd | Measure::LebesgueR => (-2.0, 2.0),
    };
    let n = TEST_GRID_POINTS;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Conjugation identity on the test grid:
/// `|K_g(x, y) - Σ_{k <= K_spec} λ_k (U_g P_k)(x) (U_g P_k)(y)| <= tail + slack`.
pub fn expansion_check(kernel: &TransportedKernel) -> ExpansionCheck {
    let grid = test_grid(&kernel.transport);
    let k_spec = kernel.base.k_spec;
    let mut out = ExpansionCheck {
        grid_points: grid.len() * grid.len(),
        max_residual: 0.0,
        max_tail_bound: 0.0,
        max_excess: f64::NEG_INFINITY,
        passed: true,
    };
    for &x in &grid {
        for &y in &grid {
            let r = (kernel.reference_eval(x, y) - kernel.spectral_sum(x, y, k_spec)).abs();
            let tail = kernel.tail_bound(x, y);
            out.max_residual = out.max_residual.max(r);
            out.max_tail_bound = out.max_tail_bound.max(tail);
            out.max_excess = out.max_excess.max(r - tail);
            if !(r <= tail + EXPANSION_SLACK) {
                out.passed = false;
            }
        }
    }
    out
}

/// Nyström eigenpairs of `K_g` against `λ_k` and the sampled `U_g P_k`.
///
/// `rule` is a rule for the base measure; on the uniform measure it is mapped
/// onto the image interval of the transport.
pub fn verify_spectral_equivariance(
    kernel: &SpectralKernel,
    transport: &Transport,
    rule: &QuadratureRule,
    k_check: usize,
) -> Result<EquivarianceReport> {
    let tk = TransportedKernel::from_transport(kernel.clone(), *transport);
    let fwd = transport.forward_rule(rule);
    let op = nystrom_matrix(&tk, &fwd);
    let eig = eig_sym(&op.matrix)?;

    let mut samples = transported_basis_values(transport, kernel.basis, k_check, &fwd.nodes);
    for (i, &w) in fwd.weights.iter().enumerate() {
        samples.column_mut(i).scale_mut(w.sqrt());
    }
    for k in 0..=k_check {
        let norm = samples.row(k).norm();
        if norm > 0.0 {
            samples.row_mut(k).unscale_mut(norm);
        }
        let peak = samples.row(k).iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if peak < 0.0 {
            samples.row_mut(k).neg_mut();
        }
    }

    let lambdas = kernel.eigenvalues(k_check);
    let mut rows = Vec::with_capacity(k_check + 1);
    let mut start = 0;
    while start <= k_check {
        let mut end = start;
        while end < k_check && is_degenerate(lambdas[end], lambdas[end + 1]) {
            end += 1;
        }
        let alignment = if end == start {
            eig.vectors.column(start).dot(&samples.row(start).transpose()).abs()
        } else {
            subspace_cosine(&eig.vectors.columns(start, end - start + 1).into_owned(), &samples.rows(start, end - start + 1).transpose())?
        };
        for k in start..=end {
            let mu = eig.values.get(k).copied().unwrap_or(0.0);
            let lambda = lambdas[k];
            let rel_err = if lambda == 0.0 { mu.abs() } else { (mu - lambda).abs() / lambda };
            rows.push(EquivarianceRow {
                k,
                lambda_true: lambda,
                mu_nystrom: mu,
                rel_err,
                alignment,
                subspace: end > start,
            });
        }
        start = end + 1;
    }

    Ok(EquivarianceReport {
        group: transport.group,
        measure: transport.measure,
        rule_nodes: fwd.len(),
        rule_requested: fwd.requested_nodes,
        rows,
        expansion: expansion_check(&tk),
    })
}

fn is_degenerate(a: f64, b: f64) -> bool {
    b > 0.0 && a / b < 1.0 + DEGENERACY_GAP
}

/// Smallest principal-angle cosine between the column spans of `v`
/// (orthonormal) and `u` (orthonormalized here).
fn subspace_cosine(v: &DMatrix<f64>, u: &DMatrix<f64>) -> Result<f64> {
    let q = u.clone().qr().q();
    let s = v.transpose() * q;
    let sts = s.transpose() * &s;
    let eig = eig_sym(&sts)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Maximum pointwise gap between hard-filtering then transporting and
/// transporting then hard-filtering, on the test grid.
pub fn filter_commutation_error(kernel: &SpectralKernel, transport: &Transport, cut: usize) -> f64 {
    let filtered_then_moved = TransportedKernel::from_transport(
        crate::kernel::spectral_filter(kernel, SpectralFilter::Hard { k: cut }),
        *transport,
    );
    let moved = TransportedKernel::from_transport(kernel.clone(), *transport);
    let grid = test_grid(transport);
    let mut worst: f64 = 0.0;
    for &x in &grid {
        for &y in &grid {
            let a = filtered_then_moved.eval(x, y);
            let b = moved.spectral_sum(x, y, cut.min(kernel.k_spec));
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Smallest eigenvalue of the Gram matrix `[K(x_i, x_j)]`.
pub fn gram_min_eigenvalue<K: Kernel + ?Sized>(kernel: &K, points: &[f64]) -> Result<f64> {
    let n = points.len();
    let gram = DMatrix::from_fn(n, n, |i, j| kernel.eval(points[i], points[j]));
    Ok(eig_sym(&gram)?.values.last().copied().unwrap_or(0.0))
}
