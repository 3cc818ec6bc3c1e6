//! Symmetric eigensolvers: implicit-shift QL on tridiagonal matrices and
//! Householder reduction followed by QL for dense symmetric matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Iteration cap per eigenvalue.
pub const MAX_SWEEPS: usize = 50;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub-diagonal `off` (`off[i]` couples rows `i` and `i+1`), sorted ascending.
///
/// Returns the number of iterations spent on the eigenvalue that failed to
/// converge as the error payload.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> std::result::Result<Vec<f64>, usize> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Implicit QL with Wilkinson shifts (tqli). `e[i]` is the coupling between
/// `i` and `i+1`; `e[n-1]` is ignored. When `z` is given, rotations are
/// accumulated into its columns.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DMatrix<f64>>) -> std::result::Result<(), usize> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // Couplings at roundoff level relative to the whole matrix are deflated as
    // well; strongly graded Nyström matrices stall on the local test alone.
    let anorm = d.iter().zip(e.iter()).map(|(a, b)| a.abs() + b.abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(iter);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..z.nrows() {
                        let zf = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * zf;
                        z[(k, i)] = c * z[(k, i)] - s * zf;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form (tred2).
/// On return `a` holds the accumulated orthogonal transform, `d` the
/// diagonal and `e[i]` the coupling between `i` and `i+1`.
fn householder_tridiagonalize(a: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = a.nrows();
    // Works on the lower triangle, storing the sub-diagonal in e[1..] first.
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[(j, k)] -= f * e[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 0..i {
                    a[(k, j)] -= g * a[(k, i)];
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 0..i {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
    // Shift so that e[i] couples i and i+1.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

/// Full eigen-decomposition of a symmetric matrix. Only the lower triangle is
/// read. Eigenvectors are oriented so that their largest-magnitude component
/// is positive.
pub fn eig_sym(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eig_sym requires a square matrix");
    let mut z = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(&mut z, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, Some(&mut z)).map_err(|iterations| Error::EigenNonConvergence { n, iterations })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut v: DVector<f64> = z.column(src).into_owned();
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(col, &v);
    }
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn identity_and_diagonal() {
        let eig = eig_sym(&DMatrix::identity(5, 5)).unwrap();
        assert!(eig.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let eig = eig_sym(&m).unwrap();
        assert_eq!(eig.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(eig.vectors[(0, 0)], 1.0);
        assert_eq!(eig.vectors[(2, 1)], 1.0);
    }

    #[test]
    fn random_reconstruction() {
        for seed in 0..5 {
            let m = random_symmetric(8, seed);
            let eig = eig_sym(&m).unwrap();
            let lambda = DMatrix::from_diagonal(&DVector::from_vec(eig.values.clone()));
            let recon = &eig.vectors * lambda * eig.vectors.transpose();
            assert!((recon - &m).amax() <= 1e-10);
            let gram = eig.vectors.transpose() * &eig.vectors;
            assert!((gram - DMatrix::identity(8, 8)).amax() <= 1e-10);
            let norm = m.amax() * 8.0;
            for k in 0..8 {
                let v = eig.vectors.column(k);
                let r = &m * v - v * eig.values[k];
                assert!(r.norm() <= 1e-10 * norm);
            }
        }
    }

    #[test]
    fn larger_matrix_residuals() {
        let m = random_symmetric(120, 99);
        let eig = eig_sym(&m).unwrap();
        let gram = eig.vectors.transpose() * &eig.vectors;
        assert!((gram - DMatrix::identity(120, 120)).amax() <= 1e-12);
        for w in eig.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [1.0, -2.0, 0.5, 3.0, 0.0];
        let off = [0.3, 1.1, -0.4, 0.9];
        let vals = tridiagonal_eigenvalues(&diag, &off).unwrap();
        let mut m = DMatrix::zeros(5, 5);
        for i in 0..5 {
            m[(i, i)] = diag[i];
        }
        for i in 0..4 {
            m[(i + 1, i)] = off[i];
            m[(i, i + 1)] = off[i];
        }
        let mut dense = eig_sym(&m).unwrap().values;
        dense.reverse();
        for (a, b) in vals.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn one_by_one_and_empty() {
        let eig = eig_sym(&DMatrix::from_element(1, 1, -4.0)).unwrap();
        assert_eq!(eig.values, vec![-4.0]);
        assert_eq!(eig.vectors[(0, 0)], 1.0);
        assert!(tridiagonal_eigenvalues(&[], &[]).unwrap().is_empty());
    }
}
