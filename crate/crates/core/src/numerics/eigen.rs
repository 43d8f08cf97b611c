//! Lowest eigenpairs of real symmetric operators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Lowest eigenvalue with a unit eigenvector and its residual `‖Mx − λx‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// A real symmetric linear map given by its action.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Any upper bound on the operator norm.
    fn norm_bound(&self) -> f64;
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            *yi = (0..n).map(|j| self[(i, j)] * x[j]).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        row_sum_norm(self)
    }
}

fn row_sum_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Lowest eigenpair of a dense symmetric matrix.
pub fn min_eigen_sym(m: &DMatrix<f64>) -> Result<EigenPair> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::InvalidArgument("matrix must be square and non-empty".into()));
    }
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for i in 0..n {
        for j in 0..i {
            let defect = (m[(i, j)] - m[(j, i)]).abs();
            if defect > 1e-12 * scale {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    defect,
                });
            }
        }
    }
    let eig = SymmetricEigen::new(m.clone());
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mut x: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    let mut value = value;
    let mut residual = (m * &x - &x * value).norm();
    // the QL sweep can leave residuals near 1e-8; polish by inverse iteration
    let lu = (m - DMatrix::identity(n, n) * value).lu();
    for _ in 0..3 {
        if residual <= 1e-14 * scale {
            break;
        }
        let Some(y) = lu.solve(&x) else { break };
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        let y = y / norm;
        let q = y.dot(&(m * &y));
        let r = (m * &y - &y * q).norm();
        if r >= residual {
            break;
        }
        x = y;
        value = q;
        residual = r;
    }
    if !(residual <= 1e-10 * row_sum_norm(m).max(f64::MIN_POSITIVE)) {
        return Err(Error::NoConvergence { residual });
    }
    Ok(EigenPair {
        value,
        vector: x.iter().copied().collect(),
        residual,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lowest eigenpair of a symmetric operator by restarted Lanczos with full
/// reorthogonalisation. The start vector is drawn from `seed`, so results
/// are reproducible. Converges when `‖Mx − λx‖ ≤ tol · norm_bound`.
pub fn lowest_eigenpair<O: SymmetricOperator + ?Sized>(
    op: &O,
    seed: u64,
    tol: f64,
) -> Result<EigenPair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("operator has dimension 0".into()));
    }
    let norm = op.norm_bound().max(f64::MIN_POSITIVE);
    let kmax = n.min(240);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut best_residual = f64::INFINITY;
    let mut w = vec![0.0; n];
    for _restart in 0..40 {
        let s0 = dot(&start, &start).sqrt();
        start.iter_mut().for_each(|x| *x /= s0);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let k = basis.len() - 1;
            op.apply(&basis[k], &mut w);
            let a = dot(&w, &basis[k]);
            alpha.push(a);
            // Two passes of classical Gram–Schmidt against the whole basis.
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    axpy(-c, q, &mut w);
                }
            }
            let b = dot(&w, &w).sqrt();
            let m = alpha.len();
            let check = m == kmax || m % 10 == 0 || b <= 1e-14 * norm;
            if check {
                let (theta, s) = tridiagonal_lowest(&alpha, &beta);
                let estimate = (b * s[m - 1]).abs();
                if estimate <= tol * norm || m == kmax || b <= 1e-14 * norm {
                    let mut x = vec![0.0; n];
                    for (sj, q) in s.iter().zip(&basis) {
                        axpy(*sj, q, &mut x);
                    }
                    let nx = dot(&x, &x).sqrt();
                    x.iter_mut().for_each(|xi| *xi /= nx);
                    let mut mx = vec![0.0; n];
                    op.apply(&x, &mut mx);
                    let value = dot(&x, &mx);
                    axpy(-value, &x, &mut mx);
                    let residual = dot(&mx, &mx).sqrt();
                    best_residual = best_residual.min(residual);
                    let _ = theta;
                    if residual <= tol * norm {
                        return Ok(EigenPair {
                            value,
                            vector: x,
                            residual,
                        });
                    }
                    if m == kmax || b <= 1e-14 * norm {
                        start = x;
                        break;
                    }
                }
            }
            if b <= 1e-14 * norm {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
    Err(Error::NoConvergence {
        residual: best_residual,
    })
}

fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    #[test]
    fn small_spectra() {
        assert_eq!(min_eigen_sym(&DMatrix::identity(4, 4)).unwrap().value, 1.0);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        assert!((min_eigen_sym(&d).unwrap().value + 1.0).abs() < 1e-15);
        let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((min_eigen_sym(&x).unwrap().value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(min_eigen_sym(&m), Err(Error::NotSymmetric { .. })));
    }

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = rng.gen::<f64>() * 2.0 - 1.0;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    #[test]
    fn lanczos_agrees_with_dense_solver() {
        for (n, seed) in [(5, 1), (40, 2), (300, 3)] {
            let m = random_symmetric(n, seed);
            let dense = min_eigen_sym(&m).unwrap();
            let lan = lowest_eigenpair(&m, 7, 1e-11).unwrap();
            assert!((dense.value - lan.value).abs() < 1e-9, "n = {n}");
            assert!(lan.residual <= 1e-11 * m.norm_bound());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn rayleigh_quotients_bound_the_minimum(seed in 0u64..10_000, n in 2usize..30) {
            let m = random_symmetric(n, seed);
            let e = min_eigen_sym(&m).unwrap();
            prop_assert!(e.residual <= 1e-10 * m.norm_bound());
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
            for _ in 0..100 {
                let x = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
                let q = x.dot(&(&m * &x)) / x.dot(&x);
                prop_assert!(e.value <= q + 1e-12);
            }
        }
    }
}
