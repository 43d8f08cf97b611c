//! The two-mode quadratic Hamiltonian: scalar lower bound and a truncated
//! Fock-space diagonalisation.

use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{lowest_eigenpair, SymmetricOperator};

fn check_coefficients(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() && b.is_finite() && -a < b && b <= a {
        Ok(())
    } else {
        Err(Error::InvalidCoefficients { a, b })
    }
}

/// `−½(A − √(A²−B²))·commutators − 2|κ|²/(A+B)`.
pub fn bog_bound(a: f64, b: f64, kappa: Complex<f64>, commutator_sum: f64) -> Result<f64> {
    check_coefficients(a, b)?;
    let root = (a * a - b * b).max(0.0).sqrt();
    // A − √(A²−B²) = B²/(A + √(A²−B²))
    let gap = b * b / (a + root);
    Ok(-0.5 * gap * commutator_sum - 2.0 * kappa.norm_sqr() / (a + b))
}

/// Exact ground energy of the untruncated two-mode problem.
pub fn two_mode_ground_energy(a: f64, b: f64, kappa: Complex<f64>) -> Result<f64> {
    bog_bound(a, b, kappa, 2.0)
}

/// Parameters of [`fock_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOracleSpec {
    pub a: f64,
    pub b: f64,
    pub kappa: Complex<f64>,
    pub n_max: usize,
}

/// Ground energy at `n_max` and at `2 n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockOracle {
    pub value: f64,
    pub doubled: f64,
    pub n_max: usize,
}

/// Truncated Hamiltonian after the phase rotation `b± → e^{±i arg κ} b±`,
/// which makes every matrix element real.
#[derive(Debug, Clone)]
pub struct TwoModeHamiltonian {
    a: f64,
    b: f64,
    kappa: f64,
    n_max: usize,
}

impl TwoModeHamiltonian {
    pub fn new(a: f64, b: f64, kappa: Complex<f64>, n_max: usize) -> Self {
        TwoModeHamiltonian {
            a,
            b,
            kappa: kappa.norm(),
            n_max,
        }
    }

    fn index(&self, np: usize, nm: usize) -> usize {
        np * (self.n_max + 1) + nm
    }

    /// Dense form, for cross-checks on small truncations.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let mut y = vec![0.0; n];
            self.apply(&e, &mut y);
            for i in 0..n {
                m[(i, j)] = y[i];
            }
        }
        m
    }
}

impl SymmetricOperator for TwoModeHamiltonian {
    fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n_max;
        for np in 0..=n {
            for nm in 0..=n {
                let i = self.index(np, nm);
                let mut acc = self.a * (np + nm) as f64 * x[i];
                if np < n && nm < n {
                    acc += self.b * (((np + 1) * (nm + 1)) as f64).sqrt() * x[self.index(np + 1, nm + 1)];
                }
                if np > 0 && nm > 0 {
                    acc += self.b * ((np * nm) as f64).sqrt() * x[self.index(np - 1, nm - 1)];
                }
                if np < n {
                    acc += self.kappa * ((np + 1) as f64).sqrt() * x[self.index(np + 1, nm)];
                }
                if np > 0 {
                    acc += self.kappa * (np as f64).sqrt() * x[self.index(np - 1, nm)];
                }
                if nm < n {
                    acc += self.kappa * ((nm + 1) as f64).sqrt() * x[self.index(np, nm + 1)];
                }
                if nm > 0 {
                    acc += self.kappa * (nm as f64).sqrt() * x[self.index(np, nm - 1)];
                }
                y[i] = acc;
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        let n = self.n_max as f64;
        2.0 * self.a * n + 2.0 * self.b.abs() * n + 4.0 * self.kappa * (n + 1.0).sqrt()
    }
}

const LANCZOS_TOL: f64 = 1e-13;

fn ground_energy(a: f64, b: f64, kappa: Complex<f64>, n_max: usize) -> Result<f64> {
    let h = TwoModeHamiltonian::new(a, b, kappa, n_max);
    Ok(lowest_eigenpair(&h, 0x5eed ^ n_max as u64, LANCZOS_TOL)?.value)
}

/// Lowest eigenvalue of the two-mode Hamiltonian on `{n₊, n₋ ≤ n_max}`.
pub fn fock_oracle(spec: &FockOracleSpec) -> Result<FockOracle> {
    check_coefficients(spec.a, spec.b)?;
    if spec.n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be at least 2, got {}",
            spec.n_max
        )));
    }
    let value = ground_energy(spec.a, spec.b, spec.kappa, spec.n_max)?;
    let doubled = ground_energy(spec.a, spec.b, spec.kappa, 2 * spec.n_max)?;
    let shift = (value - doubled).abs();
    if shift >= 1e-8 * (1.0 + value.abs()) {
        return Err(Error::TruncationNotConverged {
            n_max: spec.n_max,
            doubled: 2 * spec.n_max,
            shift,
        });
    }
    Ok(FockOracle {
        value,
        doubled,
        n_max: spec.n_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::min_eigen_sym;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn spec(a: f64, b: f64, kappa: Complex<f64>, n_max: usize) -> FockOracleSpec {
        FockOracleSpec { a, b, kappa, n_max }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bog_bound(1.0, 0.0, c(0.0, 0.0), 2.0).unwrap(), 0.0);
        let v = bog_bound(2.0, 1.0, c(0.0, 0.0), 2.0).unwrap();
        assert!((v - (3f64.sqrt() - 2.0)).abs() < 1e-15);
        assert_eq!(bog_bound(1.0, 0.0, c(1.0, 0.0), 2.0).unwrap(), -2.0);
        assert!(matches!(bog_bound(1.0, 1.5, c(0.0, 0.0), 2.0), Err(Error::InvalidCoefficients { .. })));
        assert!(bog_bound(1.0, -1.0, c(0.0, 0.0), 2.0).is_err());
        assert!(bog_bound(0.0, 0.0, c(0.0, 0.0), 2.0).is_err());
        assert!(bog_bound(1.0, 1.0, c(0.0, 0.0), 2.0).is_ok());
    }

    #[test]
    fn oracle_examples() {
        let v = fock_oracle(&spec(1.0, 0.0, c(0.0, 0.0), 10)).unwrap().value;
        assert!(v.abs() < 1e-12);
        let v = fock_oracle(&spec(2.0, 1.0, c(0.0, 0.0), 40)).unwrap().value;
        assert!((v + 2.0 - 3f64.sqrt()).abs() < 1e-6);
        let v = fock_oracle(&spec(1.0, 0.0, c(1.0, 0.0), 40)).unwrap().value;
        assert!((v + 2.0).abs() < 1e-6);
        let v = fock_oracle(&spec(1.0, 0.0, c(0.0, 1.0), 40)).unwrap().value;
        assert!((v + 2.0).abs() < 1e-6);
    }

    #[test]
    fn truncation_failure_is_reported() {
        assert!(matches!(
            fock_oracle(&spec(1.0, 0.0, c(3.0, 0.0), 4)),
            Err(Error::TruncationNotConverged { .. })
        ));
        assert!(fock_oracle(&spec(1.0, 0.0, c(0.0, 0.0), 1)).is_err());
    }

    /// The complex Hamiltonian written as a real symmetric matrix of twice the size.
    fn complex_doubled(a: f64, b: f64, kappa: Complex<f64>, n: usize) -> DMatrix<f64> {
        let d = (n + 1) * (n + 1);
        let idx = |p: usize, m: usize| p * (n + 1) + m;
        let mut h = DMatrix::<Complex<f64>>::zeros(d, d);
        for p in 0..=n {
            for m in 0..=n {
                let i = idx(p, m);
                h[(i, i)] += c(a * (p + m) as f64, 0.0);
                if p < n && m < n {
                    let x = (((p + 1) * (m + 1)) as f64).sqrt() * b;
                    h[(idx(p + 1, m + 1), i)] += c(x, 0.0);
                    h[(i, idx(p + 1, m + 1))] += c(x, 0.0);
                }
                if p < n {
                    // κ b₊* and its adjoint
                    let x = ((p + 1) as f64).sqrt();
                    h[(idx(p + 1, m), i)] += kappa * x;
                    h[(i, idx(p + 1, m))] += kappa.conj() * x;
                }
                if m < n {
                    // κ b₋ and its adjoint
                    let x = ((m + 1) as f64).sqrt();
                    h[(i, idx(p, m + 1))] += kappa * x;
                    h[(idx(p, m + 1), i)] += kappa.conj() * x;
                }
            }
        }
        let mut r = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let z = h[(i, j)];
                r[(i, j)] = z.re;
                r[(i + d, j + d)] = z.re;
                r[(i, j + d)] = -z.im;
                r[(i + d, j)] = z.im;
            }
        }
        r
    }

    #[test]
    fn phase_rotation_preserves_the_spectrum() {
        for (a, b, k) in [(1.0, 0.3, c(0.2, 0.25)), (2.0, -0.5, c(-0.4, 0.1)), (1.5, 1.2, c(0.0, -0.3))] {
            let n = 6;
            let dense = min_eigen_sym(&complex_doubled(a, b, k, n)).unwrap().value;
            let real = min_eigen_sym(&TwoModeHamiltonian::new(a, b, k, n).to_dense()).unwrap().value;
            let lan = ground_energy(a, b, k, n).unwrap();
            assert!((dense - real).abs() < 1e-11, "{dense} {real}");
            assert!((lan - real).abs() < 1e-11);
        }
    }

    #[test]
    fn sharp_at_zero_kappa_with_geometric_decay() {
        let gaps = |a: f64, b: f64| -> Vec<f64> {
            let exact = (a * a - b * b).sqrt() - a;
            [10, 20, 40]
                .iter()
                .map(|&n| ground_energy(a, b, c(0.0, 0.0), n).unwrap() - exact)
                .collect()
        };
        let g = gaps(1.0, 0.5);
        assert!(g.iter().all(|&x| x > -1e-13 && x < 1e-10), "{g:?}");
        // a slower case where the decay is visible above rounding
        let g = gaps(1.0, 0.95);
        assert!(g[0] > g[1] && g[1] > g[2] && g[2] > 0.0, "{g:?}");
        // decay per unit of n_max on [10, 20] versus [20, 40]
        let rate = 2.0 * (g[0] / g[1]).ln() / (g[1] / g[2]).ln();
        assert!((0.6..1.6).contains(&rate), "{g:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn oracle_dominates_bound(
            a in 0.2f64..3.0,
            ratio in -0.9f64..0.9,
            kr in -1.0f64..1.0,
            ki in -1.0f64..1.0,
        ) {
            let b = ratio * a;
            let scale = 0.25 * (a + b) / (kr * kr + ki * ki).sqrt().max(1.0);
            let kappa = c(kr * scale, ki * scale);
            let bound = bog_bound(a, b, kappa, 2.0).unwrap();
            let oracle = ground_energy(a, b, kappa, 30).unwrap();
            prop_assert!(oracle >= bound - 1e-6 * bound.abs().max(1e-12));
        }

        #[test]
        fn oracle_monotone_in_truncation(a in 0.5f64..2.0, ratio in 0.0f64..0.5) {
            let b = ratio * a;
            let e10 = ground_energy(a, b, c(0.1, 0.0), 10).unwrap();
            let e20 = ground_energy(a, b, c(0.1, 0.0), 20).unwrap();
            prop_assert!(e20 <= e10 + 1e-12);
        }
    }
}
