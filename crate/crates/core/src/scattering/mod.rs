//! Scattering lengths by two independent routes, the scattering solution
//! `ω`, `g = v(1 − ω)` and their radial Fourier transforms.

mod solution;

pub use solution::{Profile, QuadPoint, ScatteringSolution};
pub(crate) use solution::sinc;

use crate::error::{Error, Result};
use crate::numerics::{self, RadialGrid, Tolerance, VariationalResult};
use crate::potential::RadialPotential;

/// Mesh tolerance used by [`scattering_length_variational`].
pub const MESH_TOLERANCE: f64 = 1e-3;

/// `a = R − u(R)/u'(R)` from the zero-energy ODE; handles hard cores.
pub fn scattering_length_ode(v: &RadialPotential, tol: &Tolerance) -> Result<f64> {
    Ok(numerics::solve_radial_ode(v, None, tol)?.a)
}

/// `a` from the variational minimum on `|x| ≤ r_tilde`, using a
/// piecewise-linear mesh with about `elements` elements across the range.
pub fn scattering_length_variational(
    v: &RadialPotential,
    r_tilde: f64,
    elements: usize,
) -> Result<VariationalResult> {
    numerics::scattering_length_variational(v, r_tilde, elements, MESH_TOLERANCE)
}

/// Scattering solution sampled on `grid` (which should extend past the range).
pub fn scattering_solution(
    v: &RadialPotential,
    grid: &RadialGrid,
    tol: &Tolerance,
) -> Result<ScatteringSolution> {
    ScatteringSolution::new(v, grid, tol)
}

/// Default sampling grid: 200 cells on `[0, 2R]`.
pub fn default_grid(v: &RadialPotential) -> Result<RadialGrid> {
    let r = if v.range() > 0.0 { v.range() } else { 1.0 };
    RadialGrid::uniform(0.0, 2.0 * r, 200)
}

/// `32` logarithmically spaced wavenumbers in `[1e-2/R, 1e2/R]`.
pub fn identity_k_grid(range: f64) -> Vec<f64> {
    (0..32)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 31.0) / range)
        .collect()
}

/// Scattering lengths of `min(v, n)` for increasing levels `n`.
pub fn truncation_limit(v: &RadialPotential, levels: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "truncation levels must be strictly increasing".into(),
        ));
    }
    levels
        .iter()
        .map(|&n| scattering_length_ode(&v.truncate(n)?, tol))
        .collect()
}

/// The three lengths entering `max{a(v≤), a(v>)} ≤ a(v) ≤ a(v≤) + a(v>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Additivity {
    pub a: f64,
    pub a_inner: f64,
    pub a_outer: f64,
    pub holds: bool,
}

pub fn additivity_check(v: &RadialPotential, r_split: f64, tol: &Tolerance) -> Result<Additivity> {
    let (inner, outer) = v.split_range(r_split)?;
    let a = scattering_length_ode(v, tol)?;
    let a_inner = scattering_length_ode(&inner, tol)?;
    let a_outer = scattering_length_ode(&outer, tol)?;
    let slack = 10.0 * tol.rel * v.range().max(f64::MIN_POSITIVE) + tol.abs;
    let holds = a_inner.max(a_outer) <= a + slack && a <= a_inner + a_outer + slack;
    Ok(Additivity {
        a,
        a_inner,
        a_outer,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn well(v0: f64, r: f64) -> RadialPotential {
        RadialPotential::square_well(v0, r).unwrap()
    }

    fn closed_form(v0: f64, r: f64) -> f64 {
        let k = (0.5 * v0).sqrt();
        r * (1.0 - (k * r).tanh() / (k * r))
    }

    #[test]
    fn lengths_of_simple_potentials() {
        assert_eq!(scattering_length_ode(&RadialPotential::zero(), &tol()).unwrap(), 0.0);
        assert_eq!(
            scattering_length_ode(&RadialPotential::hard_core(1.0).unwrap(), &tol()).unwrap(),
            1.0
        );
        let a = scattering_length_ode(&well(8.0, 1.0), &tol()).unwrap();
        assert!((a - (1.0 - 2f64.tanh() / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn variational_matches_ode() {
        let v = well(8.0, 1.0);
        let r = scattering_length_variational(&v, 2.0, 400).unwrap();
        assert!((r.a - closed_form(8.0, 1.0)).abs() < 1e-6);
        let h = RadialPotential::hard_core(1.0).unwrap();
        for rt in [2.0, 4.0] {
            assert!((scattering_length_variational(&h, rt, 10).unwrap().a - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn solution_of_square_well() {
        let v = well(8.0, 1.0);
        let s = scattering_solution(&v, &default_grid(&v).unwrap(), &tol()).unwrap();
        let a = closed_form(8.0, 1.0);
        assert!((s.omega(2.0) - a / 2.0).abs() < 1e-10);
        assert!((s.g_integral() / (8.0 * PI) - a).abs() < 1e-6 * a);
        assert!((s.g_hat(0.0) - 8.0 * PI * a).abs() < 1e-6 * 8.0 * PI * a);
        assert!(s.g_omega_integral() > 0.0 && s.g_omega_integral() <= s.g_integral());
        // interior: ω = 1 − sinh(2r)/(2r cosh 2)
        for r in [0.0, 1e-9, 0.013, 0.3, 0.77, 0.999] {
            let phi = if r == 0.0 { 1.0 / 2f64.cosh() } else { (2.0f64 * r).sinh() / (2.0 * r * 2f64.cosh()) };
            assert!((s.omega(r) - (1.0 - phi)).abs() < 1e-9, "r = {r}");
        }
    }

    #[test]
    fn free_solution_vanishes() {
        let v = RadialPotential::zero();
        let s = scattering_solution(&v, &default_grid(&v).unwrap(), &tol()).unwrap();
        assert!(s.omega_on_grid().iter().all(|&w| w == 0.0));
        assert!(s.g_on_grid().iter().all(|&g| g == 0.0));
        assert_eq!(s.g_hat(1.0), 0.0);
    }

    #[test]
    fn hard_core_profiles_are_refused() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        assert!(matches!(
            scattering_solution(&v, &default_grid(&v).unwrap(), &tol()),
            Err(Error::HardCoreUnsupported)
        ));
    }

    #[test]
    fn fourier_identity() {
        let v = well(8.0, 1.0);
        let s = scattering_solution(&v, &default_grid(&v).unwrap(), &tol()).unwrap();
        let g0 = s.g_hat(0.0);
        for k in identity_k_grid(1.0).into_iter().chain([3.0]) {
            let lhs = 2.0 * k * k * s.omega_hat(k);
            assert!((lhs - s.g_hat(k)).abs() < 1e-6 * g0, "k = {k}");
            assert!(s.g_hat(k).abs() <= g0);
        }
    }

    #[test]
    fn truncation_sequence() {
        let h = RadialPotential::hard_core(1.0).unwrap();
        let seq = truncation_limit(&h, &[8.0, 128.0], &tol()).unwrap();
        assert!((seq[0] - closed_form(8.0, 1.0)).abs() < 1e-9);
        assert!((seq[1] - closed_form(128.0, 1.0)).abs() < 1e-9);
        let big = truncation_limit(&h, &[2e6], &tol()).unwrap();
        assert!((1.0 - big[0]) <= 1e-3 + 1e-12);
        let w = truncation_limit(&well(8.0, 1.0), &[8.0, 100.0], &tol()).unwrap();
        assert!((w[0] - w[1]).abs() < 1e-14);
    }

    #[test]
    fn additivity_examples() {
        let v = RadialPotential::piecewise_constant(vec![0.0, 1.0, 2.0], vec![8.0, 2.0]).unwrap();
        let r = additivity_check(&v, 1.0, &tol()).unwrap();
        assert!(r.holds);
        let r = additivity_check(&v, 2.0, &tol()).unwrap();
        assert_eq!(r.a_outer, 0.0);
        assert!((r.a - r.a_inner).abs() < 1e-14);
        let r = additivity_check(&v, 0.0, &tol()).unwrap();
        assert_eq!(r.a_inner, 0.0);
        assert!((r.a - r.a_outer).abs() < 1e-14);
    }

    fn arb_potential() -> impl Strategy<Value = RadialPotential> {
        prop::collection::vec((0.1f64..1.0, 0.5f64..30.0), 1..5).prop_map(|pieces| {
            let mut b = vec![0.0];
            let mut vals = Vec::new();
            for (w, v) in pieces {
                b.push(b.last().unwrap() + w);
                vals.push(v);
            }
            RadialPotential::piecewise_constant(b, vals).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn solvers_agree(v in arb_potential()) {
            let a = scattering_length_ode(&v, &tol()).unwrap();
            let b = scattering_length_variational(&v, 2.0 * v.range(), 800).unwrap().a;
            prop_assert!((a - b).abs() <= 1e-6 * a.max(1e-12), "{a} vs {b}");
        }

        #[test]
        fn bounds_on_the_length(v in arb_potential()) {
            let a = scattering_length_ode(&v, &tol()).unwrap();
            prop_assert!(a >= 0.0 && a <= v.range() + 1e-12);
            prop_assert!(a <= v.l1_norm() / (8.0 * PI) * (1.0 + 1e-10));
        }

        #[test]
        fn monotone_in_the_potential(v in arb_potential(), n in 0.5f64..20.0) {
            let t = v.truncate(n).unwrap();
            let a = scattering_length_ode(&v, &tol()).unwrap();
            let b = scattering_length_ode(&t, &tol()).unwrap();
            prop_assert!(b <= a + 1e-12);
            let grid = RadialGrid::uniform(0.0, 2.0 * v.range(), 64).unwrap();
            let sv = scattering_solution(&v, &grid, &tol()).unwrap();
            let st = scattering_solution(&t, &grid, &tol()).unwrap();
            for (x, y) in sv.omega_on_grid().iter().zip(st.omega_on_grid()) {
                prop_assert!(*x >= *y - 1e-9);
            }
        }

        #[test]
        fn profile_invariants(v in arb_potential()) {
            let grid = RadialGrid::uniform(0.0, 3.0 * v.range(), 150).unwrap();
            let s = scattering_solution(&v, &grid, &tol()).unwrap();
            let om = s.omega_on_grid();
            prop_assert!(om.iter().all(|&w| (-1e-12..=1.0 + 1e-12).contains(&w)));
            prop_assert!(om.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            for (&r, &w) in grid.nodes().iter().zip(om) {
                if r >= v.range() {
                    prop_assert!((w * r - s.a()).abs() <= 1e-8 * s.a());
                }
            }
            prop_assert!((s.g_integral() / (8.0 * PI) - s.a()).abs() <= 1e-6 * s.a().max(1e-12));
        }
    }
}
