//! The Lee–Huang–Yang integral.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{integrate_finite, integrate_to_infinity, integrate_with_breaks, Tolerance};
use crate::scattering::ScatteringSolution;

/// `(√(t⁴+2t²) − t² − 1 + 1/(2t²)) t² = (s+3)/(t²(1+s)³)`, `s = √(t²+2)/t`.
pub fn lhy_integrand(t: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let s = (t * t + 2.0).sqrt() / t;
    (s + 3.0) / (t * t * (1.0 + s).powi(3))
}

/// `J` by two independent mappings of `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LhyIntegral {
    /// `t = x/(1−x)`.
    pub mapped: f64,
    /// `[0,1]` plus `t = 1/y` on the rest.
    pub split: f64,
    pub error: f64,
}

impl LhyIntegral {
    pub fn value(&self) -> f64 {
        self.mapped
    }
}

pub fn lhy_integral(tol: &Tolerance) -> Result<LhyIntegral> {
    let mapped = integrate_to_infinity(lhy_integrand, 0.0, 1.0, tol)?;
    let inner = integrate_finite(lhy_integrand, 0.0, 1.0, tol)?;
    let outer = integrate_finite(
        |y| {
            if y == 0.0 {
                // t⁻² tail: (s+3)/(t²(1+s)³) · t² → ½
                0.5
            } else {
                lhy_integrand(1.0 / y) / (y * y)
            }
        },
        0.0,
        1.0,
        tol,
    )?;
    let split = inner.value + outer.value;
    let discrepancy = (mapped.value - split).abs();
    if discrepancy > 1e3 * tol.rel.max(1e-14) * mapped.value.abs() + tol.abs {
        return Err(Error::NonConvergent {
            value: mapped.value,
            error: discrepancy,
            refinements: tol.max_refinements,
        });
    }
    Ok(LhyIntegral {
        mapped: mapped.value,
        split,
        error: discrepancy.max(mapped.error),
    })
}

/// `(8π)^{5/2} J/(16π³)`, the coefficient of `4πρ²a√(ρa³)`.
pub fn lhy_coefficient(tol: &Tolerance) -> Result<f64> {
    let j = lhy_integral(tol)?.value();
    Ok((8.0 * PI).powf(2.5) * j / (16.0 * PI.powi(3)))
}

/// `4πρ²a · 128/(15√π) · √(ρa³)`.
pub fn lhy_energy_density(rho: f64, a: f64) -> f64 {
    4.0 * PI * rho * rho * a * 128.0 / (15.0 * PI.sqrt()) * (rho * a.powi(3)).sqrt()
}

/// Bogoliubov correction density `½(2π)^{-3}∫(√(k⁴+2k²ρĝ) − k² − ρĝ + (ρĝ)²/2k²)`
/// with the momentum-dependent `ĝ(k)` of `sol`.
pub fn bogoliubov_correction_density(sol: &ScatteringSolution, rho: f64, tol: &Tolerance) -> Result<f64> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("density must be ≥ 0, got {rho}")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let c0 = rho * sol.g_hat(0.0);
    let range = sol.range();
    let f = |k: f64| -> f64 {
        let c = rho * sol.g_hat(k);
        if k == 0.0 {
            return 0.5 * c * c;
        }
        let q = 1.0 + 2.0 * c / (k * k);
        if q < 0.0 {
            return f64::NAN;
        }
        let s = q.sqrt();
        c * c * c * (s + 3.0) / (k * k * (1.0 + s).powi(3))
    };
    let mut breaks = vec![0.0];
    let mut x = c0.abs().sqrt() / 16.0;
    while x < 8.0 / range {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(8.0 / range);
    let ktol = Tolerance {
        rel: tol.rel.max(1e-12),
        abs: 0.0,
        max_refinements: tol.max_refinements.max(20_000),
    };
    let i = integrate_with_breaks(f, &breaks, Some(1.0 / range), &ktol)?;
    if !i.value.is_finite() {
        return Err(Error::InvalidArgument(
            "ρĝ(k) too negative for a real Bogoliubov dispersion".into(),
        ));
    }
    Ok(i.value / (4.0 * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::RadialPotential;
    use crate::scattering::{default_grid, scattering_solution};

    #[test]
    fn integral_and_coefficient() {
        let tol = Tolerance::relative(1e-12);
        let j = lhy_integral(&tol).unwrap();
        let exact = 8.0 * 2f64.sqrt() / 15.0;
        assert!((j.mapped - exact).abs() < 1e-8);
        assert!((j.split - exact).abs() < 1e-8);
        let coarse = lhy_integral(&Tolerance::relative(1e-9)).unwrap();
        assert!((coarse.mapped - exact).abs() < 1e-8);
        let c = lhy_coefficient(&tol).unwrap();
        assert!((c - 128.0 / (15.0 * PI.sqrt())).abs() < 1e-8);
        assert!((c - 4.814_418_6).abs() < 1e-6);
    }

    #[test]
    fn integrand_forms_agree() {
        for t in [1e-3f64, 0.1, 0.7, 1.0, 3.0, 20.0] {
            let direct = ((t.powi(4) + 2.0 * t * t).sqrt() - t * t - 1.0 + 0.5 / (t * t)) * t * t;
            assert!((lhy_integrand(t) - direct).abs() < 1e-9 * (1.0 + direct.abs()), "t = {t}");
        }
        // t^{-2} decay: the tail past 100 is a small fraction of J
        let tail = integrate_to_infinity(lhy_integrand, 100.0, 100.0, &Tolerance::relative(1e-10)).unwrap();
        assert!(tail.value < 1e-2 * 0.754 && (tail.value - 0.005).abs() < 1e-4);
    }

    #[test]
    fn point_interaction_limit() {
        // for ρa³ ≪ 1 the k-dependence of ĝ is invisible
        let v = RadialPotential::square_well(8.0, 1.0).unwrap();
        let sol = scattering_solution(&v, &default_grid(&v).unwrap(), &Tolerance::default()).unwrap();
        let a = sol.a();
        let rho = 1e-8 / a.powi(3);
        let e = bogoliubov_correction_density(&sol, rho, &Tolerance::default()).unwrap();
        let lhy = lhy_energy_density(rho, sol.g_hat(0.0) / (8.0 * PI));
        assert!((e / lhy - 1.0).abs() < 0.05, "{}", e / lhy);
    }
}
