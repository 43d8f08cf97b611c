//! The windowed interaction `W = v/(χ*χ)(·/ℓ)` and its relatives.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{probe_directions, LocalizationKernel};
use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussRule;
use crate::scattering::{sinc, ScatteringSolution};

const POLAR_NODES: usize = 16;
const AZIMUTH_NODES: usize = 32;

/// Angular product rule on the unit sphere, weights summing to 1.
fn sphere_rule() -> Vec<([f64; 3], f64)> {
    let rule = GaussRule::new(POLAR_NODES);
    let mut out = Vec::with_capacity(POLAR_NODES * AZIMUTH_NODES);
    for (c, wc) in rule.on(-1.0, 1.0) {
        let st = (1.0 - c * c).sqrt();
        for j in 0..AZIMUTH_NODES {
            let (sp, cp) = (2.0 * PI * (j as f64 + 0.5) / AZIMUTH_NODES as f64).sin_cos();
            out.push(([st * cp, st * sp, c], 0.5 * wc / AZIMUTH_NODES as f64));
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct WPoint {
    r: f64,
    /// `4π r² w`.
    weight: f64,
    g: f64,
    omega: f64,
    avg_inv: f64,
}

/// Spherically averaged windowed potentials on the scattering grid.
#[derive(Debug, Clone)]
pub struct WindowedPotential {
    kernel: Option<LocalizationKernel>,
    a: f64,
    range: f64,
    r: Vec<f64>,
    w: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    g: Vec<f64>,
    points: Vec<WPoint>,
    jumps: Vec<(f64, f64)>,
    sandwich_excess: f64,
    sphere: Vec<([f64; 3], f64)>,
}

/// Builds the window for `sol`; `RangeTooLarge` unless `R ≤ Dℓ`.
pub fn windowed_potential(
    sol: &ScatteringSolution,
    kernel: &LocalizationKernel,
) -> Result<WindowedPotential> {
    let limit = kernel.d() * kernel.ell();
    if sol.range() > limit {
        return Err(Error::RangeTooLarge {
            value: sol.range(),
            limit,
        });
    }
    WindowedPotential::build(sol, Some(kernel.clone()))
}

impl WindowedPotential {
    /// The `ℓ → ∞` limit, where `W = v`, `W₁ = g`.
    pub fn unwindowed(sol: &ScatteringSolution) -> Result<Self> {
        Self::build(sol, None)
    }

    fn build(sol: &ScatteringSolution, kernel: Option<LocalizationKernel>) -> Result<Self> {
        let sphere = sphere_rule();
        let dirs = probe_directions();
        let sphere_ref = &sphere;
        let avg_inv = |r: f64| -> f64 {
            match &kernel {
                None => 1.0,
                Some(k) => sphere_ref
                    .iter()
                    .map(|(n, w)| w / k.window([r * n[0], r * n[1], r * n[2]]))
                    .sum(),
            }
        };
        let max_inv = |r: f64| -> f64 {
            match &kernel {
                None => 1.0,
                Some(k) => dirs
                    .iter()
                    .map(|n| 1.0 / k.window([r * n[0], r * n[1], r * n[2]]))
                    .fold(1.0, f64::max),
            }
        };
        let v = sol.potential();
        let r: Vec<f64> = sol.grid().nodes().to_vec();
        let omega = sol.omega_on_grid();
        let g = sol.g_on_grid().to_vec();
        let mut w = Vec::with_capacity(r.len());
        let mut w1 = Vec::with_capacity(r.len());
        let mut w2 = Vec::with_capacity(r.len());
        let mut excess: f64 = 0.0;
        for (i, &x) in r.iter().enumerate() {
            let ai = avg_inv(x);
            w.push(v.eval(x) * ai);
            w1.push(g[i] * ai);
            w2.push(g[i] * ai * (1.0 + omega[i]));
            if x <= sol.range() && v.eval(x) > 0.0 {
                excess = excess.max(max_inv(x) - 1.0);
            }
        }
        let points: Vec<WPoint> = sol
            .points()
            .par_iter()
            .map(|p| WPoint {
                r: p.r,
                weight: 4.0 * PI * p.r * p.r * p.w,
                g: p.g,
                omega: p.omega,
                avg_inv: avg_inv(p.r),
            })
            .collect();
        // dense interior extremum of the excess
        for p in &points {
            if p.g > 0.0 {
                excess = excess.max(max_inv(p.r) - 1.0);
            }
        }
        let jumps = v
            .jumps()
            .into_iter()
            .map(|(b, dv)| (b, b * avg_inv(b) * sol.phi(b) * dv))
            .collect();
        Ok(WindowedPotential {
            kernel,
            a: sol.a(),
            range: sol.range(),
            r,
            w,
            w1,
            w2,
            g,
            points,
            jumps,
            sandwich_excess: excess,
            sphere,
        })
    }

    pub fn is_windowed(&self) -> bool {
        self.kernel.is_some()
    }

    pub fn kernel(&self) -> Option<&LocalizationKernel> {
        self.kernel.as_ref()
    }

    pub fn ell(&self) -> f64 {
        self.kernel.as_ref().map_or(f64::INFINITY, |k| k.ell())
    }

    pub fn d(&self) -> Option<f64> {
        self.kernel.as_ref().map(|k| k.d())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// `R/ℓ`.
    pub fn range_ratio(&self) -> f64 {
        self.range / self.ell()
    }

    pub fn grid(&self) -> &[f64] {
        &self.r
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn w1(&self) -> &[f64] {
        &self.w1
    }

    pub fn w2(&self) -> &[f64] {
        &self.w2
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Spherical mean of `1/(χ*χ)(x/ℓ)` over `|x| = r`.
    pub fn avg_inv(&self, r: f64) -> f64 {
        match &self.kernel {
            None => 1.0,
            Some(k) => self
                .sphere
                .iter()
                .map(|(n, w)| w / k.window([r * n[0], r * n[1], r * n[2]]))
                .sum(),
        }
    }

    /// `max (W₁/g − 1)` over the support and all probe directions.
    pub fn sandwich_excess(&self) -> f64 {
        self.sandwich_excess
    }

    /// Sandwich constant `max(W₁/g − 1)/(R/ℓ)²`.
    pub fn sandwich_constant(&self) -> f64 {
        let t = self.range_ratio();
        if t == 0.0 {
            0.0
        } else {
            self.sandwich_excess / (t * t)
        }
    }

    /// `∫ W₁` over ℝ³.
    pub fn w1_integral(&self) -> f64 {
        self.points.iter().map(|p| p.weight * p.g * p.avg_inv).sum()
    }

    /// `∫ W₁ ω` over ℝ³.
    pub fn w1_omega_integral(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.weight * p.g * p.avg_inv * p.omega)
            .sum()
    }

    /// `Ŵ₁(k)` of the spherically averaged profile.
    pub fn w1_hat(&self, k: f64) -> f64 {
        self.points
            .iter()
            .map(|p| p.weight * p.g * p.avg_inv * sinc(k * p.r))
            .sum()
    }

    /// Jump sizes `bΔ(W₁)(b)` driving the `k^{-2}` decay of `Ŵ₁`.
    pub fn jump_amplitudes(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// `∫_K^∞ Ŵ₁(k)² dk` from the jump asymptotics `Ŵ₁ ~ 4π Σ J cos(kb)/k²`.
    pub fn w1_hat_sq_tail(&self, k_cut: f64) -> f64 {
        let s: f64 = self.jumps.iter().map(|(_, j)| j * j).sum();
        16.0 * PI * PI * s / (6.0 * k_cut.powi(3))
    }

    /// Position-space radial profile `W̄₁(r)` at the quadrature points.
    pub fn w1_points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.points.iter().map(|p| (p.r, p.weight, p.g * p.avg_inv))
    }

    /// `max_x χ(x/ℓ) ∫ W₁(x−y) χ(y/ℓ) dy` with the anisotropic `W₁`.
    pub fn row_integral(&self, samples: usize) -> Result<RowIntegral> {
        let kernel = self.kernel.as_ref().ok_or_else(|| {
            Error::InvalidArgument("row integral needs a finite box scale".into())
        })?;
        let ell = kernel.ell();
        let sphere = &self.sphere;
        let mut xs: Vec<[f64; 3]> = Vec::new();
        let r3 = (1.0f64 / 3.0).sqrt();
        for i in 0..samples.max(1) {
            let t = 0.5 * ell * i as f64 / samples.max(1) as f64;
            xs.push([t, 0.0, 0.0]);
            xs.push([t * r3, t * r3, t * r3]);
        }
        let values: Vec<f64> = xs
            .par_iter()
            .map(|x| {
                let cx = kernel.chi([x[0] / ell, x[1] / ell, x[2] / ell]);
                if cx == 0.0 {
                    return 0.0;
                }
                let mut acc = 0.0;
                for p in &self.points {
                    if p.g == 0.0 {
                        continue;
                    }
                    let mut shell = 0.0;
                    for (n, w) in sphere {
                        let z = [p.r * n[0], p.r * n[1], p.r * n[2]];
                        let y = [(x[0] - z[0]) / ell, (x[1] - z[1]) / ell, (x[2] - z[2]) / ell];
                        shell += w * kernel.chi(y) / kernel.window(z);
                    }
                    acc += p.weight * p.g * shell;
                }
                cx * acc
            })
            .collect();
        let max = values.iter().copied().fold(0.0, f64::max);
        Ok(RowIntegral {
            max,
            fitted_c: max / self.a,
            reference: kernel.chi_sup().powi(2) * 8.0 * PI,
        })
    }
}

/// Row-sum bound of the localised interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowIntegral {
    pub max: f64,
    /// `max / a`.
    pub fitted_c: f64,
    /// `‖χ‖²_∞ 8π`.
    pub reference: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::KernelConfig;
    use crate::numerics::Tolerance;
    use crate::potential::RadialPotential;
    use crate::scattering::{default_grid, scattering_solution};

    fn solution() -> ScatteringSolution {
        let v = RadialPotential::square_well(8.0, 1.0).unwrap();
        scattering_solution(&v, &default_grid(&v).unwrap(), &Tolerance::default()).unwrap()
    }

    fn kernel(ell: f64) -> LocalizationKernel {
        LocalizationKernel::new(ell, &KernelConfig::default()).unwrap()
    }

    #[test]
    fn unwindowed_matches_g() {
        let sol = solution();
        let wp = WindowedPotential::unwindowed(&sol).unwrap();
        assert_eq!(wp.w1(), sol.g_on_grid());
        assert_eq!(wp.sandwich_excess(), 0.0);
        assert!((wp.w1_integral() - 8.0 * PI * sol.a()).abs() < 1e-9);
        for k in [0.0, 0.5, 3.0, 20.0] {
            assert!((wp.w1_hat(k) - sol.g_hat(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn relations_between_profiles() {
        let sol = solution();
        let wp = windowed_potential(&sol, &kernel(50.0)).unwrap();
        let om = sol.omega_on_grid();
        for i in 0..wp.grid().len() {
            let (w, w1, w2) = (wp.w()[i], wp.w1()[i], wp.w2()[i]);
            assert!((w1 - w * (1.0 - om[i])).abs() <= 1e-13 * w.abs());
            assert!((w2 - w * (1.0 - om[i] * om[i])).abs() <= 1e-13 * w.abs());
            assert!(w1 >= wp.g()[i]);
        }
        assert!(wp.w1_hat(0.0) > wp.w1_hat(1.0).abs());
    }

    #[test]
    fn sandwich_scales_quadratically() {
        let sol = solution();
        let e1 = windowed_potential(&sol, &kernel(100.0)).unwrap();
        let e2 = windowed_potential(&sol, &kernel(200.0)).unwrap();
        let (x1, x2) = (e1.sandwich_excess(), e2.sandwich_excess());
        assert!(x1 > 0.0 && x1 < e1.sandwich_constant() * 1e-4 * (1.0 + 1e-12));
        let exponent = (x1 / x2).log2();
        assert!((exponent - 2.0).abs() < 0.2, "{exponent}");
        assert!((e1.sandwich_constant() / e2.sandwich_constant() - 1.0).abs() < 0.05);
    }

    #[test]
    fn range_must_fit_in_box() {
        let sol = solution();
        assert!(matches!(
            windowed_potential(&sol, &kernel(2.0)),
            Err(Error::RangeTooLarge { .. })
        ));
    }

    #[test]
    fn row_integral_near_reference() {
        let sol = solution();
        let wp = windowed_potential(&sol, &kernel(50.0)).unwrap();
        let row = wp.row_integral(16).unwrap();
        assert!(row.fitted_c <= row.reference * 1.01, "{row:?}");
        assert!(row.fitted_c >= row.reference * 0.95, "{row:?}");
    }
}
