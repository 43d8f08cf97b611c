//! Box localisation: the bump `χ`, the window `W = v/χ*χ(·/ℓ)`, and the
//! kinetic multipliers.

mod multiplier;
mod profile;
mod window;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use multiplier::{
    fibonacci_sphere, gap_search, quav_beta_search, theta_hat, BallRule, FTerms, FsReport,
    GapConstant, KineticMultiplier, PGrid, BALL_NODE_BUDGET,
};
pub use profile::BumpProfile;
pub use window::{windowed_potential, RowIntegral, WindowedPotential};

use crate::error::{Error, Result};

/// Default gap parameter.
pub const DEFAULT_S: f64 = 0.05;
/// Default box-size constant `K` in `ℓ = K(ρ_μ a)^{-1/2}`.
pub const DEFAULT_K: f64 = 0.1;
/// Gap constant from [`gap_search`] at `s = 0.025` (multiplier at `0.05`)
/// with safety factor ½, rounded down.
pub const DEFAULT_B: f64 = 0.43;

/// Tunable constants; `None` entries take their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub s: f64,
    /// Defaults to `¼ s^{-2}`.
    pub c_kin: Option<f64>,
    pub b: f64,
    pub k: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            s: DEFAULT_S,
            c_kin: None,
            b: DEFAULT_B,
            k: DEFAULT_K,
        }
    }
}

impl KernelConfig {
    pub fn c_kin(&self) -> f64 {
        self.c_kin.unwrap_or(0.25 / (self.s * self.s))
    }
}

/// The bump together with the box scale and its constants.
#[derive(Debug, Clone)]
pub struct LocalizationKernel {
    profile: Arc<BumpProfile>,
    ell: f64,
    s: f64,
    c_kin: f64,
    b: f64,
    k: f64,
    d: f64,
}

impl LocalizationKernel {
    pub fn new(ell: f64, config: &KernelConfig) -> Result<Self> {
        Self::with_profile(Arc::new(BumpProfile::new(8.0)), ell, config)
    }

    /// Box scale `ℓ = K(ρ_μ a)^{-1/2}`.
    pub fn from_density(rho_mu: f64, a: f64, config: &KernelConfig) -> Result<Self> {
        if !(rho_mu > 0.0 && a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box scale needs ρ_μ > 0 and a > 0 (got {rho_mu}, {a})"
            )));
        }
        Self::new(config.k / (rho_mu * a).sqrt(), config)
    }

    pub fn with_profile(profile: Arc<BumpProfile>, ell: f64, config: &KernelConfig) -> Result<Self> {
        let c_kin = config.c_kin();
        let check = |name: &str, x: f64, strict: bool| {
            let ok = x.is_finite() && if strict { x > 0.0 } else { x >= 0.0 };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
            }
        };
        check("ell", ell, true)?;
        check("s", config.s, true)?;
        check("C_kin", c_kin, false)?;
        check("b", config.b, true)?;
        check("K", config.k, true)?;
        let d = half_crossing(&profile);
        Ok(LocalizationKernel {
            profile,
            ell,
            s: config.s,
            c_kin,
            b: config.b,
            k: config.k,
            d,
        })
    }

    pub fn profile(&self) -> &Arc<BumpProfile> {
        &self.profile
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn c_kin(&self) -> f64 {
        self.c_kin
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Largest `D` with `χ*χ ≥ ½` on the ball of radius `D` (unit box).
    pub fn d(&self) -> f64 {
        self.d
    }

    /// `χ(y) = ∏ χ₁(yᵢ)` on the unit box.
    pub fn chi(&self, y: [f64; 3]) -> f64 {
        y.iter().map(|&t| self.profile.chi(t)).product()
    }

    /// `sup χ`.
    pub fn chi_sup(&self) -> f64 {
        self.profile.sup().powi(3)
    }

    /// `(χ*χ)(y)` in box units.
    pub fn chi_conv_chi(&self, y: [f64; 3]) -> f64 {
        y.iter().map(|&t| self.profile.correlation(t)).product()
    }

    /// `(χ*χ)(x/ℓ)` in physical units.
    pub fn window(&self, x: [f64; 3]) -> f64 {
        self.chi_conv_chi([x[0] / self.ell, x[1] / self.ell, x[2] / self.ell])
    }
}

/// Direction set used for angular extrema.
pub(crate) fn probe_directions() -> Vec<[f64; 3]> {
    let r2 = 0.5f64.sqrt();
    let r3 = (1.0f64 / 3.0).sqrt();
    let mut d = vec![[1.0, 0.0, 0.0], [r2, r2, 0.0], [r3, r3, r3]];
    d.extend(fibonacci_sphere(256));
    d
}

fn half_crossing(profile: &BumpProfile) -> f64 {
    probe_directions()
        .iter()
        .map(|n| {
            let f = |r: f64| n.iter().map(|&c| profile.correlation(r * c)).product::<f64>();
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid) >= 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kernel() -> LocalizationKernel {
        LocalizationKernel::new(1.0, &KernelConfig::default()).unwrap()
    }

    #[test]
    fn convolution_values() {
        let k = kernel();
        assert!((k.chi_conv_chi([0.0; 3]) - 1.0).abs() < 1e-14);
        assert_eq!(k.chi_conv_chi([1.0, 0.0, 0.0]), 0.0);
        assert_eq!(k.chi_conv_chi([0.2, -1.3, 0.0]), 0.0);
        let d = k.d();
        assert!(d > 0.3 && d < 0.4, "{d}");
        assert!(k.chi_conv_chi([d, 0.0, 0.0]) >= 0.5);
        let r3 = (1.0f64 / 3.0).sqrt() * d;
        assert!(k.chi_conv_chi([r3, r3, r3]) >= 0.5 - 1e-12);
    }

    #[test]
    fn window_scales_with_ell() {
        let mut k = kernel();
        let base = k.chi_conv_chi([0.1, 0.05, 0.0]);
        k.ell = 10.0;
        assert_eq!(k.window([1.0, 0.5, 0.0]), base);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(LocalizationKernel::new(0.0, &KernelConfig::default()).is_err());
        let c = KernelConfig { s: -1.0, ..KernelConfig::default() };
        assert!(LocalizationKernel::new(1.0, &c).is_err());
        let c = KernelConfig { c_kin: Some(0.0), ..KernelConfig::default() };
        assert_eq!(LocalizationKernel::new(1.0, &c).unwrap().c_kin(), 0.0);
        assert!((kernel().c_kin() - 100.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn chi_is_even_and_supported(x in -0.7f64..0.7, y in -0.7f64..0.7, z in -0.7f64..0.7) {
            let k = kernel();
            let v = k.chi([x, y, z]);
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v, k.chi([-x, y, -z]));
            if x.abs() >= 0.5 || y.abs() >= 0.5 || z.abs() >= 0.5 {
                prop_assert_eq!(v, 0.0);
            }
            prop_assert!(v <= k.chi_sup() * (1.0 + 1e-15));
            let c = k.chi_conv_chi([x, y, z]);
            prop_assert!((0.0..=1.0 + 1e-14).contains(&c));
        }
    }
}
