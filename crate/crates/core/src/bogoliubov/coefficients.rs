//! `τ(k)`, `A(k)` and `B(k)` of the box Bogoliubov Hamiltonian.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::localization::WindowedPotential;

/// Coefficients for one box of side `ℓ` holding `n` particles.
#[derive(Debug, Clone)]
pub struct BogCoefficients {
    pub n: f64,
    pub rho: f64,
    pub rho_mu: f64,
    pub rho_0: f64,
    pub ell: f64,
    pub a: f64,
    pub c_kin: f64,
    window: Arc<WindowedPotential>,
}

impl BogCoefficients {
    /// `ρ = ρ₀ = n/ℓ³` with `ℓ` taken from the window.
    pub fn new(window: Arc<WindowedPotential>, n: f64, rho_mu: f64, c_kin: f64) -> Result<Self> {
        let ell = window.ell();
        if !ell.is_finite() {
            return Err(Error::InvalidArgument(
                "Bogoliubov coefficients need a finite box scale".into(),
            ));
        }
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument(format!("particle number must be ≥ 0, got {n}")));
        }
        if !(rho_mu > 0.0 && rho_mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("ρ_μ must be positive, got {rho_mu}")));
        }
        if !(c_kin >= 0.0 && c_kin.is_finite()) {
            return Err(Error::InvalidArgument(format!("C_kin must be ≥ 0, got {c_kin}")));
        }
        let rho = n / ell.powi(3);
        Ok(BogCoefficients {
            n,
            rho,
            rho_mu,
            rho_0: rho,
            ell,
            a: window.a(),
            c_kin,
            window,
        })
    }

    pub fn window(&self) -> &WindowedPotential {
        &self.window
    }

    /// `(k² − C_kin ℓ^{-2})₊`.
    pub fn tau(&self, k: f64) -> f64 {
        (k * k - self.c_kin / (self.ell * self.ell)).max(0.0)
    }

    /// `16πρa + ρ_μ a`.
    pub fn shift(&self) -> f64 {
        16.0 * PI * self.rho * self.a + self.rho_mu * self.a
    }

    /// `A(k) = (τ + 16πρa + ρ_μ a)/n`, zero for an empty box.
    pub fn a_coef(&self, k: f64) -> f64 {
        if self.n == 0.0 {
            0.0
        } else {
            (self.tau(k) + self.shift()) / self.n
        }
    }

    /// `B(k) = Ŵ₁(k)/ℓ³`.
    pub fn b_coef(&self, k: f64) -> f64 {
        self.window.w1_hat(k) / self.ell.powi(3)
    }

    /// `|B|/A`; zero for an empty box.
    pub fn ratio(&self, k: f64) -> f64 {
        if self.n == 0.0 {
            0.0
        } else {
            self.rho * self.window.w1_hat(k).abs() / (self.tau(k) + self.shift())
        }
    }

    /// `k` where the kinetic cutoff ends.
    pub fn kink(&self) -> f64 {
        self.c_kin.sqrt() / self.ell
    }

    /// `Tℓ^{-1}` with `T = √(2C_kin)`, beyond which `τ ≥ ½k²`.
    pub fn split(&self) -> f64 {
        (2.0 * self.c_kin).sqrt() / self.ell
    }
}
