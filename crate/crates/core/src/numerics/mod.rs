//! Numerical building blocks: quadrature, the radial zero-energy ODE, the
//! variational minimiser and symmetric eigensolvers.

pub mod eigen;
pub mod fem;
pub mod ode;
pub mod quadrature;

pub use eigen::{lowest_eigenpair, min_eigen_sym, EigenPair, SymmetricOperator};
pub use fem::{minimize_scattering_functional, scattering_length_variational, VariationalResult};
pub use ode::{solve_radial_ode, RadialOdeSolution};
pub use quadrature::{
    gauss_legendre, integrate, integrate_finite, integrate_to_infinity, integrate_with_breaks,
    Domain, GaussRule, Integral,
};

use serde::{Deserialize, Serialize};

/// Accuracy request shared by the adaptive routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_refinements: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
            max_refinements: 4000,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: 0.0,
            ..Tolerance::default()
        }
    }
}

/// Strictly increasing radial nodes starting at a non-negative radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>) -> crate::Result<Self> {
        if nodes.is_empty() || nodes[0] < 0.0 || nodes.iter().any(|x| !x.is_finite()) {
            return Err(crate::Error::InvalidArgument(
                "radial grid needs finite non-negative nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(crate::Error::InvalidArgument(
                "radial grid must be strictly increasing".into(),
            ));
        }
        Ok(RadialGrid { nodes })
    }

    /// `n + 1` evenly spaced nodes on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> crate::Result<Self> {
        if n == 0 || hi <= lo {
            return Err(crate::Error::InvalidArgument("empty uniform grid".into()));
        }
        Self::new((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}
