//! Numerical companion for lower bounds on the ground-state energy of dilute
//! Bose gases: scattering lengths, localisation multipliers, Bogoliubov
//! integrals and assembled energy budgets.

pub mod bogoliubov;
pub mod config;
pub mod energy;
pub mod error;
pub mod localization;
pub mod numerics;
pub mod potential;
pub mod scattering;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use potential::RadialPotential;
