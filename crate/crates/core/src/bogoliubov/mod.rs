//! The quadratic (Bogoliubov) layer of the lower bound.

mod coefficients;
mod fock;
mod integrals;
mod lhy;

pub use coefficients::BogCoefficients;
pub use nalgebra::Complex;
pub use fock::{
    bog_bound, fock_oracle, two_mode_ground_energy, FockOracle, FockOracleSpec, TwoModeHamiltonian,
};
pub use integrals::{
    bog_integral, integral_error_scalings, loglog_slope, low_momentum_integral, quartic_integral,
    regularized_integrand, second_born_integral, BogIntegral, ScalingRow, ScalingTable, SecondBorn,
    PERIODS,
};
pub use lhy::{
    bogoliubov_correction_density, lhy_coefficient, lhy_energy_density, lhy_integral, lhy_integrand,
    LhyIntegral,
};
