//! The acceptance checks, runnable from the CLI and the test harness.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::{
    bog_bound, fock_oracle, integral_error_scalings, lhy_coefficient, lhy_integral, loglog_slope,
    second_born_integral, BogCoefficients, FockOracleSpec,
};
use crate::energy::{box_lower_bound, EnergyConfig, EnergyReport};
use crate::error::Result;
use crate::localization::{
    windowed_potential, BallRule, BumpProfile, KernelConfig, KineticMultiplier, LocalizationKernel,
    PGrid, WindowedPotential,
};
use crate::numerics::Tolerance;
use crate::potential::RadialPotential;
use crate::scattering::{
    additivity_check, default_grid, identity_k_grid, scattering_length_ode,
    scattering_length_variational, scattering_solution, truncation_limit, ScatteringSolution,
};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Settings of [`run_checks`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub kernel: KernelConfig,
    pub tolerance: Tolerance,
    /// Substring a check name must contain to run.
    pub filter: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            kernel: KernelConfig::default(),
            tolerance: Tolerance::default(),
            filter: None,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

type CheckFn = fn(&VerifyConfig) -> Result<(bool, String)>;

/// `(id, name, runtime budget in seconds, check)`.
pub const CHECKS: [(usize, &str, f64, CheckFn); 12] = [
    (1, "hard_core_length", 1.0, hard_core_length),
    (2, "square_well_closed_form", 1.0, square_well_closed_form),
    (3, "scattering_identities", 5.0, scattering_identities),
    (4, "truncation_monotone", 5.0, truncation_monotone),
    (5, "additivity_sandwich", 10.0, additivity_sandwich),
    (6, "lhy_coefficient", 1.0, lhy_coefficient_check),
    (7, "bogoliubov_theorem", 30.0, bogoliubov_theorem),
    (8, "localization_multiplier", 120.0, localization_multiplier),
    (9, "second_born_window", 30.0, second_born_window),
    (10, "integral_error_scaling", 30.0, integral_error_scaling),
    (11, "coefficient_regime", 30.0, coefficient_regime),
    (12, "scale_covariance", 60.0, scale_covariance),
];

/// Runs every selected check in order; errors count as failures.
pub fn run_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .filter(|(_, name, _, _)| config.filter.as_deref().map_or(true, |f| name.contains(f)))
        .map(|&(id, name, budget, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(config) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                id,
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
                budget_seconds: budget,
            }
        })
        .collect()
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

fn well() -> RadialPotential {
    RadialPotential::square_well(8.0, 1.0).expect("valid well")
}

fn well_solution(tol: &Tolerance) -> Result<ScatteringSolution> {
    let v = well();
    scattering_solution(&v, &default_grid(&v)?, tol)
}

fn hard_core_length(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let v = RadialPotential::hard_core(r)?;
        let ode = scattering_length_ode(&v, &cfg.tolerance)?;
        let var = scattering_length_variational(&v, 2.0 * r, 64)?.a;
        worst = worst.max(rel(ode, r)).max(rel(var, r));
    }
    Ok((worst <= 1e-8, format!("max relative error {worst:.2e}")))
}

fn square_well_closed_form(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let pairs = [
        (0.1, 1.0),
        (0.5, 2.0),
        (1.0, 1.0),
        (2.0, 0.5),
        (4.0, 1.5),
        (8.0, 1.0),
        (10.0, 0.3),
        (20.0, 2.0),
        (50.0, 1.0),
        (100.0, 0.7),
    ];
    let mut worst: f64 = 0.0;
    for (v0, r) in pairs {
        let k = (0.5f64 * v0).sqrt();
        let exact = r * (1.0 - (k * r).tanh() / (k * r));
        let a = scattering_length_ode(&RadialPotential::square_well(v0, r)?, &cfg.tolerance)?;
        worst = worst.max(rel(a, exact));
    }
    Ok((worst <= 1e-8, format!("max relative error {worst:.2e} over 10 wells")))
}

fn scattering_identities(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst_a: f64 = 0.0;
    let mut worst_k: f64 = 0.0;
    for v in [
        well(),
        RadialPotential::piecewise_constant(vec![0.0, 0.5, 1.2, 2.0], vec![20.0, 3.0, 0.5])?,
    ] {
        let sol = scattering_solution(&v, &default_grid(&v)?, &cfg.tolerance)?;
        worst_a = worst_a.max(rel(sol.g_integral() / (8.0 * PI), sol.a()));
        let g0 = sol.g_hat(0.0);
        for k in identity_k_grid(v.range()) {
            worst_k = worst_k.max((sol.omega_hat(k) * 2.0 * k * k - sol.g_hat(k)).abs() / g0);
        }
    }
    Ok((
        worst_a <= 1e-6 && worst_k <= 1e-6,
        format!("∫g/8πa: {worst_a:.2e}, 2k²ω̂ − ĝ: {worst_k:.2e} of ĝ(0)"),
    ))
}

fn truncation_monotone(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let levels = [8.0, 128.0, 2048.0, 2e6];
    let a = truncation_limit(&RadialPotential::hard_core(1.0)?, &levels, &cfg.tolerance)?;
    let increasing = a.windows(2).all(|w| w[1] > w[0]);
    let last = a[a.len() - 1];
    Ok((
        // at n = 2·10⁶ the gap is 1e-3 exactly; allow rounding of `1 − a`
        increasing && (last - 1.0).abs() <= 1e-3 + 4.0 * f64::EPSILON,
        format!("a = {a:.6?}, 1 − a = {:.3e}", 1.0 - last),
    ))
}

fn random_piecewise(rng: &mut ChaCha8Rng) -> Result<RadialPotential> {
    let pieces = rng.gen_range(2..=5);
    let mut r = 0.0;
    let mut breakpoints = vec![0.0];
    let mut values = Vec::with_capacity(pieces);
    for _ in 0..pieces {
        r += rng.gen_range(0.1..1.0);
        breakpoints.push(r);
        values.push(rng.gen_range(0.0..30.0));
    }
    RadialPotential::piecewise_constant(breakpoints, values)
}

fn additivity_sandwich(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = 0;
    for _ in 0..10 {
        let v = random_piecewise(&mut rng)?;
        for _ in 0..3 {
            let split = rng.gen_range(0.05..0.95) * v.range();
            if !additivity_check(&v, split, &cfg.tolerance)?.holds {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("{failures} of 30 splits violate the sandwich")))
}

fn lhy_coefficient_check(_: &VerifyConfig) -> Result<(bool, String)> {
    let tol = Tolerance::relative(1e-12);
    let j = lhy_integral(&tol)?.value();
    let c = lhy_coefficient(&tol)?;
    let (j0, c0) = (8.0 * 2f64.sqrt() / 15.0, 128.0 / (15.0 * PI.sqrt()));
    Ok((
        (j - j0).abs() <= 1e-8 && (c - c0).abs() <= 1e-8,
        format!("J = {j:.12}, coefficient = {c:.12}"),
    ))
}

fn bogoliubov_theorem(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7);
    let mut worst_dominance = f64::INFINITY;
    for _ in 0..50 {
        let a = rng.gen_range(0.5..2.0);
        let b = a * rng.gen_range(-0.9..0.9);
        let kappa = Complex::from_polar(rng.gen_range(0.0..0.5) * (a + b), rng.gen_range(0.0..2.0 * PI));
        let oracle = fock_oracle(&FockOracleSpec { a, b, kappa, n_max: 40 })?;
        worst_dominance = worst_dominance.min(oracle.value - bog_bound(a, b, kappa, 2.0)?);
    }
    let mut worst_gap: f64 = 0.0;
    for _ in 0..10 {
        let a = rng.gen_range(0.5..2.0);
        let b = a * rng.gen_range(-0.5..=0.5);
        let oracle = fock_oracle(&FockOracleSpec {
            a,
            b,
            kappa: Complex::new(0.0, 0.0),
            n_max: 40,
        })?;
        worst_gap = worst_gap.max((oracle.value - ((a * a - b * b).sqrt() - a)).abs());
    }
    Ok((
        worst_dominance >= -1e-6 && worst_gap < 1e-6,
        format!("min(oracle − bound) {worst_dominance:.2e}, κ=0 gap {worst_gap:.2e}"),
    ))
}

fn localization_multiplier(_: &VerifyConfig) -> Result<(bool, String)> {
    let s = 0.05;
    let f = KineticMultiplier::new(Arc::new(BumpProfile::new(4.0 / s)), s, &BallRule::default())?;
    let cancel = f.zero_cancellation();
    let grad = f.gradient_at_zero(2e-3);
    let grad = grad.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut points = PGrid::Axis(32).points(2.0 / s);
    points.extend(PGrid::Diagonal(32).points(2.0 / s));
    let worst = points
        .iter()
        .map(|&p| {
            let p2 = p.iter().map(|x| x * x).sum::<f64>();
            f.terms(p).value / (1.0 + p2)
        })
        .fold(f64::INFINITY, f64::min);
    Ok((
        cancel < 1e-8 && grad < 1e-6 && worst >= -1e-8,
        format!("|F(0)|/max term {cancel:.1e}, |∇F(0)| {grad:.1e}, min F/(1+p²) {worst:.2e}"),
    ))
}

fn second_born_window(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let sol = well_solution(&cfg.tolerance)?;
    let unwindowed = second_born_integral(&WindowedPotential::unwindowed(&sol)?, &sol, &cfg.tolerance)?;
    let parseval = unwindowed.difference.abs() / unwindowed.reference;
    let ratios = [0.04, 0.02, 0.01];
    let mut diffs = Vec::new();
    for r in ratios {
        let kernel = LocalizationKernel::new(sol.range() / r, &cfg.kernel)?;
        let wp = windowed_potential(&sol, &kernel)?;
        diffs.push(second_born_integral(&wp, &sol, &cfg.tolerance)?.difference);
    }
    let slope = loglog_slope(&ratios, &diffs);
    let pairwise: Vec<f64> = (0..2)
        .map(|i| (diffs[i] / diffs[i + 1]).abs().ln() / 2f64.ln())
        .collect();
    let ok = parseval < 1e-8 && pairwise.iter().chain([&slope]).all(|e| (e - 2.0).abs() <= 0.2);
    Ok((
        ok,
        format!("exponents {:.4}/{:.4} (fit {slope:.4}), unwindowed {parseval:.1e}", pairwise[0], pairwise[1]),
    ))
}

fn integral_error_scaling(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let sol = well_solution(&cfg.tolerance)?;
    let a3 = sol.a().powi(3);
    let rho_mus: Vec<f64> = (0..5).map(|i| 1e-7 * 10f64.powf(i as f64 / 4.0) / a3).collect();
    let t = integral_error_scalings(&sol, &cfg.kernel, &rho_mus, &cfg.tolerance)?;
    let ok = [t.low_momentum_exponent, t.quartic_exponent]
        .iter()
        .all(|e| (e - 0.5).abs() <= 0.1);
    Ok((
        ok,
        format!(
            "exponents {:.4} (low momentum), {:.4} (quartic)",
            t.low_momentum_exponent, t.quartic_exponent
        ),
    ))
}

fn coefficient_regime(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let sol = well_solution(&cfg.tolerance)?;
    let a = sol.a();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xb);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for i in 0..10 {
        let rho_mu = 10f64.powf(-10.0 + 2.0 * i as f64 / 9.0) / a.powi(3);
        let kernel = LocalizationKernel::from_density(rho_mu, a, &cfg.kernel)?;
        let wp = Arc::new(windowed_potential(&sol, &kernel)?);
        let ell = kernel.ell();
        for _ in 0..20 {
            let ratio = rng.gen_range(0.0..=20.0);
            let c = BogCoefficients::new(wp.clone(), ratio * rho_mu * ell.powi(3), rho_mu, kernel.c_kin())?;
            for j in 0..50 {
                let k = if j == 0 { 0.0 } else { 10f64.powf(rng.gen_range(-2.0..3.0)) / ell };
                worst = worst.max(c.ratio(k));
                samples += 1;
            }
        }
    }
    Ok((worst <= 0.5, format!("max |B|/A = {worst:.5} over {samples} samples")))
}

fn report_densities(r: &EnergyReport) -> Vec<(String, f64)> {
    let mut out = vec![
        ("leading".to_string(), r.leading),
        ("quadratic_gap".to_string(), r.quadratic_gap),
        ("lhy_term".to_string(), r.lhy_term),
        ("total".to_string(), r.total),
    ];
    out.extend(r.budget.iter().map(|e| (e.label.clone(), e.value)));
    out
}

fn scale_covariance(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let config = EnergyConfig {
        kernel: cfg.kernel,
        tolerance: cfg.tolerance,
        ..EnergyConfig::default()
    };
    let a = scattering_length_ode(&well(), &cfg.tolerance)?;
    let rho_mu = 1e-8 / a.powi(3);
    let lambda: f64 = 2.5;
    let base = box_lower_bound(&well(), 3.0 * rho_mu, rho_mu, &config)?;
    let scaled_v = well().rescale(lambda)?;
    let l3 = lambda.powi(3);
    let scaled = box_lower_bound(&scaled_v, 3.0 * rho_mu / l3, rho_mu / l3, &config)?;
    let mut worst: f64 = 0.0;
    let mut worst_label = String::new();
    for ((label, x), (_, y)) in report_densities(&base).into_iter().zip(report_densities(&scaled)) {
        let expected = x * lambda.powi(-5);
        let err = if expected == 0.0 { y.abs() } else { rel(y, expected) };
        if err >= worst {
            worst = err;
            worst_label = label;
        }
    }
    let a_err = rel(scaled.inputs["a"], lambda * base.inputs["a"]);
    Ok((
        worst <= 1e-6 && a_err <= 1e-6,
        format!("worst relative deviation {worst:.1e} ({worst_label}), a: {a_err:.1e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_checks() {
        let cfg = VerifyConfig {
            filter: Some("length".into()),
            ..VerifyConfig::default()
        };
        let results = run_checks(&cfg);
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].name, "hard_core_length");
        assert!(results[0].passed, "{}", results[0].detail);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<VerifyConfig>("seed = 3\nbogus = 1").is_err());
        let c: VerifyConfig = toml::from_str("seed = 3\n[kernel]\nc_kin = 0.0").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.kernel.c_kin(), 0.0);
    }
}
