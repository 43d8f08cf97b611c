//! Momentum-space integrals of the Bogoliubov layer.

use std::f64::consts::PI;

use serde::Serialize;

use super::coefficients::BogCoefficients;
use crate::error::Result;
use crate::localization::{windowed_potential, KernelConfig, LocalizationKernel, WindowedPotential};
use crate::numerics::quadrature::GaussRule;
use crate::numerics::{integrate_with_breaks, Tolerance};
use crate::scattering::ScatteringSolution;

/// Number of oscillation periods `π/R` integrated explicitly before the
/// asymptotic tail takes over.
pub const PERIODS: usize = 400;

fn k_tolerance(tol: &Tolerance) -> Tolerance {
    Tolerance {
        rel: tol.rel.max(1e-12),
        abs: 0.0,
        max_refinements: tol.max_refinements.max(20_000),
    }
}

/// Break points: `0`, the given scales, a geometric ladder up to `π/R`, then
/// every `π/R` for `periods` periods.
fn k_breaks(scales: &[f64], range: f64, periods: usize) -> Vec<f64> {
    let period = PI / range;
    let mut b = vec![0.0];
    let positive: Vec<f64> = scales.iter().copied().filter(|s| *s > 0.0 && s.is_finite()).collect();
    let smallest = positive.iter().copied().fold(period, f64::min);
    let mut x = smallest / 8.0;
    while x < period {
        b.push(x);
        x *= 2.0;
    }
    b.extend(positive.iter().copied().filter(|&s| s < period * periods as f64));
    b.extend((1..=periods).map(|j| j as f64 * period));
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1e-300));
    b
}

/// `∫₀^∞ Ŵ₁(k)² h(k) dk` where `h → 1` at large `k`: explicit range plus
/// the jump asymptotics.
fn oscillatory_integral<F: Fn(f64) -> f64>(
    wp: &WindowedPotential,
    scales: &[f64],
    h: F,
    tol: &Tolerance,
) -> Result<f64> {
    let breaks = k_breaks(scales, wp.range(), PERIODS);
    let k_max = *breaks.last().unwrap();
    let body = integrate_with_breaks(
        |k| {
            let w = wp.w1_hat(k);
            w * w * h(k)
        },
        &breaks,
        None,
        &k_tolerance(tol),
    )?;
    Ok(body.value + h(k_max) * wp.w1_hat_sq_tail(k_max))
}

/// The two pieces of the regularised Bogoliubov integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogIntegral {
    /// `½(2π)^{-3}ℓ³n₀ ∫ (√(A²−B²) − A + B²/2A) dk`.
    pub regularized: f64,
    /// `−½(2π)^{-3}ℓ³n₀ ∫ B²/2A dk`.
    pub second_born: f64,
}

impl BogIntegral {
    pub fn total(&self) -> f64 {
        self.regularized + self.second_born
    }
}

/// `√(A²−B²) − A + B²/2A = −A x⁴/(2(1+√(1−x²))²)` with `x = B/A`.
pub fn regularized_integrand(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let x = b / a;
    let s = (1.0 - x * x).max(0.0).sqrt();
    -a * x.powi(4) / (2.0 * (1.0 + s) * (1.0 + s))
}

/// `½(2π)^{-3} ℓ³ n₀ ∫ (√(A²−B²) − A) dk`, split as in [`BogIntegral`].
pub fn bog_integral(coeffs: &BogCoefficients, n0: f64, tol: &Tolerance) -> Result<BogIntegral> {
    if coeffs.n == 0.0 || n0 == 0.0 {
        return Ok(BogIntegral {
            regularized: 0.0,
            second_born: 0.0,
        });
    }
    let pref = coeffs.ell.powi(3) * n0 / (4.0 * PI * PI);
    let wp = coeffs.window();
    let c = coeffs.shift();
    let scales = [coeffs.kink(), coeffs.split(), c.sqrt()];
    let range = wp.range();
    let breaks = k_breaks(&scales, range, 8);
    let tail = 1.0 / range;
    let reg = integrate_with_breaks(
        |k| k * k * regularized_integrand(coeffs.a_coef(k), coeffs.b_coef(k)),
        &breaks,
        Some(tail),
        &k_tolerance(tol),
    )?;
    let sb = oscillatory_integral(wp, &scales, |k| k * k / (coeffs.tau(k) + c), tol)?;
    let n = coeffs.n;
    Ok(BogIntegral {
        regularized: pref * reg.value,
        second_born: -pref * n / coeffs.ell.powi(6) * 0.5 * sb,
    })
}

/// `(2π)^{-3}∫Ŵ₁²/(2k²)` against `∫gω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondBorn {
    pub value: f64,
    pub reference: f64,
    pub difference: f64,
    /// The same quantity as the position-space double integral.
    pub position_value: f64,
}

/// `(2π)^{-3}∫Ŵ₁(k)²/(2k²) dk`, both in momentum and in position space.
pub fn second_born_integral(
    wp: &WindowedPotential,
    sol: &ScatteringSolution,
    tol: &Tolerance,
) -> Result<SecondBorn> {
    let value = oscillatory_integral(wp, &[], |_| 1.0, tol)? / (4.0 * PI * PI);
    let position_value = second_born_position(wp, sol);
    let reference = sol.g_omega_integral();
    Ok(SecondBorn {
        value,
        reference,
        difference: value - reference,
        position_value,
    })
}

/// `4π ∫ W̄₁(r) r M(r) dr` with `M(r) = ∫₀^r W̄₁ r'² dr'`.
fn second_born_position(wp: &WindowedPotential, sol: &ScatteringSolution) -> f64 {
    let rule = GaussRule::new(8);
    let w1 = |r: f64| sol.g(r) * wp.avg_inv(r);
    let nodes = sol.dense_nodes();
    let range = sol.range();
    let mut mass = 0.0;
    let mut total = 0.0;
    for cell in nodes.windows(2) {
        let (lo, hi) = (cell[0], cell[1].min(range));
        if hi <= lo {
            continue;
        }
        for (r, w) in rule.on(lo, hi) {
            let inner = rule.integrate(lo, r, |t| w1(t) * t * t);
            total += w * w1(r) * r * (mass + inner);
        }
        mass += rule.integrate(lo, hi, |t| w1(t) * t * t);
    }
    4.0 * PI * total
}

/// `∫₀^∞ Ŵ₁² (k²/(τ+c) − 1) dk`, split at `Tℓ^{-1}`: (signed, absolute).
pub fn low_momentum_integral(coeffs: &BogCoefficients, tol: &Tolerance) -> Result<(f64, f64)> {
    let wp = coeffs.window();
    let c = coeffs.shift();
    let d = coeffs.c_kin / (coeffs.ell * coeffs.ell) - c;
    let split = coeffs.split();
    // k²/(τ+c) − 1 without cancellation
    let h = |k: f64| {
        let t = coeffs.tau(k);
        if t > 0.0 {
            d / (t + c)
        } else {
            k * k / c - 1.0
        }
    };
    let scales = [coeffs.kink(), split, c.sqrt()];
    let low_breaks: Vec<f64> = k_breaks(&scales, wp.range(), 0)
        .into_iter()
        .filter(|&k| k <= split)
        .chain(std::iter::once(split))
        .collect();
    let ktol = k_tolerance(tol);
    let sq = |k: f64| wp.w1_hat(k).powi(2);
    let low_signed = integrate_with_breaks(|k| sq(k) * h(k), &low_breaks, None, &ktol)?.value;
    let low_abs = integrate_with_breaks(|k| sq(k) * h(k).abs(), &low_breaks, None, &ktol)?.value;
    let high_breaks: Vec<f64> = std::iter::once(split)
        .chain(
            k_breaks(&scales, wp.range(), PERIODS)
                .into_iter()
                .filter(|&k| k > split),
        )
        .collect();
    let k_max = *high_breaks.last().unwrap();
    let tail = h(k_max) * wp.w1_hat_sq_tail(k_max);
    let high_signed =
        integrate_with_breaks(|k| sq(k) * h(k), &high_breaks, None, &ktol)?.value + tail;
    let high_abs =
        integrate_with_breaks(|k| sq(k) * h(k).abs(), &high_breaks, None, &ktol)?.value + tail.abs();
    Ok((low_signed + high_signed, low_abs + high_abs))
}

/// `ℓ³ρ^{-1}∫B⁴/A³ d³k = 4πρ²∫k²Ŵ₁⁴/(τ+c)³ dk`.
pub fn quartic_integral(coeffs: &BogCoefficients, tol: &Tolerance) -> Result<f64> {
    let wp = coeffs.window();
    let c = coeffs.shift();
    let rho = coeffs.rho;
    let scales = [coeffs.kink(), coeffs.split(), c.sqrt()];
    let breaks: Vec<f64> = k_breaks(&scales, wp.range(), 8);
    let i = integrate_with_breaks(
        |k| {
            let t = coeffs.tau(k) + c;
            k * k * wp.w1_hat(k).powi(4) / (t * t * t)
        },
        &breaks,
        Some(1.0 / wp.range()),
        &k_tolerance(tol),
    )?;
    Ok(4.0 * PI * rho * rho * i.value)
}

/// One row of [`integral_error_scalings`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub rho_mu: f64,
    pub rho_mu_a3: f64,
    pub ell: f64,
    pub range_ratio: f64,
    /// `∫|ℓ³ρ^{-1}B²/2A − Ŵ₁²/2k²| d³k`.
    pub low_momentum: f64,
    /// `ℓ³ρ^{-1}∫B⁴/A³ d³k`.
    pub quartic: f64,
    /// `a√(ρ_μa³)`.
    pub reference: f64,
}

/// Rows plus log-log slopes in `ρ_μ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub low_momentum_exponent: f64,
    pub quartic_exponent: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Evaluates both error integrals with `ρ = ρ_μ`, `n = ρ_μℓ³` at each `ρ_μ`.
pub fn integral_error_scalings(
    sol: &ScatteringSolution,
    config: &KernelConfig,
    rho_mus: &[f64],
    tol: &Tolerance,
) -> Result<ScalingTable> {
    let a = sol.a();
    let mut rows = Vec::with_capacity(rho_mus.len());
    for &rho_mu in rho_mus {
        let kernel = LocalizationKernel::from_density(rho_mu, a, config)?;
        let wp = std::sync::Arc::new(windowed_potential(sol, &kernel)?);
        let ell = kernel.ell();
        let coeffs = BogCoefficients::new(wp.clone(), rho_mu * ell.powi(3), rho_mu, kernel.c_kin())?;
        let (_, abs) = low_momentum_integral(&coeffs, tol)?;
        rows.push(ScalingRow {
            rho_mu,
            rho_mu_a3: rho_mu * a.powi(3),
            ell,
            range_ratio: wp.range_ratio(),
            low_momentum: 2.0 * PI * abs,
            quartic: quartic_integral(&coeffs, tol)?,
            reference: a * (rho_mu * a.powi(3)).sqrt(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.rho_mu).collect();
    let low: Vec<f64> = rows.iter().map(|r| r.low_momentum).collect();
    let quartic: Vec<f64> = rows.iter().map(|r| r.quartic).collect();
    Ok(ScalingTable {
        low_momentum_exponent: loglog_slope(&x, &low),
        quartic_exponent: loglog_slope(&x, &quartic),
        rows,
    })
}
