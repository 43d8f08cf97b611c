//! The one-dimensional bump `χ₁(t) = η(t)/‖η‖₂`, `η(t) = exp(−1/(1−4t²))`,
//! and tabulated transforms of it.

use crate::numerics::quadrature::GaussRule;

const PANELS: usize = 96;
const NODES_PER_PANEL: usize = 16;
const TRANSFORM_STEP: f64 = 0.01;
const CORRELATION_CELLS: usize = 4096;

fn eta_derivs(t: f64) -> (f64, f64, f64) {
    let q = 1.0 - 4.0 * t * t;
    if q <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let e = (-1.0 / q).exp();
    let q2 = q * q;
    let d1 = -8.0 * t / q2;
    let d2 = 64.0 * t * t / (q2 * q2) - 8.0 / q2 - 128.0 * t * t / (q2 * q);
    (e, e * d1, e * d2)
}

/// Cubic Hermite table on `[0, x_max]` with uniform spacing.
#[derive(Debug, Clone)]
struct HermiteTable {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    fn build<F: Fn(f64) -> (f64, f64) + Sync>(x_max: f64, step: f64, f: F) -> Self {
        use rayon::prelude::*;
        let n = (x_max / step).ceil() as usize + 1;
        let pairs: Vec<(f64, f64)> = (0..=n).into_par_iter().map(|i| f(i as f64 * step)).collect();
        HermiteTable {
            step,
            values: pairs.iter().map(|p| p.0).collect(),
            slopes: pairs.iter().map(|p| p.1).collect(),
        }
    }

    fn x_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let u = x / self.step;
        let i = (u as usize).min(self.values.len() - 2);
        let t = u - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[i]
            + (t3 - 2.0 * t2 + t) * self.step * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.values[i + 1]
            + (t3 - t2) * self.step * self.slopes[i + 1]
    }
}

/// Normalised 1-d bump with its transforms.
#[derive(Debug, Clone)]
pub struct BumpProfile {
    norm: f64,
    /// Composite Gauss nodes on `[0, ½]` with `(t, w, χ₁, χ₁', χ₁'')`.
    nodes: Vec<[f64; 5]>,
    m2: f64,
    transform: HermiteTable,
    correlation: HermiteTable,
}

impl BumpProfile {
    /// Builds the profile with `χ̂₁` tabulated on `[0, p_max]`.
    pub fn new(p_max: f64) -> Self {
        let rule = GaussRule::new(NODES_PER_PANEL);
        let mut raw = Vec::with_capacity(PANELS * NODES_PER_PANEL);
        for k in 0..PANELS {
            let a = 0.5 * k as f64 / PANELS as f64;
            let b = 0.5 * (k + 1) as f64 / PANELS as f64;
            for (t, w) in rule.on(a, b) {
                let (e, d1, d2) = eta_derivs(t);
                raw.push([t, w, e, d1, d2]);
            }
        }
        let eta_sq: f64 = 2.0 * raw.iter().map(|n| n[1] * n[2] * n[2]).sum::<f64>();
        let c = 1.0 / eta_sq.sqrt();
        let nodes: Vec<[f64; 5]> = raw
            .into_iter()
            .map(|n| [n[0], n[1], c * n[2], c * n[3], c * n[4]])
            .collect();
        let m2 = 2.0 * nodes.iter().map(|n| n[1] * n[3] * n[3]).sum::<f64>();
        let mut profile = BumpProfile {
            norm: c,
            nodes,
            m2,
            transform: HermiteTable {
                step: 1.0,
                values: vec![0.0, 0.0],
                slopes: vec![0.0, 0.0],
            },
            correlation: HermiteTable {
                step: 1.0,
                values: vec![0.0, 0.0],
                slopes: vec![0.0, 0.0],
            },
        };
        let nodes = profile.nodes.clone();
        profile.transform = HermiteTable::build(p_max.max(1.0), TRANSFORM_STEP, |p| {
            let mut v = 0.0;
            let mut d = 0.0;
            for n in &nodes {
                let (s, co) = (p * n[0]).sin_cos();
                v += n[1] * n[2] * co;
                d -= n[1] * n[0] * n[2] * s;
            }
            (2.0 * v, 2.0 * d)
        });
        let c_norm = profile.norm;
        profile.correlation = HermiteTable::build(1.0, 1.0 / CORRELATION_CELLS as f64, |y| {
            autocorrelation(y, c_norm)
        });
        profile
    }

    /// `1/‖η‖₂`.
    pub fn normalisation(&self) -> f64 {
        self.norm
    }

    pub fn chi(&self, t: f64) -> f64 {
        self.norm * eta_derivs(t).0
    }

    pub fn chi_prime(&self, t: f64) -> f64 {
        self.norm * eta_derivs(t).1
    }

    /// `∫χ₁² dt` by the internal rule (1 up to rounding).
    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * self.nodes.iter().map(|n| n[1] * n[2] * n[2]).sum::<f64>()
    }

    /// `∫ χ₁'² dt`.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// `max χ₁ = χ₁(0)`.
    pub fn sup(&self) -> f64 {
        self.chi(0.0)
    }

    /// Largest tabulated argument of [`Self::chi_hat`].
    pub fn p_max(&self) -> f64 {
        self.transform.x_max()
    }

    /// `χ̂₁(p) = ∫ χ₁(t) e^{−ipt} dt` (real and even).
    #[inline]
    pub fn chi_hat(&self, p: f64) -> f64 {
        let x = p.abs();
        if x <= self.transform.x_max() {
            self.transform.eval(x)
        } else {
            self.chi_hat_direct(x)
        }
    }

    /// `χ̂₁(p)` by quadrature, bypassing the table.
    pub fn chi_hat_direct(&self, p: f64) -> f64 {
        2.0 * self
            .nodes
            .iter()
            .map(|n| n[1] * n[2] * (p * n[0]).cos())
            .sum::<f64>()
    }

    /// Transform of `χ₁²`.
    pub fn square_hat(&self, p: f64) -> f64 {
        2.0 * self
            .nodes
            .iter()
            .map(|n| n[1] * n[2] * n[2] * (p * n[0]).cos())
            .sum::<f64>()
    }

    /// Transform of `−χ₁ χ₁''`.
    pub fn laplacian_hat(&self, p: f64) -> f64 {
        -2.0 * self
            .nodes
            .iter()
            .map(|n| n[1] * n[2] * n[4] * (p * n[0]).cos())
            .sum::<f64>()
    }

    /// `c₁(y) = ∫ χ₁(t) χ₁(t − y) dt`; 1 at 0, 0 for `|y| ≥ 1`.
    #[inline]
    pub fn correlation(&self, y: f64) -> f64 {
        let y = y.abs();
        if y >= 1.0 {
            0.0
        } else {
            self.correlation.eval(y)
        }
    }
}

fn autocorrelation(y: f64, c: f64) -> (f64, f64) {
    if y >= 1.0 {
        return (0.0, 0.0);
    }
    let rule = GaussRule::new(NODES_PER_PANEL);
    let (lo, hi) = (y - 0.5, 0.5);
    let panels = 48;
    let mut v = 0.0;
    let mut d = 0.0;
    for k in 0..panels {
        let a = lo + (hi - lo) * k as f64 / panels as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / panels as f64;
        for (t, w) in rule.on(a, b) {
            let f = eta_derivs(t).0;
            let (g, dg) = {
                let e = eta_derivs(t - y);
                (e.0, e.1)
            };
            v += w * f * g;
            d -= w * f * dg;
        }
    }
    (c * c * v, c * c * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_finite, Tolerance};

    fn profile() -> BumpProfile {
        BumpProfile::new(60.0)
    }

    #[test]
    fn normalisation_and_moments() {
        let p = profile();
        assert!((p.l2_norm_sq() - 1.0).abs() < 1e-14);
        let tol = Tolerance {
            rel: 1e-13,
            abs: 0.0,
            max_refinements: 10_000,
        };
        let n = integrate_finite(|t| eta_derivs(t).0.powi(2), -0.5, 0.5, &tol).unwrap();
        assert!((p.normalisation() - 1.0 / n.value.sqrt()).abs() < 1e-12);
        let m2 = integrate_finite(|t| p.chi_prime(t).powi(2), -0.5, 0.5, &tol).unwrap();
        assert!((p.m2() - m2.value).abs() < 1e-10 * m2.value);
        // ∫ −χχ'' = ∫ χ'² by parts
        assert!((p.laplacian_hat(0.0) - p.m2()).abs() < 1e-10);
        assert!((p.square_hat(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for t in [-0.4, -0.1, 0.0, 0.23, 0.47] {
            let h = 1e-6;
            let (f, d1, d2) = eta_derivs(t);
            let fd1 = (eta_derivs(t + h).0 - eta_derivs(t - h).0) / (2.0 * h);
            let fd2 = (eta_derivs(t + h).0 - 2.0 * f + eta_derivs(t - h).0) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()));
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn transform_table_matches_direct_quadrature() {
        let p = profile();
        let tol = Tolerance {
            rel: 1e-13,
            abs: 1e-14,
            max_refinements: 10_000,
        };
        for q in [0.0, 0.3, 1.7, 5.55, 12.345, 31.0, 59.99] {
            let direct = p.chi_hat_direct(q);
            assert!((p.chi_hat(q) - direct).abs() < 1e-11, "p = {q}");
            let gk = integrate_finite(|t| p.chi(t) * (q * t).cos(), -0.5, 0.5, &tol).unwrap();
            assert!((direct - gk.value).abs() < 1e-12, "p = {q}");
        }
    }

    #[test]
    fn correlation_values() {
        let p = profile();
        assert!((p.correlation(0.0) - 1.0).abs() < 1e-14);
        assert_eq!(p.correlation(1.0), 0.0);
        assert_eq!(p.correlation(-1.5), 0.0);
        let tol = Tolerance {
            rel: 1e-13,
            abs: 1e-15,
            max_refinements: 10_000,
        };
        for y in [0.003, 0.1, 0.35, 0.77] {
            let gk =
                integrate_finite(|t| p.chi(t) * p.chi(t - y), y - 0.5, 0.5, &tol).unwrap();
            assert!((p.correlation(y) - gk.value).abs() < 1e-12, "y = {y}");
        }
        // second-order behaviour: c₁(y) ≈ 1 − ½ m₂ y²
        let y = 1e-3;
        assert!(((1.0 - p.correlation(y)) / (y * y) - 0.5 * p.m2()).abs() < 1e-3);
    }
}
