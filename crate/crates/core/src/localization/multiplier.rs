//! The kinetic localisation multiplier `F(p)` and the scalar checks built on it.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::BumpProfile;
use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_legendre;

/// Largest number of ball nodes a single multiplier may allocate.
pub const BALL_NODE_BUDGET: usize = 20_000_000;

/// Product rule on the ball `|q| < 1/s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallRule {
    /// Maximal radial panel width (in units of 1/ℓ).
    pub panel_width: f64,
    pub radial_nodes: usize,
    pub polar_nodes: usize,
    /// Number of trapezoid points in the azimuth; rounded up to even.
    pub azimuthal_nodes: usize,
}

impl Default for BallRule {
    fn default() -> Self {
        BallRule {
            panel_width: 4.0,
            radial_nodes: 16,
            polar_nodes: 64,
            azimuthal_nodes: 128,
        }
    }
}

impl BallRule {
    /// The same rule with every node count doubled.
    pub fn refined(&self) -> Self {
        BallRule {
            panel_width: self.panel_width / 2.0,
            radial_nodes: self.radial_nodes,
            polar_nodes: 2 * self.polar_nodes,
            azimuthal_nodes: 2 * self.azimuthal_nodes,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct BallNode {
    q: [f64; 3],
    /// `(2π)^{-3} w (s^{-2} − |q|²)`.
    wk: f64,
    chi_hat: f64,
}

/// `θ̂(ℓp) = ∏ sin(ℓpᵢ/2)/(ℓpᵢ/2)`.
pub fn theta_hat(p: [f64; 3], ell: f64) -> f64 {
    p.iter().map(|&x| crate::scattering::sinc(0.5 * ell * x)).product()
}

/// The three constituents of `F(p)` at `ℓ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTerms {
    /// `(2π)^{-3} K * |χ̂|²`.
    pub smeared: f64,
    /// `−2 (2π)^{-3} θ̂ χ̂ * (Kχ̂)`.
    pub cross: f64,
    /// `(2π)^{-3} (∫K|χ̂|²) θ̂²`.
    pub constant: f64,
    pub value: f64,
}

impl FTerms {
    pub fn largest(&self) -> f64 {
        self.smeared.abs().max(self.cross.abs()).max(self.constant.abs())
    }
}

/// `F(p)` for `K(p) = (|p|² − s^{-2})₊`.
#[derive(Debug, Clone)]
pub struct KineticMultiplier {
    profile: Arc<BumpProfile>,
    s: f64,
    m2: f64,
    ball_integral: f64,
    nodes: Vec<BallNode>,
}

impl KineticMultiplier {
    pub fn new(profile: Arc<BumpProfile>, s: f64, rule: &BallRule) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
        }
        if rule.radial_nodes == 0 || rule.polar_nodes == 0 || rule.azimuthal_nodes == 0 {
            return Err(Error::InvalidArgument("empty ball rule".into()));
        }
        if !(rule.panel_width > 0.0) {
            return Err(Error::InvalidArgument("ball panel width must be positive".into()));
        }
        let radius = 1.0 / s;
        let panels = (radius / rule.panel_width).ceil().max(1.0) as usize;
        let n_phi = rule.azimuthal_nodes + rule.azimuthal_nodes % 2;
        let total = panels
            .saturating_mul(rule.radial_nodes)
            .saturating_mul(rule.polar_nodes)
            .saturating_mul(n_phi);
        if total > BALL_NODE_BUDGET {
            return Err(Error::QuadratureBudgetExceeded(format!(
                "ball rule needs {total} nodes (budget {BALL_NODE_BUDGET})"
            )));
        }
        let (rx, rw) = gauss_legendre(rule.radial_nodes);
        let (cx, cw) = gauss_legendre(rule.polar_nodes);
        let mut radial = Vec::with_capacity(panels * rule.radial_nodes);
        for k in 0..panels {
            let a = radius * k as f64 / panels as f64;
            let b = radius * (k + 1) as f64 / panels as f64;
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in rx.iter().zip(&rw) {
                radial.push((mid + half * x, half * w));
            }
        }
        let s2 = radius * radius;
        let norm = (2.0 * PI).powi(-3);
        let dphi = 2.0 * PI / n_phi as f64;
        let phis: Vec<(f64, f64)> = (0..n_phi).map(|j| (j as f64 * dphi).sin_cos()).collect();
        let nodes: Vec<BallNode> = radial
            .par_iter()
            .flat_map_iter(|&(r, wr)| {
                let kr = s2 - r * r;
                let profile = &profile;
                let phis = &phis;
                cx.iter().zip(&cw).flat_map(move |(&c, &wc)| {
                    let st = (1.0 - c * c).max(0.0).sqrt();
                    phis.iter().map(move |&(sp, cp)| {
                        let q = [r * st * cp, r * st * sp, r * c];
                        BallNode {
                            q,
                            wk: norm * wr * r * r * wc * dphi * kr,
                            chi_hat: q.iter().map(|&x| profile.chi_hat(x)).product(),
                        }
                    })
                })
            })
            .collect();
        let ball_integral = ordered_sum(&nodes, |n| n.wk * n.chi_hat * n.chi_hat);
        Ok(KineticMultiplier {
            m2: profile.m2(),
            profile,
            s,
            ball_integral,
            nodes,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn profile(&self) -> &Arc<BumpProfile> {
        &self.profile
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `(2π)^{-3}∫K|χ̂|²`.
    pub fn k_chi_integral(&self) -> f64 {
        3.0 * self.m2 - self.s.powi(-2) + self.ball_integral
    }

    /// Constituents at `ℓ = 1`.
    pub fn terms(&self, p: [f64; 3]) -> FTerms {
        let s2 = self.s.powi(-2);
        let pr = &self.profile;
        let (t1_ball, b2) = ball_sums(&self.nodes, |q| {
            pr.chi_hat(p[0] - q[0]) * pr.chi_hat(p[1] - q[1]) * pr.chi_hat(p[2] - q[2])
        });
        let p2 = p.iter().map(|x| x * x).sum::<f64>();
        let sq = [pr.square_hat(p[0]), pr.square_hat(p[1]), pr.square_hat(p[2])];
        let lap = [pr.laplacian_hat(p[0]), pr.laplacian_hat(p[1]), pr.laplacian_hat(p[2])];
        let prod_sq = sq[0] * sq[1] * sq[2];
        let kinetic_product =
            lap[0] * sq[1] * sq[2] + sq[0] * lap[1] * sq[2] + sq[0] * sq[1] * lap[2];
        let th = theta_hat(p, 1.0);
        let smeared = p2 + 3.0 * self.m2 - s2 + t1_ball;
        let cross = -2.0 * th * (kinetic_product - s2 * prod_sq + b2);
        let constant = th * th * self.k_chi_integral();
        FTerms {
            smeared,
            cross,
            constant,
            value: smeared + cross + constant,
        }
    }

    /// `F(p)` at box scale `ℓ`, i.e. the unit-scale multiplier at `ℓp`.
    pub fn eval(&self, p: [f64; 3], ell: f64) -> f64 {
        self.terms([ell * p[0], ell * p[1], ell * p[2]]).value
    }

    /// `|F(0)| / max |term|`.
    pub fn zero_cancellation(&self) -> f64 {
        let t = self.terms([0.0; 3]);
        t.value.abs() / t.largest()
    }

    /// One-sided Richardson difference quotient of `F` at the origin.
    pub fn gradient_at_zero(&self, h: f64) -> [f64; 3] {
        let f0 = self.terms([0.0; 3]).value;
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            let at = |t: f64| {
                let mut p = [0.0; 3];
                p[i] = t;
                (self.terms(p).value - f0) / t
            };
            *gi = 2.0 * at(0.5 * h) - at(h);
        }
        g
    }

    /// Checks `F ≤ F_s` on `points` with the inner constant fitted.
    pub fn fs_bound_check(&self, points: &[[f64; 3]]) -> FsReport {
        let s = self.s;
        let split = 5.0 / (6.0 * s);
        let evaluated: Vec<(f64, f64)> = points
            .par_iter()
            .map(|p| {
                let r = norm(*p);
                (r, if r == 0.0 { 0.0 } else { self.terms(*p).value })
            })
            .collect();
        let mut fitted_c: f64 = 0.0;
        let mut zero_ok = true;
        let mut worst = f64::INFINITY;
        let (mut inner, mut outer) = (0, 0);
        for &(r, f) in &evaluated {
            if r == 0.0 {
                zero_ok &= f == 0.0;
            } else if r < split {
                inner += 1;
                fitted_c = fitted_c.max(f / (s * r * r));
            } else {
                outer += 1;
                worst = worst.min(r * r - 0.5 / (s * s) - f);
            }
        }
        let slack = 1e-9;
        FsReport {
            s,
            fitted_c,
            inner_points: inner,
            outer_points: outer,
            worst_outer_margin: worst,
            passes: zero_ok && fitted_c.is_finite() && (outer == 0 || worst >= -slack),
        }
    }

    /// `F_s(p)` at `ℓ = 1` with the given inner constant.
    pub fn fs_value(&self, p: [f64; 3], c: f64) -> f64 {
        let r = norm(p);
        if r < 5.0 / (6.0 * self.s) {
            c * self.s * r * r
        } else {
            r * r - 0.5 / (self.s * self.s)
        }
    }
}

fn norm(p: [f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

const CHUNK: usize = 4096;

fn ordered_sum<F: Fn(&BallNode) -> f64 + Sync>(nodes: &[BallNode], f: F) -> f64 {
    let partial: Vec<f64> = nodes
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(&f).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// `(Σ wK a(q)², Σ wK a(q) χ̂(q))` with chunked, order-stable reduction.
fn ball_sums<F: Fn([f64; 3]) -> f64 + Sync>(nodes: &[BallNode], a: F) -> (f64, f64) {
    let partial: Vec<(f64, f64)> = nodes
        .par_chunks(CHUNK)
        .map(|c| {
            c.iter().fold((0.0, 0.0), |(x, y), n| {
                let v = a(n.q);
                (x + n.wk * v * v, y + n.wk * v * n.chi_hat)
            })
        })
        .collect();
    partial
        .iter()
        .fold((0.0, 0.0), |(x, y), &(u, v)| (x + u, y + v))
}

/// Outcome of [`KineticMultiplier::fs_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsReport {
    pub s: f64,
    pub fitted_c: f64,
    pub inner_points: usize,
    pub outer_points: usize,
    /// `min (|p|² − ½s^{-2} − F(p))` over the outer region.
    pub worst_outer_margin: f64,
    pub passes: bool,
}

/// Sampling pattern for `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PGrid {
    /// `n` points on the positive first axis.
    Axis(usize),
    /// `n` points on the main diagonal.
    Diagonal(usize),
    /// `n` points on each of the axis, face-diagonal and body-diagonal rays.
    Rays(usize),
}

impl PGrid {
    /// Points with `0 < |p| ≤ p_max` (ℓ = 1 units).
    pub fn points(&self, p_max: f64) -> Vec<[f64; 3]> {
        let ray = |dir: [f64; 3], n: usize| -> Vec<[f64; 3]> {
            let l = norm(dir);
            (1..=n)
                .map(|i| {
                    let t = p_max * i as f64 / n as f64 / l;
                    [t * dir[0], t * dir[1], t * dir[2]]
                })
                .collect()
        };
        match *self {
            PGrid::Axis(n) => ray([1.0, 0.0, 0.0], n),
            PGrid::Diagonal(n) => ray([1.0, 1.0, 1.0], n),
            PGrid::Rays(n) => {
                let mut v = ray([1.0, 0.0, 0.0], n);
                v.extend(ray([1.0, 1.0, 0.0], n));
                v.extend(ray([1.0, 1.0, 1.0], n));
                v
            }
        }
    }
}

impl std::str::FromStr for PGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("p-grid `{s}`: expected KIND:N")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("p-grid `{s}`: bad point count")))?;
        if n == 0 {
            return Err(Error::InvalidArgument(format!("p-grid `{s}`: zero points")));
        }
        match kind.trim() {
            "axis" => Ok(PGrid::Axis(n)),
            "diagonal" | "diag" => Ok(PGrid::Diagonal(n)),
            "rays" => Ok(PGrid::Rays(n)),
            other => Err(Error::InvalidArgument(format!("p-grid kind `{other}` is unknown"))),
        }
    }
}

/// Result of the gap-constant search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapConstant {
    pub b: f64,
    pub beta: f64,
    /// Inner constant fitted for the doubled parameter `2s`.
    pub fitted_c: f64,
    pub inner_limit: f64,
    pub outer_limit: f64,
}

/// Largest admissible `b` given `β` and the multiplier at parameter `2s`.
///
/// `doubled` must have been built with parameter `2s`.
pub fn gap_search(
    doubled: &KineticMultiplier,
    beta: f64,
    points: &[[f64; 3]],
    safety: f64,
) -> Result<GapConstant> {
    let report = doubled.fs_bound_check(points);
    if !report.passes {
        return Err(Error::NotFound(format!(
            "F_s bound fails at s = {} (outer margin {:e})",
            report.s, report.worst_outer_margin
        )));
    }
    let s = 0.5 * doubled.s();
    let inner_limit = beta * beta * (1.0 - report.fitted_c * doubled.s());
    let outer_limit = beta / (8.0 * s * s);
    let b = safety * inner_limit.min(outer_limit);
    if !(b > 0.0) {
        return Err(Error::NotFound(format!(
            "no positive gap constant: fitted C = {} at s = {}",
            report.fitted_c,
            doubled.s()
        )));
    }
    Ok(GapConstant {
        b,
        beta,
        fitted_c: report.fitted_c,
        inner_limit,
        outer_limit,
    })
}

/// Largest `β ∈ (0,1)` with `1 − θ̂(p)² ≤ β^{-1}p²/(p²+β)` on a dense grid.
pub fn quav_beta_search() -> Result<f64> {
    let mut dirs: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [1.0, 1.0, 1.0],
        [2.0, 1.0, 0.0],
        [2.0, 1.0, 1.0],
    ];
    dirs.extend(fibonacci_sphere(64));
    let p_max = 80.0;
    let steps = 20_000;
    let samples: Vec<(f64, f64)> = dirs
        .par_iter()
        .flat_map_iter(|d| {
            let l = norm(*d);
            let d = [d[0] / l, d[1] / l, d[2] / l];
            (1..=steps).map(move |i| {
                let t = p_max * i as f64 / steps as f64;
                let th = theta_hat([t * d[0], t * d[1], t * d[2]], 1.0);
                (t * t, 1.0 - th * th)
            })
        })
        .collect();
    let holds = |beta: f64| samples.iter().all(|&(p2, l)| l <= p2 / (beta * (p2 + beta)));
    let (mut lo, mut hi) = (1e-6, 1.0);
    if !holds(lo) {
        return Err(Error::NotFound("no β in (0,1) satisfies the averaging bound".into()));
    }
    if holds(hi) {
        return Ok(hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Quasi-uniform unit vectors.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [r * c, r * s, z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multiplier(s: f64) -> KineticMultiplier {
        let profile = Arc::new(BumpProfile::new(4.0 / s));
        KineticMultiplier::new(profile, s, &BallRule::default()).unwrap()
    }

    #[test]
    fn theta_hat_values() {
        assert_eq!(theta_hat([0.0; 3], 1.0), 1.0);
        assert!(theta_hat([2.0 * PI, 0.0, 0.0], 1.0).abs() < 1e-15);
        assert!(theta_hat([PI, 0.0, 0.0], 2.0).abs() < 1e-15);
        let v = theta_hat([1.0, 2.0, 3.0], 1.0);
        let e = (0.5f64.sin() / 0.5) * (1f64.sin()) * (1.5f64.sin() / 1.5);
        assert!((v - e).abs() < 1e-15);
    }

    #[test]
    fn vanishes_at_origin() {
        let f = multiplier(0.05);
        let t = f.terms([0.0; 3]);
        assert!(t.constant >= 0.0);
        assert!(f.zero_cancellation() < 1e-8);
        assert!((t.constant - f.k_chi_integral()).abs() < 1e-12 * t.largest());
        let g = f.gradient_at_zero(2e-3);
        assert!(g.iter().all(|x| x.abs() < 1e-6), "{g:?}");
    }

    #[test]
    fn scaling_in_ell() {
        let f = multiplier(0.05);
        let p = [0.7, -0.2, 1.1];
        assert_eq!(f.eval(p, 3.0), f.terms([3.0 * 0.7, 3.0 * -0.2, 3.0 * 1.1]).value);
    }

    #[test]
    fn nonnegative_on_rays() {
        let f = multiplier(0.05);
        for p in PGrid::Rays(12).points(40.0) {
            let v = f.terms(p).value;
            let p2 = norm(p).powi(2);
            assert!(v >= -1e-8 * (1.0 + p2), "F({p:?}) = {v}");
        }
    }

    #[test]
    fn ball_rule_is_converged() {
        let profile = Arc::new(BumpProfile::new(80.0));
        let a = KineticMultiplier::new(profile.clone(), 0.05, &BallRule::default()).unwrap();
        let b = KineticMultiplier::new(profile, 0.05, &BallRule::default().refined()).unwrap();
        for p in [[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [10.0, 10.0, 0.0], [20.0, 0.0, 0.0], [11.0, 12.0, 13.0]] {
            let (x, y) = (a.terms(p), b.terms(p));
            assert!((x.value - y.value).abs() < 1e-9 * x.largest().max(1.0), "{p:?}: {x:?} {y:?}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let profile = Arc::new(BumpProfile::new(10.0));
        let rule = BallRule {
            panel_width: 0.01,
            ..BallRule::default()
        };
        assert!(matches!(
            KineticMultiplier::new(profile, 0.05, &rule),
            Err(Error::QuadratureBudgetExceeded(_))
        ));
    }

    #[test]
    fn quav_beta_is_below_one() {
        let beta = quav_beta_search().unwrap();
        assert!(beta > 0.9 && beta < 1.0, "{beta}");
        // the first zero of θ̂ on an axis caps β
        let p2 = 4.0 * PI * PI;
        let cap = 0.5 * (-p2 + (p2 * p2 + 4.0 * p2).sqrt());
        assert!(beta <= cap + 1e-12);
    }

    #[test]
    fn pgrid_parsing() {
        assert_eq!("axis:64".parse::<PGrid>().unwrap(), PGrid::Axis(64));
        assert_eq!("rays:3".parse::<PGrid>().unwrap().points(1.0).len(), 9);
        assert!("axis".parse::<PGrid>().is_err());
        assert!("cube:4".parse::<PGrid>().is_err());
    }
}
