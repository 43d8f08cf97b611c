//! Zero-energy radial scattering equation `u'' = ½ v u`.
//!
//! The state is `z = u/u'` and `λ = ln u'`, which obey
//! `z' = 1 − ½ v z²`, `λ' = ½ v z` with `z = λ = 0` at the inner boundary.
//! Both stay bounded for stiff potentials (`u` itself grows like `e^{κr}`),
//! and `z(0) = 0` encodes `u(0) = 0` without a singular start.

use crate::error::{Error, Result};
use crate::potential::{RadialPotential, Segment};

use super::{RadialGrid, Tolerance};

const MAX_DOUBLINGS: usize = 14;

/// Dense solution of the radial equation, normalised so that `u(r) = r − a`
/// beyond the range of the potential.
#[derive(Debug, Clone)]
pub struct RadialOdeSolution {
    /// Scattering length `R − z(R)`.
    pub a: f64,
    /// Estimate of the error in `a` (difference between the last two step sizes).
    pub error: f64,
    pub core_radius: f64,
    pub range: f64,
    /// Dense nodes from the inner boundary to the range.
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Index into the potential's segments for each cell `(r[i], r[i+1])`.
    pub cell_segment: Vec<usize>,
    pub steps: usize,
}

struct Run {
    r: Vec<f64>,
    z: Vec<f64>,
    lambda: Vec<f64>,
    cell_segment: Vec<usize>,
}

#[inline]
fn rhs(v: f64, z: f64) -> (f64, f64) {
    (1.0 - 0.5 * v * z * z, 0.5 * v * z)
}

fn integrate(segments: &[(usize, Segment)], knots: &[f64], h: f64) -> Run {
    let mut run = Run {
        r: vec![segments.first().map_or(0.0, |s| s.1.lo)],
        z: vec![0.0],
        lambda: vec![0.0],
        cell_segment: Vec::new(),
    };
    let (mut z, mut lam) = (0.0f64, 0.0f64);
    for &(idx, seg) in segments {
        let mut cuts = vec![seg.lo];
        cuts.extend(knots.iter().copied().filter(|&k| k > seg.lo && k < seg.hi));
        cuts.push(seg.hi);
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            let m = ((len / h).ceil() as usize).max(1);
            let dh = len / m as f64;
            for i in 0..m {
                let r0 = w[0] + dh * i as f64;
                let r1 = if i + 1 == m { w[1] } else { r0 + dh };
                let step = r1 - r0;
                let rm = r0 + 0.5 * step;
                let (v0, vm, v1) = (seg.eval(r0), seg.eval(rm), seg.eval(r1));
                let k1 = rhs(v0, z);
                let k2 = rhs(vm, z + 0.5 * step * k1.0);
                let k3 = rhs(vm, z + 0.5 * step * k2.0);
                let k4 = rhs(v1, z + step * k3.0);
                z += step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                lam += step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                run.r.push(r1);
                run.z.push(z);
                run.lambda.push(lam);
                run.cell_segment.push(idx);
            }
        }
    }
    run
}

/// Solves the zero-energy equation outside the hard core of `v`.
///
/// `grid` nodes inside the range become integration nodes, so the returned
/// profile is available there without interpolation.
pub fn solve_radial_ode(
    v: &RadialPotential,
    grid: Option<&RadialGrid>,
    tol: &Tolerance,
) -> Result<RadialOdeSolution> {
    let core = v.core_radius();
    let range = v.range();
    let segments: Vec<(usize, Segment)> = v
        .segments()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, s)| s.lo >= core)
        .collect();
    if segments.is_empty() {
        // No potential outside the core: u = r − core.
        return Ok(RadialOdeSolution {
            a: core,
            error: 0.0,
            core_radius: core,
            range,
            r: vec![core],
            u: vec![0.0],
            du: vec![1.0],
            cell_segment: Vec::new(),
            steps: 0,
        });
    }
    let knots: Vec<f64> = grid.map_or_else(Vec::new, |g| g.nodes().to_vec());
    let width = range - core;
    let vmax = segments.iter().map(|s| s.1.max_value()).fold(0.0, f64::max);
    let kappa = (0.5 * vmax).sqrt();
    let mut h = (width / 64.0).min(if kappa > 0.0 { 0.25 / kappa } else { f64::INFINITY });
    let mut prev = integrate(&segments, &knots, h);
    let mut steps = prev.r.len() - 1;
    let mut last_err = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS.min(tol.max_refinements.max(1)) {
        h *= 0.5;
        let cur = integrate(&segments, &knots, h);
        steps += cur.r.len() - 1;
        let (zp, lp) = (*prev.z.last().unwrap(), *prev.lambda.last().unwrap());
        let (zc, lc) = (*cur.z.last().unwrap(), *cur.lambda.last().unwrap());
        let a = range - zc;
        let err_a = (zc - zp).abs();
        let err_l = (lc - lp).abs();
        let target_a = tol.abs.max(tol.rel * a.abs()).max(16.0 * f64::EPSILON * range);
        let target_l = tol.rel * (1.0 + lc.abs());
        last_err = err_a;
        if err_a <= target_a && err_l <= target_l {
            return Ok(finish(cur, core, range, err_a, steps));
        }
        prev = cur;
    }
    Err(Error::StepTooCoarse {
        estimate: last_err,
        tolerance: tol.rel,
    })
}

fn finish(
    run: Run,
    core: f64,
    range: f64,
    error: f64,
    steps: usize,
) -> RadialOdeSolution {
    let lam_end = *run.lambda.last().unwrap();
    let du: Vec<f64> = run.lambda.iter().map(|l| (l - lam_end).exp()).collect();
    let u: Vec<f64> = run.z.iter().zip(&du).map(|(z, d)| z * d).collect();
    let a = range - run.z.last().unwrap();
    RadialOdeSolution {
        a,
        error,
        core_radius: core,
        range,
        r: run.r,
        u,
        du,
        cell_segment: run.cell_segment,
        steps,
    }
}

impl RadialOdeSolution {
    /// `(u, u')` at `r` by cubic Hermite interpolation inside the range and
    /// the exact affine form outside.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if r <= self.core_radius {
            return (0.0, 0.0);
        }
        if r >= self.range {
            return (r - self.a, 1.0);
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1) - 1;
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (u0, u1, m0, m1) = (self.u[i], self.u[i + 1], self.du[i], self.du[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * u0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * u1
            + (t3 - t2) * h * m1;
        let du = ((6.0 * t2 - 6.0 * t) * u0 + (3.0 * t2 - 4.0 * t + 1.0) * h * m0
            + (-6.0 * t2 + 6.0 * t) * u1
            + (3.0 * t2 - 2.0 * t) * h * m1)
            / h;
        (u, du)
    }

    /// `u` on the nodes of `grid`.
    pub fn profile_on(&self, grid: &RadialGrid) -> Vec<f64> {
        grid.nodes().iter().map(|&r| self.eval(r).0).collect()
    }
}
