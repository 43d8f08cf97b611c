use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussRule;
use crate::numerics::{solve_radial_ode, RadialGrid, RadialOdeSolution, Tolerance};
use crate::potential::RadialPotential;

const POINTS_PER_CELL: usize = 4;

/// A quadrature node inside the range of the potential, with the profile
/// values there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub r: f64,
    /// Radial weight (without the `4π r²` measure).
    pub w: f64,
    pub v: f64,
    pub omega: f64,
    pub g: f64,
}

/// Which radial profile to transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    G,
    GOmega,
}

/// The scattering solution `ω = 1 − φ` of a finite potential together with
/// `g = v(1 − ω)`.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    potential: RadialPotential,
    ode: RadialOdeSolution,
    grid: RadialGrid,
    omega_on_grid: Vec<f64>,
    g_on_grid: Vec<f64>,
    points: Vec<QuadPoint>,
    g_integral: f64,
    g_omega_integral: f64,
}

impl ScatteringSolution {
    pub fn new(v: &RadialPotential, grid: &RadialGrid, tol: &Tolerance) -> Result<Self> {
        if v.has_hard_core() {
            return Err(Error::HardCoreUnsupported);
        }
        let ode = solve_radial_ode(v, Some(grid), tol)?;
        let gauss = GaussRule::new(POINTS_PER_CELL);
        let mut points = Vec::with_capacity(POINTS_PER_CELL * ode.cell_segment.len());
        let mut sol = ScatteringSolution {
            potential: v.clone(),
            ode,
            grid: grid.clone(),
            omega_on_grid: Vec::new(),
            g_on_grid: Vec::new(),
            points: Vec::new(),
            g_integral: 0.0,
            g_omega_integral: 0.0,
        };
        for (i, &seg) in sol.ode.cell_segment.iter().enumerate() {
            let (lo, hi) = (sol.ode.r[i], sol.ode.r[i + 1]);
            let segment = v.segments()[seg];
            for (r, w) in gauss.on(lo, hi) {
                let phi = sol.phi(r);
                let vv = segment.eval(r);
                points.push(QuadPoint {
                    r,
                    w,
                    v: vv,
                    omega: 1.0 - phi,
                    g: vv * phi,
                });
            }
        }
        let four_pi = 4.0 * PI;
        sol.g_integral = four_pi * points.iter().map(|p| p.w * p.r * p.r * p.g).sum::<f64>();
        sol.g_omega_integral =
            four_pi * points.iter().map(|p| p.w * p.r * p.r * p.g * p.omega).sum::<f64>();
        sol.points = points;
        sol.omega_on_grid = grid.nodes().iter().map(|&r| sol.omega(r)).collect();
        sol.g_on_grid = grid.nodes().iter().map(|&r| sol.g(r)).collect();
        Ok(sol)
    }

    pub fn a(&self) -> f64 {
        self.ode.a
    }

    /// Error estimate of the ODE solver for `a`.
    pub fn a_error(&self) -> f64 {
        self.ode.error
    }

    pub fn range(&self) -> f64 {
        self.potential.range()
    }

    pub fn potential(&self) -> &RadialPotential {
        &self.potential
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn omega_on_grid(&self) -> &[f64] {
        &self.omega_on_grid
    }

    pub fn g_on_grid(&self) -> &[f64] {
        &self.g_on_grid
    }

    /// Quadrature nodes covering `[0, R]`, ordered by radius.
    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    /// `∫ g dx`.
    pub fn g_integral(&self) -> f64 {
        self.g_integral
    }

    /// `∫ gω dx`.
    pub fn g_omega_integral(&self) -> f64 {
        self.g_omega_integral
    }

    /// Dense integration nodes of the underlying ODE solution.
    pub fn dense_nodes(&self) -> &[f64] {
        &self.ode.r
    }

    /// `φ = u/r`, with `u` normalised to `r − a` outside the range.
    pub fn phi(&self, r: f64) -> f64 {
        let range = self.range();
        if r >= range {
            return if self.a() == 0.0 { 1.0 } else { 1.0 - self.a() / r };
        }
        let nodes = &self.ode.r;
        if r < nodes[1] {
            // First cell: divide the Hermite form by r analytically (u(0) = 0).
            let h = nodes[1];
            let t = r / h;
            let (m0, u1, m1) = (self.ode.du[0], self.ode.u[1], self.ode.du[1]);
            return m0 * (t - 1.0) * (t - 1.0) + u1 / h * (3.0 * t - 2.0 * t * t) + m1 * (t * t - t);
        }
        self.ode.eval(r).0 / r
    }

    pub fn omega(&self, r: f64) -> f64 {
        if r >= self.range() {
            return if self.a() == 0.0 { 0.0 } else { self.a() / r };
        }
        1.0 - self.phi(r)
    }

    /// `g(r) = v(r)(1 − ω(r))`, left-continuous at break points.
    pub fn g(&self, r: f64) -> f64 {
        let v = self.potential.eval(r);
        if v == 0.0 {
            0.0
        } else {
            v * self.phi(r)
        }
    }

    /// Radial Fourier transform `(4π/k)∫ r f(r) sin(kr) dr` of `g` or `gω`.
    pub fn fourier(&self, which: Profile, k: f64) -> f64 {
        let four_pi = 4.0 * PI;
        four_pi
            * self
                .points
                .iter()
                .map(|p| {
                    let f = match which {
                        Profile::G => p.g,
                        Profile::GOmega => p.g * p.omega,
                    };
                    p.w * p.r * p.r * f * sinc(k * p.r)
                })
                .sum::<f64>()
    }

    pub fn g_hat(&self, k: f64) -> f64 {
        self.fourier(Profile::G, k)
    }

    /// `ω̂(k)` for `k > 0`: the compact part by quadrature and the exterior
    /// tail `a/r` in closed form (as an oscillatory limit).
    pub fn omega_hat(&self, k: f64) -> f64 {
        assert!(k > 0.0, "ω is not integrable; its transform exists only for k > 0");
        let four_pi = 4.0 * PI;
        let inner: f64 = self
            .points
            .iter()
            .map(|p| p.w * p.r * p.r * p.omega * sinc(k * p.r))
            .sum();
        four_pi * (inner + self.a() * (k * self.range()).cos() / (k * k))
    }
}

#[inline]
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
