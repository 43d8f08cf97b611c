//! Piecewise-linear minimisation of the radial scattering functional.
//!
//! With `u = rφ`, the functional `∫|∇φ|² + ½v|φ|²` over `|x| ≤ R̃` with
//! `φ(R̃) = 1` equals `4π[∫(u'² + ½vu²)dr − R̃]`, minimised subject to
//! `u(r_core) = 0`, `u(R̃) = R̃`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::RadialPotential;

use super::quadrature::GaussRule;

/// Outcome of the two-mesh variational computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalResult {
    /// Richardson-extrapolated scattering length.
    pub a: f64,
    /// Extrapolated minimum `4πa/(1 − a/R̃)`.
    pub minimum: f64,
    pub minimum_coarse: f64,
    pub minimum_fine: f64,
    pub elements_fine: usize,
}

struct Element {
    lo: f64,
    hi: f64,
    segment: Option<usize>,
}

fn mesh(v: &RadialPotential, r_tilde: f64, elements: usize) -> Vec<Element> {
    let core = v.core_radius();
    let active: Vec<(usize, f64, f64)> = v
        .segments()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.lo >= core)
        .map(|(i, s)| (i, s.lo, s.hi))
        .collect();
    let width: f64 = active.iter().map(|s| s.2 - s.1).sum();
    let mut out = Vec::new();
    for (i, lo, hi) in active {
        let n = ((elements as f64 * (hi - lo) / width).round() as usize).max(1);
        for k in 0..n {
            let a = lo + (hi - lo) * k as f64 / n as f64;
            let b = if k + 1 == n { hi } else { lo + (hi - lo) * (k + 1) as f64 / n as f64 };
            out.push(Element {
                lo: a,
                hi: b,
                segment: Some(i),
            });
        }
    }
    // The minimiser is affine where v = 0, so one element covers the exterior.
    let start = out.last().map_or(core, |e| e.hi);
    if r_tilde > start {
        out.push(Element {
            lo: start,
            hi: r_tilde,
            segment: None,
        });
    }
    out
}

fn refine(elements: Vec<Element>) -> Vec<Element> {
    let mut out = Vec::with_capacity(2 * elements.len());
    for e in elements {
        if e.segment.is_none() {
            out.push(e);
            continue;
        }
        let m = 0.5 * (e.lo + e.hi);
        out.push(Element {
            lo: e.lo,
            hi: m,
            segment: e.segment,
        });
        out.push(Element {
            lo: m,
            hi: e.hi,
            segment: e.segment,
        });
    }
    out
}

fn minimum_on(v: &RadialPotential, r_tilde: f64, elems: &[Element]) -> Result<f64> {
    let n = elems.len();
    let gauss = GaussRule::new(3);
    // Element matrices [[k00, k01], [k01, k11]].
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n];
    for (i, e) in elems.iter().enumerate() {
        let h = e.hi - e.lo;
        let mut k00 = 1.0 / h;
        let mut k01 = -1.0 / h;
        let mut k11 = 1.0 / h;
        if let Some(si) = e.segment {
            let seg = &v.segments()[si];
            for (x, w) in gauss.on(e.lo, e.hi) {
                let n1 = (x - e.lo) / h;
                let n0 = 1.0 - n1;
                let q = 0.5 * seg.eval(x) * w;
                k00 += q * n0 * n0;
                k01 += q * n0 * n1;
                k11 += q * n1 * n1;
            }
        }
        diag[i] += k00;
        diag[i + 1] += k11;
        off[i] = k01;
    }
    // Unknowns 1..n-1; u_0 = 0, u_n = R̃.
    let mut u = vec![0.0; n + 1];
    u[n] = r_tilde;
    if n >= 2 {
        let m = n - 1;
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        for k in 0..m {
            let row = k + 1;
            let rhs = if row == n - 1 { -off[row] * r_tilde } else { 0.0 };
            let sub = if k > 0 { off[row - 1] } else { 0.0 };
            let pivot = diag[row] - sub * if k > 0 { c[k - 1] } else { 0.0 };
            if !(pivot > 0.0) {
                return Err(Error::SingularSystem { row, pivot });
            }
            c[k] = if row < n - 1 { off[row] / pivot } else { 0.0 };
            d[k] = (rhs - sub * if k > 0 { d[k - 1] } else { 0.0 }) / pivot;
        }
        for k in (0..m).rev() {
            let row = k + 1;
            u[row] = d[k] - if k + 1 < m { c[k] * u[row + 1] } else { 0.0 };
        }
    }
    let mut energy = 0.0;
    for i in 0..n {
        energy += diag_part(&diag, &off, &u, i);
    }
    energy += diag[n] * u[n] * u[n];
    Ok(4.0 * PI * (energy - r_tilde))
}

#[inline]
fn diag_part(diag: &[f64], off: &[f64], u: &[f64], i: usize) -> f64 {
    diag[i] * u[i] * u[i] + 2.0 * off[i] * u[i] * u[i + 1]
}

/// Minimum of the discrete functional on a mesh with about `elements`
/// elements inside the range of `v`.
pub fn minimize_scattering_functional(
    v: &RadialPotential,
    r_tilde: f64,
    elements: usize,
) -> Result<f64> {
    check_radius(v, r_tilde)?;
    minimum_on(v, r_tilde, &mesh(v, r_tilde, elements.max(1)))
}

fn check_radius(v: &RadialPotential, r_tilde: f64) -> Result<()> {
    if !(r_tilde.is_finite() && r_tilde > v.range() && r_tilde > v.core_radius()) {
        return Err(Error::InvalidArgument(format!(
            "outer radius {r_tilde} must exceed the range {}",
            v.range()
        )));
    }
    Ok(())
}

fn length_from_minimum(m: f64, r_tilde: f64) -> f64 {
    m / (4.0 * PI + m / r_tilde)
}

/// Scattering length from the variational characterisation, extrapolated
/// from meshes with `elements` and `2 * elements` elements.
///
/// Fails with `MeshTooCoarse` if the two meshes give lengths differing by
/// more than `mesh_tol` relative.
pub fn scattering_length_variational(
    v: &RadialPotential,
    r_tilde: f64,
    elements: usize,
    mesh_tol: f64,
) -> Result<VariationalResult> {
    check_radius(v, r_tilde)?;
    let coarse = mesh(v, r_tilde, elements.max(1));
    let m_coarse = minimum_on(v, r_tilde, &coarse)?;
    let fine = refine(coarse);
    let elements_fine = fine.len();
    let m_fine = minimum_on(v, r_tilde, &fine)?;
    let a_coarse = length_from_minimum(m_coarse, r_tilde);
    let a_fine = length_from_minimum(m_fine, r_tilde);
    let scale = a_fine.abs().max(f64::MIN_POSITIVE);
    let discrepancy = (a_coarse - a_fine).abs() / scale;
    if a_fine != 0.0 && discrepancy > mesh_tol {
        return Err(Error::MeshTooCoarse { discrepancy });
    }
    let minimum = (4.0 * m_fine - m_coarse) / 3.0;
    Ok(VariationalResult {
        a: length_from_minimum(minimum, r_tilde),
        minimum,
        minimum_coarse: m_coarse,
        minimum_fine: m_fine,
        elements_fine,
    })
}
