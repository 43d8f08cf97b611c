//! C ABI over `bosegas`.
//!
//! Every fallible function returns a [`BosegasStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`bosegas_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bosegas::bogoliubov::{bog_bound, fock_oracle, lhy_coefficient, Complex, FockOracleSpec};
use bosegas::energy::{box_lower_bound, grand_canonical_assembly, EnergyConfig};
use bosegas::numerics::Tolerance;
use bosegas::scattering::{
    default_grid, scattering_length_ode, scattering_length_variational, scattering_solution,
    ScatteringSolution,
};
use bosegas::{Error, RadialPotential};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BosegasStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidPotential = 3,
    NonConvergent = 4,
    RegimeViolation = 5,
    HardCoreUnsupported = 6,
    NotFound = 7,
    Numerical = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for BosegasStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::InvalidInterval { .. }
            | Error::InvalidCoefficients { .. }
            | Error::Config(_) => {
                BosegasStatus::InvalidArgument
            }
            Error::InvalidPotential(_) => BosegasStatus::InvalidPotential,
            Error::NonConvergent { .. }
            | Error::NoConvergence { .. }
            | Error::StepTooCoarse { .. }
            | Error::MeshTooCoarse { .. }
            | Error::TruncationNotConverged { .. }
            | Error::QuadratureBudgetExceeded(_) => BosegasStatus::NonConvergent,
            Error::RegimeViolation(_) | Error::RangeTooLarge { .. } => BosegasStatus::RegimeViolation,
            Error::HardCoreUnsupported => BosegasStatus::HardCoreUnsupported,
            Error::NotFound(_) => BosegasStatus::NotFound,
            Error::Io(_) => BosegasStatus::Io,
            _ => BosegasStatus::Numerical,
        }
    }
}

/// Opaque radial potential.
pub struct BosegasPotential(RadialPotential);

/// Opaque scattering solution.
pub struct BosegasScattering(ScatteringSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> BosegasStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BosegasStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BosegasStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            BosegasStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            BosegasStatus::Panic
        }
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn new_potential(
    out: *mut *mut BosegasPotential,
    build: impl FnOnce() -> Result<RadialPotential, Failure>,
) -> BosegasStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let v = build()?;
        out.write(Box::into_raw(Box::new(BosegasPotential(v))));
        Ok(())
    })
}

/// Message of the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn bosegas_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bosegas_potential_square_well(
    height: f64,
    range: f64,
    out: *mut *mut BosegasPotential,
) -> BosegasStatus {
    new_potential(out, || Ok(RadialPotential::square_well(height, range)?))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bosegas_potential_hard_core(
    radius: f64,
    out: *mut *mut BosegasPotential,
) -> BosegasStatus {
    new_potential(out, || Ok(RadialPotential::hard_core(radius)?))
}

/// Piecewise-constant potential with `n_values + 1` breakpoints.
///
/// # Safety
/// `breakpoints` and `values` must point to arrays of the given lengths.
#[no_mangle]
pub unsafe extern "C" fn bosegas_potential_piecewise_constant(
    breakpoints: *const f64,
    n_breakpoints: usize,
    values: *const f64,
    n_values: usize,
    out: *mut *mut BosegasPotential,
) -> BosegasStatus {
    new_potential(out, || {
        let b = slice(breakpoints, n_breakpoints, "breakpoints")?.to_vec();
        let v = slice(values, n_values, "values")?.to_vec();
        Ok(RadialPotential::piecewise_constant(b, v)?)
    })
}

/// Parses a potential file (TOML source text, NUL-terminated UTF-8).
///
/// # Safety
/// `source` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bosegas_potential_from_toml(
    source: *const c_char,
    out: *mut *mut BosegasPotential,
) -> BosegasStatus {
    new_potential(out, || {
        if source.is_null() {
            return Err(Failure::Null("source"));
        }
        let text = CStr::from_ptr(source).to_string_lossy();
        Ok(RadialPotential::from_toml_str(&text)?)
    })
}

/// # Safety
/// `v` must be NULL or a handle from a constructor, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn bosegas_potential_free(v: *mut BosegasPotential) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// `v` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_potential_range(
    v: *const BosegasPotential,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| put(out, get(v, "potential")?.0.range()))
}

/// Scattering length from the zero-energy ODE at default tolerances.
///
/// # Safety
/// `v` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_length(
    v: *const BosegasPotential,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| {
        let a = scattering_length_ode(&get(v, "potential")?.0, &Tolerance::default())?;
        put(out, a)
    })
}

/// Scattering length from the variational minimum on `|x| ≤ r_tilde`.
///
/// # Safety
/// `v` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_length_variational(
    v: *const BosegasPotential,
    r_tilde: f64,
    elements: usize,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| {
        let r = scattering_length_variational(&get(v, "potential")?.0, r_tilde, elements)?;
        put(out, r.a)
    })
}

/// # Safety
/// `v` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_solve(
    v: *const BosegasPotential,
    out: *mut *mut BosegasScattering,
) -> BosegasStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let v = &get(v, "potential")?.0;
        let sol = scattering_solution(v, &default_grid(v)?, &Tolerance::default())?;
        out.write(Box::into_raw(Box::new(BosegasScattering(sol))));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`bosegas_scattering_solve`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_free(s: *mut BosegasScattering) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_a(
    s: *const BosegasScattering,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| put(out, get(s, "scattering")?.0.a()))
}

/// `ĝ(k)`.
///
/// # Safety
/// `s` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_g_hat(
    s: *const BosegasScattering,
    k: f64,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| put(out, get(s, "scattering")?.0.g_hat(k)))
}

/// `ω̂(k)`.
///
/// # Safety
/// `s` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_scattering_omega_hat(
    s: *const BosegasScattering,
    k: f64,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| put(out, get(s, "scattering")?.0.omega_hat(k)))
}

/// `128/(15√π)` from the Bogoliubov integral.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_lhy_coefficient(out: *mut f64) -> BosegasStatus {
    guard(|| put(out, lhy_coefficient(&Tolerance::relative(1e-12))?))
}

/// Two-mode Bogoliubov lower bound.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_bog_bound(
    a: f64,
    b: f64,
    kappa_re: f64,
    kappa_im: f64,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| put(out, bog_bound(a, b, Complex::new(kappa_re, kappa_im), 2.0)?))
}

/// Ground energy of the truncated two-mode Hamiltonian.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_fock_oracle(
    a: f64,
    b: f64,
    kappa_re: f64,
    kappa_im: f64,
    n_max: usize,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| {
        let r = fock_oracle(&FockOracleSpec {
            a,
            b,
            kappa: Complex::new(kappa_re, kappa_im),
            n_max,
        })?;
        put(out, r.value)
    })
}

/// Grand-canonical lower bound `4πρ̃²a(1 − C(√(ρ̃a³) + R²aρ̃))`.
///
/// # Safety
/// `v` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_energy_grand_canonical(
    v: *const BosegasPotential,
    rho_tilde: f64,
    c: f64,
    out: *mut f64,
) -> BosegasStatus {
    guard(|| {
        let r = grand_canonical_assembly(&get(v, "potential")?.0, rho_tilde, c, &Tolerance::default())?;
        put(out, r.total)
    })
}

/// Box lower bound as a JSON document; free it with [`bosegas_string_free`].
///
/// # Safety
/// `v` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bosegas_energy_box_json(
    v: *const BosegasPotential,
    rho: f64,
    rho_mu: f64,
    c: f64,
    out: *mut *mut c_char,
) -> BosegasStatus {
    guard(|| {
        let cfg = EnergyConfig {
            c,
            ..EnergyConfig::default()
        };
        let report = box_lower_bound(&get(v, "potential")?.0, rho, rho_mu, &cfg)?;
        let text = CString::new(report.to_json()).expect("JSON has no NUL bytes");
        put(out, text.into_raw())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn bosegas_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
