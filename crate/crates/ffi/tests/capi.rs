use std::ffi::{CStr, CString};
use std::ptr;

use bosegas_ffi::*;

fn last_error() -> String {
    let p = bosegas_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn square_well_round_trip() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(bosegas_potential_square_well(8.0, 1.0, &mut v), BosegasStatus::Ok);
        assert!(bosegas_last_error().is_null());
        let mut a = 0.0;
        assert_eq!(bosegas_scattering_length(v, &mut a), BosegasStatus::Ok);
        assert!((a - (1.0 - 2f64.tanh() / 2.0)).abs() < 1e-9);
        let mut av = 0.0;
        assert_eq!(bosegas_scattering_length_variational(v, 2.0, 64, &mut av), BosegasStatus::Ok);
        assert!((av - a).abs() < 1e-6);

        let mut s = ptr::null_mut();
        assert_eq!(bosegas_scattering_solve(v, &mut s), BosegasStatus::Ok);
        let (mut g0, mut sa) = (0.0, 0.0);
        assert_eq!(bosegas_scattering_g_hat(s, 0.0, &mut g0), BosegasStatus::Ok);
        assert_eq!(bosegas_scattering_a(s, &mut sa), BosegasStatus::Ok);
        assert!((g0 / (8.0 * std::f64::consts::PI) - sa).abs() < 1e-8);
        let (mut w, mut g) = (0.0, 0.0);
        bosegas_scattering_omega_hat(s, 0.7, &mut w);
        bosegas_scattering_g_hat(s, 0.7, &mut g);
        assert!((2.0 * 0.49 * w - g).abs() < 1e-8 * g0);
        bosegas_scattering_free(s);
        bosegas_potential_free(v);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(bosegas_potential_square_well(-1.0, 1.0, &mut v), BosegasStatus::InvalidPotential);
        assert!(v.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(bosegas_potential_square_well(1.0, 1.0, ptr::null_mut()), BosegasStatus::NullPointer);
        let mut a = 0.0;
        assert_eq!(bosegas_scattering_length(ptr::null(), &mut a), BosegasStatus::NullPointer);
        assert!(last_error().contains("potential"));

        let src = CString::new("kind = \"square_well\"\n[params]\nheight = \n").unwrap();
        assert_eq!(bosegas_potential_from_toml(src.as_ptr(), &mut v), BosegasStatus::InvalidPotential);
        assert!(last_error().contains("line 3"));

        let mut hc = ptr::null_mut();
        assert_eq!(bosegas_potential_hard_core(1.0, &mut hc), BosegasStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(bosegas_scattering_solve(hc, &mut s), BosegasStatus::HardCoreUnsupported);
        assert_eq!(bosegas_scattering_length(hc, &mut a), BosegasStatus::Ok);
        assert_eq!(a, 1.0);
        let mut e = 0.0;
        assert_eq!(bosegas_energy_grand_canonical(hc, 1e-6, 1.0, &mut e), BosegasStatus::Ok);
        let expected = 4.0 * std::f64::consts::PI * 1e-12 * (1.0 - (1e-3 + 1e-6));
        assert!((e - expected).abs() < 1e-12 * expected);
        bosegas_potential_free(hc);
        bosegas_potential_free(ptr::null_mut());
    }
}

#[test]
fn piecewise_and_energy_json() {
    unsafe {
        let b = [0.0, 0.5, 1.0];
        let vals = [10.0, 2.0];
        let mut v = ptr::null_mut();
        assert_eq!(
            bosegas_potential_piecewise_constant(b.as_ptr(), 3, vals.as_ptr(), 2, &mut v),
            BosegasStatus::Ok
        );
        let mut r = 0.0;
        bosegas_potential_range(v, &mut r);
        assert_eq!(r, 1.0);
        assert_eq!(
            bosegas_potential_piecewise_constant(ptr::null(), 3, vals.as_ptr(), 2, &mut v),
            BosegasStatus::NullPointer
        );
        let mut a = 0.0;
        bosegas_scattering_length(v, &mut a);
        let rho = 1e-8 / a.powi(3);
        let mut json = ptr::null_mut();
        assert_eq!(bosegas_energy_box_json(v, rho, rho, 1.0, &mut json), BosegasStatus::Ok);
        let doc: serde_json::Value =
            serde_json::from_str(&CStr::from_ptr(json).to_string_lossy()).unwrap();
        assert_eq!(doc["quadratic_gap"], 0.0);
        bosegas_string_free(json);
        assert_eq!(
            bosegas_energy_box_json(v, 30.0 * rho, rho, 1.0, &mut json),
            BosegasStatus::RegimeViolation
        );
        bosegas_potential_free(v);
    }
}

#[test]
fn bogoliubov_entry_points() {
    unsafe {
        let (mut bound, mut oracle) = (0.0, 0.0);
        assert_eq!(bosegas_bog_bound(1.0, 0.5, 0.1, 0.05, &mut bound), BosegasStatus::Ok);
        assert_eq!(bosegas_fock_oracle(1.0, 0.5, 0.1, 0.05, 30, &mut oracle), BosegasStatus::Ok);
        assert!(oracle >= bound - 1e-6);
        assert_eq!(bosegas_bog_bound(1.0, 2.0, 0.0, 0.0, &mut bound), BosegasStatus::InvalidArgument);
        let mut c = 0.0;
        assert_eq!(bosegas_lhy_coefficient(&mut c), BosegasStatus::Ok);
        assert!((c - 128.0 / (15.0 * std::f64::consts::PI.sqrt())).abs() < 1e-8);
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        let mut v = ptr::null_mut();
        bosegas_potential_square_well(-1.0, 1.0, &mut v);
    }
    let other = std::thread::spawn(|| bosegas_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!bosegas_last_error().is_null());
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bosegas.h")).unwrap();
    for name in [
        "typedef struct BosegasPotential BosegasPotential",
        "BOSEGAS_STATUS_OK = 0",
        "bosegas_last_error",
        "bosegas_scattering_solve",
        "bosegas_energy_box_json",
        "bosegas_string_free",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(
        &main,
        "#include \"bosegas.h\"\nint main(void) {\n  BosegasPotential *v = 0;\n  double a;\n  \
         if (bosegas_potential_square_well(8.0, 1.0, &v) != BOSEGAS_STATUS_OK) return 1;\n  \
         bosegas_scattering_length(v, &a);\n  bosegas_potential_free(v);\n  return 0;\n}\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&main)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
