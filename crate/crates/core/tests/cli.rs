use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bosegas::table::parse_table;

fn bosegas(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosegas"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write_well(dir: &Path) {
    fs::write(
        dir.join("well.toml"),
        "kind = \"square_well\"\n\n[params]\nheight = 8.0\nrange = 1.0\n",
    )
    .unwrap();
}

#[test]
fn scatter_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_well(dir.path());
    let args = ["scatter", "--potential", "well.toml", "--rtilde", "2", "--out", "a.csv"];
    assert_eq!(bosegas(&args, dir.path()).status.code(), Some(0));
    let first = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(bosegas(&args, dir.path()).status.code(), Some(0));
    assert_eq!(first, fs::read(dir.path().join("a.csv")).unwrap());

    let (header, table) = parse_table(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(header.seed, bosegas::verify::DEFAULT_SEED);
    assert_eq!(table.rows.len(), 1);
    let exact = 1.0 - 2f64.tanh() / 2.0;
    assert!((table.rows[0][0] - exact).abs() < 1e-9);
    assert!((table.rows[0][1] - exact).abs() < 1e-6);
}

#[test]
fn corrupted_potential_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "kind = \"square_well\"\n[params]\nheight = \n").unwrap();
    let out = bosegas(&["scatter", "--potential", "bad.toml", "--out", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
    let out = bosegas(&["scatter", "--potential", "missing.toml", "--out", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_well(dir.path());
    fs::write(dir.path().join("run.toml"), "seed = 1\nspeed = 2\n").unwrap();
    let out = bosegas(
        &["--config", "run.toml", "scatter", "--potential", "well.toml", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn energy_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("hc.toml"), "kind = \"hard_core\"\n[params]\nradius = 1.0\n").unwrap();
    let out = bosegas(
        &["energy", "--potential", "hc.toml", "--rho", "1e-6", "--C", "1.0", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    for key in ["leading", "quadratic_gap", "lhy_term", "budget", "constants_used", "run"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
    for entry in doc["budget"].as_array().unwrap() {
        for key in ["label", "value", "law", "source"] {
            assert!(entry.get(key).is_some());
        }
    }
    let total = doc["total"].as_f64().unwrap();
    let expected = 4.0 * std::f64::consts::PI * 1e-12 * (1.0 - (1e-3 + 1e-6));
    assert!((total - expected).abs() < 1e-12 * expected);
}

#[test]
fn box_mode_regime_violation_fails() {
    let dir = tempfile::tempdir().unwrap();
    write_well(dir.path());
    let out = bosegas(
        &["energy", "--potential", "well.toml", "--rho", "1e-6", "--rho-mu", "1e-8"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("regime"));
}

#[test]
fn bog_and_lhy() {
    let dir = tempfile::tempdir().unwrap();
    write_well(dir.path());
    let out = bosegas(&["bog", "--A", "1", "--B", "-0.5", "--kappa", "0.1", "--nmax", "30"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["dominates"], true);
    let out = bosegas(&["bog", "--A", "1", "--B", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = bosegas(
        &["lhy", "--potential", "well.toml", "--rho-a3", "1e-6,1e-8", "--out", "l.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let (_, t) = parse_table(&fs::read_to_string(dir.path().join("l.csv")).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert!(t.rows.iter().all(|r| (r[4] - 1.0).abs() < 0.2));
}

#[test]
fn localize_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = bosegas(
        &["localize", "--s", "0.1", "--ell", "2", "--pgrid", "axis:4", "--out", "f.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, t) = parse_table(&fs::read_to_string(dir.path().join("f.csv")).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 4);
    assert_eq!(t.columns[4], "F");
    let out = bosegas(&["localize", "--pgrid", "cube:4", "--out", "f.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bosegas(&["verify", "--filter", "square_well", "--out", "v.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(doc["checks"][0]["passed"], true);

    // an unreachable tolerance makes the check fail without aborting the run
    fs::write(
        dir.path().join("strict.toml"),
        "[tolerance]\nrel = 1e-15\nabs = 0.0\nmax_refinements = 1\n",
    )
    .unwrap();
    let out = bosegas(&["--config", "strict.toml", "verify", "--filter", "square_well"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn zero_kinetic_cutoff_keeps_split_checks() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "[kernel]\nc_kin = 0.0\n").unwrap();
    let out = bosegas(&["--config", "c.toml", "verify", "--filter", "coefficient"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
