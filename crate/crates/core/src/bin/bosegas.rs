use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use nalgebra::Complex;
use serde_json::{json, Value};

use bosegas::bogoliubov::{
    bog_bound, bogoliubov_correction_density, fock_oracle, lhy_energy_density, FockOracleSpec,
};
use bosegas::config::RunConfig;
use bosegas::energy::{
    box_lower_bound, grand_canonical_assembly, grand_canonical_with_tail, EnergyConfig, EnergyReport,
};
use bosegas::localization::{BallRule, BumpProfile, KineticMultiplier, PGrid};
use bosegas::numerics::RadialGrid;
use bosegas::scattering::{scattering_length_ode, scattering_length_variational, scattering_solution};
use bosegas::table::{emit_table, Table, TableHeader};
use bosegas::verify::{run_checks, VerifyConfig};
use bosegas::{Error, RadialPotential};

#[derive(Parser, Debug)]
#[command(name = "bosegas", version, about = "Scattering, localisation and Bogoliubov computations for dilute Bose gases")]
struct Cli {
    /// TOML run configuration (seed, tolerance, kernel, cells).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scattering length by both routes, optionally with the sampled profile.
    Scatter(ScatterArgs),
    /// Samples the localisation multiplier F(p).
    Localize(LocalizeArgs),
    /// Two-mode Bogoliubov bound against the truncated Fock oracle.
    Bog(BogArgs),
    /// Bogoliubov correction density against the LHY density.
    Lhy(LhyArgs),
    /// Energy lower bound with itemised budget (JSON).
    Energy(EnergyArgs),
    /// Runs the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ScatterArgs {
    #[arg(long)]
    potential: PathBuf,
    /// Outer radius of the variational problem.
    #[arg(long)]
    rtilde: Option<f64>,
    #[arg(long, default_value_t = 64)]
    elements: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write r, φ, ω, g on the radial grid.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LocalizeArgs {
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
    /// `axis:N`, `diagonal:N` or `rays:N`.
    #[arg(long, default_value = "axis:64")]
    pgrid: String,
    /// Largest |ℓp| sampled (defaults to 2/s).
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BogArgs {
    #[arg(long = "A", alias = "a")]
    a: f64,
    #[arg(long = "B", alias = "b", allow_hyphen_values = true)]
    b: f64,
    /// Real part of κ.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa_im: f64,
    #[arg(long, default_value_t = 40)]
    nmax: usize,
}

#[derive(Args, Debug)]
struct LhyArgs {
    #[arg(long)]
    potential: PathBuf,
    /// Comma-separated values of ρa³.
    #[arg(long, value_delimiter = ',', required = true)]
    rho_a3: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EnergyArgs {
    #[arg(long)]
    potential: PathBuf,
    /// Density ρ̃ (grand-canonical mode) or ρ (box mode).
    #[arg(long)]
    rho: f64,
    /// Box mode: the chemical-potential density ρ_μ.
    #[arg(long)]
    rho_mu: Option<f64>,
    /// Split radius for potentials with a tail (grand-canonical mode).
    #[arg(long)]
    split: Option<f64>,
    #[arg(long = "C", alias = "c", default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Machine-readable pass/fail list.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes of a run, mapped to exit codes.
enum Failure {
    Checks,
    Module(Error),
    Config(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) | Error::InvalidPotential(_) | Error::InvalidArgument(_) => {
                Failure::Config(e)
            }
            other => Failure::Module(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Module(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let header = |run: String| TableHeader {
        config_hash: config.hash(&run),
        seed: config.seed,
    };
    match cli.command {
        Command::Scatter(args) => scatter(&config, &args, header(format!("{args:?}"))),
        Command::Localize(args) => localize(&config, &args, header(format!("{args:?}"))),
        Command::Bog(args) => bog(&args),
        Command::Lhy(args) => lhy(&config, &args, header(format!("{args:?}"))),
        Command::Energy(args) => energy(&config, &args, header(format!("{args:?}"))),
        Command::Verify(args) => verify(&config, &args),
    }
}

fn load_potential(path: &Path) -> Result<RadialPotential, Failure> {
    RadialPotential::from_file(path).map_err(|e| match e {
        Error::InvalidPotential(m) => Failure::Config(Error::Config(m)),
        other => other.into(),
    })
}

fn profile_grid(v: &RadialPotential, cells: usize) -> Result<RadialGrid, Error> {
    let r = if v.range() > 0.0 { v.range() } else { 1.0 };
    RadialGrid::uniform(0.0, 2.0 * r, cells)
}

fn scatter(config: &RunConfig, args: &ScatterArgs, header: TableHeader) -> Result<(), Failure> {
    let v = load_potential(&args.potential)?;
    let tol = &config.tolerance;
    let a = scattering_length_ode(&v, tol)?;
    let (a_var, r_tilde) = match args.rtilde {
        Some(rt) => (scattering_length_variational(&v, rt, args.elements)?.a, rt),
        None => (f64::NAN, f64::NAN),
    };
    let sol = if v.has_hard_core() {
        None
    } else {
        Some(scattering_solution(&v, &profile_grid(&v, config.cells)?, tol)?)
    };
    let g_identity = sol.as_ref().map_or(f64::NAN, |s| s.g_integral() / (8.0 * std::f64::consts::PI));
    let mut table = Table::new(["a_ode", "a_variational", "r_tilde", "g_integral_over_8pi", "range"]);
    table.push(vec![a, a_var, r_tilde, g_identity, v.range()]);
    emit_table(&table, &header, &args.out)?;
    if let Some(path) = &args.profile {
        let sol = sol.ok_or(Error::HardCoreUnsupported)?;
        let mut t = Table::new(["r", "phi", "omega", "g"]);
        for &r in sol.grid().nodes() {
            t.push(vec![r, sol.phi(r), sol.omega(r), sol.g(r)]);
        }
        emit_table(&t, &header, path)?;
    }
    println!("a = {a:.16e}");
    Ok(())
}

fn localize(config: &RunConfig, args: &LocalizeArgs, header: TableHeader) -> Result<(), Failure> {
    let s = args.s.unwrap_or(config.kernel.s);
    if !(s > 0.0) || !(args.ell > 0.0) {
        return Err(Error::InvalidArgument(format!("need s > 0 and ell > 0 (got {s}, {})", args.ell)).into());
    }
    let grid: PGrid = args.pgrid.parse()?;
    let p_max = args.p_max.unwrap_or(2.0 / s);
    let profile = Arc::new(BumpProfile::new(p_max.max(4.0 / s)));
    let f = KineticMultiplier::new(profile, s, &BallRule::default())?;
    let mut table = Table::new(["p1", "p2", "p3", "abs_p", "F", "smeared", "cross", "constant"]);
    for q in grid.points(p_max) {
        let p = q.map(|x| x / args.ell);
        let t = f.terms(q);
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        table.push(vec![p[0], p[1], p[2], norm, t.value, t.smeared, t.cross, t.constant]);
    }
    emit_table(&table, &header, &args.out)?;
    println!("F(0) cancellation {:.3e}", f.zero_cancellation());
    Ok(())
}

fn bog(args: &BogArgs) -> Result<(), Failure> {
    let kappa = Complex::new(args.kappa, args.kappa_im);
    let bound = bog_bound(args.a, args.b, kappa, 2.0)?;
    let oracle = fock_oracle(&FockOracleSpec {
        a: args.a,
        b: args.b,
        kappa,
        n_max: args.nmax,
    })?;
    let out = json!({
        "A": args.a,
        "B": args.b,
        "kappa": [args.kappa, args.kappa_im],
        "bog_bound": bound,
        "fock_oracle": oracle.value,
        "fock_oracle_doubled": oracle.doubled,
        "n_max": oracle.n_max,
        "dominates": oracle.value >= bound - 1e-6,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(())
}

fn lhy(config: &RunConfig, args: &LhyArgs, header: TableHeader) -> Result<(), Failure> {
    let v = load_potential(&args.potential)?;
    let tol = &config.tolerance;
    let sol = scattering_solution(&v, &profile_grid(&v, config.cells)?, tol)?;
    let a = sol.a();
    let mut table = Table::new(["rho_a3", "rho", "bogoliubov_density", "lhy_density", "ratio"]);
    for &x in &args.rho_a3 {
        if !(x > 0.0) {
            return Err(Error::InvalidArgument(format!("ρa³ must be positive, got {x}")).into());
        }
        let rho = x / a.powi(3);
        let bog = bogoliubov_correction_density(&sol, rho, tol)?;
        let lhy = lhy_energy_density(rho, a);
        table.push(vec![x, rho, bog, lhy, bog / lhy]);
    }
    emit_table(&table, &header, &args.out)?;
    Ok(())
}

fn energy(config: &RunConfig, args: &EnergyArgs, header: TableHeader) -> Result<(), Failure> {
    let v = load_potential(&args.potential)?;
    let tol = &config.tolerance;
    let report: EnergyReport = match (args.rho_mu, args.split) {
        (Some(rho_mu), _) => {
            let cfg = EnergyConfig {
                kernel: config.kernel,
                c: args.c,
                tolerance: *tol,
                cells: config.cells,
            };
            box_lower_bound(&v, args.rho, rho_mu, &cfg)?
        }
        (None, Some(split)) => grand_canonical_with_tail(&v, split, args.rho, args.c, tol)?,
        (None, None) => grand_canonical_assembly(&v, args.rho, args.c, tol)?,
    };
    let mut doc = serde_json::to_value(&report).expect("report serialises");
    if let Value::Object(map) = &mut doc {
        map.insert(
            "run".into(),
            json!({ "config_sha256": header.config_hash, "seed": header.seed }),
        );
    }
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn verify(config: &RunConfig, args: &VerifyArgs) -> Result<(), Failure> {
    let vc = VerifyConfig {
        seed: args.seed.unwrap_or(config.seed),
        kernel: config.kernel,
        tolerance: config.tolerance,
        filter: args.filter.clone(),
    };
    println!("seed {}", vc.seed);
    let results = run_checks(&vc);
    for r in &results {
        println!(
            "{} {:>2} {:<26} {:>7.2}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.seconds,
            r.detail
        );
    }
    if let Some(path) = &args.out {
        let checks: Vec<Value> = results
            .iter()
            .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail }))
            .collect();
        let doc = json!({ "seed": vc.seed, "checks": checks });
        fs::write(path, serde_json::to_string_pretty(&doc).expect("json") + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
