//! `ppav` — evaluate theta functions and verify the curvature/torsion
//! identities of the Siegel family from the command line.
//!
//! Exit codes: 0 all verifications pass, 1 a verification failed,
//! 2 usage or config error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ppav_cli::suite::{run_suite, NormsReport, SuiteConfig};
use ppav_core::curvature::{
    c1_translation_residual, verify_c1_theta_bundle, verify_hodge_curvature,
    verify_root_curvature, verify_theta_det_curvature, FDConfig,
};
use ppav_core::detline::{bost_torsion, quillen_factor_principal, PolarizationData};
use ppav_core::metrics::{gram_matrix, QuadratureGrid};
use ppav_core::sampling;
use ppav_core::siegel::{SiegelPoint, SiegelPointJson};
use ppav_core::theta::{theta_eval_detailed, ThetaCharacteristic, TruncationPolicy};
use ppav_core::{CVector, RVector, C64};

#[derive(Parser)]
#[command(name = "ppav", version, about = "Siegel space / theta function verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Theta function evaluation
    Theta {
        #[command(subcommand)]
        command: ThetaCommand,
    },
    /// Identity verification
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
}

#[derive(Subcommand)]
enum ThetaCommand {
    /// Evaluate θ[a;b](z, τ) and report the value with truncation metadata
    Eval(ThetaEvalArgs),
}

#[derive(Args)]
struct ThetaEvalArgs {
    /// Path to a JSON file {"g": .., "tau_re": [[..]], "tau_im": [[..]]}
    #[arg(long)]
    tau: PathBuf,
    /// Argument z as "re,im;re,im;..." (one pair per coordinate)
    #[arg(long)]
    z: String,
    /// Characteristic as "a1,..,ag;b1,..,bg" (defaults to the Riemann theta)
    #[arg(long = "char")]
    characteristic: Option<String>,
    /// Target tail bound (envelope-relative)
    #[arg(long, default_value_t = 1e-14)]
    eps: f64,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Gram matrix of the second-order theta basis vs (det Im τ)^{−1/2}·I
    Norms(NormsArgs),
    /// Analytic torsion constants and the Quillen factor
    Torsion(TorsionArgs),
    /// Curvature identities by finite differences over seeded samples
    Curvature(CurvatureArgs),
    /// The full configured suite, one JSON report line per identity
    Suite(SuiteArgs),
}

#[derive(Args)]
struct NormsArgs {
    /// Genus (1 or 2)
    #[arg(long)]
    g: usize,
    /// Optional τ file; defaults to τ = i·I_g
    #[arg(long)]
    tau: Option<PathBuf>,
    /// Quadrature nodes per dimension
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct TorsionArgs {
    /// Genus
    #[arg(long)]
    g: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum IdentityArg {
    Hodge,
    #[value(name = "theta-det")]
    ThetaDet,
    C1,
    Root,
}

#[derive(Args)]
struct CurvatureArgs {
    /// Which curvature identity to verify
    #[arg(long, value_enum)]
    identity: IdentityArg,
    /// Genus
    #[arg(long)]
    g: usize,
    /// Number of seeded random samples
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Seed for the deterministic sampler
    #[arg(long, default_value_t = 20260810)]
    seed: u64,
    /// Stencil step (Richardson is always on)
    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,
}

#[derive(Args)]
struct SuiteArgs {
    /// Config file (JSON); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run a single identity from the config
    #[arg(long)]
    only: Option<String>,
    /// Suppress the human-readable summary on stderr
    #[arg(long)]
    json: bool,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_pairs(text: &str) -> Result<CVector, String> {
    let mut vals = Vec::new();
    for part in text.split(';') {
        let nums: Vec<&str> = part.split(',').map(str::trim).collect();
        if nums.len() != 2 {
            return Err(format!("expected re,im in component {part:?}"));
        }
        let re: f64 = nums[0].parse().map_err(|e| format!("{part:?}: {e}"))?;
        let im: f64 = nums[1].parse().map_err(|e| format!("{part:?}: {e}"))?;
        vals.push(C64::new(re, im));
    }
    Ok(CVector::from_vec(vals))
}

fn parse_characteristic(text: &str, g: usize) -> Result<ThetaCharacteristic, String> {
    let halves: Vec<&str> = text.split(';').collect();
    if halves.len() != 2 {
        return Err("characteristic must be \"a1,..,ag;b1,..,bg\"".into());
    }
    let parse_vec = |part: &str| -> Result<RVector, String> {
        let vals: Result<Vec<f64>, _> = part.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| format!("{part:?}: {e}"))?;
        if vals.len() != g {
            return Err(format!("characteristic part {part:?} must have g = {g} entries"));
        }
        Ok(RVector::from_vec(vals))
    };
    ThetaCharacteristic::new(parse_vec(halves[0])?, parse_vec(halves[1])?)
        .map_err(|e| e.to_string())
}

fn load_tau(path: &PathBuf) -> Result<SiegelPoint, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed: SiegelPointJson =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    SiegelPoint::try_from(parsed).map_err(|e| e.to_string())
}

fn cmd_theta_eval(args: &ThetaEvalArgs) -> Result<ExitCode, String> {
    let tau = load_tau(&args.tau)?;
    let z = parse_pairs(&args.z)?;
    let ch = match &args.characteristic {
        Some(text) => parse_characteristic(text, tau.genus())?,
        None => ThetaCharacteristic::riemann(tau.genus()),
    };
    let policy = TruncationPolicy {
        epsilon: args.eps,
        ..TruncationPolicy::default()
    };
    let out = theta_eval_detailed(&ch, &z, &tau, &policy).map_err(|e| e.to_string())?;
    println!(
        "{}",
        json!({"re": out.value.re, "im": out.value.im, "terms": out.terms, "radius": out.radius})
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_norms(args: &NormsArgs) -> Result<ExitCode, String> {
    let tau = match &args.tau {
        Some(path) => load_tau(path)?,
        None => SiegelPoint::at_i(args.g),
    };
    if tau.genus() != args.g {
        return Err(format!("--g {} but tau file has g = {}", args.g, tau.genus()));
    }
    let n = args.n.unwrap_or(if args.g == 1 { 64 } else { 24 });
    let grid = QuadratureGrid::new(args.g, n).map_err(|e| e.to_string())?;
    let gm = gram_matrix(&tau, &grid).map_err(|e| e.to_string())?;
    let report = NormsReport::from_gram(tau.det_im(), &gm);
    println!("{}", serde_json::to_string(&report).expect("serializable"));
    Ok(ExitCode::SUCCESS)
}

fn cmd_torsion(args: &TorsionArgs) -> Result<ExitCode, String> {
    let t = bost_torsion(&PolarizationData::principal(args.g));
    let closed = quillen_factor_principal(args.g);
    let matches = ((t.quillen_factor - closed) / closed).abs() <= 1e-14;
    println!(
        "{}",
        json!({"T": t.torsion, "quillen_factor": t.quillen_factor, "matches_closed_form": matches})
    );
    Ok(if matches { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_curvature(args: &CurvatureArgs) -> Result<ExitCode, String> {
    let label = match args.identity {
        IdentityArg::Hodge => "curvature:hodge",
        IdentityArg::ThetaDet => "curvature:theta-det",
        IdentityArg::C1 => "curvature:c1",
        IdentityArg::Root => "curvature:root",
    };
    let mut rng = sampling::rng_for(args.seed, label);
    let tolerance = if args.identity == IdentityArg::C1 { 1e-9 } else { 1e-6 };
    let mut max_res = 0.0f64;
    for _ in 0..args.samples {
        // The CLI retries a shrunk step when the stencil exits the domain.
        let g = args.g;
        let tau = sampling::random_siegel_interior(&mut rng, g);
        let r = match args.identity {
            IdentityArg::C1 => {
                let z = sampling::random_cell_point(&mut rng, &tau);
                let v = sampling::random_fiber_vector(&mut rng, g);
                let w = sampling::random_fiber_vector(&mut rng, g);
                let fd = FDConfig { step: 0.25, richardson: true };
                let base = verify_c1_theta_bundle(&tau, &z, &v, &w, &fd).map_err(|e| e.to_string())?;
                let gamma = sampling::random_lattice_vector(&mut rng, g, 2);
                let t = c1_translation_residual(&tau, &z, &gamma.embed(&tau), &v, &w, &fd)
                    .map_err(|e| e.to_string())?;
                base.max(t)
            }
            _ => {
                let x = sampling::random_tangent(&mut rng, g);
                let y = sampling::random_tangent(&mut rng, g);
                let verify = match args.identity {
                    IdentityArg::Hodge => verify_hodge_curvature,
                    IdentityArg::ThetaDet => verify_theta_det_curvature,
                    IdentityArg::Root => verify_root_curvature,
                    IdentityArg::C1 => unreachable!(),
                };
                let mut step = args.fd_step;
                let mut attempt = 0;
                loop {
                    match verify(&tau, &x, &y, &FDConfig { step, richardson: true }) {
                        Ok(r) => break r,
                        Err(ppav_core::curvature::CurvatureError::LeftSiegelDomain { .. })
                            if attempt < 2 =>
                        {
                            step /= 10.0;
                            attempt += 1;
                        }
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
        };
        max_res = max_res.max(r);
    }
    let pass = max_res <= tolerance;
    println!(
        "{}",
        json!({"max_residual": max_res, "samples": args.samples, "pass": pass})
    );
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_suite(args: &SuiteArgs) -> Result<ExitCode, ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                eprintln!("error: {}: {e}", path.display());
                ExitCode::from(2)
            })?;
            SuiteConfig::from_json(&text).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?
        }
        None => SuiteConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(only) = &args.only {
        if !cfg.identities.iter().any(|i| i == only) {
            eprintln!("error: unknown identity: {only}");
            return Err(ExitCode::from(2));
        }
        cfg.identities = vec![only.clone()];
    }
    let reports = run_suite(&cfg).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    let mut all_pass = true;
    for report in &reports {
        println!("{}", serde_json::to_string(report).expect("serializable"));
        if !args.json {
            eprintln!(
                "{:24} g<={} samples={:3} residual={:.3e} tol={:.0e} {}",
                report.identity_name,
                report.g,
                report.samples,
                report.max_residual,
                report.tolerance,
                if report.pass { "pass" } else { "FAIL" }
            );
        }
        all_pass &= report.pass;
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Theta { command: ThetaCommand::Eval(args) } => cmd_theta_eval(args),
        Command::Verify { command } => match command {
            VerifyCommand::Norms(args) => cmd_norms(args),
            VerifyCommand::Torsion(args) => cmd_torsion(args),
            VerifyCommand::Curvature(args) => cmd_curvature(args),
            VerifyCommand::Suite(args) => {
                return match cmd_suite(args) {
                    Ok(code) => code,
                    Err(code) => code,
                }
            }
        },
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
