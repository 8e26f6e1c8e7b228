//! The batch verification suite: every identity the library verifies, run
//! from one flat config with deterministic seeding and one JSON-line report
//! per identity.
//!
//! Identities may run concurrently; reports always come back in config
//! order, and a failure in one identity never aborts the others. Two runs
//! with the same config and seed produce byte-identical reports except for
//! `wall_time_ms`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ppav_core::curvature::{
    c1_translation_residual, verify_c1_theta_bundle, verify_hodge_curvature,
    verify_root_curvature, verify_theta_det_curvature, FDConfig,
};
use ppav_core::detline::{bost_torsion, quillen_factor_principal, PolarizationData};
use ppav_core::metrics::{gram_matrix, QuadratureGrid};
use ppav_core::sampling;
use ppav_core::siegel::{siegel_form, symplectic_act, tangent_pushforward};
use ppav_core::theta::{
    factor_of_automorphy, theta_eval, ThetaCharacteristic, TruncationPolicy,
};
use ppav_core::{CMatrix, C64};

/// Identity labels in canonical (default config) order.
pub const ALL_IDENTITIES: [&str; 8] = [
    "norms",
    "torsion",
    "curvature:hodge",
    "curvature:theta-det",
    "curvature:c1",
    "curvature:root",
    "symplectic-invariance",
    "quasi-periodicity",
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),
}

fn default_identities() -> Vec<String> {
    ALL_IDENTITIES.iter().map(|s| s.to_string()).collect()
}

fn default_g_list() -> Vec<usize> {
    vec![1, 2]
}

fn default_samples() -> usize {
    20
}

fn default_seed() -> u64 {
    20260810
}

fn default_fd_step() -> f64 {
    1e-3
}

fn default_tolerances() -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    t.insert("norms".into(), 1e-6);
    t.insert("torsion".into(), 1e-13);
    t.insert("curvature:hodge".into(), 1e-6);
    t.insert("curvature:theta-det".into(), 1e-6);
    t.insert("curvature:c1".into(), 1e-9);
    t.insert("curvature:root".into(), 1e-6);
    t.insert("symplectic-invariance".into(), 1e-6);
    t.insert("quasi-periodicity".into(), 1e-10);
    t
}

fn default_quadrature_n() -> BTreeMap<String, usize> {
    let mut q = BTreeMap::new();
    q.insert("1".into(), 64);
    q.insert("2".into(), 24);
    q
}

/// Flat suite configuration; every field has a default mirroring the
/// acceptance protocol, so a partial (or empty) document is valid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_identities")]
    pub identities: Vec<String>,
    #[serde(default = "default_g_list")]
    pub g_list: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerances")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_quadrature_n")]
    pub quadrature_n: BTreeMap<String, usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            identities: default_identities(),
            g_list: default_g_list(),
            samples: default_samples(),
            seed: default_seed(),
            tolerances: default_tolerances(),
            fd_step: default_fd_step(),
            quadrature_n: default_quadrature_n(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, SuiteError> {
        let cfg: SuiteConfig =
            serde_json::from_str(text).map_err(|e| SuiteError::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SuiteError> {
        for id in &self.identities {
            if !ALL_IDENTITIES.contains(&id.as_str()) {
                return Err(SuiteError::UnknownIdentity(id.clone()));
            }
        }
        Ok(())
    }

    fn tolerance_for(&self, identity: &str) -> f64 {
        self.tolerances
            .get(identity)
            .copied()
            .or_else(|| default_tolerances().get(identity).copied())
            .unwrap_or(1e-6)
    }

    fn quadrature_for(&self, g: usize) -> usize {
        self.quadrature_n
            .get(&g.to_string())
            .copied()
            .unwrap_or(match g {
                1 => 64,
                _ => 24,
            })
    }
}

/// One verification outcome; serialized as a JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_name: String,
    pub g: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
}

struct RunOutcome {
    g: usize,
    samples: usize,
    max_residual: f64,
}

fn run_norms(cfg: &SuiteConfig) -> RunOutcome {
    let mut rng = sampling::rng_for(cfg.seed, "norms");
    let mut max_res = 0.0f64;
    let mut g_used = 0;
    let mut samples = 0;
    for &g in cfg.g_list.iter().filter(|&&g| g <= 2) {
        let draws = if g == 1 { 10 } else { 3 };
        let grid = QuadratureGrid::new(g, cfg.quadrature_for(g)).expect("g <= 2");
        for _ in 0..draws {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let gm = gram_matrix(&tau, &grid).expect("validated grid");
            let expected = tau.det_im().powf(-0.5);
            let dim = gm.nrows();
            for p in 0..dim {
                for q in 0..dim {
                    let target = if p == q {
                        C64::new(expected, 0.0)
                    } else {
                        C64::default()
                    };
                    max_res = max_res.max((gm[(p, q)] - target).norm());
                }
            }
            samples += 1;
        }
        g_used = g_used.max(g);
    }
    RunOutcome { g: g_used, samples, max_residual: max_res }
}

fn run_torsion(cfg: &SuiteConfig) -> RunOutcome {
    let mut rng = sampling::rng_for(cfg.seed, "torsion");
    let mut max_res = 0.0f64;
    // closed-form chain e^T = (2π)^{g/2} for g = 1..8
    for g in 1..=8usize {
        let t = bost_torsion(&PolarizationData::principal(g));
        let q = quillen_factor_principal(g);
        max_res = max_res.max(((t.torsion.exp() - q) / q).abs());
        max_res = max_res.max(((t.quillen_factor - q) / q).abs());
    }
    // the general formula on random polarization data
    use rand::Rng;
    for _ in 0..100 {
        let g = rng.gen_range(1..=6usize);
        let rho_c1 = rng.gen_range(0.1..20.0);
        let rho_omega = rng.gen_range(0.1..5.0);
        let p = PolarizationData::new(g, rho_c1, rho_omega).expect("positive draws");
        let t = bost_torsion(&p).torsion;
        let reference =
            -0.5 * rho_c1 * (rho_c1 / ((2.0 * std::f64::consts::PI).powi(g as i32) * rho_omega)).ln();
        max_res = max_res.max((t - reference).abs() / reference.abs().max(1.0));
    }
    RunOutcome { g: 8, samples: 108, max_residual: max_res }
}

fn run_curvature(
    cfg: &SuiteConfig,
    label: &str,
    verify: impl Fn(&ppav_core::siegel::SiegelPoint, &ppav_core::siegel::TangentDirection, &ppav_core::siegel::TangentDirection, &FDConfig) -> Result<f64, ppav_core::curvature::CurvatureError>,
) -> RunOutcome {
    let mut rng = sampling::rng_for(cfg.seed, label);
    let fd = FDConfig { step: cfg.fd_step, richardson: true };
    let mut max_res = 0.0f64;
    let mut g_used = 0;
    let mut samples = 0;
    for &g in cfg.g_list.iter().filter(|&&g| g <= 3) {
        for _ in 0..cfg.samples {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let x = sampling::random_tangent(&mut rng, g);
            let y = sampling::random_tangent(&mut rng, g);
            let r = verify(&tau, &x, &y, &fd).expect("interior draws stay in domain");
            max_res = max_res.max(r);
            samples += 1;
        }
        g_used = g_used.max(g);
    }
    RunOutcome { g: g_used, samples, max_residual: max_res }
}

fn run_c1(cfg: &SuiteConfig) -> RunOutcome {
    let mut rng = sampling::rng_for(cfg.seed, "curvature:c1");
    // the metric weight is exactly quadratic in z, so the stencil has no
    // truncation error; a coarse step keeps rounding amplification low
    let fd = FDConfig { step: 0.25, richardson: true };
    let mut max_res = 0.0f64;
    let mut g_used = 0;
    let mut samples = 0;
    for &g in cfg.g_list.iter().filter(|&&g| g <= 2) {
        for _ in 0..cfg.samples {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let v = sampling::random_fiber_vector(&mut rng, g);
            let w = sampling::random_fiber_vector(&mut rng, g);
            let r = verify_c1_theta_bundle(&tau, &z, &v, &w, &fd).expect("fiber FD");
            let gamma = sampling::random_lattice_vector(&mut rng, g, 2);
            let t = c1_translation_residual(&tau, &z, &gamma.embed(&tau), &v, &w, &fd)
                .expect("fiber FD");
            max_res = max_res.max(r).max(t);
            samples += 1;
        }
        g_used = g_used.max(g);
    }
    RunOutcome { g: g_used, samples, max_residual: max_res }
}

fn run_symplectic_invariance(cfg: &SuiteConfig) -> RunOutcome {
    let mut rng = sampling::rng_for(cfg.seed, "symplectic-invariance");
    let mut max_res = 0.0f64;
    let mut g_used = 0;
    let mut samples = 0;
    for &g in cfg.g_list.iter().filter(|&&g| g <= 3) {
        for _ in 0..cfg.samples {
            let m = sampling::random_symplectic(&mut rng, g, 5);
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let x = sampling::random_tangent(&mut rng, g);
            let y = sampling::random_tangent(&mut rng, g);
            let base = siegel_form(&tau, &x, &y).expect("shared g").value();
            let tau2 = symplectic_act(&m, &tau).expect("valid action");
            let x2 = tangent_pushforward(&m, &tau, &x).expect("pushforward");
            let y2 = tangent_pushforward(&m, &tau, &y).expect("pushforward");
            let moved = siegel_form(&tau2, &x2, &y2).expect("shared g").value();
            max_res = max_res.max((moved - base).norm() / base.norm().max(1e-12));
            samples += 1;
        }
        g_used = g_used.max(g);
    }
    RunOutcome { g: g_used, samples, max_residual: max_res }
}

fn run_quasi_periodicity(cfg: &SuiteConfig) -> RunOutcome {
    let mut rng = sampling::rng_for(cfg.seed, "quasi-periodicity");
    let policy = TruncationPolicy::default();
    let gs: Vec<usize> = cfg.g_list.iter().copied().filter(|&g| g <= 3).collect();
    let mut max_res = 0.0f64;
    let mut samples = 0;
    let per_g = if gs.is_empty() { 0 } else { 50usize.div_ceil(gs.len()) };
    for &g in &gs {
        for _ in 0..per_g {
            let tau = sampling::random_siegel_small_im(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let gamma = sampling::random_lattice_vector(&mut rng, g, 2);
            let ch = ThetaCharacteristic::riemann(g);
            let zg = &z + gamma.embed(&tau);
            let lhs = theta_eval(&ch, &zg, &tau, &policy).expect("valid input");
            let rhs = factor_of_automorphy(&gamma, &z, &tau).expect("valid input")
                * theta_eval(&ch, &z, &tau, &policy).expect("valid input");
            max_res = max_res.max((lhs - rhs).norm());
            // evenness at the same draw
            let zneg = z.map(|v| -v);
            let a = theta_eval(&ch, &z, &tau, &policy).expect("valid input");
            let b = theta_eval(&ch, &zneg, &tau, &policy).expect("valid input");
            max_res = max_res.max((a - b).norm());
            samples += 1;
        }
    }
    RunOutcome { g: gs.iter().copied().max().unwrap_or(0), samples, max_residual: max_res }
}

fn run_identity(cfg: &SuiteConfig, identity: &str) -> RunOutcome {
    match identity {
        "norms" => run_norms(cfg),
        "torsion" => run_torsion(cfg),
        "curvature:hodge" => run_curvature(cfg, "curvature:hodge", verify_hodge_curvature),
        "curvature:theta-det" => {
            run_curvature(cfg, "curvature:theta-det", verify_theta_det_curvature)
        }
        "curvature:c1" => run_c1(cfg),
        "curvature:root" => run_curvature(cfg, "curvature:root", verify_root_curvature),
        "symplectic-invariance" => run_symplectic_invariance(cfg),
        "quasi-periodicity" => run_quasi_periodicity(cfg),
        other => unreachable!("identity {other} rejected by config validation"),
    }
}

/// Runs the configured identities; reports come back in config order, one
/// per identity, with `pass ⇔ max_residual ≤ tolerance`. An identity that
/// panics is reported as failed (infinite residual) without aborting the
/// rest.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>, SuiteError> {
    cfg.validate()?;
    let reports: Vec<VerificationReport> = cfg
        .identities
        .par_iter()
        .map(|identity| {
            let started = Instant::now();
            let outcome = catch_unwind(AssertUnwindSafe(|| run_identity(cfg, identity)));
            let wall = started.elapsed().as_secs_f64() * 1e3;
            let tolerance = cfg.tolerance_for(identity);
            let (g, samples, max_residual) = match outcome {
                Ok(o) => (o.g, o.samples, o.max_residual),
                Err(_) => (0, 0, f64::INFINITY),
            };
            VerificationReport {
                identity_name: identity.clone(),
                g,
                samples,
                seed: cfg.seed,
                max_residual,
                tolerance,
                pass: max_residual <= tolerance,
                wall_time_ms: wall,
            }
        })
        .collect();
    Ok(reports)
}

/// Gram-matrix report payload for `verify norms`.
#[derive(Debug, Serialize)]
pub struct NormsReport {
    /// Real parts of the Gram entries (the expected matrix is real diagonal;
    /// imaginary residues are bounded by `max_abs_dev`).
    pub gram: Vec<Vec<f64>>,
    pub expected: f64,
    pub max_abs_dev: f64,
}

impl NormsReport {
    pub fn from_gram(tau_det_im: f64, gm: &CMatrix) -> Self {
        let expected = tau_det_im.powf(-0.5);
        let dim = gm.nrows();
        let mut dev = 0.0f64;
        for p in 0..dim {
            for q in 0..dim {
                let target = if p == q {
                    C64::new(expected, 0.0)
                } else {
                    C64::default()
                };
                dev = dev.max((gm[(p, q)] - target).norm());
            }
        }
        NormsReport {
            gram: (0..dim)
                .map(|p| (0..dim).map(|q| gm[(p, q)].re).collect())
                .collect(),
            expected,
            max_abs_dev: dev,
        }
    }
}
