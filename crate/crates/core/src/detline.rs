//! The ρ-functional, Bost's closed-form analytic torsion, Quillen metric
//! factors, and the dual/root log-metric arithmetic on determinant lines
//! over 𝔥_g.
//!
//! For a g-dimensional principally polarized abelian variety with flat
//! Kähler form ω and an ample (L, h) whose first Chern form is translation
//! invariant, the analytic torsion T = Σ (−1)^i i ζ'_{E,i}(0) has the closed
//! form
//!
//! ```text
//! T = −(1/2) ρ(c₁(L,h)) · log( ρ(c₁(L,h)) / ((2π)^g ρ(ω)) ),
//! ρ(α) = (1/g!) ∫_A α^g,
//! ```
//!
//! and the Quillen metric is h_Q = e^T · h_{L²}. For the principal case
//! ρ(c₁) = ρ(ω) = 1 this gives T = (g/2) log 2π and h_Q = (2π)^{g/2} h_{L²};
//! the torsion is a constant independent of τ, so h_Q and h_{L²} always have
//! the same curvature.
//!
//! Applying the same closed form to L^⊗2 (where ρ(c₁) = 2^g) gives
//! T = 2^{g−1} g log π instead; the two constants are both exposed
//! ([`torsion_principal`], [`torsion_theta_squared`]) since the constant
//! cancels from every curvature statement either way.
//!
//! The passage from λ(Θ^⊗2) to the Hodge line is pure scalar bookkeeping on
//! log-metrics: dualizing negates, a k-th root divides by k
//! ([`root_dual_logmetric`]); curvature transforms as R ↦ −R/k.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::siegel::SiegelPoint;
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum DetlineError {
    #[error("rho coefficient matrix is not Hermitian: residual {residual:.3e}")]
    NonHermitianCoefficients { residual: f64 },
    #[error("polarization data must be positive and finite: rho_c1={rho_c1}, rho_omega={rho_omega}")]
    InvalidPolarization { rho_c1: f64, rho_omega: f64 },
}

/// ρ-values of a polarized abelian variety: ρ(c₁(L,h)) and ρ(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationData {
    pub g: usize,
    pub rho_c1: f64,
    pub rho_omega: f64,
}

impl PolarizationData {
    pub fn new(g: usize, rho_c1: f64, rho_omega: f64) -> Result<Self, DetlineError> {
        if !(rho_c1 > 0.0 && rho_c1.is_finite() && rho_omega > 0.0 && rho_omega.is_finite()) {
            return Err(DetlineError::InvalidPolarization { rho_c1, rho_omega });
        }
        Ok(Self { g, rho_c1, rho_omega })
    }

    /// The principal case ρ(c₁) = ρ(ω) = 1.
    pub fn principal(g: usize) -> Self {
        Self { g, rho_c1: 1.0, rho_omega: 1.0 }
    }
}

/// Analytic torsion T and the derived Quillen factor e^T = h_Q/h_{L²}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionResult {
    pub torsion: f64,
    pub quillen_factor: f64,
}

impl TorsionResult {
    fn from_torsion(t: f64) -> Self {
        Self { torsion: t, quillen_factor: t.exp() }
    }
}

/// ρ(α) = (1/g!)∫_A α^g for a translation-invariant (1,1)-form α, given by
/// its Hermitian coefficient matrix in a frame where the polarization ω_τ is
/// the identity matrix. In that frame ρ(α) = det(coefficients); ρ(ω) = 1,
/// ρ(tω) = t^g, and ρ is degree-g homogeneous.
pub fn rho_invariant_form(g: usize, coefficients: &CMatrix) -> Result<f64, DetlineError> {
    debug_assert_eq!(coefficients.nrows(), g);
    let scale = coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut residual = 0.0f64;
    for i in 0..coefficients.nrows() {
        for j in 0..coefficients.ncols() {
            residual = residual.max((coefficients[(i, j)] - coefficients[(j, i)].conj()).norm());
        }
    }
    if residual > 1e-12 * scale.max(1.0) {
        return Err(DetlineError::NonHermitianCoefficients { residual });
    }
    let det = coefficients.clone().lu().determinant();
    Ok(det.re)
}

/// Bost's closed-form analytic torsion and Quillen factor.
pub fn bost_torsion(p: &PolarizationData) -> TorsionResult {
    let t = -0.5 * p.rho_c1 * (p.rho_c1 / ((2.0 * PI).powi(p.g as i32) * p.rho_omega)).ln();
    TorsionResult::from_torsion(t)
}

/// T(A_τ, ω, L_τ, h) = (1/2) log (2π)^g — the principally polarized constant.
pub fn torsion_principal(g: usize) -> f64 {
    0.5 * g as f64 * (2.0 * PI).ln()
}

/// The same closed form applied to (L_τ^⊗2, h^⊗2), where ρ(c₁) = 2^g:
/// T = 2^{g−1} · g · log π.
pub fn torsion_theta_squared(g: usize) -> f64 {
    2f64.powi(g as i32 - 1) * g as f64 * PI.ln()
}

/// h_Q = (2π)^{g/2}·h_{L²}: the Quillen/L² ratio for the principal case;
/// equals exp([`torsion_principal`]) to machine precision.
pub fn quillen_factor_principal(g: usize) -> f64 {
    (2.0 * PI).powf(g as f64 / 2.0)
}

/// The function τ ↦ −log‖σ‖²(τ) for a fixed holomorphic frame σ of a line
/// bundle over 𝔥_g, with tensor-power and dual bookkeeping. Curvature
/// verifiers differentiate this with the ∂∂̄ stencil.
#[derive(Clone)]
pub struct LogMetricForm {
    f: Arc<dyn Fn(&SiegelPoint) -> f64 + Send + Sync>,
    pub power: i64,
    pub dual: bool,
}

impl std::fmt::Debug for LogMetricForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LogMetricForm")
            .field("power", &self.power)
            .field("dual", &self.dual)
            .finish()
    }
}

impl LogMetricForm {
    pub fn new(f: Arc<dyn Fn(&SiegelPoint) -> f64 + Send + Sync>, power: i64) -> Self {
        Self { f, power, dual: false }
    }

    pub fn from_fn<F>(f: F, power: i64) -> Self
    where
        F: Fn(&SiegelPoint) -> f64 + Send + Sync + 'static,
    {
        Self::new(Arc::new(f), power)
    }

    /// −log‖s‖² for s = dz₁∧…∧dz_g on det 𝓔: −log(2^g det Im τ).
    pub fn hodge_determinant(g: usize) -> Self {
        Self::from_fn(
            move |tau: &SiegelPoint| -(2f64.powi(g as i32) * tau.det_im()).ln(),
            1,
        )
    }

    /// −log‖v*‖²_{L²} for the dual of v = θ_{τ,1}∧…∧θ_{τ,2^g} on λ(Θ^⊗2):
    /// −log (det Im τ)^{2^{g−1}} = −2^{g−1} log det Im τ.
    pub fn theta_det_l2(g: usize) -> Self {
        let e = 2f64.powi(g as i32 - 1);
        Self::from_fn(
            move |tau: &SiegelPoint| -e * tau.det_im().ln(),
            1 << (g - 1),
        )
    }

    /// The same metric rescaled by the Quillen constant: −log‖v*‖²_{h_Q}.
    /// Differs from [`Self::theta_det_l2`] by the constant −T, so its ∂∂̄ is
    /// identical.
    pub fn theta_det_quillen(g: usize) -> Self {
        let base = Self::theta_det_l2(g);
        let t = torsion_principal(g);
        Self {
            f: Arc::new(move |tau: &SiegelPoint| base.eval(tau) - t),
            power: 1 << (g - 1),
            dual: false,
        }
    }

    pub fn eval(&self, tau: &SiegelPoint) -> f64 {
        (self.f)(tau)
    }

    /// Pointwise shift by a constant (metric rescaling); ∂∂̄-invisible.
    pub fn shifted(&self, c: f64) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |tau: &SiegelPoint| f(tau) + c),
            power: self.power,
            dual: self.dual,
        }
    }
}

/// The dual metric followed by a k-th root, on log-metrics: f ↦ −f/k, dual
/// flag toggled, tensor power divided when k divides it. Curvature scales as
/// R ↦ −R/k: dualizing negates, the root divides.
pub fn root_dual_logmetric(f: &LogMetricForm, k: u32) -> LogMetricForm {
    let k = k.max(1) as i64;
    let inner = f.f.clone();
    LogMetricForm {
        f: Arc::new(move |tau: &SiegelPoint| -inner(tau) / k as f64),
        power: if f.power % k == 0 { f.power / k } else { f.power },
        dual: !f.dual,
    }
}
