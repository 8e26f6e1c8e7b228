//! Riemann theta functions with characteristics, the classical factor of
//! automorphy, and the second-order theta basis of H⁰(A_τ, L_τ^⊗2).
//!
//! The theta function with characteristic (a, b) is the lattice sum
//!
//! ```text
//! θ[a;b](z, τ) = Σ_{m ∈ ℤ^g} exp( π√−1 ⟨m+a, τ(m+a)⟩ + 2π√−1 ⟨m+a, z+b⟩ )
//! ```
//!
//! whose (0,0) case is the Riemann theta function Σ_m exp(π√−1⟨m, 2z+τm⟩).
//! Term moduli form a Gaussian envelope peaked at m + a = −(Im τ)^{−1} Im z;
//! the sum is truncated to the ellipsoid
//! (m + a + c)ᵀ (π Im τ) (m + a + c) ≤ R², c = (Im τ)^{−1} Im z, with R the
//! smallest radius whose Gaussian tail bound is below the policy epsilon.
//! The absolute truncation error is then ≤ ε · exp(π (Im z)ᵀ(Im τ)^{−1}(Im z))
//! — an envelope-relative bound, since the theta values themselves grow with
//! that envelope.
//!
//! Terms are accumulated in order of increasing ellipsoid norm with
//! compensated summation, so results are deterministic and reproducible
//! across platforms and thread counts.

use nalgebra::{Cholesky, DVector, Dyn};
use thiserror::Error;

use crate::accum::NeumaierC;
use crate::siegel::SiegelPoint;
use crate::{CVector, RMatrix, RVector, C64};

#[derive(Debug, Error)]
pub enum ThetaError {
    #[error("invalid truncation policy: epsilon must lie in (0,1) and max_radius be positive")]
    InvalidPolicy,
    #[error("truncation radius {radius:.2} exceeds cap {cap:.2} (ill-conditioned Im tau or huge Im z)")]
    RadiusCapExceeded { radius: f64, cap: f64 },
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("non-finite input")]
    NonFinite,
}

/// A theta characteristic: a pair of real g-vectors (a, b) shifting the
/// lattice sum. (0, 0) is the Riemann theta; half-integer characteristics
/// have entries in {0, 1/2}.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCharacteristic {
    pub a: RVector,
    pub b: RVector,
}

impl ThetaCharacteristic {
    pub fn new(a: RVector, b: RVector) -> Result<Self, ThetaError> {
        if a.len() != b.len() {
            return Err(ThetaError::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(ThetaError::NonFinite);
        }
        Ok(Self { a, b })
    }

    /// The (0,0) characteristic (Riemann theta) in dimension g.
    pub fn riemann(g: usize) -> Self {
        Self {
            a: RVector::zeros(g),
            b: RVector::zeros(g),
        }
    }

    pub fn genus(&self) -> usize {
        self.a.len()
    }
}

/// A lattice vector γ = m + τn ∈ Γ_τ = ℤ^g + τℤ^g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeVector {
    pub m: Vec<i64>,
    pub n: Vec<i64>,
}

impl LatticeVector {
    pub fn new(m: Vec<i64>, n: Vec<i64>) -> Result<Self, ThetaError> {
        if m.len() != n.len() {
            return Err(ThetaError::DimensionMismatch {
                expected: m.len(),
                got: n.len(),
            });
        }
        Ok(Self { m, n })
    }

    pub fn genus(&self) -> usize {
        self.m.len()
    }

    /// The point m + τn of ℂ^g.
    pub fn embed(&self, tau: &SiegelPoint) -> CVector {
        let g = tau.genus();
        let mut out = CVector::zeros(g);
        for i in 0..g {
            let mut v = C64::new(self.m[i] as f64, 0.0);
            for j in 0..g {
                v += tau.tau()[(i, j)] * C64::new(self.n[j] as f64, 0.0);
            }
            out[i] = v;
        }
        out
    }
}

/// Truncation policy: target absolute tail bound (envelope-relative, see the
/// module docs) and a safety cap on the whitened ellipsoid radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub max_radius: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            epsilon: 1e-14,
            max_radius: 40.0,
        }
    }
}

impl TruncationPolicy {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), ThetaError> {
        let eps_ok = self.epsilon > 0.0 && self.epsilon < 1.0;
        let radius_ok = self.max_radius > 0.0;
        if !eps_ok || !radius_ok {
            return Err(ThetaError::InvalidPolicy);
        }
        Ok(())
    }
}

/// Value of a theta evaluation together with truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEval {
    pub value: C64,
    /// Number of lattice terms summed.
    pub terms: usize,
    /// Whitened truncation radius actually used.
    pub radius: f64,
}

pub mod lattice {
    //! Ellipsoid enumeration of lattice points by recursive coordinate
    //! bounding (Fincke–Pohst on a Cholesky factorization).

    use super::*;

    /// All m ∈ ℤ^g with (m + shift)ᵀ A (m + shift) ≤ radius², A symmetric
    /// positive definite, returned with their quadratic-form values and
    /// sorted by (value, lexicographic m) so summation order is total.
    pub fn ellipsoid_points(
        a: &RMatrix,
        shift: &RVector,
        radius: f64,
    ) -> Result<Vec<(Vec<i64>, f64)>, ThetaError> {
        let g = a.nrows();
        if shift.len() != g {
            return Err(ThetaError::DimensionMismatch {
                expected: g,
                got: shift.len(),
            });
        }
        let chol = Cholesky::<f64, Dyn>::new(a.clone()).ok_or(ThetaError::NonFinite)?;
        // A = L Lᵀ; with R = Lᵀ (upper), q(x) = Σ_i (Σ_{j≥i} R_ij x_j)².
        let l = chol.l();
        let r2 = radius * radius;
        let mut points = Vec::new();
        let mut x = vec![0.0f64; g];
        let mut m = vec![0i64; g];
        // recurse from the last coordinate down
        #[allow(clippy::too_many_arguments)]
        fn descend(
            level: isize,
            q_above: f64,
            r2: f64,
            l: &RMatrix,
            shift: &RVector,
            x: &mut Vec<f64>,
            m: &mut Vec<i64>,
            points: &mut Vec<(Vec<i64>, f64)>,
        ) {
            if level < 0 {
                points.push((m.clone(), q_above));
                return;
            }
            let i = level as usize;
            let g = shift.len();
            // t = Σ_{j>i} R_ij x_j with R_ij = L_ji
            let mut t = 0.0;
            for j in (i + 1)..g {
                t += l[(j, i)] * x[j];
            }
            let rii = l[(i, i)];
            let band = (r2 - q_above).max(0.0).sqrt();
            let lo = (-band - t) / rii - shift[i];
            let hi = (band - t) / rii - shift[i];
            let mlo = lo.ceil() as i64;
            let mhi = hi.floor() as i64;
            for mi in mlo..=mhi {
                let xi = mi as f64 + shift[i];
                let w = rii * xi + t;
                let q = q_above + w * w;
                if q <= r2 {
                    x[i] = xi;
                    m[i] = mi;
                    descend(level - 1, q, r2, l, shift, x, m, points);
                }
            }
        }
        descend(g as isize - 1, 0.0, r2, &l, shift, &mut x, &mut m, &mut points);
        points.sort_by(|p, q| {
            p.1.partial_cmp(&q.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| p.0.cmp(&q.0))
        });
        Ok(points)
    }

    /// Smallest whitened radius whose Gaussian tail bound drops below `eps`,
    /// given the Cholesky diagonal of the (π Im τ) form.
    ///
    /// The bound counts lattice points per unit shell (≤ Π_i (2(R+1)/L_ii + 1))
    /// against the 1-dimensional tail e^{−R²}, with a 2× margin for the shell
    /// geometric series.
    pub fn tail_radius(l_diag: &[f64], eps: f64) -> f64 {
        let mut r = (1.0f64 / eps).ln().max(1.0).sqrt();
        for _ in 0..8 {
            let count: f64 = l_diag
                .iter()
                .map(|&lii| (2.0 * (r + 1.0) / lii + 1.0).max(1.0))
                .product();
            r = ((2.0 * count / eps).ln().max(1.0)).sqrt();
        }
        r
    }
}

fn check_z(z: &CVector, g: usize) -> Result<(), ThetaError> {
    if z.len() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            got: z.len(),
        });
    }
    if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(ThetaError::NonFinite);
    }
    Ok(())
}

/// Evaluates θ[a;b](z, τ) with truncation metadata.
pub fn theta_eval_detailed(
    ch: &ThetaCharacteristic,
    z: &CVector,
    tau: &SiegelPoint,
    policy: &TruncationPolicy,
) -> Result<ThetaEval, ThetaError> {
    policy.validate()?;
    let g = tau.genus();
    if ch.genus() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            got: ch.genus(),
        });
    }
    check_z(z, g)?;

    let y = tau.im();
    let a_form = y.map(|v| std::f64::consts::PI * v);
    let chol = Cholesky::<f64, Dyn>::new(a_form.clone()).ok_or(ThetaError::NonFinite)?;
    let l_diag: Vec<f64> = (0..g).map(|i| chol.l()[(i, i)]).collect();
    let radius = lattice::tail_radius(&l_diag, policy.epsilon);
    if radius > policy.max_radius {
        return Err(ThetaError::RadiusCapExceeded {
            radius,
            cap: policy.max_radius,
        });
    }

    // Gaussian peak: m + a ≈ −c with c = (Im τ)^{−1} Im z
    let im_z = RVector::from_iterator(g, z.iter().map(|v| v.im));
    let c = tau.im_inv() * im_z;
    let shift = &ch.a + &c;

    let points = lattice::ellipsoid_points(&a_form, &shift, radius)?;

    let zb: CVector = CVector::from_iterator(g, z.iter().zip(ch.b.iter()).map(|(zi, bi)| zi + bi));
    let tau_m = tau.tau();
    let mut acc = NeumaierC::new();
    for (m, _) in &points {
        // mv = m + a
        let mv = DVector::<f64>::from_iterator(g, m.iter().zip(ch.a.iter()).map(|(mi, ai)| *mi as f64 + ai));
        // q = ⟨mv, τ mv⟩, lin = ⟨mv, z+b⟩
        let mut q = C64::default();
        for i in 0..g {
            let mut row = C64::default();
            for j in 0..g {
                row += tau_m[(i, j)] * mv[j];
            }
            q += row * mv[i];
        }
        let mut lin = C64::default();
        for i in 0..g {
            lin += zb[i] * mv[i];
        }
        let exponent = C64::new(0.0, std::f64::consts::PI) * q
            + C64::new(0.0, 2.0 * std::f64::consts::PI) * lin;
        acc.add(exponent.exp());
    }

    Ok(ThetaEval {
        value: acc.value(),
        terms: points.len(),
        radius,
    })
}

/// Evaluates θ[a;b](z, τ); see [`theta_eval_detailed`] for the error bound.
pub fn theta_eval(
    ch: &ThetaCharacteristic,
    z: &CVector,
    tau: &SiegelPoint,
    policy: &TruncationPolicy,
) -> Result<C64, ThetaError> {
    theta_eval_detailed(ch, z, tau, policy).map(|e| e.value)
}

/// The classical factor of automorphy
/// e_γ(z) = exp(−π√−1 ⟨n, 2z + τn⟩) for γ = m + τn.
///
/// Satisfies the cocycle identity e_{γ+γ'}(z) = e_γ(z+γ')·e_{γ'}(z), and the
/// Riemann theta transforms by θ(z+γ) = e_γ(z)·θ(z).
pub fn factor_of_automorphy(
    gamma: &LatticeVector,
    z: &CVector,
    tau: &SiegelPoint,
) -> Result<C64, ThetaError> {
    let g = tau.genus();
    if gamma.genus() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            got: gamma.genus(),
        });
    }
    check_z(z, g)?;
    // ⟨n, 2z + τn⟩
    let mut inner = C64::default();
    for i in 0..g {
        let ni = gamma.n[i] as f64;
        let mut tn = C64::default();
        for j in 0..g {
            tn += tau.tau()[(i, j)] * C64::new(gamma.n[j] as f64, 0.0);
        }
        inner += C64::new(ni, 0.0) * (C64::new(2.0, 0.0) * z[i] + tn);
    }
    Ok((C64::new(0.0, -std::f64::consts::PI) * inner).exp())
}

/// Number of second-order basis elements, 2^g.
pub fn second_order_dim(g: usize) -> usize {
    1usize << g
}

/// The σ_i ∈ {0,1}^g indexing the second-order basis, in lexicographic order
/// (first coordinate most significant); `i` is 1-based.
pub fn second_order_sigma(g: usize, i: usize) -> Result<Vec<u8>, ThetaError> {
    let max = second_order_dim(g);
    if i == 0 || i > max {
        return Err(ThetaError::IndexOutOfRange { index: i, max });
    }
    let k = i - 1;
    Ok((0..g).map(|j| ((k >> (g - 1 - j)) & 1) as u8).collect())
}

/// The i-th element of the orthogonal basis of H⁰(A_τ, L_τ^⊗2):
///
/// ```text
/// θ_{τ,i}(z) = 2^{g/2} · θ[σ_i/2; 0](2z, 2τ),   i = 1..2^g.
/// ```
///
/// Each θ_{τ,i} is a holomorphic section of L_τ^⊗2 in the classical
/// trivialization, i.e. satisfies θ_{τ,i}(z+γ) = e_γ(z)²·θ_{τ,i}(z), and the
/// family is L²-orthogonal with ‖θ_{τ,i}‖² = (det Im τ)^{−1/2}. The constant
/// 2^{g/2} normalizes the plain theta-with-characteristic values (whose
/// Gaussian unfolding integrates to 2^{−g}(det Im τ)^{−1/2}) so that the norm
/// identity holds on the nose.
pub fn second_order_basis(
    i: usize,
    z: &CVector,
    tau: &SiegelPoint,
    policy: &TruncationPolicy,
) -> Result<C64, ThetaError> {
    let g = tau.genus();
    let sigma = second_order_sigma(g, i)?;
    check_z(z, g)?;
    let a = RVector::from_iterator(g, sigma.iter().map(|&s| s as f64 / 2.0));
    let ch = ThetaCharacteristic::new(a, RVector::zeros(g))?;
    let z2 = z.map(|v| v * 2.0);
    let tau2 = SiegelPoint::new(tau.tau().map(|v| v * 2.0)).expect("2*tau stays in the Siegel space");
    let raw = theta_eval(&ch, &z2, &tau2, policy)?;
    Ok(raw * 2f64.powf(g as f64 / 2.0))
}
