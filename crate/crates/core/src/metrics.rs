//! The Hermitian metric on the theta line bundle, L² inner products of
//! sections by torus quadrature, and the L² metric on the Hodge bundle
//! determinant.
//!
//! The Hermitian pairing attached to τ is H(z, w) = (Im τ)^{ij} z̄_i w_j
//! (conjugate-linear in the first slot, matching the paper's convention).
//! The metric on the theta bundle weights a section value by
//! exp(−kπ H(y,y)), y = Im z, for weight k, and the L² product integrates
//! against ω_τ^g/g!, which in the coordinates z = u + τv, (u, v) ∈ [0,1)^{2g}
//! is exactly the uniform probability measure — no Jacobian factors.
//!
//! The L² product is conjugate-linear in the SECOND argument. (H above is
//! conjugate-linear in the first; the two conventions coexist in the source
//! material, so the choice is made once, here, and the Gram-matrix tests are
//! insensitive to it.)
//!
//! Weight bookkeeping for integrands: |s|² of a weight-k section carries
//! exp(−2kπ H(y,y)) — each of the two conjugate factors contributes
//! exp(−kπ H(y,y)). For the second-order basis (k = 2) the integrand weight
//! is exp(−4π H(y,y)).

use std::sync::Arc;

use thiserror::Error;

use crate::accum::par_mean_complex;
use crate::curvature::Form11Value;
use crate::siegel::SiegelPoint;
use crate::theta::{self, second_order_dim, TruncationPolicy};
use crate::{CMatrix, CVector, RMatrix, RVector, C64};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("weight mismatch: {left} vs {right}")]
    WeightMismatch { left: i64, right: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numerical quadrature disabled for g = {g} (cost grows as n^(2g)); closed forms serve g >= 3")]
    GenusTooLargeForQuadrature { g: usize },
    #[error(transparent)]
    Theta(#[from] theta::ThetaError),
}

/// The Hermitian pairing H(z,w) = (Im τ)^{ij} z̄_i w_j of a Siegel point;
/// conjugate-linear in the first slot, H(z,z) ≥ 0.
#[derive(Debug, Clone)]
pub struct HermitianPairing {
    im_inv: RMatrix,
}

impl HermitianPairing {
    pub fn new(tau: &SiegelPoint) -> Self {
        Self {
            im_inv: tau.im_inv(),
        }
    }

    pub fn eval(&self, z: &CVector, w: &CVector) -> C64 {
        let g = self.im_inv.nrows();
        let mut s = C64::default();
        for i in 0..g {
            for j in 0..g {
                s += self.im_inv[(i, j)] * z[i].conj() * w[j];
            }
        }
        s
    }

    /// H(y, y) for a real vector y (the metric exponent).
    pub fn eval_real(&self, y: &RVector) -> f64 {
        (y.transpose() * &self.im_inv * y)[(0, 0)]
    }
}

/// Uniform product grid on [0,1)^{2g} realizing ∫_{A_τ} · ω^g/g! through
/// z = u + τv; every node carries weight n_per_dim^{−2g}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    pub g: usize,
    pub n_per_dim: usize,
}

impl QuadratureGrid {
    pub fn new(g: usize, n_per_dim: usize) -> Result<Self, MetricsError> {
        if g >= 3 {
            return Err(MetricsError::GenusTooLargeForQuadrature { g });
        }
        Ok(Self { g, n_per_dim })
    }

    /// Spec defaults: n = 64 for g = 1, n = 24 for g = 2.
    pub fn default_for_genus(g: usize) -> Result<Self, MetricsError> {
        match g {
            1 => Self::new(1, 64),
            2 => Self::new(2, 24),
            _ => Err(MetricsError::GenusTooLargeForQuadrature { g }),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n_per_dim.pow(2 * self.g as u32)
    }

    /// Decodes node `idx` into (u, v) ∈ [0,1)^{2g}.
    pub fn node(&self, idx: usize) -> (RVector, RVector) {
        let n = self.n_per_dim;
        let g = self.g;
        let mut digits = idx;
        let mut uv = vec![0.0f64; 2 * g];
        for slot in (0..2 * g).rev() {
            uv[slot] = (digits % n) as f64 / n as f64;
            digits /= n;
        }
        (
            RVector::from_row_slice(&uv[..g]),
            RVector::from_row_slice(&uv[g..]),
        )
    }

    /// z = u + τ v at node `idx`.
    pub fn point(&self, tau: &SiegelPoint, idx: usize) -> CVector {
        let (u, v) = self.node(idx);
        let g = self.g;
        let mut z = CVector::zeros(g);
        for i in 0..g {
            let mut zi = C64::new(u[i], 0.0);
            for j in 0..g {
                zi += tau.tau()[(i, j)] * v[j];
            }
            z[i] = zi;
        }
        z
    }
}

/// A holomorphic section of L_τ^⊗k in the classical trivialization: a
/// callable z ↦ value plus the weight power k.
#[derive(Clone)]
pub struct SectionEvaluator {
    eval: Arc<dyn Fn(&CVector) -> C64 + Send + Sync>,
    weight_power: i64,
}

impl std::fmt::Debug for SectionEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SectionEvaluator")
            .field("weight_power", &self.weight_power)
            .finish()
    }
}

impl SectionEvaluator {
    pub fn new(
        eval: Arc<dyn Fn(&CVector) -> C64 + Send + Sync>,
        weight_power: i64,
    ) -> Self {
        Self { eval, weight_power }
    }

    /// The constant section 1 of the trivial bundle (k = 0).
    pub fn constant_one(g: usize) -> Self {
        let _ = g;
        Self {
            eval: Arc::new(|_z| C64::new(1.0, 0.0)),
            weight_power: 0,
        }
    }

    /// Riemann theta as the weight-1 section of L_τ.
    pub fn riemann_theta(tau: &SiegelPoint, policy: TruncationPolicy) -> Result<Self, MetricsError> {
        let tau = tau.clone();
        let g = tau.genus();
        let ch = theta::ThetaCharacteristic::riemann(g);
        // validate once: the truncation radius depends only on tau and policy
        theta::theta_eval(&ch, &CVector::zeros(g), &tau, &policy)?;
        Ok(Self {
            eval: Arc::new(move |z| {
                theta::theta_eval(&ch, z, &tau, &policy).expect("policy validated for this tau")
            }),
            weight_power: 1,
        })
    }

    /// θ_{τ,i}, the i-th second-order basis element (weight 2), i = 1..2^g.
    pub fn theta_basis(
        tau: &SiegelPoint,
        i: usize,
        policy: TruncationPolicy,
    ) -> Result<Self, MetricsError> {
        let tau = tau.clone();
        let g = tau.genus();
        theta::second_order_basis(i, &CVector::zeros(g), &tau, &policy)?;
        Ok(Self {
            eval: Arc::new(move |z| {
                theta::second_order_basis(i, z, &tau, &policy)
                    .expect("index and policy validated for this tau")
            }),
            weight_power: 2,
        })
    }

    pub fn weight_power(&self) -> i64 {
        self.weight_power
    }

    pub fn eval(&self, z: &CVector) -> C64 {
        (self.eval)(z)
    }
}

/// Pointwise norm of a weight-k section at z:
/// ‖s‖(z) = |s(z)| · exp(−kπ H(y,y)), y = Im z.
///
/// Γ_τ-periodic in z — the metric descends to the torus.
pub fn pointwise_norm(
    s: &SectionEvaluator,
    z: &CVector,
    tau: &SiegelPoint,
) -> Result<f64, MetricsError> {
    if z.len() != tau.genus() {
        return Err(MetricsError::DimensionMismatch {
            expected: tau.genus(),
            got: z.len(),
        });
    }
    let h = HermitianPairing::new(tau);
    let y = RVector::from_iterator(tau.genus(), z.iter().map(|v| v.im));
    let exponent = -(s.weight_power as f64) * std::f64::consts::PI * h.eval_real(&y);
    Ok(s.eval(z).norm() * exponent.exp())
}

/// L² product ⟨s₁, s₂⟩ = mean over the grid of s₁(z)·conj(s₂(z))·e^{−2kπH(y,y)};
/// conjugate-linear in the second argument.
///
/// Spectral (super-algebraic) convergence in n_per_dim for these smooth
/// periodic integrands. The grid reduction is a fixed-chunk deterministic
/// parallel mean: bit-identical results for any thread count.
pub fn l2_inner(
    s1: &SectionEvaluator,
    s2: &SectionEvaluator,
    tau: &SiegelPoint,
    grid: &QuadratureGrid,
) -> Result<C64, MetricsError> {
    if s1.weight_power != s2.weight_power {
        return Err(MetricsError::WeightMismatch {
            left: s1.weight_power,
            right: s2.weight_power,
        });
    }
    if grid.g != tau.genus() {
        return Err(MetricsError::DimensionMismatch {
            expected: tau.genus(),
            got: grid.g,
        });
    }
    let h = HermitianPairing::new(tau);
    let k = s1.weight_power as f64;
    let out = par_mean_complex(grid.node_count(), 1, |idx, slot| {
        let z = grid.point(tau, idx);
        let y = RVector::from_iterator(grid.g, z.iter().map(|v| v.im));
        let w = (-2.0 * k * std::f64::consts::PI * h.eval_real(&y)).exp();
        slot[0] = s1.eval(&z) * s2.eval(&z).conj() * w;
    });
    Ok(out[0])
}

/// Gram matrix of the second-order basis {θ_{τ,i}} under [`l2_inner`];
/// expected value (det Im τ)^{−1/2}·Identity (the norm identity plus pairwise
/// orthogonality).
///
/// Quadrature is restricted to g ≤ 2; the closed-form norms serve g ≥ 3.
pub fn gram_matrix(tau: &SiegelPoint, grid: &QuadratureGrid) -> Result<CMatrix, MetricsError> {
    gram_matrix_with_policy(tau, grid, TruncationPolicy::default())
}

/// [`gram_matrix`] with an explicit theta truncation policy.
pub fn gram_matrix_with_policy(
    tau: &SiegelPoint,
    grid: &QuadratureGrid,
    policy: TruncationPolicy,
) -> Result<CMatrix, MetricsError> {
    let g = tau.genus();
    if g >= 3 {
        return Err(MetricsError::GenusTooLargeForQuadrature { g });
    }
    if grid.g != g {
        return Err(MetricsError::DimensionMismatch {
            expected: g,
            got: grid.g,
        });
    }
    let dim = second_order_dim(g);
    let sections: Vec<SectionEvaluator> = (1..=dim)
        .map(|i| SectionEvaluator::theta_basis(tau, i, policy))
        .collect::<Result<_, _>>()?;
    let h = HermitianPairing::new(tau);
    let out = par_mean_complex(grid.node_count(), dim * dim, |idx, slots| {
        let z = grid.point(tau, idx);
        let y = RVector::from_iterator(g, z.iter().map(|v| v.im));
        // weight 2 sections: |s|^2 carries exp(-4 pi H)
        let w = (-4.0 * std::f64::consts::PI * h.eval_real(&y)).exp();
        let vals: Vec<C64> = sections.iter().map(|s| s.eval(&z)).collect();
        for p in 0..dim {
            for q in 0..dim {
                slots[p * dim + q] = vals[p] * vals[q].conj() * w;
            }
        }
    });
    Ok(CMatrix::from_fn(dim, dim, |p, q| out[p * dim + q]))
}

/// Closed-form squared L² norm of every second-order basis element:
/// ‖θ_{τ,i}‖² = (det Im τ)^{−1/2}. Quadrature-free, so it serves any genus;
/// for g ≤ 2 [`gram_matrix`] reproduces it numerically.
pub fn theta_basis_norm_sq(tau: &SiegelPoint) -> f64 {
    tau.det_im().powf(-0.5)
}

/// The pairing matrix ⟨dz_i, dz_j⟩ = 2(Im τ)_{ij} of the Hodge bundle frame.
pub fn hodge_gram(tau: &SiegelPoint) -> RMatrix {
    tau.im().map(|v| 2.0 * v)
}

/// Squared L² norm of the frame s = dz₁∧…∧dz_g of det 𝓔:
/// ‖s‖² = det(⟨dz_i, dz_j⟩) = 2^g · det(Im τ).
pub fn det_hodge_norm(tau: &SiegelPoint) -> f64 {
    let g = tau.genus() as i32;
    2f64.powi(g) * tau.det_im()
}

/// The principal polarization ω_τ = (√−1/2)(Im τ)^{ij} dz_i∧dz̄_j evaluated
/// on tangent vectors (V, W) of the torus fiber, with the crate's shared
/// slot convention (V holomorphic, conj(W) antiholomorphic).
pub fn polarization_form(tau: &SiegelPoint, v: &CVector, w: &CVector) -> Form11Value {
    let p = tau.im_inv();
    let g = tau.genus();
    let mut s = C64::default();
    for i in 0..g {
        for j in 0..g {
            s += p[(i, j)] * v[i] * w[j].conj();
        }
    }
    Form11Value::new(C64::new(0.0, 0.5) * s)
}
