//! The Siegel upper half space 𝔥_g, the symplectic group action, and the
//! Siegel Kähler form ω_S.
//!
//! 𝔥_g is the set of symmetric complex g×g matrices τ with positive-definite
//! imaginary part. Sp(2g,ℤ) acts by τ ↦ (Aτ+B)(Cτ+D)^{−1}, and the invariant
//! Kähler form is
//!
//! ```text
//! ω_S = (√−1/2) (Im τ)^{ik} (Im τ)^{mj} dτ_{km} ∧ dτ̄_{ij}
//! ```
//!
//! where raised indices denote entries of (Im τ)^{−1} and sums run over all
//! unrestricted index pairs (τ_{km} = τ_{mk} treated as dependent
//! coordinates). This convention makes the g=1 specialization the familiar
//! ω_S = (√−1/2)(Im τ)^{−2} dτ∧dτ̄.
//!
//! Evaluation convention for (1,1)-forms, shared by the whole crate: α(X, Y)
//! plugs X into the holomorphic slots and conj(Y) into the antiholomorphic
//! slots, with no antisymmetrization factor beyond the wedge ordering.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::Form11Value;
use crate::{CMatrix, RMatrix, C64};

/// Relative tolerance for the symmetry check on τ.
pub const SYMMETRY_RTOL: f64 = 1e-12;
/// Scale factor for the smallest acceptable LDLᵀ pivot of Im τ.
pub const PIVOT_RTOL: f64 = 1e-12;
/// Entrywise tolerance for MᵀJM = J.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Tolerance for the symmetry of a pushed-forward tangent direction.
pub const PUSHFORWARD_SYM_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SiegelError {
    #[error("matrix is not symmetric: max |tau_ij - tau_ji| = {residual:.3e} exceeds {tol:.3e}")]
    NotSymmetric { residual: f64, tol: f64 },
    #[error("imaginary part is not positive definite (pivot {pivot:.3e} at index {index})")]
    ImaginaryPartNotPositiveDefinite { pivot: f64, index: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symplectic: max |M^T J M - J| = {residual:.3e}")]
    NotSymplectic { residual: f64 },
    #[error("C tau + D is numerically singular")]
    SingularDenominator,
    #[error("dimension mismatch: expected g = {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pushforward lost symmetry: residual {residual:.3e} exceeds {tol:.3e}")]
    PushforwardAsymmetry { residual: f64, tol: f64 },
}

/// A point of the Siegel upper half space: a symmetric complex g×g period
/// matrix with positive-definite imaginary part.
///
/// Construction validates both invariants and never silently symmetrizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    g: usize,
    tau: CMatrix,
}

/// A holomorphic tangent vector to 𝔥_g at any point: a symmetric complex
/// g×g matrix filling the dτ slots of ω_S.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDirection {
    g: usize,
    x: CMatrix,
}

/// An element of Sp(2g, ℝ) in block form [[A, B], [C, D]]; integer entries
/// give Sp(2g, ℤ). Construction checks MᵀJM = J.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    g: usize,
    a: RMatrix,
    b: RMatrix,
    c: RMatrix,
    d: RMatrix,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetry_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut r = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    r
}

/// LDLᵀ pivots of a symmetric real matrix, in elimination order.
///
/// Returns Err((pivot, index)) at the first pivot at or below `threshold`.
fn ldl_pivots(y: &RMatrix, threshold: f64) -> Result<Vec<f64>, (f64, usize)> {
    let n = y.nrows();
    let mut l = RMatrix::identity(n, n);
    let mut d = vec![0.0f64; n];
    for j in 0..n {
        let mut dj = y[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if dj <= threshold || dj.is_nan() {
            return Err((dj, j));
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut v = y[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }
    Ok(d)
}

/// Validates a complex square matrix as a point of 𝔥_g.
///
/// Checks symmetry (relative to the largest entry) and positive definiteness
/// of Im τ by LDLᵀ factorization with pivot threshold
/// `PIVOT_RTOL · trace(Im τ)/g`. The input is stored as given; asymmetric
/// input is rejected, not repaired.
pub fn validate_siegel(tau: CMatrix) -> Result<SiegelPoint, SiegelError> {
    if tau.nrows() != tau.ncols() || tau.nrows() == 0 {
        return Err(SiegelError::NotSquare {
            rows: tau.nrows(),
            cols: tau.ncols(),
        });
    }
    let g = tau.nrows();
    let scale = max_abs(&tau);
    let sym = symmetry_residual(&tau);
    let sym_tol = SYMMETRY_RTOL * scale;
    if sym > sym_tol {
        return Err(SiegelError::NotSymmetric {
            residual: sym,
            tol: sym_tol,
        });
    }
    let y = tau.map(|z| z.im);
    let trace: f64 = (0..g).map(|i| y[(i, i)]).sum();
    let threshold = PIVOT_RTOL * trace / (g as f64);
    if let Err((pivot, index)) = ldl_pivots(&y, threshold.max(0.0)) {
        return Err(SiegelError::ImaginaryPartNotPositiveDefinite { pivot, index });
    }
    Ok(SiegelPoint { g, tau })
}

impl SiegelPoint {
    /// Validating constructor; see [`validate_siegel`].
    pub fn new(tau: CMatrix) -> Result<Self, SiegelError> {
        validate_siegel(tau)
    }

    /// τ = i·I_g, the distinguished base point.
    pub fn at_i(g: usize) -> Self {
        let tau = CMatrix::from_diagonal_element(g, g, C64::new(0.0, 1.0));
        SiegelPoint { g, tau }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn tau(&self) -> &CMatrix {
        &self.tau
    }

    /// Im τ.
    pub fn im(&self) -> RMatrix {
        self.tau.map(|z| z.im)
    }

    /// (Im τ)^{−1}.
    pub fn im_inv(&self) -> RMatrix {
        self.im()
            .try_inverse()
            .expect("Im tau validated positive definite")
    }

    /// det(Im τ), positive on 𝔥_g.
    pub fn det_im(&self) -> f64 {
        self.im().determinant()
    }
}

impl TangentDirection {
    /// Validates symmetry with the same relative tolerance as τ itself.
    pub fn new(x: CMatrix) -> Result<Self, SiegelError> {
        if x.nrows() != x.ncols() || x.nrows() == 0 {
            return Err(SiegelError::NotSquare {
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        let scale = max_abs(&x);
        let sym = symmetry_residual(&x);
        if scale > 0.0 && sym > SYMMETRY_RTOL * scale {
            return Err(SiegelError::NotSymmetric {
                residual: sym,
                tol: SYMMETRY_RTOL * scale,
            });
        }
        Ok(TangentDirection { g: x.nrows(), x })
    }

    /// The elementary symmetric direction E_jk + E_kj (E_jj on the diagonal).
    pub fn elementary(g: usize, j: usize, k: usize) -> Self {
        let mut x = CMatrix::zeros(g, g);
        x[(j, k)] += C64::new(1.0, 0.0);
        if j != k {
            x[(k, j)] += C64::new(1.0, 0.0);
        }
        TangentDirection { g, x }
    }

    pub fn zero(g: usize) -> Self {
        TangentDirection {
            g,
            x: CMatrix::zeros(g, g),
        }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.x
    }

    pub fn scale(&self, s: C64) -> Self {
        TangentDirection {
            g: self.g,
            x: self.x.map(|z| z * s),
        }
    }
}

impl SymplecticMatrix {
    /// Builds [[A,B],[C,D]] and checks MᵀJM = J to `SYMPLECTIC_TOL`.
    pub fn new(a: RMatrix, b: RMatrix, c: RMatrix, d: RMatrix) -> Result<Self, SiegelError> {
        let g = a.nrows();
        for m in [&a, &b, &c, &d] {
            if m.nrows() != g || m.ncols() != g {
                return Err(SiegelError::DimensionMismatch {
                    expected: g,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        let m = Self { g, a, b, c, d };
        let residual = m.symplectic_residual();
        if residual > SYMPLECTIC_TOL {
            return Err(SiegelError::NotSymplectic { residual });
        }
        Ok(m)
    }

    pub fn identity(g: usize) -> Self {
        Self {
            g,
            a: RMatrix::identity(g, g),
            b: RMatrix::zeros(g, g),
            c: RMatrix::zeros(g, g),
            d: RMatrix::identity(g, g),
        }
    }

    /// The involution J: τ ↦ −τ^{−1} (A=0, B=−I, C=I, D=0).
    pub fn inversion(g: usize) -> Self {
        Self {
            g,
            a: RMatrix::zeros(g, g),
            b: -RMatrix::identity(g, g),
            c: RMatrix::identity(g, g),
            d: RMatrix::zeros(g, g),
        }
    }

    /// The translation τ ↦ τ + S for symmetric S.
    pub fn translation(s: RMatrix) -> Result<Self, SiegelError> {
        let g = s.nrows();
        Self::new(
            RMatrix::identity(g, g),
            s,
            RMatrix::zeros(g, g),
            RMatrix::identity(g, g),
        )
    }

    /// The GL(g) embedding τ ↦ U τ Uᵀ: block diag(U, U^{−T}).
    pub fn gl_block(u: RMatrix) -> Result<Self, SiegelError> {
        let g = u.nrows();
        let uinv = u
            .clone()
            .try_inverse()
            .ok_or(SiegelError::SingularDenominator)?;
        Self::new(
            u,
            RMatrix::zeros(g, g),
            RMatrix::zeros(g, g),
            uinv.transpose(),
        )
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn blocks(&self) -> (&RMatrix, &RMatrix, &RMatrix, &RMatrix) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    /// max |(MᵀJM − J)_{ij}|.
    pub fn symplectic_residual(&self) -> f64 {
        // MᵀJM = [[AᵀC−CᵀA, AᵀD−CᵀB], [BᵀC−DᵀA, BᵀD−DᵀB]], target [[0, I], [−I, 0]]
        let g = self.g;
        let atc = self.a.transpose() * &self.c;
        let atd = self.a.transpose() * &self.d;
        let btc = self.b.transpose() * &self.c;
        let btd = self.b.transpose() * &self.d;
        let block11 = &atc - atc.transpose();
        let block12 = atd - btc.transpose() - RMatrix::identity(g, g);
        let block22 = &btd - btd.transpose();
        let mut r = 0.0f64;
        for m in [&block11, &block12, &block22] {
            r = r.max(m.iter().map(|v| v.abs()).fold(0.0, f64::max));
        }
        r
    }

    /// Matrix product, staying in the group.
    pub fn compose(&self, rhs: &SymplecticMatrix) -> Result<SymplecticMatrix, SiegelError> {
        if self.g != rhs.g {
            return Err(SiegelError::DimensionMismatch {
                expected: self.g,
                got: rhs.g,
            });
        }
        SymplecticMatrix::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    fn a_complex(&self) -> CMatrix {
        self.a.map(|v| C64::new(v, 0.0))
    }
    fn b_complex(&self) -> CMatrix {
        self.b.map(|v| C64::new(v, 0.0))
    }
    fn c_complex(&self) -> CMatrix {
        self.c.map(|v| C64::new(v, 0.0))
    }
    fn d_complex(&self) -> CMatrix {
        self.d.map(|v| C64::new(v, 0.0))
    }
}

/// (Aτ+B)(Cτ+D)^{−1} on raw matrices; None when Cτ+D is singular.
fn moebius_raw(m: &SymplecticMatrix, tau: &CMatrix) -> Option<CMatrix> {
    let num = m.a_complex() * tau + m.b_complex();
    let den = m.c_complex() * tau + m.d_complex();
    // tau' = num · den^{-1}  solved as  den^T · tau'^T = num^T
    let lu = den.transpose().lu();
    let sol = lu.solve(&num.transpose())?;
    Some(sol.transpose())
}

/// The Sp(2g) action τ ↦ (Aτ+B)(Cτ+D)^{−1}.
///
/// The result of the Möbius map is exactly symmetric in exact arithmetic;
/// the ~1 ulp floating-point asymmetry is folded back before validation so
/// the output always passes [`validate_siegel`].
pub fn symplectic_act(m: &SymplecticMatrix, tau: &SiegelPoint) -> Result<SiegelPoint, SiegelError> {
    if m.g != tau.g {
        return Err(SiegelError::DimensionMismatch {
            expected: tau.g,
            got: m.g,
        });
    }
    let raw = moebius_raw(m, &tau.tau).ok_or(SiegelError::SingularDenominator)?;
    let sym = (&raw + raw.transpose()).map(|z| z * C64::new(0.5, 0.0));
    validate_siegel(sym)
}

/// Evaluates the Siegel form ω_S at τ on the ordered pair (X, Y):
///
/// ```text
/// ω_S(X, Y) = (√−1/2) Σ_{i,k,m,j} (Im τ)^{−1}_{ik} (Im τ)^{−1}_{mj} X_{km} conj(Y_{ij})
///           = (√−1/2) Σ_{i,j} (W X W)_{ij} conj(Y_{ij}),   W = (Im τ)^{−1}.
/// ```
///
/// ω_S(X, X)/√−1 is real and positive for X ≠ 0.
pub fn siegel_form(
    tau: &SiegelPoint,
    x: &TangentDirection,
    y: &TangentDirection,
) -> Result<Form11Value, SiegelError> {
    if x.g != tau.g || y.g != tau.g {
        return Err(SiegelError::DimensionMismatch {
            expected: tau.g,
            got: if x.g != tau.g { x.g } else { y.g },
        });
    }
    let w = tau.im_inv().map(|v| C64::new(v, 0.0));
    let wxw = &w * x.matrix() * &w;
    let mut s = C64::default();
    for i in 0..tau.g {
        for j in 0..tau.g {
            s += wxw[(i, j)] * y.matrix()[(i, j)].conj();
        }
    }
    Ok(Form11Value::new(C64::new(0.0, 0.5) * s))
}

/// Pushes a tangent direction forward along the symplectic action by central
/// finite differences on [`symplectic_act`], Richardson-extrapolated.
///
/// The closed form (Cτ+D)^{−T} X (Cτ+D)^{−1} exists
/// ([`tangent_pushforward_closed`]) and is used as a cross-check in tests;
/// the finite-difference version ships because it cannot encode a
/// transposition mistake. Output symmetry is enforced to
/// `PUSHFORWARD_SYM_TOL`.
pub fn tangent_pushforward(
    m: &SymplecticMatrix,
    tau: &SiegelPoint,
    x: &TangentDirection,
) -> Result<TangentDirection, SiegelError> {
    if m.g != tau.g || x.g != tau.g {
        return Err(SiegelError::DimensionMismatch {
            expected: tau.g,
            got: if m.g != tau.g { m.g } else { x.g },
        });
    }
    let scale = max_abs(x.matrix());
    if scale == 0.0 {
        return Ok(TangentDirection::zero(tau.g));
    }
    let h0 = 1e-5 / scale.max(1e-30);
    let diff = |h: f64| -> Option<CMatrix> {
        let hp = &tau.tau + x.matrix().map(|z| z * C64::new(h, 0.0));
        let hm = &tau.tau - x.matrix().map(|z| z * C64::new(h, 0.0));
        let fp = moebius_raw(m, &hp)?;
        let fm = moebius_raw(m, &hm)?;
        Some((fp - fm).map(|z| z / C64::new(2.0 * h, 0.0)))
    };
    let d1 = diff(h0).ok_or(SiegelError::SingularDenominator)?;
    let d2 = diff(h0 / 2.0).ok_or(SiegelError::SingularDenominator)?;
    // Richardson: error h^2 -> h^4
    let d = d2.map(|z| z * C64::new(4.0 / 3.0, 0.0)) - d1.map(|z| z * C64::new(1.0 / 3.0, 0.0));
    let asym = symmetry_residual(&d);
    let tol = PUSHFORWARD_SYM_TOL * max_abs(&d).max(1.0);
    if asym > tol {
        return Err(SiegelError::PushforwardAsymmetry {
            residual: asym,
            tol,
        });
    }
    let sym = (&d + d.transpose()).map(|z| z * C64::new(0.5, 0.0));
    Ok(TangentDirection { g: tau.g, x: sym })
}

/// Closed-form differential of the symplectic action:
/// dτ'(X) = (Cτ+D)^{−T} X (Cτ+D)^{−1}.
pub fn tangent_pushforward_closed(
    m: &SymplecticMatrix,
    tau: &SiegelPoint,
    x: &TangentDirection,
) -> Result<TangentDirection, SiegelError> {
    let den = m.c_complex() * &tau.tau + m.d_complex();
    let lu = den.clone().lu();
    if !lu.is_invertible() {
        return Err(SiegelError::SingularDenominator);
    }
    let den_inv = lu.try_inverse().ok_or(SiegelError::SingularDenominator)?;
    let out = den_inv.transpose() * x.matrix() * den_inv;
    TangentDirection::new((&out + out.transpose()).map(|z| z * C64::new(0.5, 0.0)))
}

// ---------------------------------------------------------------------------
// JSON encodings (row-major, IEEE double)
// ---------------------------------------------------------------------------

/// Wire form of [`SiegelPoint`]: `{"g": int, "tau_re": [[..]], "tau_im": [[..]]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SiegelPointJson {
    pub g: usize,
    pub tau_re: Vec<Vec<f64>>,
    pub tau_im: Vec<Vec<f64>>,
}

impl From<&SiegelPoint> for SiegelPointJson {
    fn from(p: &SiegelPoint) -> Self {
        let g = p.g;
        let row = |m: &CMatrix, f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..g)
                .map(|i| (0..g).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        SiegelPointJson {
            g,
            tau_re: row(&p.tau, |z| z.re),
            tau_im: row(&p.tau, |z| z.im),
        }
    }
}

impl TryFrom<SiegelPointJson> for SiegelPoint {
    type Error = SiegelError;

    fn try_from(j: SiegelPointJson) -> Result<Self, SiegelError> {
        let g = j.g;
        let ok_shape = j.tau_re.len() == g
            && j.tau_im.len() == g
            && j.tau_re.iter().all(|r| r.len() == g)
            && j.tau_im.iter().all(|r| r.len() == g);
        if !ok_shape {
            return Err(SiegelError::NotSquare {
                rows: j.tau_re.len(),
                cols: j.tau_re.first().map_or(0, |r| r.len()),
            });
        }
        let tau = DMatrix::from_fn(g, g, |i, k| C64::new(j.tau_re[i][k], j.tau_im[i][k]));
        validate_siegel(tau)
    }
}

/// Wire form of [`SymplecticMatrix`]: `{"A": [[..]], "B": …, "C": …, "D": …}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SymplecticMatrixJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
}

impl From<&SymplecticMatrix> for SymplecticMatrixJson {
    fn from(m: &SymplecticMatrix) -> Self {
        let g = m.g;
        let rows = |mm: &RMatrix| -> Vec<Vec<f64>> {
            (0..g)
                .map(|i| (0..g).map(|j| mm[(i, j)]).collect())
                .collect()
        };
        SymplecticMatrixJson {
            a: rows(&m.a),
            b: rows(&m.b),
            c: rows(&m.c),
            d: rows(&m.d),
        }
    }
}

impl TryFrom<SymplecticMatrixJson> for SymplecticMatrix {
    type Error = SiegelError;

    fn try_from(j: SymplecticMatrixJson) -> Result<Self, SiegelError> {
        let g = j.a.len();
        let to_mat = |rows: &Vec<Vec<f64>>| -> Result<RMatrix, SiegelError> {
            if rows.len() != g || rows.iter().any(|r| r.len() != g) {
                return Err(SiegelError::NotSquare {
                    rows: rows.len(),
                    cols: rows.first().map_or(0, |r| r.len()),
                });
            }
            Ok(DMatrix::from_fn(g, g, |i, k| rows[i][k]))
        };
        SymplecticMatrix::new(to_mat(&j.a)?, to_mat(&j.b)?, to_mat(&j.c)?, to_mat(&j.d)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validate_accepts_i_identity() {
        for g in 1..=4 {
            let p = SiegelPoint::new(CMatrix::from_diagonal_element(g, g, c(0.0, 1.0)));
            assert!(p.is_ok(), "g={g}");
        }
    }

    #[test]
    fn validate_rejects_asymmetric() {
        // [[i, 2], [0, i]]
        let tau = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        match validate_siegel(tau) {
            Err(SiegelError::NotSymmetric { .. }) => {}
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_negative_imaginary_part() {
        let tau = CMatrix::from_row_slice(1, 1, &[c(0.0, -1.0)]);
        match validate_siegel(tau) {
            Err(SiegelError::ImaginaryPartNotPositiveDefinite { .. }) => {}
            other => panic!("expected ImaginaryPartNotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_indefinite_im() {
        // Im = diag(1, -0.5): symmetric but indefinite
        let tau = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.1, 1.0), c(0.2, 0.0), c(0.2, 0.0), c(-0.3, -0.5)],
        );
        assert!(matches!(
            validate_siegel(tau),
            Err(SiegelError::ImaginaryPartNotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn act_identity_fixes_tau() {
        let tau = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 1.2), c(-0.1, 0.4), c(-0.1, 0.4), c(0.0, 0.9)],
        ))
        .unwrap();
        let id = SymplecticMatrix::identity(2);
        let out = symplectic_act(&id, &tau).unwrap();
        assert!((out.tau() - tau.tau()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn act_inversion_fixes_i() {
        // g=1, M = [[0,-1],[1,0]]: tau = i maps to -1/i = i
        let m = SymplecticMatrix::inversion(1);
        let tau = SiegelPoint::at_i(1);
        let out = symplectic_act(&m, &tau).unwrap();
        assert_relative_eq!(out.tau()[(0, 0)].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(out.tau()[(0, 0)].im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn act_translation_shifts() {
        // g=1, M = [[1,1],[0,1]]: i -> 1+i
        let m = SymplecticMatrix::translation(RMatrix::from_row_slice(1, 1, &[1.0])).unwrap();
        let out = symplectic_act(&m, &SiegelPoint::at_i(1)).unwrap();
        assert_relative_eq!(out.tau()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(out.tau()[(0, 0)].im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn symplectic_check_rejects_non_symplectic() {
        let g = 1;
        let r = SymplecticMatrix::new(
            RMatrix::from_row_slice(g, g, &[2.0]),
            RMatrix::zeros(g, g),
            RMatrix::zeros(g, g),
            RMatrix::from_row_slice(g, g, &[1.0]),
        );
        assert!(matches!(r, Err(SiegelError::NotSymplectic { .. })));
    }

    #[test]
    fn siegel_form_g1_base_value() {
        // g=1, tau=i, X=Y=1 -> i/2
        let tau = SiegelPoint::at_i(1);
        let x = TangentDirection::elementary(1, 0, 0);
        let v = siegel_form(&tau, &x, &x).unwrap().value();
        assert_relative_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn siegel_form_disjoint_support_vanishes() {
        // g=2, tau=i I, X=E11, Y=E22 -> 0
        let tau = SiegelPoint::at_i(2);
        let x = TangentDirection::elementary(2, 0, 0);
        let y = TangentDirection::elementary(2, 1, 1);
        let v = siegel_form(&tau, &x, &y).unwrap().value();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn siegel_form_zero_direction() {
        let tau = SiegelPoint::at_i(3);
        let x = TangentDirection::elementary(3, 0, 2);
        let z = TangentDirection::zero(3);
        assert_eq!(siegel_form(&tau, &x, &z).unwrap().value(), C64::default());
    }

    #[test]
    fn siegel_form_positivity_on_diagonal_direction() {
        let tau = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 1.2), c(-0.1, 0.4), c(-0.1, 0.4), c(0.0, 0.9)],
        ))
        .unwrap();
        let x = TangentDirection::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, -0.2), c(1.0, 0.3), c(1.0, 0.3), c(-0.7, 0.1)],
        ))
        .unwrap();
        let v = siegel_form(&tau, &x, &x).unwrap();
        let over_i = v.value() / c(0.0, 1.0);
        assert!(over_i.im.abs() < 1e-14);
        assert!(over_i.re > 0.0);
    }

    #[test]
    fn pushforward_identity_is_identity() {
        let tau = SiegelPoint::at_i(2);
        let x = TangentDirection::elementary(2, 0, 1);
        let out = tangent_pushforward(&SymplecticMatrix::identity(2), &tau, &x).unwrap();
        assert!((out.matrix() - x.matrix()).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn pushforward_translation_is_identity() {
        let m = SymplecticMatrix::translation(RMatrix::from_row_slice(1, 1, &[1.0])).unwrap();
        let tau = SiegelPoint::at_i(1);
        let x = TangentDirection::elementary(1, 0, 0);
        let out = tangent_pushforward(&m, &tau, &x).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)].re, 1.0, epsilon = 1e-10);
        assert_relative_eq!(out.matrix()[(0, 0)].im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn pushforward_inversion_matches_analytic() {
        // d(-1/tau) = tau^{-2} d tau; at tau = i: 1/i^2 = -1
        let m = SymplecticMatrix::inversion(1);
        let tau = SiegelPoint::at_i(1);
        let x = TangentDirection::elementary(1, 0, 0);
        let out = tangent_pushforward(&m, &tau, &x).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)].re, -1.0, epsilon = 1e-10);
        assert_relative_eq!(out.matrix()[(0, 0)].im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn json_roundtrip_siegel_point() {
        let tau = SiegelPoint::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.25, 1.5), c(-0.5, 0.25), c(-0.5, 0.25), c(0.125, 2.0)],
        ))
        .unwrap();
        let j = SiegelPointJson::from(&tau);
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.contains("\"tau_re\""));
        let back: SiegelPointJson = serde_json::from_str(&s).unwrap();
        let p = SiegelPoint::try_from(back).unwrap();
        assert_eq!(p.tau(), tau.tau());
    }

    #[test]
    fn json_symplectic_field_names() {
        let m = SymplecticMatrix::inversion(1);
        let j = SymplecticMatrixJson::from(&m);
        let s = serde_json::to_string(&j).unwrap();
        for key in ["\"A\"", "\"B\"", "\"C\"", "\"D\""] {
            assert!(s.contains(key), "missing {key} in {s}");
        }
        let m2 = SymplecticMatrix::try_from(serde_json::from_str::<SymplecticMatrixJson>(&s).unwrap())
            .unwrap();
        assert_eq!(m2, m);
    }
}
