//! Differential geometry of the Siegel upper half space and principally
//! polarized abelian varieties, at desk scale.
//!
//! The crate evaluates the objects that live over the Siegel space 𝔥_g —
//! Riemann theta functions with characteristics, the Hermitian metric on the
//! theta line bundle, L² inner products of sections, the Siegel Kähler form —
//! and verifies the curvature and analytic-torsion identities that relate
//! them: the curvature of the Hodge determinant bundle, the norms of the
//! second-order theta basis, Bost's closed-form analytic torsion and the
//! Quillen metric constant, and the root/dual metric construction on the
//! Hodge line bundle.
//!
//! Everything is computed on the covers 𝔥_g and 𝔥_g × ℂ^g; no orbifold or
//! fundamental-domain structure is modeled. All operations are pure functions
//! of immutable values and are safe to call from any number of threads.

pub mod accum;
pub mod curvature;
pub mod detline;
pub mod metrics;
pub mod sampling;
pub mod siegel;
pub mod theta;

pub use curvature::{ddbar_fd, ddbar_fd_z, CurvatureError, FDConfig, Form11Value};
pub use detline::{
    bost_torsion, quillen_factor_principal, rho_invariant_form, root_dual_logmetric,
    torsion_principal, torsion_theta_squared, DetlineError, LogMetricForm, PolarizationData,
    TorsionResult,
};
pub use metrics::{
    det_hodge_norm, gram_matrix, hodge_gram, l2_inner, pointwise_norm, theta_basis_norm_sq,
    MetricsError, QuadratureGrid, SectionEvaluator,
};
pub use siegel::{
    siegel_form, symplectic_act, tangent_pushforward, SiegelError, SiegelPoint, SymplecticMatrix,
    TangentDirection,
};
pub use theta::{
    factor_of_automorphy, second_order_basis, theta_eval, theta_eval_detailed, LatticeVector,
    ThetaCharacteristic, ThetaError, ThetaEval, TruncationPolicy,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVector = nalgebra::DVector<f64>;
