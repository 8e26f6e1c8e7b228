//! The curvature identity verifiers over seeded random draws: residual
//! magnitudes, step robustness, Hermitian reality and signs, and the
//! root/dual scaling law.

use ppav_core::curvature::{
    c1_translation_residual, ddbar_logmetric, verify_c1_theta_bundle, verify_hodge_curvature,
    verify_root_curvature, verify_theta_det_curvature, FDConfig,
};
use ppav_core::detline::{root_dual_logmetric, LogMetricForm};
use ppav_core::sampling;
use ppav_core::siegel::TangentDirection;

#[test]
fn hodge_curvature_random_draws() {
    let mut rng = sampling::rng_for(70, "hodge");
    for g in 1..=3usize {
        for _ in 0..6 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let x = sampling::random_tangent(&mut rng, g);
            let y = sampling::random_tangent(&mut rng, g);
            let r = verify_hodge_curvature(&tau, &x, &y, &FDConfig::default()).unwrap();
            assert!(r < 1e-6, "g={g}: residual {r:.3e}");
        }
    }
}

#[test]
fn theta_det_curvature_random_draws() {
    let mut rng = sampling::rng_for(71, "theta-det");
    for g in 1..=3usize {
        for _ in 0..6 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let x = sampling::random_tangent(&mut rng, g);
            let y = sampling::random_tangent(&mut rng, g);
            let r = verify_theta_det_curvature(&tau, &x, &y, &FDConfig::default()).unwrap();
            assert!(r < 1e-6, "g={g}: residual {r:.3e}");
        }
    }
}

#[test]
fn root_curvature_random_draws() {
    let mut rng = sampling::rng_for(72, "root");
    for g in 1..=3usize {
        for _ in 0..6 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let x = sampling::random_tangent(&mut rng, g);
            let y = sampling::random_tangent(&mut rng, g);
            let r = verify_root_curvature(&tau, &x, &y, &FDConfig::default()).unwrap();
            assert!(r < 1e-6, "g={g}: residual {r:.3e}");
        }
    }
}

#[test]
fn root_dual_scaling_law() {
    // curvature of root_dual(f, k) = −(1/k)·curvature of f, by FD at random
    // τ for k ∈ {1, 2, 4}
    let mut rng = sampling::rng_for(73, "root-scaling");
    for g in 1..=3usize {
        let tau = sampling::random_siegel_interior(&mut rng, g);
        let x = sampling::random_tangent(&mut rng, g);
        let y = sampling::random_tangent(&mut rng, g);
        let f = LogMetricForm::theta_det_l2(g);
        let base = ddbar_logmetric(&f, &tau, &x, &y, &FDConfig::default())
            .unwrap()
            .value();
        for k in [1u32, 2, 4] {
            let rooted = root_dual_logmetric(&f, k);
            let v = ddbar_logmetric(&rooted, &tau, &x, &y, &FDConfig::default())
                .unwrap()
                .value();
            let expected = -base / k as f64;
            let rel = (v - expected).norm() / expected.norm().max(1e-14);
            assert!(rel < 1e-8, "g={g} k={k}: rel {rel:.3e}");
        }
    }
}

#[test]
fn hermitian_reality_and_signs_on_diagonal_pairs() {
    // ∂∂̄f(X,X) of a real log-metric is real to FD noise; the sign follows
    // the bundle: positive for det 𝓔 and λ(Θ^⊗2), negative for the Hodge
    // line root metric (dual of an ample determinant).
    let mut rng = sampling::rng_for(74, "reality");
    for g in 1..=3usize {
        for _ in 0..4 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let x = sampling::random_tangent(&mut rng, g);
            let cfg = FDConfig::default();
            let hodge = ddbar_logmetric(&LogMetricForm::hodge_determinant(g), &tau, &x, &x, &cfg)
                .unwrap()
                .value();
            let tdet = ddbar_logmetric(&LogMetricForm::theta_det_l2(g), &tau, &x, &x, &cfg)
                .unwrap()
                .value();
            let root = ddbar_logmetric(
                &root_dual_logmetric(&LogMetricForm::theta_det_l2(g), 1 << (g - 1)),
                &tau,
                &x,
                &x,
                &cfg,
            )
            .unwrap()
            .value();
            for (name, v, positive) in [
                ("hodge", hodge, true),
                ("theta-det", tdet, true),
                ("root", root, false),
            ] {
                assert!(
                    v.im.abs() < 1e-8 * v.re.abs().max(1.0),
                    "g={g} {name}: imaginary residue {:.3e}",
                    v.im
                );
                assert!(
                    (v.re > 0.0) == positive,
                    "g={g} {name}: wrong sign {v}"
                );
            }
        }
    }
}

#[test]
fn step_robustness_no_blowup_as_step_shrinks() {
    // shrinking the step across {1e−2, 1e−3, 1e−4} (plain central stencil)
    // never makes the residual more than 10× worse: truncation decays as h²
    // and the rounding floor stays below the coarser-step residual
    let mut rng = sampling::rng_for(75, "steps");
    for g in 1..=2usize {
        let tau = sampling::random_siegel_interior(&mut rng, g);
        let x = sampling::random_tangent(&mut rng, g);
        let y = sampling::random_tangent(&mut rng, g);
        let mut prev: Option<f64> = None;
        for step in [1e-2, 1e-3, 1e-4] {
            let r = verify_hodge_curvature(&tau, &x, &y, &FDConfig::plain(step)).unwrap();
            if let Some(p) = prev {
                assert!(
                    r <= 10.0 * p + 1e-12,
                    "g={g}: step {step:.0e} residual {r:.3e} blew past 10x {p:.3e}"
                );
            }
            prev = Some(r);
        }
    }
}

#[test]
fn c1_identity_and_translation_random_draws() {
    let mut rng = sampling::rng_for(76, "c1");
    // quadratic weight: coarse step, zero truncation error
    let cfg = FDConfig::with_step(0.25);
    for g in 1..=2usize {
        for _ in 0..6 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let v = sampling::random_fiber_vector(&mut rng, g);
            let w = sampling::random_fiber_vector(&mut rng, g);
            let r = verify_c1_theta_bundle(&tau, &z, &v, &w, &cfg).unwrap();
            assert!(r < 1e-9, "g={g}: c1 residual {r:.3e}");
            let gamma = sampling::random_lattice_vector(&mut rng, g, 2);
            let t = c1_translation_residual(&tau, &z, &gamma.embed(&tau), &v, &w, &cfg).unwrap();
            assert!(t < 1e-10, "g={g}: translation residual {t:.3e}");
        }
    }
}

#[test]
fn zero_direction_short_circuits() {
    let tau = ppav_core::siegel::SiegelPoint::at_i(2);
    let z = TangentDirection::zero(2);
    let x = TangentDirection::elementary(2, 1, 1);
    let r = verify_hodge_curvature(&tau, &x, &z, &FDConfig::default()).unwrap();
    assert_eq!(r, 0.0);
}
