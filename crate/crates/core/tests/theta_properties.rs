//! Property suites for the theta machinery: quasi-periodicity, evenness,
//! the automorphy cocycle, holomorphy in τ, and the heat-type equation that
//! cross-validates the z- and τ-differentiation paths.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use ppav_core::sampling;
use ppav_core::siegel::SiegelPoint;
use ppav_core::theta::{
    factor_of_automorphy, second_order_basis, theta_eval, LatticeVector, ThetaCharacteristic,
    TruncationPolicy,
};
use ppav_core::{CVector, RVector};
use proptest::prelude::*;

const PI: f64 = std::f64::consts::PI;

/// Independent brute-force lattice sum over the cube |m_i| ≤ cap, with an
/// optional polynomial prefactor per term (the symbolic differentiation
/// oracle: d_tau inserts πi(2−δ_jk)·mv_j·mv_k, d_zz inserts (2πi)²·mv_j·mv_k).
#[derive(Clone, Copy)]
enum Prefactor {
    One,
    DTau(usize, usize),
    Dzz(usize, usize),
}

fn theta_brute(z: &CVector, tau: &SiegelPoint, cap: i64, pre: Prefactor) -> C64 {
    let g = tau.genus();
    let mut idx = vec![-cap; g];
    let mut sum = C64::default();
    loop {
        let mv: Vec<f64> = idx.iter().map(|&m| m as f64).collect();
        let mut q = C64::default();
        for i in 0..g {
            for j in 0..g {
                q += tau.tau()[(i, j)] * mv[i] * mv[j];
            }
        }
        let mut lin = C64::default();
        for i in 0..g {
            lin += z[i] * mv[i];
        }
        let term = (C64::new(0.0, PI) * q + C64::new(0.0, 2.0 * PI) * lin).exp();
        let factor = match pre {
            Prefactor::One => C64::new(1.0, 0.0),
            Prefactor::DTau(j, k) => {
                let delta = if j == k { 1.0 } else { 0.0 };
                C64::new(0.0, PI * (2.0 - delta)) * mv[j] * mv[k]
            }
            Prefactor::Dzz(j, k) => C64::new(-4.0 * PI * PI, 0.0) * mv[j] * mv[k],
        };
        sum += factor * term;
        let mut c = 0;
        loop {
            if c == g {
                return sum;
            }
            idx[c] += 1;
            if idx[c] <= cap {
                break;
            }
            idx[c] = -cap;
            c += 1;
        }
    }
}

#[test]
fn quasi_periodicity_sweep() {
    // θ(z + m + τn) = e_γ(z)·θ(z), absolute residual < 1e−10, ‖n‖∞ ≤ 2
    let policy = TruncationPolicy::default();
    let mut rng = sampling::rng_for(40, "theta-qp");
    for g in 1..=3usize {
        for _ in 0..12 {
            let tau = sampling::random_siegel_small_im(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let gamma = sampling::random_lattice_vector(&mut rng, g, 2);
            let zg = &z + gamma.embed(&tau);
            let lhs = theta_eval(&ThetaCharacteristic::riemann(g), &zg, &tau, &policy).unwrap();
            let rhs = factor_of_automorphy(&gamma, &z, &tau).unwrap()
                * theta_eval(&ThetaCharacteristic::riemann(g), &z, &tau, &policy).unwrap();
            let res = (lhs - rhs).norm();
            assert!(res < 1e-10, "g={g}: residual {res:.3e}");
        }
    }
}

#[test]
fn evenness_sweep() {
    let policy = TruncationPolicy::default();
    let mut rng = sampling::rng_for(41, "theta-even");
    for g in 1..=3usize {
        for _ in 0..10 {
            let tau = sampling::random_siegel_small_im(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let zneg = z.map(|v| -v);
            let a = theta_eval(&ThetaCharacteristic::riemann(g), &z, &tau, &policy).unwrap();
            let b = theta_eval(&ThetaCharacteristic::riemann(g), &zneg, &tau, &policy).unwrap();
            assert!((a - b).norm() < 1e-12, "g={g}: {}", (a - b).norm());
        }
    }
}

#[test]
fn automorphy_cocycle_identity() {
    // e_{γ+γ'}(z) = e_γ(z+γ')·e_{γ'}(z)
    let mut rng = sampling::rng_for(42, "cocycle");
    for g in 1..=3usize {
        for _ in 0..15 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let ga = sampling::random_lattice_vector(&mut rng, g, 2);
            let gb = sampling::random_lattice_vector(&mut rng, g, 2);
            let gsum = LatticeVector::new(
                ga.m.iter().zip(&gb.m).map(|(x, y)| x + y).collect(),
                ga.n.iter().zip(&gb.n).map(|(x, y)| x + y).collect(),
            )
            .unwrap();
            let zb = &z + gb.embed(&tau);
            let lhs = factor_of_automorphy(&gsum, &z, &tau).unwrap();
            let rhs = factor_of_automorphy(&ga, &zb, &tau).unwrap()
                * factor_of_automorphy(&gb, &z, &tau).unwrap();
            let rel = (lhs - rhs).norm() / rhs.norm().max(1e-30);
            assert!(rel < 1e-10, "g={g}: rel {rel:.3e}");
        }
    }
}

#[test]
fn second_order_basis_holomorphic_in_tau() {
    // FD Cauchy–Riemann residual |∂̄_τ θ_{τ,i}| < 1e−6 along symmetric
    // matrix directions
    let policy = TruncationPolicy::default();
    let mut rng = sampling::rng_for(43, "holo");
    let h = 1e-4;
    for g in 1..=2usize {
        for _ in 0..4 {
            let tau = sampling::random_siegel_interior(&mut rng, g);
            let z = sampling::random_cell_point(&mut rng, &tau);
            let dir = sampling::random_tangent(&mut rng, g);
            for i in 1..=(1usize << g) {
                let eval = |t: &SiegelPoint| second_order_basis(i, &z, t, &policy).unwrap();
                let shift = |s: C64| {
                    SiegelPoint::new(tau.tau() + dir.matrix().map(|v| v * s)).unwrap()
                };
                let da_at = |h: f64| {
                    (eval(&shift(C64::new(h, 0.0))) - eval(&shift(C64::new(-h, 0.0))))
                        / C64::new(2.0 * h, 0.0)
                };
                let db_at = |h: f64| {
                    (eval(&shift(C64::new(0.0, h))) - eval(&shift(C64::new(0.0, -h))))
                        / C64::new(2.0 * h, 0.0)
                };
                let da = (da_at(h / 2.0) * 4.0 - da_at(h)) / 3.0;
                let db = (db_at(h / 2.0) * 4.0 - db_at(h)) / 3.0;
                // ∂̄ along dir = (∂_a + i ∂_b)/2
                let dbar = (da + C64::new(0.0, 1.0) * db) / C64::new(2.0, 0.0);
                assert!(
                    dbar.norm() < 1e-6,
                    "g={g} i={i}: |dbar theta| = {:.3e}",
                    dbar.norm()
                );
            }
        }
    }
}

#[test]
fn heat_equation_cross_validates_derivative_paths() {
    // ∂θ/∂τ_jk = (2−δ_jk)/(4π√−1) · ∂²θ/∂z_j∂z_k, with both sides obtained
    // two independent ways: term-by-term differentiation of the truncated
    // series (brute-force cube) and central finite differences on theta.
    let policy = TruncationPolicy::default();
    let mut rng = sampling::rng_for(44, "heat");
    let cap = 12;
    for g in 1..=2usize {
        let tau = sampling::random_siegel_interior(&mut rng, g);
        let z = sampling::random_cell_point(&mut rng, &tau);
        let pairs: Vec<(usize, usize)> = if g == 1 {
            vec![(0, 0)]
        } else {
            vec![(0, 0), (0, 1), (1, 1)]
        };
        for (j, k) in pairs {
            let series_tau = theta_brute(&z, &tau, cap, Prefactor::DTau(j, k));
            let series_zz = theta_brute(&z, &tau, cap, Prefactor::Dzz(j, k));
            // exact constant: series_tau = c_jk · series_zz
            let delta = if j == k { 1.0 } else { 0.0 };
            let c_jk = C64::new(2.0 - delta, 0.0) / C64::new(0.0, 4.0 * PI);
            let exact_rel = (series_tau - c_jk * series_zz).norm() / series_tau.norm().max(1e-30);
            assert!(exact_rel < 1e-12, "series identity broke: {exact_rel:.3e}");

            // FD in tau along the symmetric direction E_jk + E_kj (E_jj on
            // the diagonal), matching the dependent-coordinate convention
            let h = 1e-4;
            let ch = ThetaCharacteristic::riemann(g);
            let dir = ppav_core::siegel::TangentDirection::elementary(g, j, k);
            let ev_tau = |s: f64| {
                let t = SiegelPoint::new(tau.tau() + dir.matrix().map(|v| v * s)).unwrap();
                theta_eval(&ch, &z, &t, &policy).unwrap()
            };
            let fd_tau_h = |h: f64| (ev_tau(h) - ev_tau(-h)) / C64::new(2.0 * h, 0.0);
            let fd_tau = (fd_tau_h(h / 2.0) * 4.0 - fd_tau_h(h)) / 3.0;
            let rel_tau = (fd_tau - series_tau).norm() / series_tau.norm().max(1e-30);
            assert!(rel_tau < 1e-6, "tau path: {rel_tau:.3e}");

            // FD in z: mixed second derivative
            let ev_z = |a: f64, b: f64| {
                let mut zz = z.clone();
                zz[j] += C64::new(a, 0.0);
                zz[k] += C64::new(b, 0.0);
                theta_eval(&ch, &zz, &tau, &policy).unwrap()
            };
            let fd_zz_h = |h: f64| {
                if j == k {
                    (ev_z(h, 0.0) - ev_z(0.0, 0.0) * 2.0 + ev_z(-h, 0.0)) / C64::new(h * h, 0.0)
                } else {
                    (ev_z(h, h) - ev_z(h, -h) - ev_z(-h, h) + ev_z(-h, -h))
                        / C64::new(4.0 * h * h, 0.0)
                }
            };
            let fd_zz = (fd_zz_h(h / 2.0) * 4.0 - fd_zz_h(h)) / 3.0;
            let rel_zz = (fd_zz - series_zz).norm() / series_zz.norm().max(1e-30);
            assert!(rel_zz < 1e-6, "z path: {rel_zz:.3e}");
        }
    }
}

#[test]
fn truncation_tracks_brute_force_at_loose_epsilon() {
    let mut rng = sampling::rng_for(45, "trunc");
    for g in 1..=2usize {
        let tau = sampling::random_siegel_interior(&mut rng, g);
        let z = sampling::random_cell_point(&mut rng, &tau);
        let exact = theta_brute(&z, &tau, 14, Prefactor::One);
        for eps in [1e-4, 1e-8, 1e-12] {
            let v = theta_eval(
                &ThetaCharacteristic::riemann(g),
                &z,
                &tau,
                &TruncationPolicy::with_epsilon(eps),
            )
            .unwrap();
            let y = tau.im();
            let imz = RVector::from_iterator(g, z.iter().map(|c| c.im));
            let envelope =
                (PI * (imz.transpose() * tau.im_inv() * &imz)[(0, 0)]).exp();
            let _ = y;
            assert!(
                (v - exact).norm() <= eps * envelope + 1e-13,
                "g={g} eps={eps}: {} > {}",
                (v - exact).norm(),
                eps * envelope
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Quasi-periodicity as a property over g=1 draws.
    #[test]
    fn prop_quasi_periodicity_g1(
        re in -0.45f64..0.45,
        im in 0.25f64..0.9,
        u in 0.0f64..1.0,
        v in 0.0f64..1.0,
        m in -2i64..=2,
        n in -2i64..=2,
    ) {
        let tau = SiegelPoint::new(nalgebra::DMatrix::from_row_slice(1, 1, &[C64::new(re, im)])).unwrap();
        let z = CVector::from_row_slice(&[C64::new(u, 0.0) + tau.tau()[(0,0)] * v]);
        let gamma = LatticeVector::new(vec![m], vec![n]).unwrap();
        let p = TruncationPolicy::default();
        let zg = &z + gamma.embed(&tau);
        let lhs = theta_eval(&ThetaCharacteristic::riemann(1), &zg, &tau, &p).unwrap();
        let rhs = factor_of_automorphy(&gamma, &z, &tau).unwrap()
            * theta_eval(&ThetaCharacteristic::riemann(1), &z, &tau, &p).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
    }

    /// Halving epsilon respects the previous envelope bound.
    #[test]
    fn prop_truncation_soundness_g1(
        im in 0.3f64..1.2,
        u in 0.0f64..1.0,
        v in 0.0f64..1.0,
        exp10 in 4u32..12,
    ) {
        let eps = 10f64.powi(-(exp10 as i32));
        let tau = SiegelPoint::new(nalgebra::DMatrix::from_row_slice(1, 1, &[C64::new(0.0, im)])).unwrap();
        let z = CVector::from_row_slice(&[C64::new(u, im * v)]);
        let a = theta_eval(&ThetaCharacteristic::riemann(1), &z, &tau, &TruncationPolicy::with_epsilon(eps)).unwrap();
        let b = theta_eval(&ThetaCharacteristic::riemann(1), &z, &tau, &TruncationPolicy::with_epsilon(eps / 2.0)).unwrap();
        let envelope = (PI * (im * v) * (im * v) / im).exp();
        prop_assert!((a - b).norm() <= eps * envelope + 1e-14);
    }
}

#[test]
fn characteristic_shift_consistency() {
    // θ[a;b](z,τ) = exp(πi⟨a,τa⟩ + 2πi⟨a,z+b⟩)·θ[0;0](z + τa + b, τ):
    // the standard reduction of characteristics to argument shifts.
    let policy = TruncationPolicy::default();
    let mut rng = sampling::rng_for(46, "charshift");
    for g in 1..=2usize {
        let tau = sampling::random_siegel_interior(&mut rng, g);
        let z = sampling::random_cell_point(&mut rng, &tau);
        let a = RVector::from_iterator(g, (0..g).map(|_| 0.5));
        let b = RVector::from_iterator(g, (0..g).map(|i| if i == 0 { 0.5 } else { 0.0 }));
        let ch = ThetaCharacteristic::new(a.clone(), b.clone()).unwrap();
        let lhs = theta_eval(&ch, &z, &tau, &policy).unwrap();

        let a_c = DVector::from_iterator(g, a.iter().map(|&x| C64::new(x, 0.0)));
        let tau_a = tau.tau() * &a_c;
        let zs = CVector::from_iterator(
            g,
            (0..g).map(|i| z[i] + tau_a[i] + C64::new(b[i], 0.0)),
        );
        let mut qa = C64::default();
        for i in 0..g {
            for j in 0..g {
                qa += tau.tau()[(i, j)] * a[i] * a[j];
            }
        }
        let mut lin = C64::default();
        for i in 0..g {
            lin += (z[i] + C64::new(b[i], 0.0)) * a[i];
        }
        let prefactor = (C64::new(0.0, PI) * qa + C64::new(0.0, 2.0 * PI) * lin).exp();
        let rhs = prefactor
            * theta_eval(&ThetaCharacteristic::riemann(g), &zs, &tau, &policy).unwrap();
        let rel = (lhs - rhs).norm() / rhs.norm().max(1e-30);
        assert!(rel < 1e-11, "g={g}: rel {rel:.3e}");
    }
}
