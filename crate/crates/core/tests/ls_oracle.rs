//! Least-squares estimator against closed forms for the Janus layout.

use beamsnet::dvl::{
    beams_from_velocity, build_geometry, corrupt_beams, ls_estimate, BeamErrorParams, BeamGeometry, BodyVelocity,
};
use beamsnet::seed::rng_from_seed;
use proptest::prelude::*;
use rand::Rng as _;

/// (HᵀH)⁻¹ for four beams at yaw 45°+k·90° and pitch α: the cross terms
/// cancel and HᵀH = diag(2 sin²α, 2 sin²α, 4 cos²α).
fn janus_normal_inverse(alpha: f64) -> [[f64; 3]; 3] {
    let (s, c) = (alpha.sin(), alpha.cos());
    [
        [1.0 / (2.0 * s * s), 0.0, 0.0],
        [0.0, 1.0 / (2.0 * s * s), 0.0],
        [0.0, 0.0, 1.0 / (4.0 * c * c)],
    ]
}

#[test]
fn pinv_is_left_inverse() {
    for deg in [10.0, 20.0, 30.0, 45.0, 60.0f64] {
        let g = build_geometry(deg.to_radians()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..4).map(|k| g.h_pinv()[i][k] * g.h()[k][j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() <= 1e-12, "alpha {deg}: ({i},{j}) = {s}");
            }
        }
    }
}

#[test]
fn noiseless_round_trip() {
    let g = BeamGeometry::default();
    let mut rng = rng_from_seed(1);
    for _ in 0..1000 {
        let v = BodyVelocity([
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        ]);
        let e = ls_estimate(&g, beams_from_velocity(&g, v).unwrap());
        for i in 0..3 {
            assert!((e.0[i] - v.0[i]).abs() <= 1e-10);
        }
    }
}

#[test]
fn covariance_matches_closed_form() {
    let g = BeamGeometry::default();
    assert!((g.pitch() - 20f64.to_radians()).abs() < 1e-15);
    let sigma = 0.042;
    let p = BeamErrorParams {
        noise_std: sigma,
        ..BeamErrorParams::zero(5)
    };
    let v = BodyVelocity([1.3, -0.4, 0.2]);
    let mut rng = rng_from_seed(p.seed);
    let n = 100_000;
    let mut sum = [0.0; 3];
    let mut sq = [[0.0; 3]; 3];
    for _ in 0..n {
        let e = ls_estimate(&g, corrupt_beams(&g, v, &p, &mut rng));
        let d = [e.0[0] - v.0[0], e.0[1] - v.0[1], e.0[2] - v.0[2]];
        for i in 0..3 {
            sum[i] += d[i];
            for j in 0..3 {
                sq[i][j] += d[i] * d[j];
            }
        }
    }
    let inv = janus_normal_inverse(g.pitch());
    let lib = g.ls_covariance(sigma);
    for i in 0..3 {
        for j in 0..3 {
            let want = sigma * sigma * inv[i][j];
            assert!((lib[i][j] - want).abs() < 1e-15);
            let got = (sq[i][j] - sum[i] * sum[j] / n as f64) / (n - 1) as f64;
            // zero entries are compared on the scale of their diagonal
            let scale = (sigma * sigma * (inv[i][i] * inv[j][j]).sqrt()).max(want.abs());
            assert!(
                (got - want).abs() <= 0.05 * scale,
                "cov[{i}][{j}]: {got:.4e} vs {want:.4e}"
            );
        }
    }
}

proptest! {
    #[test]
    fn ls_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, k in -4.0..4.0f64) {
        let g = BeamGeometry::default();
        let y = beams_from_velocity(&g, BodyVelocity([a, b, c])).unwrap();
        let mut ys = y;
        ys.0.iter_mut().for_each(|x| *x *= k);
        let (e, es) = (ls_estimate(&g, y), ls_estimate(&g, ys));
        for i in 0..3 {
            prop_assert!((es.0[i] - k * e.0[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn geometry_is_full_rank_for_valid_pitch(deg in 1.0..89.0f64) {
        let g = build_geometry(deg.to_radians()).unwrap();
        let inv = janus_normal_inverse(g.pitch());
        let cov = g.ls_covariance(1.0);
        for i in 0..3 {
            prop_assert!((cov[i][i] - inv[i][i]).abs() <= 1e-9 * inv[i][i]);
        }
    }

    #[test]
    fn zero_error_corruption_is_projection(a in -3.0..3.0f64, b in -3.0..3.0f64, seed in any::<u64>()) {
        let g = BeamGeometry::default();
        let v = BodyVelocity([a, b, 0.1]);
        let y = corrupt_beams(&g, v, &BeamErrorParams::zero(seed), &mut rng_from_seed(seed));
        prop_assert_eq!(y, beams_from_velocity(&g, v).unwrap());
    }
}
