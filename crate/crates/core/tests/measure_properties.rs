//! Homogeneous norm, weighted measures and ball moments.

use std::sync::Arc;

use lbharm_core::measure::{
    ball_moment, dilate, gamma_measure_of_set, homogeneous_norm, integrate_space, integrate_spectral, SampledFunction,
    SpaceGrid, SpacePoint, SpectralFunction, SpectralGrid, SpectralMeasure, SpectralSet,
};
use lbharm_core::AlphaContext;
use proptest::prelude::*;

proptest! {
    #[test]
    fn homogeneous_norm_scales_with_dilation(r in 0.01f64..100.0, x in 0.0f64..50.0, t in 0.0f64..50.0) {
        let p = SpacePoint::new(x, t).unwrap();
        let q = dilate(r, p).unwrap();
        let lhs = homogeneous_norm(q);
        let rhs = r * homogeneous_norm(p);
        prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1e-300));
    }
}

fn ctx(a: f64) -> AlphaContext {
    AlphaContext::new(a).unwrap()
}

#[test]
fn ball_moment_at_alpha_zero_has_closed_form() {
    for a in [0.0, 0.5, 1.0] {
        for r in [0.5, 1.0, 2.0] {
            let b = ball_moment(&ctx(0.0), a, r).unwrap();
            let exact = r.powf(4.0 - 2.0 * a) / (8.0 * (2.0 - a));
            assert!(((b.oracle - exact) / exact).abs() <= 1e-8, "a={a} r={r}: {} vs {exact}", b.oracle);
        }
    }
}

#[test]
fn ball_moment_scaling_exponent_by_log_log_fit() {
    for al in [0.0, 0.5, 1.0] {
        for a in [0.0, 0.5, 1.0] {
            let rs = [0.5f64, 1.0, 2.0];
            let pts: Vec<(f64, f64)> =
                rs.iter().map(|&r| (r.ln(), ball_moment(&ctx(al), a, r).unwrap().oracle.ln())).collect();
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            let expected = 6.0 * al + 4.0 - 2.0 * a;
            assert!((slope - expected).abs() <= 1e-6, "alpha={al} a={a}: slope {slope}");
        }
    }
}

#[test]
fn ball_moment_ratio_is_radius_independent() {
    for al in [0.0, 0.5, 1.0] {
        for a in [0.0, 0.5, 1.0] {
            let ratios: Vec<f64> =
                [0.5, 1.0, 2.0].iter().map(|&r| ball_moment(&ctx(al), a, r).unwrap().ratio).collect();
            for w in ratios.windows(2) {
                assert!(((w[1] - w[0]) / w[0]).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn ball_moment_rejects_divergent_exponent() {
    assert!(ball_moment(&ctx(0.0), 2.0, 1.0).is_err());
    assert!(ball_moment(&ctx(0.0), 0.5, 0.0).is_err());
}

#[test]
fn gamma_measure_matches_quadrature_of_indicator() {
    for al in [0.0, 0.5, 1.0] {
        let c = ctx(al);
        let e = SpectralSet::new(0.25, 1.5, [0, 2, 5]).unwrap();
        let grid = Arc::new(SpectralGrid::for_set(&c, &e, 16, 16, SpectralMeasure::Classical).unwrap());
        let q = integrate_spectral(&SpectralFunction::from_fn(&grid, |_, _| 1.0));
        let exact = gamma_measure_of_set(&c, &e).unwrap();
        assert!(((q - exact) / exact).abs() <= 1e-8, "alpha={al}: {q} vs {exact}");
    }
}

#[test]
fn empty_or_degenerate_sets_are_rejected() {
    assert!(SpectralSet::new(0.0, 1.0, []).is_err());
    assert!(SpectralSet::new(1.0, 1.0, [0]).is_err());
}

#[test]
fn space_quadrature_is_stable_under_refinement() {
    for al in [0.0, 1.0] {
        let c = ctx(al);
        let grid = Arc::new(SpaceGrid::uniform(&c, 8.0, 10.0, 8, 8, 16).unwrap());
        let fine = Arc::new(grid.refined().unwrap());
        let f = |x: f64, t: f64| (-(x * x + t * t)).exp();
        let a = integrate_space(&SampledFunction::from_fn(&grid, f));
        let b = integrate_space(&SampledFunction::from_fn(&fine, f));
        assert!(((a - b) / b).abs() <= 1e-10);
    }
}
