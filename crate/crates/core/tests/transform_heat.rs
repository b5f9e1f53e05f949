//! Transform, convolution and heat semigroup on small and default grids.

use std::sync::Arc;

use lbharm_core::family::{gaussian, young_pair};
use lbharm_core::heat::{
    apply_l_power_spectral, heat_apply, heat_apply_spectral, heat_kernel, heat_l2_norm_sq, heat_smoothing_ratio,
    multiplier_l2_norm_sq,
};
use lbharm_core::measure::{
    integrate_space, lp_norm_space, SampledFunction, SpaceGrid, SpaceGridConfig, SpectralGrid, SpectralGridConfig,
    SpectralMeasure,
};
use lbharm_core::transform::{
    convolution_route_agreement, forward, inverse, plan, plancherel_defect, young_check, ConvolutionRoute,
    DirectConvolutionConfig, TransformPlan,
};
use lbharm_core::AlphaContext;
use proptest::prelude::*;

fn small_plan(alpha: f64) -> TransformPlan {
    let ctx = AlphaContext::new(alpha).unwrap();
    let space = Arc::new(SpaceGrid::uniform(&ctx, 6.0, 8.0, 4, 6, 8).unwrap());
    let cfg = SpectralGridConfig { lambda_max: 4.0, m_max: 40, lambda_panels: 3, nodes_per_panel: 8, resolution: 30.0 };
    let spectral = Arc::new(SpectralGrid::new(&ctx, &cfg, SpectralMeasure::Plancherel).unwrap());
    plan(&ctx, &space, &spectral).unwrap()
}

fn default_plan(alpha: f64) -> TransformPlan {
    let ctx = AlphaContext::new(alpha).unwrap();
    let space = Arc::new(SpaceGrid::new(&ctx, &SpaceGridConfig::default()).unwrap());
    let spectral =
        Arc::new(SpectralGrid::new(&ctx, &SpectralGridConfig::default(), SpectralMeasure::Plancherel).unwrap());
    plan(&ctx, &space, &spectral).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn forward_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.5f64..2.0) {
        let p = small_plan(0.5);
        let f = SampledFunction::from_fn(p.space_grid(), |x, t| (-(x * x + t * t)).exp());
        let g = SampledFunction::from_fn(p.space_grid(), move |x, t| (-w * (x * x + 2.0 * t * t)).exp() * (1.0 + x));
        let lhs = forward(&p, &f.linear_combination(a, &g, b).unwrap()).unwrap();
        let rhs = forward(&p, &f).unwrap().linear_combination(a, &forward(&p, &g).unwrap(), b).unwrap();
        let scale = rhs.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for (u, v) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((u - v).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn heat_semigroup_holds_spectrally(s1 in 0.1f64..2.0, s2 in 0.1f64..2.0) {
        let p = small_plan(0.0);
        let f = SampledFunction::from_fn(p.space_grid(), |x, t| (-(x * x + t * t)).exp());
        let g = forward(&p, &f).unwrap();
        let twice = heat_apply_spectral(&p, s1, &heat_apply_spectral(&p, s2, &g).unwrap()).unwrap();
        let once = heat_apply_spectral(&p, s1 + s2, &g).unwrap();
        for (u, v) in twice.values().iter().zip(once.values()) {
            prop_assert!((u - v).abs() <= 1e-10 * v.abs().max(1e-300));
        }
    }
}

#[test]
fn l_powers_add_and_commute_with_heat() {
    let p = small_plan(1.0);
    let f = SampledFunction::from_fn(p.space_grid(), |x, t| (-(x * x + t * t)).exp());
    let g = forward(&p, &f).unwrap();
    let a = apply_l_power_spectral(&p, 0.5, &apply_l_power_spectral(&p, 1.5, &g).unwrap()).unwrap();
    let b = apply_l_power_spectral(&p, 2.0, &g).unwrap();
    let c = heat_apply_spectral(&p, 0.7, &b).unwrap();
    let d = apply_l_power_spectral(&p, 2.0, &heat_apply_spectral(&p, 0.7, &g).unwrap()).unwrap();
    for i in 0..g.values().len() {
        assert!((a.values()[i] - b.values()[i]).abs() <= 1e-10 * b.values()[i].abs().max(1e-300));
        assert!((c.values()[i] - d.values()[i]).abs() <= 1e-10 * d.values()[i].abs().max(1e-300));
    }
    assert!(apply_l_power_spectral(&p, 0.0, &g).is_err());
}

#[test]
fn plancherel_and_round_trip_at_defaults() {
    let p = default_plan(0.5);
    let f = SampledFunction::from_fn(p.space_grid(), |x, t| (-(x * x + t * t)).exp());
    assert!(plancherel_defect(&p, &f).unwrap() <= 1e-3);
    let back = inverse(&p, &forward(&p, &f).unwrap()).unwrap();
    assert!(back.relative_l2_distance(&f).unwrap() <= 1e-2);
}

#[test]
fn heat_kernel_properties_at_defaults() {
    let p = default_plan(0.0);
    let f = SampledFunction::from_fn(p.space_grid(), |x, t| (-(x * x + t * t)).exp());
    let norm_f = lp_norm_space(&f, 2.0).unwrap();
    let mut prev = f64::INFINITY;
    for s in [0.5, 1.0, 2.0] {
        let h = heat_kernel(&p, s).unwrap();
        assert!((integrate_space(&h) - 1.0).abs() <= 1e-3, "mass at s={s}");
        let max = h.values().iter().fold(0.0f64, |m, v| m.max(*v));
        let min = h.values().iter().fold(0.0f64, |m, v| m.min(*v));
        assert!(min >= -1e-3 * max);
        let n = lp_norm_space(&heat_apply(&p, s, &f).unwrap(), 2.0).unwrap();
        assert!(n <= norm_f * (1.0 + 1e-6) && n < prev);
        prev = n;
    }
    let ratios: Vec<f64> =
        [0.1, 0.5, 1.0, 5.0].iter().map(|&s| heat_smoothing_ratio(&p, &f, 1.0, s).unwrap()).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(lo > 0.0 && hi / lo <= 50.0);
    let dist: Vec<f64> =
        [0.1, 0.01, 0.001].iter().map(|&s| heat_apply(&p, s, &f).unwrap().relative_l2_distance(&f).unwrap()).collect();
    assert!(dist[1] < dist[0] && dist[2] < dist[1]);
}

#[test]
fn multiplier_norm_matches_closed_form_on_a_fine_grid() {
    let ctx = AlphaContext::new(0.0).unwrap();
    let grid = Arc::new(SpectralGrid::full(&ctx, 20.0, 4000, 19, 16, SpectralMeasure::Classical).unwrap());
    let q = multiplier_l2_norm_sq(&grid, 1.0).unwrap();
    let exact = heat_l2_norm_sq(&ctx, 1.0, 16).unwrap();
    assert!(((q - exact) / exact).abs() <= 1e-4, "{q} vs {exact}");
}

#[test]
fn direct_and_spectral_convolution_agree() {
    let p = default_plan(0.0);
    let ctx = *p.ctx();
    let out = Arc::new(SpaceGrid::uniform(&ctx, 3.0, 4.0, 2, 2, 4).unwrap());
    let (f, g) = young_pair(1).unwrap();
    let d = convolution_route_agreement(&p, &f, &g, &out, &DirectConvolutionConfig::default()).unwrap();
    assert!(d <= 1e-2, "{d}");
}

#[test]
fn young_with_unit_exponents_is_an_equality_for_positive_functions() {
    let ctx = AlphaContext::new(0.0).unwrap();
    let grid = Arc::new(SpaceGrid::uniform(&ctx, 8.0, 10.0, 4, 5, 6).unwrap());
    let f = gaussian();
    let r = young_check(
        ConvolutionRoute::Direct { grid: &grid, config: &DirectConvolutionConfig::default() },
        &f,
        &f,
        1.0,
        1.0,
        1.0,
    )
    .unwrap();
    assert!(r.holds && (r.ratio_paper - 1.0).abs() <= 1e-2);
}
