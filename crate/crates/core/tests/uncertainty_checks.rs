//! Uncertainty inequalities: scaling, set dependence and error cases.

use std::sync::Arc;

use lbharm_core::family::{member, Decay, TestFunction};
use lbharm_core::measure::{dilate_normalized, SpaceGrid, SpaceGridConfig, SpectralGrid, SpectralSet};
use lbharm_core::transform::plan;
use lbharm_core::uncertainty::{
    constant_m, heisenberg_ratio, heisenberg_ratios, interpolation_check, local_critical, local_large_s, local_small_s,
    moment_equality_ratio, LocalPlans,
};
use lbharm_core::{AlphaContext, Error};

fn ctx0() -> AlphaContext {
    AlphaContext::new(0.0).unwrap()
}

fn set(hi: f64, ms: &[usize]) -> SpectralSet {
    SpectralSet::new(0.0, hi, ms.iter().copied()).unwrap()
}

#[test]
fn small_s_stays_strict_as_the_set_shrinks() {
    let c = ctx0();
    let f = member(&c, "gaussian").unwrap();
    for hi in [1.0, 0.5, 0.1] {
        let plans = LocalPlans::new(&c, &SpaceGridConfig::default(), &set(hi, &[0, 1, 2, 3, 4])).unwrap();
        let r = local_small_s(&plans, &f, 1.0).unwrap();
        assert!(r.strict, "lambda_hi={hi}: {}", r.worst_ratio());
        assert!((r.params["k_paper"].as_f64().unwrap() - 2f64.sqrt()).abs() <= 1e-14);
    }
}

#[test]
fn critical_bound_matches_the_composed_constants() {
    let c = ctx0();
    let f = member(&c, "gaussian").unwrap();
    let plans = LocalPlans::new(&c, &SpaceGridConfig::default(), &set(1.0, &[0])).unwrap();
    let small = local_small_s(&plans, &f, 1.0).unwrap();
    let crit = local_critical(&plans, &f).unwrap();
    let interp = interpolation_check(&c, &SpaceGridConfig::default(), &f, 2.0).unwrap();
    assert!(crit.strict && interp.strict);
    let chain = small.rhs_paper * interp.rhs_paper / interp.lhs;
    assert!(((crit.rhs_paper - chain) / chain).abs() <= 1e-8, "{} vs {chain}", crit.rhs_paper);
    assert!(crit.lhs <= small.rhs_paper);
}

#[test]
fn large_s_bound_grows_with_the_root_of_the_set_measure() {
    let c = ctx0();
    let f = member(&c, "gaussian").unwrap();
    let one =
        local_large_s(&LocalPlans::new(&c, &SpaceGridConfig::default(), &set(1.0, &[0])).unwrap(), &f, 4.0).unwrap();
    // λ^{3α+2} at α = 0: doubling γ(E) means λ_hi → √2
    let two =
        local_large_s(&LocalPlans::new(&c, &SpaceGridConfig::default(), &set(2f64.sqrt(), &[0])).unwrap(), &f, 4.0)
            .unwrap();
    assert!(((two.rhs_paper / one.rhs_paper) - 2f64.sqrt()).abs() <= 1e-10);
    assert!(one.strict && two.strict);
}

#[test]
fn scaling_the_function_leaves_ratios_unchanged() {
    let c = ctx0();
    let f = member(&c, "laguerre-gaussian-1").unwrap();
    let base = f.eval.clone();
    let g = TestFunction { id: "scaled".into(), decay: Decay::Fast, eval: Arc::new(move |x, t| 3.5 * base(x, t)) };
    let plans = LocalPlans::new(&c, &SpaceGridConfig::default(), &set(1.0, &[0])).unwrap();
    let a = local_critical(&plans, &f).unwrap();
    let b = local_critical(&plans, &g).unwrap();
    assert!((a.ratio_paper - b.ratio_paper).abs() <= 1e-12 * a.ratio_paper);
}

#[test]
fn precondition_violations_are_errors() {
    let c = ctx0();
    let f = member(&c, "gaussian").unwrap();
    let plans = LocalPlans::new(&c, &SpaceGridConfig::default(), &set(1.0, &[0])).unwrap();
    assert!(matches!(local_small_s(&plans, &f, 2.5), Err(Error::Domain(_))));
    assert!(local_large_s(&plans, &f, 1.0).is_err());
    assert!(interpolation_check(&c, &SpaceGridConfig::default(), &f, 1.0).is_err());
    let zero = TestFunction { id: "zero".into(), decay: Decay::Fast, eval: Arc::new(|_, _| 0.0) };
    assert!(matches!(local_small_s(&plans, &zero, 1.0), Err(Error::UndefinedRatio(_))));
}

#[test]
fn interpolation_holds_for_a_concentrated_bump() {
    let c = ctx0();
    let bump = TestFunction {
        id: "bump".into(),
        decay: Decay::Fast,
        eval: Arc::new(|x, t| (-40.0 * ((x - 1.0).powi(2) + (t - 1.0).powi(2))).exp()),
    };
    let r = interpolation_check(&c, &SpaceGridConfig::default(), &bump, 2.0).unwrap();
    assert!(r.ratio_paper <= 1.0 && r.strict);
}

#[test]
fn lemma_perturbation_and_dilation() {
    let c = ctx0();
    let graded = SpaceGridConfig::graded();
    let perturbed = moment_equality_ratio(&c, &graded, &member(&c, "extremal-perturbed").unwrap(), 4.0).unwrap();
    assert!(perturbed.ratio_oracle.unwrap() < 1.0 - 1e-3);
    let ext = member(&c, "extremal").unwrap();
    let base = moment_equality_ratio(&c, &graded, &ext, 4.0).unwrap().ratio_oracle.unwrap();
    for r in [0.5, 2.0] {
        let d = TestFunction {
            id: format!("extremal-{r}"),
            decay: Decay::Slow,
            eval: dilate_normalized(&c, r, ext.eval.clone()).unwrap(),
        };
        let v = moment_equality_ratio(&c, &graded, &d, 4.0).unwrap().ratio_oracle.unwrap();
        assert!(((v - base) / base).abs() <= 1e-3, "r={r}: {v} vs {base}");
    }
    assert_eq!(
        constant_m(&c, 4.0).unwrap().oracle,
        moment_equality_ratio(&c, &graded, &ext, 4.0).unwrap().params["m_oracle"]
    );
}

#[test]
fn heisenberg_ratio_is_scale_free_and_rejects_bad_input() {
    let c = ctx0();
    let space = Arc::new(SpaceGrid::new(&c, &SpaceGridConfig::default()).unwrap());
    let spectral = Arc::new(
        SpectralGrid::new(&c, &Default::default(), lbharm_core::measure::SpectralMeasure::Plancherel).unwrap(),
    );
    let p = plan(&c, &space, &spectral).unwrap();
    let f = member(&c, "gaussian").unwrap().eval;
    let base = f.clone();
    let g: lbharm_core::measure::Evaluator = Arc::new(move |x, t| -2.0 * base(x, t));
    let a = heisenberg_ratio(&p, &f, 1.0, 1.0).unwrap();
    let b = heisenberg_ratio(&p, &g, 1.0, 1.0).unwrap();
    assert!((a.ratio_paper - b.ratio_paper).abs() <= 1e-12 * a.ratio_paper);
    assert!(a.strict);
    assert!(heisenberg_ratios(&p, &f, "gaussian", &[(0.0, 1.0)]).is_err());
    let zero: lbharm_core::measure::Evaluator = Arc::new(|_, _| 0.0);
    assert!(matches!(heisenberg_ratio(&p, &zero, 1.0, 1.0), Err(Error::UndefinedRatio(_))));
}
