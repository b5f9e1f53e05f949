//! Constants and verifiers for the uncertainty inequalities: the local
//! inequalities for 0 < s < 3α+2, s > 3α+2 and s = 3α+2, the L¹–L²
//! moment inequality and its extremal, the ε-interpolation inequality,
//! and the Heisenberg-type inequality.
//!
//! Spectral norms use the Plancherel normalization of γ_α, under which the
//! transform is an isometry; γ_α(E) is reported in both normalizations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::family::{Decay, TestFunction};
use crate::heat::eigenvalue_l;
use crate::measure::{
    ball_moment, gamma_measure_of_set_in, lp_norm_space, moment_norm, plancherel_ratio, radial_block, Evaluator,
    SampledFunction, SpaceGrid, SpaceGridConfig, SpectralGrid, SpectralMeasure, SpectralSet,
};
use crate::quadrature::{golden_section_min, tanh_sinh, Neumaier};
use crate::report::InequalityReport;
use crate::specfun::{beta_fn, AlphaContext};
use crate::transform::{forward, plan, plancherel_defect, TransformPlan};

/// A constant in its closed form and with the quadrature-verified radial
/// block substituted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantPair {
    pub paper: f64,
    pub oracle: f64,
}

/// The block B((α+1)/2,(2α+1)/2)/(4^{α+1}πΓ(α+1)) as it enters the
/// closed-form ball moment.
pub fn paper_block(ctx: &AlphaContext) -> f64 {
    radial_block(ctx)
}

/// The same block recovered from the brute-force unit-ball measure:
/// m_α(B_1)·(3α+2).
pub fn oracle_block(ctx: &AlphaContext) -> Result<f64> {
    Ok(ball_moment(ctx, 0.0, 1.0)?.oracle * ctx.homogeneous_dim())
}

fn k_formula(c: f64, n: f64, s: f64) -> f64 {
    (c * (n - s) / (s * s)).powf(s / (2.0 * n)) * n / (n - s)
}

/// K_{α,s} for 0 < s < 3α+2.
pub fn constant_k(ctx: &AlphaContext, s: f64) -> Result<ConstantPair> {
    let n = ctx.homogeneous_dim();
    if !(s > 0.0 && s < n) {
        return domain(format!("K needs 0 < s < 3α+2 = {n}, got {s}"));
    }
    Ok(ConstantPair { paper: k_formula(paper_block(ctx), n, s), oracle: k_formula(oracle_block(ctx)?, n, s) })
}

/// ∫_𝕂 (1+|(x,t)|^{2s})^{−1} dm_α by nested tanh-sinh quadrature in
/// u = x² = R cos θ, t = (R/2) sin θ, with R ∈ [0,1] and 1/R ∈ (0,1].
fn n_oracle(ctx: &AlphaContext, s: f64) -> f64 {
    let al = ctx.alpha();
    let norm = 2.0 * PI * ctx.gamma_alpha_plus_1();
    let angular = tanh_sinh(0.0, FRAC_PI_2, 1e-15, |th| th.cos().powf(al) * (0.5 * th.sin()).powf(2.0 * al)).0;
    // radial factor: u^α t^{2α}·(R/2) = R^{3α+1}/2 · angular(θ)
    let head = tanh_sinh(0.0, 1.0, 1e-15, |r| 0.5 * r.powf(3.0 * al + 1.0) / (1.0 + r.powf(s))).0;
    // R = 1/v, dR = dv/v²
    let tail = tanh_sinh(0.0, 1.0, 1e-15, |v| 0.5 * v.powf(s - 3.0 * al - 3.0) / (1.0 + v.powf(s))).0;
    angular * (head + tail) / norm
}

/// N_{α,s} for s > 3α+2: the closed form
/// B(…)B((s−3α−2)/s,(3α+2)/s)/(4^{α+1}sπΓ(α+1)) and the quadrature value
/// of ∫(1+|·|^{2s})^{−1} dm_α.
pub fn constant_n(ctx: &AlphaContext, s: f64) -> Result<ConstantPair> {
    let n = ctx.homogeneous_dim();
    if !(s > n) {
        return Err(Error::Divergence(format!("N needs s > 3α+2 = {n}, got {s}")));
    }
    let paper = paper_block(ctx) * beta_fn((s - n) / s, n / s)? / s;
    Ok(ConstantPair { paper, oracle: n_oracle(ctx, s) })
}

fn m_from_n(n_const: f64, n: f64, s: f64) -> f64 {
    (n_const * s / (s - n) * ((s - n) / n).powf(n / s)).sqrt()
}

/// M_{α,s} for s > 3α+2 with M² = N·s/(s−3α−2)·((s−3α−2)/(3α+2))^{(3α+2)/s}.
pub fn constant_m(ctx: &AlphaContext, s: f64) -> Result<ConstantPair> {
    let n = ctx.homogeneous_dim();
    if !(s > n) {
        return domain(format!("M needs s > 3α+2 = {n}, got {s}"));
    }
    let nc = constant_n(ctx, s)?;
    Ok(ConstantPair { paper: m_from_n(nc.paper, n, s), oracle: m_from_n(nc.oracle, n, s) })
}

/// M_{α,s} written out as
/// (B(…)B(…)/(4^{α+1}πΓ(α+1)(s−3α−2))·((s−3α−2)/(3α+2))^{(3α+2)/s})^{1/2}.
pub fn constant_m_displayed(ctx: &AlphaContext, s: f64) -> Result<f64> {
    let n = ctx.homogeneous_dim();
    if !(s > n) {
        return domain(format!("M needs s > 3α+2 = {n}, got {s}"));
    }
    let a = ctx.alpha();
    let b1 = beta_fn((a + 1.0) / 2.0, (2.0 * a + 1.0) / 2.0)?;
    let b2 = beta_fn((s - n) / s, n / s)?;
    let inner = b1 * b2 / (4f64.powf(a + 1.0) * PI * ctx.gamma_alpha_plus_1() * (s - n)) * ((s - n) / n).powf(n / s);
    Ok(inner.sqrt())
}

/// s(s−1)^{1/s−1}, the constant of ‖|·|f‖ ≤ C‖f‖^{1−1/s}‖|·|^s f‖^{1/s}.
pub fn interpolation_constant(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return domain(format!("interpolation needs s > 1, got {s}"));
    }
    Ok(s * (s - 1.0).powf(1.0 / s - 1.0))
}

/// C_α for s = 3α+2: `paper` holds the closed form
/// (3α+2)²(3α+1)^{−1/(2(3α+2))−1}(B(…)/(4^{α+1}πΓ(α+1)))^{1/(2(3α+2))};
/// `oracle` composes K_{α,1} (oracle block) with the interpolation
/// constant at s = 3α+2.
pub fn constant_c_critical(ctx: &AlphaContext) -> Result<ConstantPair> {
    let n = ctx.homogeneous_dim();
    let paper = n * n * (n - 1.0).powf(-1.0 / (2.0 * n) - 1.0) * paper_block(ctx).powf(1.0 / (2.0 * n));
    Ok(ConstantPair { paper, oracle: c_critical_composed(ctx, oracle_block(ctx)?)? })
}

/// K_{α,1}·(3α+2)(3α+1)^{1/(3α+2)−1} with radial block `block`.
pub fn c_critical_composed(ctx: &AlphaContext, block: f64) -> Result<f64> {
    let n = ctx.homogeneous_dim();
    Ok(k_formula(block, n, 1.0) * interpolation_constant(n)?)
}

fn check_profile_args(ctx: &AlphaContext, s: f64, e: &SpectralSet) -> Result<f64> {
    let n = ctx.homogeneous_dim();
    if !(s > 0.0 && s < n) {
        return domain(format!("profile needs 0 < s < 3α+2 = {n}, got {s}"));
    }
    gamma_measure_of_set_in(ctx, e, SpectralMeasure::Classical)
}

/// g(r) = r^{−s} + (B-block·γ_α(E)/(3α+2−s))^{1/2} r^{3α+2−s}.
pub fn bound_profile(ctx: &AlphaContext, s: f64, e: &SpectralSet, r: f64) -> Result<f64> {
    let gamma = check_profile_args(ctx, s, e)?;
    if !(r > 0.0) {
        return domain(format!("profile needs r > 0, got {r}"));
    }
    let n = ctx.homogeneous_dim();
    Ok(r.powf(-s) + (paper_block(ctx) * gamma / (n - s)).sqrt() * r.powf(n - s))
}

/// r₀ = (s/(3α+2−s))^{1/(3α+2)}(B-block·γ_α(E)/(3α+2−s))^{−1/(2(3α+2))}.
pub fn bound_profile_argmin(ctx: &AlphaContext, s: f64, e: &SpectralSet) -> Result<f64> {
    let gamma = check_profile_args(ctx, s, e)?;
    let n = ctx.homogeneous_dim();
    Ok((s / (n - s)).powf(1.0 / n) * (paper_block(ctx) * gamma / (n - s)).powf(-1.0 / (2.0 * n)))
}

/// Golden-section minimizer of g on [r₀/10, 10r₀].
pub fn bound_profile_numeric_argmin(ctx: &AlphaContext, s: f64, e: &SpectralSet) -> Result<f64> {
    let r0 = bound_profile_argmin(ctx, s, e)?;
    Ok(golden_section_min(r0 / 10.0, 10.0 * r0, 1e-12, |r| bound_profile(ctx, s, e, r).unwrap_or(f64::INFINITY)))
}

/// Transform plans onto a set grid over E, on a space grid and its refinement.
pub struct LocalPlans {
    set: SpectralSet,
    coarse: TransformPlan,
    fine: TransformPlan,
}

/// λ panels of the set grid.
const SET_PANELS: usize = 4;
const SET_NODES: usize = 16;

impl LocalPlans {
    pub fn new(ctx: &AlphaContext, space: &SpaceGridConfig, set: &SpectralSet) -> Result<Self> {
        let coarse_space = Arc::new(SpaceGrid::new(ctx, space)?);
        let fine_space = Arc::new(SpaceGrid::new(ctx, &space.refined())?);
        let coarse_set = Arc::new(SpectralGrid::for_set(ctx, set, SET_PANELS, SET_NODES, SpectralMeasure::Plancherel)?);
        let fine_set = Arc::new(coarse_set.refined()?);
        Ok(Self {
            set: set.clone(),
            coarse: plan(ctx, &coarse_space, &coarse_set)?,
            fine: plan(ctx, &fine_space, &fine_set)?,
        })
    }

    /// Standard grid for fast-decaying members, graded grid otherwise.
    pub fn for_decay(ctx: &AlphaContext, decay: Decay, standard: &SpaceGridConfig, set: &SpectralSet) -> Result<Self> {
        match decay {
            Decay::Fast => Self::new(ctx, standard, set),
            Decay::Slow => Self::new(ctx, &SpaceGridConfig::graded(), set),
        }
    }

    pub fn set(&self) -> &SpectralSet {
        &self.set
    }

    pub fn ctx(&self) -> &AlphaContext {
        self.coarse.ctx()
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "coarse": self.coarse.describe(), "fine": self.fine.describe() })
    }
}

/// Norms of one function on one plan.
#[derive(Debug, Clone, Copy)]
struct LocalNorms {
    spectral: f64,
    l1: f64,
    l2: f64,
    moment: f64,
    tail: f64,
}

fn local_norms(p: &TransformPlan, f: &Evaluator, s: f64) -> Result<LocalNorms> {
    let sampled = SampledFunction::from_fn(p.space_grid(), |x, t| f(x, t));
    let l2 = lp_norm_space(&sampled, 2.0)?;
    if l2 == 0.0 {
        return Err(Error::UndefinedRatio("test function vanishes on the grid".into()));
    }
    let g = forward(p, &sampled)?;
    let mut acc = Neumaier::default();
    for (v, w) in g.values().iter().zip(g.grid().weights()) {
        acc.add(w * v * v);
    }
    let moment = moment_norm(&sampled, s);
    let tail = sampled.tail_fraction(2.0) + sampled.times_rho_power(s).tail_fraction(2.0) + sampled.tail_fraction(1.0);
    Ok(LocalNorms { spectral: acc.sum().sqrt(), l1: lp_norm_space(&sampled, 1.0)?, l2, moment, tail })
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// Norms on the refined grid plus an error estimate from the change
/// under refinement and the outer-shell tail fraction.
fn local_pair(plans: &LocalPlans, f: &Evaluator, s: f64) -> Result<(LocalNorms, f64)> {
    let c = local_norms(&plans.coarse, f, s)?;
    let fi = local_norms(&plans.fine, f, s)?;
    let change = rel(c.spectral, fi.spectral) + rel(c.l2, fi.l2) + rel(c.moment, fi.moment) + rel(c.l1, fi.l1);
    Ok((fi, change + fi.tail + 1e-12))
}

fn common_params(report: InequalityReport, plans: &LocalPlans, f: &TestFunction, s: f64) -> Result<InequalityReport> {
    let ctx = plans.ctx();
    Ok(report
        .with_param("alpha", ctx.alpha())
        .with_param("s", s)
        .with_param("function", &f.id)
        .with_param("E", plans.set())
        .with_param("gamma_e_paper", gamma_measure_of_set_in(ctx, plans.set(), SpectralMeasure::Classical)?)
        .with_param("gamma_e_plancherel", gamma_measure_of_set_in(ctx, plans.set(), SpectralMeasure::Plancherel)?)
        .with_param("kappa", plancherel_ratio(ctx))
        .with_grid(plans.describe()))
}

/// ‖F f·χ_E‖ < K_{α,s} γ_α(E)^{s/(2(3α+2))} ‖|(x,t)|^s f‖ for 0 < s < 3α+2.
pub fn local_small_s(plans: &LocalPlans, f: &TestFunction, s: f64) -> Result<InequalityReport> {
    let ctx = *plans.ctx();
    let n = ctx.homogeneous_dim();
    let k = constant_k(&ctx, s)?;
    let (v, err) = local_pair(plans, &f.eval, s)?;
    let gamma = gamma_measure_of_set_in(&ctx, plans.set(), SpectralMeasure::Plancherel)?;
    let base = gamma.powf(s / (2.0 * n)) * v.moment;
    let report = InequalityReport::upper("local-small", v.spectral, k.paper * base, Some(k.oracle * base), err);
    // the same inequality read with the classical normalization of γ_α on both sides
    let kappa = plancherel_ratio(&ctx);
    let literal = v.spectral * kappa.sqrt() / (k.oracle * (kappa * gamma).powf(s / (2.0 * n)) * v.moment);
    common_params(report, plans, f, s).map(|r| {
        r.with_param("k_paper", k.paper)
            .with_param("k_oracle", k.oracle)
            .with_param("ratio_oracle_paper_measure", literal)
    })
}

/// ‖F f·χ_E‖ < M_{α,s} γ_α(E)^{1/2} ‖f‖^{1−(3α+2)/s} ‖|(x,t)|^s f‖^{(3α+2)/s} for s > 3α+2.
pub fn local_large_s(plans: &LocalPlans, f: &TestFunction, s: f64) -> Result<InequalityReport> {
    let ctx = *plans.ctx();
    let n = ctx.homogeneous_dim();
    let m = constant_m(&ctx, s)?;
    let (v, err) = local_pair(plans, &f.eval, s)?;
    let gamma = gamma_measure_of_set_in(&ctx, plans.set(), SpectralMeasure::Plancherel)?;
    let base = gamma.sqrt() * v.l2.powf(1.0 - n / s) * v.moment.powf(n / s);
    let report = InequalityReport::upper("local-large", v.spectral, m.paper * base, Some(m.oracle * base), err);
    common_params(report, plans, f, s).map(|r| r.with_param("m_paper", m.paper).with_param("m_oracle", m.oracle))
}

/// ‖F f·χ_E‖ < C_α γ_α(E)^{1/(2(3α+2))} ‖f‖^{(3α+1)/(3α+2)} ‖|(x,t)|^{3α+2} f‖^{1/(3α+2)}.
pub fn local_critical(plans: &LocalPlans, f: &TestFunction) -> Result<InequalityReport> {
    let ctx = *plans.ctx();
    let n = ctx.homogeneous_dim();
    let c = constant_c_critical(&ctx)?;
    let (v, err) = local_pair(plans, &f.eval, n)?;
    let gamma = gamma_measure_of_set_in(&ctx, plans.set(), SpectralMeasure::Plancherel)?;
    let base = gamma.powf(1.0 / (2.0 * n)) * v.l2.powf((n - 1.0) / n) * v.moment.powf(1.0 / n);
    let report = InequalityReport::upper("local-critical", v.spectral, c.paper * base, Some(c.oracle * base), err);
    common_params(report, plans, f, n).map(|r| r.with_param("c_paper", c.paper).with_param("c_oracle", c.oracle))
}

/// Norms on a space grid and its refinement.
fn space_pair(
    ctx: &AlphaContext,
    cfg: &SpaceGridConfig,
    f: &Evaluator,
    s: f64,
) -> Result<([f64; 4], f64, serde_json::Value)> {
    let norms = |cfg: &SpaceGridConfig| -> Result<([f64; 4], f64)> {
        let grid = Arc::new(SpaceGrid::new(ctx, cfg)?);
        let sf = SampledFunction::from_fn(&grid, |x, t| f(x, t));
        let l2 = lp_norm_space(&sf, 2.0)?;
        if l2 == 0.0 {
            return Err(Error::UndefinedRatio("test function vanishes on the grid".into()));
        }
        let tail = sf.tail_fraction(1.0) + sf.tail_fraction(2.0) + sf.times_rho_power(s).tail_fraction(2.0);
        Ok(([lp_norm_space(&sf, 1.0)?, l2, moment_norm(&sf, 1.0), moment_norm(&sf, s)], tail))
    };
    let (c, _) = norms(cfg)?;
    let (fi, tail) = norms(&cfg.refined())?;
    let change: f64 = c.iter().zip(&fi).map(|(a, b)| rel(*a, *b)).sum();
    let meta = serde_json::json!({ "space": SpaceGrid::new(ctx, cfg)?.describe(), "refined": true });
    Ok((fi, change + tail + 1e-12, meta))
}

/// ‖|(x,t)|f‖ ≤ s(s−1)^{1/s−1}‖f‖^{1−1/s}‖|(x,t)|^s f‖^{1/s} for s > 1.
pub fn interpolation_check(
    ctx: &AlphaContext,
    cfg: &SpaceGridConfig,
    f: &TestFunction,
    s: f64,
) -> Result<InequalityReport> {
    let c = interpolation_constant(s)?;
    let ([_, l2, m1, ms], err, meta) = space_pair(ctx, cfg, &f.eval, s)?;
    let rhs = c * l2.powf(1.0 - 1.0 / s) * ms.powf(1.0 / s);
    Ok(InequalityReport::upper("interpolation", m1, rhs, None, err)
        .with_param("alpha", ctx.alpha())
        .with_param("s", s)
        .with_param("function", &f.id)
        .with_grid(meta))
}

/// ‖f‖_{α,1} ≤ M_{α,s}‖f‖^{1−(3α+2)/s}‖|(x,t)|^s f‖^{(3α+2)/s}, with the
/// Cauchy–Schwarz step ‖f‖²₁ ≤ N_{α,s}(‖f‖²₂ + ‖|(x,t)|^s f‖²₂) recorded
/// as `cs_ratio_paper` / `cs_ratio_oracle`.
pub fn moment_equality_ratio(
    ctx: &AlphaContext,
    cfg: &SpaceGridConfig,
    f: &TestFunction,
    s: f64,
) -> Result<InequalityReport> {
    let n = ctx.homogeneous_dim();
    let m = constant_m(ctx, s)?;
    let nc = constant_n(ctx, s)?;
    let ([l1, l2, _, ms], err, meta) = space_pair(ctx, cfg, &f.eval, s)?;
    let base = l2.powf(1.0 - n / s) * ms.powf(n / s);
    let cs = l1 * l1 / (l2 * l2 + ms * ms);
    Ok(InequalityReport::upper("lemma-moment", l1, m.paper * base, Some(m.oracle * base), err)
        .with_param("alpha", ctx.alpha())
        .with_param("s", s)
        .with_param("function", &f.id)
        .with_param("m_paper", m.paper)
        .with_param("m_oracle", m.oracle)
        .with_param("n_paper", nc.paper)
        .with_param("n_oracle", nc.oracle)
        .with_param("cs_ratio_paper", cs / nc.paper)
        .with_param("cs_ratio_oracle", cs / nc.oracle)
        .with_grid(meta))
}

/// Heisenberg-type ratios for several (a, b) from one transform of f:
/// lhs = ‖|(x,t)|^a f‖^{2b/(a+2b)} ‖(2λ(2m+α+1))^b F f‖^{a/(a+2b)}, rhs = ‖f‖.
pub fn heisenberg_ratios(
    p: &TransformPlan,
    f: &Evaluator,
    function_id: &str,
    pairs: &[(f64, f64)],
) -> Result<Vec<InequalityReport>> {
    for &(a, b) in pairs {
        if !(a > 0.0 && b > 0.0) {
            return domain(format!("Heisenberg exponents must be positive, got ({a}, {b})"));
        }
    }
    let ctx = *p.ctx();
    let sampled = SampledFunction::from_fn(p.space_grid(), |x, t| f(x, t));
    let l2 = lp_norm_space(&sampled, 2.0)?;
    if l2 == 0.0 {
        return Err(Error::UndefinedRatio("Heisenberg ratio of the zero function".into()));
    }
    let defect = plancherel_defect(p, &sampled)?;
    let g = forward(p, &sampled)?;
    let weights = p.spectral_grid().with_measure(SpectralMeasure::Plancherel);
    let grid = p.spectral_grid();
    let mut out = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let space_moment = moment_norm(&sampled, a);
        let mut acc = Neumaier::default();
        for i in 0..grid.n_lambda() {
            let l = grid.lambda_nodes()[i];
            for (k, &m) in grid.range(i).zip(grid.m_values_at(i)) {
                let v = eigenvalue_l(&ctx, l, m).powf(b) * g.values()[k];
                acc.add(weights.weights()[k] * v * v);
            }
        }
        let spec_moment = acc.sum().sqrt();
        let lhs = space_moment.powf(2.0 * b / (a + 2.0 * b)) * spec_moment.powf(a / (a + 2.0 * b));
        let report = InequalityReport::lower("heisenberg", lhs, l2, defect)
            .with_param("alpha", ctx.alpha())
            .with_param("a", a)
            .with_param("b", b)
            .with_param("function", function_id)
            .with_grid(p.describe());
        out.push(report);
    }
    Ok(out)
}

pub fn heisenberg_ratio(p: &TransformPlan, f: &Evaluator, a: f64, b: f64) -> Result<InequalityReport> {
    Ok(heisenberg_ratios(p, f, "custom", &[(a, b)])?.remove(0))
}

/// Grids on which dilations by 1/2 and 2 of the Gaussian-type members stay
/// resolved: x ≤ 12 with 19 panels, t ≤ 40 with 96 panels, λ ≤ 48,
/// m ≤ min(1000, 240/λ).
pub fn heisenberg_grids() -> (SpaceGridConfig, crate::measure::SpectralGridConfig) {
    (
        SpaceGridConfig { x_max: 12.0, t_max: 40.0, panels_x: 19, panels_t: 96, ..SpaceGridConfig::default() },
        crate::measure::SpectralGridConfig {
            lambda_max: 48.0,
            m_max: 1000,
            lambda_panels: 47,
            nodes_per_panel: 16,
            resolution: 240.0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(a: f64) -> AlphaContext {
        AlphaContext::new(a).unwrap()
    }

    #[test]
    fn k_examples() {
        let k = constant_k(&ctx(0.0), 1.0).unwrap();
        assert_relative_eq!(k.paper, 2f64.sqrt(), max_relative = 1e-14);
        assert!(constant_k(&ctx(0.0), 2.0).is_err());
        assert!(constant_k(&ctx(0.0), 0.0).is_err());
        let k1 = constant_k(&ctx(1.0), 1.0).unwrap();
        assert!(k1.paper.is_finite() && k1.paper > 0.0);
        // the oracle block is half the closed-form one, for every α
        for a in [0.0, 0.5, 1.0] {
            assert_relative_eq!(oracle_block(&ctx(a)).unwrap() / paper_block(&ctx(a)), 0.5, max_relative = 1e-10);
        }
    }

    #[test]
    fn n_and_m_examples() {
        let c = ctx(0.0);
        let n = constant_n(&c, 4.0).unwrap();
        assert_relative_eq!(n.paper, PI / 16.0, max_relative = 1e-14);
        assert_relative_eq!(n.oracle, PI / 32.0, max_relative = 1e-10);
        let m = constant_m(&c, 4.0).unwrap();
        assert_relative_eq!(m.paper, (PI / 8.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(m.oracle, (PI / 16.0).sqrt(), max_relative = 1e-10);
        assert!(matches!(constant_n(&c, 2.0), Err(Error::Divergence(_))));
        assert!(constant_m(&c, 1.0).is_err());
    }

    #[test]
    fn m_matches_its_displayed_form() {
        for a in [0.0, 1.0] {
            for s in [4.0, 6.0] {
                let c = ctx(a);
                if s <= c.homogeneous_dim() {
                    continue;
                }
                let m = constant_m(&c, s).unwrap();
                assert_relative_eq!(m.paper, constant_m_displayed(&c, s).unwrap(), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn n_oracle_decreases_in_s() {
        let c = ctx(0.0);
        let vals: Vec<f64> = [3.0, 4.0, 6.0, 10.0].iter().map(|&s| constant_n(&c, s).unwrap().oracle).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn c_critical_examples() {
        let c0 = constant_c_critical(&ctx(0.0)).unwrap();
        assert_relative_eq!(c0.paper, 2.0 * 2f64.sqrt(), max_relative = 1e-14);
        // at α = 0 the closed form and the composition agree with the same block
        assert_relative_eq!(
            c_critical_composed(&ctx(0.0), paper_block(&ctx(0.0))).unwrap(),
            c0.paper,
            max_relative = 1e-14
        );
        let mut prev: Option<f64> = None;
        for i in 0..=20 {
            let a = 0.1 * i as f64;
            let c = constant_c_critical(&ctx(a)).unwrap().paper;
            assert!(c.is_finite() && c > 0.0);
            if let Some(p) = prev {
                assert!(((c - p) / p).abs() < 0.5);
            }
            prev = Some(c);
        }
    }

    #[test]
    fn interpolation_constant_examples() {
        assert_relative_eq!(interpolation_constant(2.0).unwrap(), 2.0);
        assert!(interpolation_constant(1.0).is_err());
    }

    #[test]
    fn profile_identity_and_minimizer() {
        let c = ctx(0.0);
        let e = SpectralSet::new(0.0, 1.0, [0]).unwrap();
        let r0 = bound_profile_argmin(&c, 1.0, &e).unwrap();
        let k = constant_k(&c, 1.0).unwrap().paper;
        let gamma = crate::measure::gamma_measure_of_set(&c, &e).unwrap();
        assert_relative_eq!(gamma, 1.0 / PI.sqrt(), max_relative = 1e-14);
        let g0 = bound_profile(&c, 1.0, &e, r0).unwrap();
        assert!((g0 - k * gamma.powf(1.0 / 4.0)).abs() <= 1e-12 * g0);
        let rn = bound_profile_numeric_argmin(&c, 1.0, &e).unwrap();
        assert!((rn - r0).abs() <= 1e-6 * r0);
        for i in 1..50 {
            let r = r0 / 10.0 * (100f64).powf(i as f64 / 50.0);
            let h = 1e-3 * r;
            let d2 = bound_profile(&c, 1.0, &e, r + h).unwrap() - 2.0 * bound_profile(&c, 1.0, &e, r).unwrap()
                + bound_profile(&c, 1.0, &e, r - h).unwrap();
            assert!(d2 >= -1e-14);
        }
    }
}
