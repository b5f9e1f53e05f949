//! Subcommand implementations. Each returns an `Outcome` holding reports,
//! asserted checks and free-form data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::ValueEnum;
use lbharm_core::family::{self, Decay, TestFunction, YOUNG_PAIRS};
use lbharm_core::heat::{
    heat_apply_spectral, heat_equation_residual, heat_kernel, heat_l2_norm_sq, heat_multiplier_on, heat_space_norm_sq,
};
use lbharm_core::measure::{
    ball_moment, dilate_normalized, gamma_measure_of_set, integrate_space, lp_norm_space, plancherel_ratio,
    SampledFunction, SpaceGrid, SpaceGridConfig, SpectralGrid, SpectralGridConfig, SpectralMeasure,
};
use lbharm_core::specfun::{
    eigen_pde_residuals, generating_function_check, laguerre_at_zero, laguerre_function, laguerre_poly,
    laguerre_poly_sum, NormalizedBessel,
};
use lbharm_core::transform::{
    convolution_route_agreement, forward, inverse, plan, plancherel_defect, young_check, ConvolutionRoute,
    DirectConvolutionConfig, TransformPlan,
};
use lbharm_core::uncertainty::{
    bound_profile, bound_profile_argmin, bound_profile_numeric_argmin, constant_c_critical, constant_k, constant_m,
    constant_m_displayed, constant_n, heisenberg_grids, heisenberg_ratios, interpolation_check, interpolation_constant,
    local_critical, local_large_s, local_small_s, moment_equality_ratio, oracle_block, paper_block, LocalPlans,
};
use lbharm_core::{AlphaContext, InequalityReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::{Baseline, Entry};
use crate::config::{check_s, RunConfig, SetBlock, Target};
use crate::output::{Check, Outcome, Relation};
use crate::CliError;

pub struct Env<'a> {
    pub cfg: &'a RunConfig,
    pub ctx: AlphaContext,
}

impl<'a> Env<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        Ok(Self { cfg, ctx: cfg.ctx()? })
    }

    fn tol(&self, key: &str) -> f64 {
        self.cfg.tolerance(key)
    }

    fn space_config(&self, decay: Decay) -> SpaceGridConfig {
        match decay {
            Decay::Fast => self.cfg.grid.space(),
            Decay::Slow => self.cfg.grid.graded_space(),
        }
    }

    fn plan_with(&self, space: &SpaceGridConfig, spectral: &SpectralGridConfig) -> Result<TransformPlan, CliError> {
        let sg = Arc::new(SpaceGrid::new(&self.ctx, space)?);
        let pg = Arc::new(SpectralGrid::new(&self.ctx, spectral, SpectralMeasure::Plancherel)?);
        Ok(plan(&self.ctx, &sg, &pg)?)
    }

    fn default_plan(&self) -> Result<TransformPlan, CliError> {
        self.plan_with(&self.cfg.grid.space(), &self.cfg.grid.spectral())
    }

    fn member(&self, id: &str) -> Result<TestFunction, CliError> {
        Ok(family::member(&self.ctx, id)?)
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn timed(mut r: InequalityReport, t: Instant) -> InequalityReport {
    r.runtime_ms = Some(elapsed_ms(t));
    r
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecfunCheck {
    All,
    Bessel,
    Laguerre,
    Generating,
    Pde,
}

pub fn specfun(env: &Env<'_>, which: SpecfunCheck) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let want = |c: SpecfunCheck| which == SpecfunCheck::All || which == c;
    if want(SpecfunCheck::Bessel) {
        let jm = NormalizedBessel::new(-0.5)?;
        let jp = NormalizedBessel::new(0.5)?;
        let (mut em, mut ep) = (0.0f64, 0.0f64);
        for i in 0..100 {
            let x = 20.0 * i as f64 / 99.0;
            em = em.max((jm.eval(x) - x.cos()).abs());
            let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
            ep = ep.max((jp.eval(x) - sinc).abs());
        }
        out.checks.push(Check::at_most("bessel order -1/2 vs cos", em, 1e-12));
        out.checks.push(Check::at_most("bessel order 1/2 vs sinc", ep, 1e-12));
        let j = NormalizedBessel::new(env.ctx.bessel_order())?;
        let even = (0..200).map(|i| 0.3 * i as f64).map(|x| (j.eval(x) - j.eval(-x)).abs()).fold(0.0, f64::max);
        out.checks.push(Check::at_most("bessel evenness", even, 1e-15));
    }
    if want(SpecfunCheck::Laguerre) {
        let mut bound = 0.0f64;
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            for m in 0..=60 {
                for k in 0..=400 {
                    bound = bound.max(laguerre_function(m, alpha, 0.5 * k as f64)?.abs());
                }
            }
        }
        out.checks.push(Check::at_most("laguerre function bound", bound, 1.0 + 1e-12));
        // the alternating sum cancels for larger m·x, so compare where it is accurate
        let mut worst = 0.0f64;
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            for m in 0..=20 {
                for k in 0..=10 {
                    let x = 0.2 * k as f64;
                    let (r, s) = (laguerre_poly(m, alpha, x), laguerre_poly_sum(m, alpha, x));
                    worst = worst.max((r - s).abs() / s.abs().max(1.0));
                }
            }
        }
        out.checks.push(Check::at_most("laguerre recurrence vs sum (x <= 2)", worst, 1e-10));
        out.checks.push(Check::at_most(
            "laguerre at zero (m=3, alpha=0.5)",
            (laguerre_at_zero(3, 0.5) - 2.1875).abs(),
            1e-13,
        ));
    }
    if want(SpecfunCheck::Generating) {
        for (alpha, t, x, m_max) in [(0.0, 0.0, 3.0, 0), (0.0, 0.5, 1.0, 80), (1.0, 0.5, 1.0, 80)] {
            let (partial, closed) = generating_function_check(alpha, t, x, m_max)?;
            out.checks.push(Check::at_most(
                format!("generating function alpha={alpha} t={t} x={x}"),
                rel(partial, closed),
                1e-10,
            ));
        }
    }
    if want(SpecfunCheck::Pde) {
        let h = 1e-4;
        let (mut w1, mut w2) = (0.0f64, 0.0f64);
        for lambda in [0.1, 0.5, 1.0, 2.0, 3.0] {
            for m in [0usize, 1, 2, 5, 10] {
                for x in [0.2, 1.6, 3.0] {
                    for t in [0.2, 1.6, 3.0] {
                        let (r1, r2) = eigen_pde_residuals(&env.ctx, lambda, m, x, t, h)?;
                        let eig = 2.0 * lambda * (2.0 * m as f64 + env.ctx.alpha() + 1.0);
                        w1 = w1.max(r1 / (1e-5 * (1.0 + lambda * lambda)));
                        w2 = w2.max(r2 / (1e-4 * (1.0 + eig)));
                    }
                }
            }
        }
        out.checks.push(Check::at_most("eigenfunction t-equation residual / tolerance", w1, 1.0));
        out.checks.push(Check::at_most("eigenfunction x-equation residual / tolerance", w2, 1.0));
    }
    Ok(out)
}

fn sample(p: &TransformPlan, f: &TestFunction) -> SampledFunction {
    SampledFunction::from_fn(p.space_grid(), |x, t| (f.eval)(x, t))
}

/// Round trip inverse∘forward under successive spectral refinements.
pub fn transform(env: &Env<'_>, function: &str, refinements: usize) -> Result<Outcome, CliError> {
    let f = env.member(function)?;
    let mut out = Outcome::default();
    let mut spectral = env.cfg.grid.spectral();
    let mut errors = Vec::new();
    let mut levels = Vec::new();
    for level in 0..=refinements {
        let t = Instant::now();
        let p = env.plan_with(&env.space_config(f.decay), &spectral)?;
        let fs = sample(&p, &f);
        let back = inverse(&p, &forward(&p, &fs)?)?;
        let e = back.relative_l2_distance(&fs)?;
        errors.push(e);
        levels.push(serde_json::json!({
            "level": level,
            "round_trip_error": e,
            "spectral_nodes": p.spectral_grid().len(),
            "space_nodes": p.space_grid().len(),
            "runtime_ms": elapsed_ms(t),
        }));
        spectral = spectral.refined();
    }
    out.checks.push(Check::at_most("round trip error at the configured grid", errors[0], env.tol("round_trip")));
    if errors.len() > 1 {
        out.checks.push(Check::new(
            "round trip error decreases under refinement",
            strictly_decreasing(&errors) as u8 as f64,
            Relation::AtLeast,
            1.0,
        ));
    }
    out.data("function", function);
    out.data("levels", levels);
    Ok(out)
}

/// Plancherel defect under successive refinements of the spectral grid.
pub fn plancherel(env: &Env<'_>, function: &str, refinements: usize) -> Result<Outcome, CliError> {
    let f = env.member(function)?;
    let mut out = Outcome::default();
    let mut spectral = env.cfg.grid.spectral();
    let mut defects = Vec::new();
    let mut levels = Vec::new();
    for level in 0..=refinements {
        let t = Instant::now();
        let p = env.plan_with(&env.space_config(f.decay), &spectral)?;
        let d = plancherel_defect(&p, &sample(&p, &f))?;
        defects.push(d);
        levels.push(serde_json::json!({
            "level": level,
            "defect": d,
            "spectral_nodes": p.spectral_grid().len(),
            "runtime_ms": elapsed_ms(t),
        }));
        spectral = spectral.refined();
    }
    out.checks.push(Check::at_most(
        "plancherel defect at the configured grid",
        defects[0],
        env.tol("plancherel_defect"),
    ));
    if defects.len() > 1 {
        out.checks.push(Check::new(
            "plancherel defect decreases under refinement",
            strictly_decreasing(&defects) as u8 as f64,
            Relation::AtLeast,
            1.0,
        ));
    }
    out.data("function", function);
    out.data("levels", levels);
    Ok(out)
}

fn pair_indices(pairs: &[usize]) -> Result<Vec<usize>, CliError> {
    if pairs.is_empty() {
        return Ok((0..YOUNG_PAIRS.len()).collect());
    }
    if let Some(bad) = pairs.iter().find(|&&i| i >= YOUNG_PAIRS.len()) {
        return Err(CliError::Config(format!("pair index {bad} out of range 0..{}", YOUNG_PAIRS.len())));
    }
    Ok(pairs.to_vec())
}

/// α = 0: direct translation-based convolution against the spectral one.
pub fn convolve(env: &Env<'_>, pairs: &[usize]) -> Result<Outcome, CliError> {
    if env.ctx.alpha() != 0.0 {
        return Err(CliError::Config(
            "convolve compares against the explicit translation, available for alpha = 0 only".into(),
        ));
    }
    let p = env.default_plan()?;
    let out_grid = Arc::new(SpaceGrid::uniform(&env.ctx, 3.0, 4.0, 2, 2, 4)?);
    let cfg = DirectConvolutionConfig::default();
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for i in pair_indices(pairs)? {
        let (f, g) = family::young_pair(i)?;
        let d = convolution_route_agreement(&p, &f, &g, &out_grid, &cfg)?;
        out.checks.push(Check::at_most(
            format!("direct vs spectral convolution, pair {i}"),
            d,
            env.tol("convolution_agreement"),
        ));
        rows.push(serde_json::json!({ "pair": i, "widths": YOUNG_PAIRS[i], "relative_l2_difference": d }));
    }
    out.data("pairs", rows);
    out.data("direct", &cfg);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Direct for α = 0 with r = 1, spectral otherwise.
    Auto,
    Spectral,
    Direct,
}

pub fn parse_exponents(text: &str) -> Result<(f64, f64, f64), CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Config(format!("exponent '{s}': {e}"))))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [p, q, r] => Ok((*p, *q, *r)),
        _ => Err(CliError::Config(format!("exponents take the form p,q,r, got '{text}'"))),
    }
}

pub fn young(env: &Env<'_>, pairs: &[usize], exponents: &[(f64, f64, f64)], route: Route) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let spectral_plan = env.default_plan()?;
    let direct_grid =
        if env.ctx.alpha() == 0.0 { Some(Arc::new(SpaceGrid::uniform(&env.ctx, 8.0, 10.0, 4, 5, 6)?)) } else { None };
    let direct_cfg = DirectConvolutionConfig::default();
    for i in pair_indices(pairs)? {
        let (f, g) = family::young_pair(i)?;
        for &(p, q, r) in exponents {
            let use_direct = match route {
                Route::Auto => direct_grid.is_some() && r == 1.0,
                Route::Direct => true,
                Route::Spectral => false,
            };
            let t = Instant::now();
            let rep = if use_direct {
                let grid =
                    direct_grid.as_ref().ok_or_else(|| CliError::Config("the direct route needs alpha = 0".into()))?;
                young_check(ConvolutionRoute::Direct { grid, config: &direct_cfg }, &f, &g, p, q, r)?
            } else {
                young_check(ConvolutionRoute::Spectral(&spectral_plan), &f, &g, p, q, r)?
            };
            let rep = timed(
                rep.with_param("alpha", env.ctx.alpha())
                    .with_param("pair", i)
                    .with_param("route", if use_direct { "direct" } else { "spectral" }),
                t,
            );
            out.checks.push(Check::holds(&rep, &format!("pair {i}, ({p},{q},{r})")));
            out.reports.push(rep);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeatCheck {
    All,
    Mass,
    Semigroup,
    Norm,
    Pde,
}

pub fn heat(env: &Env<'_>, s: f64, which: HeatCheck) -> Result<Outcome, CliError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(CliError::Config(format!("diffusion time must be positive, got {s}")));
    }
    let p = env.default_plan()?;
    let ctx = env.ctx;
    let mut out = Outcome::default();
    let want = |c: HeatCheck| which == HeatCheck::All || which == c;
    if let Some(w) = lbharm_core::heat::small_s_warning(&p, s) {
        out.data("warning", w);
    }
    if want(HeatCheck::Mass) {
        let h = heat_kernel(&p, s)?;
        let mass = integrate_space(&h);
        let max = h.values().iter().fold(0.0f64, |m, v| m.max(*v));
        let min = h.values().iter().fold(0.0f64, |m, v| m.min(*v));
        out.checks.push(Check::at_most("heat kernel |mass - 1|", (mass - 1.0).abs(), env.tol("heat_mass")));
        out.checks.push(Check::at_most("heat kernel negativity -min/max", -min / max, env.tol("heat_negativity")));
        out.data("mass", mass);
        out.data("min", min);
        out.data("max", max);
    }
    if want(HeatCheck::Semigroup) {
        let grid = p.spectral_grid();
        let (a, b, c) =
            (heat_multiplier_on(grid, s)?, heat_multiplier_on(grid, 0.5 * s)?, heat_multiplier_on(grid, 1.5 * s)?);
        let worst =
            a.values().iter().zip(b.values()).zip(c.values()).map(|((x, y), z)| (x * y - z).abs()).fold(0.0, f64::max);
        out.checks.push(Check::at_most("multiplier semigroup identity (absolute)", worst, env.tol("semigroup")));
        let f = SampledFunction::from_fn(p.space_grid(), |x, t| (-(x * x + t * t)).exp());
        let g = forward(&p, &f)?;
        let twice = heat_apply_spectral(&p, s, &heat_apply_spectral(&p, 0.5 * s, &g)?)?;
        let once = heat_apply_spectral(&p, 1.5 * s, &g)?;
        let scale = once.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = twice.values().iter().zip(once.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        out.checks.push(Check::at_most("heat semigroup on a Gaussian (spectral, relative)", diff / scale, 1e-10));
    }
    if want(HeatCheck::Norm) {
        let base = heat_l2_norm_sq(&ctx, 1.0, 16)?;
        let n = ctx.homogeneous_dim();
        let spread = [0.25, 1.0, 4.0]
            .iter()
            .map(|&u| heat_l2_norm_sq(&ctx, u, 16).map(|v| rel(v * u.powf(n), base)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        out.checks.push(Check::at_most("heat_l2_norm_sq * s^(3a+2) constancy", spread, 1e-12));
        if ctx.alpha() == 0.0 {
            let exact = PI * PI / (64.0 * PI.sqrt());
            out.checks.push(Check::at_most("heat_l2_norm_sq closed form at alpha=0, s=1", (base - exact).abs(), 1e-8));
        }
        let h = heat_kernel(&p, s)?;
        let space_sq = lp_norm_space(&h, 2.0)?.powi(2);
        let predicted = heat_space_norm_sq(&ctx, s)?;
        out.checks.push(Check::at_most(
            "space norm of h_s vs closed form",
            rel(space_sq, predicted),
            env.tol("heat_norm"),
        ));
        let fh = forward(&p, &h)?;
        let m = heat_multiplier_on(p.spectral_grid(), s)?;
        let diff = fh.linear_combination(1.0, &m, -1.0)?;
        let fwd = (diff.inner(&diff)? / m.inner(&m)?).sqrt();
        out.checks.push(Check::at_most("forward(h_s) vs multiplier (relative L2)", fwd, env.tol("heat_norm")));
        out.data("heat_l2_norm_sq", heat_l2_norm_sq(&ctx, s, 16)?);
        out.data("space_norm_sq", space_sq);
    }
    if want(HeatCheck::Pde) {
        let r = heat_equation_residual(&p, s, 1e-3, 0.5)?;
        out.checks.push(Check::at_most("heat equation residual / max|h|", r, env.tol("heat_residual")));
    }
    out.data("s", s);
    out.data("grid", p.describe());
    Ok(out)
}

pub fn constants(env: &Env<'_>, s: Option<f64>) -> Result<Outcome, CliError> {
    let ctx = &env.ctx;
    let n = ctx.homogeneous_dim();
    let mut out = Outcome::default();
    let mut table = BTreeMap::new();
    table.insert("alpha", serde_json::Value::from(ctx.alpha()));
    table.insert("homogeneous_dimension", serde_json::Value::from(n));
    table.insert("paper_block", serde_json::Value::from(paper_block(ctx)));
    let ob = oracle_block(ctx)?;
    table.insert("oracle_block", serde_json::Value::from(ob));
    table.insert("oracle_over_paper_block", serde_json::Value::from(ob / paper_block(ctx)));
    table.insert("kappa", serde_json::Value::from(plancherel_ratio(ctx)));
    table.insert("C_critical", serde_json::to_value(constant_c_critical(ctx)?).unwrap_or_default());
    if let Some(s) = s {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Config(format!("s must be positive, got {s}")));
        }
        table.insert("s", serde_json::Value::from(s));
        if s > 0.0 && s < n {
            table.insert("K", serde_json::to_value(constant_k(ctx, s)?).unwrap_or_default());
        }
        if s > n {
            table.insert("N", serde_json::to_value(constant_n(ctx, s)?).unwrap_or_default());
            table.insert("M", serde_json::to_value(constant_m(ctx, s)?).unwrap_or_default());
            table.insert("M_displayed", serde_json::Value::from(constant_m_displayed(ctx, s)?));
        }
        if s > 1.0 {
            table.insert("interpolation", serde_json::Value::from(interpolation_constant(s)?));
        }
    }
    out.data("constants", table);
    Ok(out)
}

/// Parameters of one `verify` run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyArgs {
    pub target: Target,
    pub s: Option<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub r: Vec<f64>,
    pub set: Option<SetBlock>,
    pub functions: Option<Vec<String>>,
    #[serde(skip)]
    pub record_baseline: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn new(target: Target) -> Self {
        Self { target, s: None, a: vec![], b: vec![], r: vec![], set: None, functions: None, record_baseline: None }
    }
}

fn or_default(v: &[f64], d: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        d.to_vec()
    } else {
        v.to_vec()
    }
}

pub fn verify(env: &Env<'_>, args: &VerifyArgs) -> Result<Outcome, CliError> {
    let target = args.target;
    let s = match target.default_s(&env.ctx) {
        Some(d) => {
            let s = args.s.unwrap_or(d);
            check_s(target, &env.ctx, s)?;
            Some(s)
        }
        None => None,
    };
    let set = match (&args.set, target.uses_set()) {
        (Some(b), true) => Some(b.clone()),
        (None, true) => Some(target.default_set()),
        _ => None,
    };
    let set = set.map(|b| b.to_set().map(|e| (b, e))).transpose()?;
    let functions: Vec<String> = args.functions.clone().unwrap_or_else(|| env.cfg.test_family.clone());
    let mut out = match target {
        Target::LocalSmall | Target::LocalLarge | Target::LocalCritical => {
            let (_, e) = set.as_ref().expect("local targets carry a set");
            local(env, target, s, e, &functions)?
        }
        Target::Interpolation => interpolation(env, s.expect("interpolation has s"), &functions)?,
        Target::LemmaExtremal => lemma(env, s.expect("lemma has s"), &or_default(&args.r, &[0.5, 2.0]))?,
        Target::Profile => {
            let (_, e) = set.as_ref().expect("profile carries a set");
            profile(env, s.expect("profile has s"), e)?
        }
        Target::BallMoment => {
            ball(env, &or_default(&args.a, &[0.0, 0.5, 1.0]), &or_default(&args.r, &[0.5, 1.0, 2.0]))?
        }
        Target::Heisenberg => heisenberg(env, args, &functions)?,
        Target::Young => young(env, &[], &[(1.0, 1.0, 1.0), (1.0, 2.0, 2.0)], Route::Auto)?,
    };
    out.data("target", target.name());
    if let Some(s) = s {
        out.data("s", s);
    }
    if let Some((b, _)) = set {
        out.data("E", b);
    }
    Ok(out)
}

fn local(
    env: &Env<'_>,
    target: Target,
    s: Option<f64>,
    e: &lbharm_core::SpectralSet,
    functions: &[String],
) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let mut plans: BTreeMap<u8, LocalPlans> = BTreeMap::new();
    for id in functions {
        let f = env.member(id)?;
        let key = f.decay as u8;
        let p = match plans.entry(key) {
            std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(LocalPlans::new(&env.ctx, &env.space_config(f.decay), e)?)
            }
        };
        let t = Instant::now();
        let rep = match target {
            Target::LocalSmall => local_small_s(p, &f, s.expect("s"))?,
            Target::LocalLarge => local_large_s(p, &f, s.expect("s"))?,
            _ => local_critical(p, &f)?,
        };
        let rep = timed(rep, t);
        out.checks.push(Check::strict(&rep, id));
        out.reports.push(rep);
    }
    Ok(out)
}

fn interpolation(env: &Env<'_>, s: f64, functions: &[String]) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    for id in functions {
        let f = env.member(id)?;
        let t = Instant::now();
        let rep = timed(interpolation_check(&env.ctx, &env.space_config(f.decay), &f, s)?, t);
        out.checks.push(Check::strict(&rep, id));
        out.reports.push(rep);
    }
    Ok(out)
}

fn lemma(env: &Env<'_>, s: f64, radii: &[f64]) -> Result<Outcome, CliError> {
    let ctx = &env.ctx;
    let grid = env.cfg.grid.graded_space();
    let mut out = Outcome::default();
    let ext = TestFunction { id: format!("extremal-s{s}"), decay: Decay::Slow, eval: family::extremal(s) };
    let base_eval = ext.eval.clone();
    let perturbed = TestFunction {
        id: format!("extremal-s{s}-perturbed"),
        decay: Decay::Slow,
        eval: Arc::new(move |x: f64, t: f64| base_eval(x, t) * (-0.1 * (x * x + t * t)).exp()),
    };
    let t = Instant::now();
    let base = timed(moment_equality_ratio(ctx, &grid, &ext, s)?, t);
    let tol = env.tol("lemma_equality");
    let ro = base.ratio_oracle.unwrap_or(base.ratio_paper);
    out.checks.push(Check::at_most("extremal |ratio_oracle - 1|", (ro - 1.0).abs(), tol));
    let cs = base.params.get("cs_ratio_oracle").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    out.checks.push(Check::at_most("extremal |cs_ratio_oracle - 1|", (cs - 1.0).abs(), tol));
    let t = Instant::now();
    let pert = timed(moment_equality_ratio(ctx, &grid, &perturbed, s)?, t);
    out.checks.push(Check::new(
        "perturbed extremal ratio_oracle",
        pert.ratio_oracle.unwrap_or(pert.ratio_paper),
        Relation::Below,
        1.0 - env.tol("lemma_perturbation"),
    ));
    out.reports.push(base);
    out.reports.push(pert);
    for &r in radii {
        let d = TestFunction {
            id: format!("extremal-s{s}-dilated-{r}"),
            decay: Decay::Slow,
            eval: dilate_normalized(ctx, r, ext.eval.clone())?,
        };
        let t = Instant::now();
        let rep = timed(moment_equality_ratio(ctx, &grid, &d, s)?.with_param("dilation", r), t);
        let v = rep.ratio_oracle.unwrap_or(rep.ratio_paper);
        out.checks.push(Check::at_most(
            format!("dilation r={r}: |ratio/ratio(1) - 1|"),
            (v / ro - 1.0).abs(),
            env.tol("dilation"),
        ));
        out.reports.push(rep);
    }
    Ok(out)
}

fn profile(env: &Env<'_>, s: f64, e: &lbharm_core::SpectralSet) -> Result<Outcome, CliError> {
    let ctx = &env.ctx;
    let n = ctx.homogeneous_dim();
    let mut out = Outcome::default();
    let r0 = bound_profile_argmin(ctx, s, e)?;
    let g0 = bound_profile(ctx, s, e, r0)?;
    let gamma = gamma_measure_of_set(ctx, e)?;
    let k = constant_k(ctx, s)?.paper;
    let identity = rel(g0, k * gamma.powf(s / (2.0 * n)));
    let rn = bound_profile_numeric_argmin(ctx, s, e)?;
    out.checks.push(Check::at_most("g(r0) vs K gamma(E)^(s/(2(3a+2)))", identity, env.tol("profile_identity")));
    out.checks.push(Check::at_most("golden-section argmin vs r0", rel(rn, r0), env.tol("profile_argmin")));
    out.data("r0", r0);
    out.data("g_r0", g0);
    out.data("gamma_e", gamma);
    out.data("numeric_argmin", rn);
    Ok(out)
}

fn ball(env: &Env<'_>, exps: &[f64], radii: &[f64]) -> Result<Outcome, CliError> {
    let ctx = &env.ctx;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for &a in exps {
        let vals = radii.iter().map(|&r| ball_moment(ctx, a, r)).collect::<Result<Vec<_>, _>>()?;
        let spread = vals.iter().map(|v| rel(v.ratio, vals[0].ratio)).fold(0.0, f64::max);
        out.checks.push(Check::at_most(format!("a={a}: oracle/closed-form ratio spread over r"), spread, 1e-8));
        if radii.len() >= 2 {
            let pts: Vec<(f64, f64)> = radii.iter().zip(&vals).map(|(r, v)| (r.ln(), v.oracle.ln())).collect();
            let k = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            let expected = 6.0 * ctx.alpha() + 4.0 - 2.0 * a;
            out.checks.push(Check::at_most(format!("a={a}: log-log slope error"), (slope - expected).abs(), 1e-6));
        }
        if ctx.alpha() == 0.0 {
            for (r, v) in radii.iter().zip(&vals) {
                let exact = r.powf(4.0 - 2.0 * a) / (8.0 * (2.0 - a));
                out.checks.push(Check::at_most(
                    format!("a={a}, r={r}: oracle vs r^(4-2a)/(8(2-a))"),
                    rel(v.oracle, exact),
                    1e-8,
                ));
            }
        }
        for (r, v) in radii.iter().zip(&vals) {
            rows.push(serde_json::json!({ "a": a, "r": r, "oracle": v.oracle, "paper": v.paper, "ratio": v.ratio, "error_estimate": v.error_estimate }));
        }
    }
    out.data("ball_moments", rows);
    Ok(out)
}

fn heisenberg(env: &Env<'_>, args: &VerifyArgs, functions: &[String]) -> Result<Outcome, CliError> {
    let ctx = &env.ctx;
    let defaults: Vec<String> =
        ["gaussian", "laguerre-gaussian-1", "laguerre-gaussian-2"].iter().map(|s| s.to_string()).collect();
    let functions: Vec<String> = if args.functions.is_some() { functions.to_vec() } else { defaults };
    let a_list = or_default(&args.a, &[0.5, 1.0, 2.0]);
    let b_list = or_default(&args.b, &[0.5, 1.0, 2.0]);
    let radii = or_default(&args.r, &[0.5, 2.0]);
    let pairs: Vec<(f64, f64)> = a_list.iter().flat_map(|&a| b_list.iter().map(move |&b| (a, b))).collect();
    let (space, spectral) = heisenberg_grids();
    let p = env.plan_with(&space, &spectral)?;
    let mut out = Outcome::default();
    let mut min_ratio: BTreeMap<usize, f64> = BTreeMap::new();
    let dil_tol = env.tol("dilation");
    for id in &functions {
        let f = env.member(id)?;
        if f.decay == Decay::Slow {
            return Err(CliError::Config(format!("'{id}' decays too slowly for the Heisenberg grid")));
        }
        let t = Instant::now();
        let base = heisenberg_ratios(&p, &f.eval, id, &pairs)?;
        let per = elapsed_ms(t) / pairs.len() as f64;
        let mut all = vec![base.clone()];
        for &r in &radii {
            let d = dilate_normalized(ctx, r, f.eval.clone())?;
            let t = Instant::now();
            let reps = heisenberg_ratios(&p, &d, &format!("{id}-dilated-{r}"), &pairs)?;
            let per_r = elapsed_ms(t) / pairs.len() as f64;
            for (k, rep) in reps.iter().enumerate() {
                let (a, b) = pairs[k];
                out.checks.push(Check::at_most(
                    format!("{id}, r={r}, a={a}, b={b}: |ratio_r/ratio - 1|"),
                    (rep.ratio_paper / base[k].ratio_paper - 1.0).abs(),
                    dil_tol,
                ));
            }
            all.push(
                reps.into_iter()
                    .map(|mut x| {
                        x.runtime_ms = Some(per_r);
                        x.with_param("dilation", r)
                    })
                    .collect(),
            );
        }
        for reps in all.iter_mut() {
            for (k, rep) in reps.iter_mut().enumerate() {
                rep.runtime_ms.get_or_insert(per);
                let m = min_ratio.entry(k).or_insert(f64::INFINITY);
                *m = m.min(rep.ratio_paper);
            }
        }
        out.reports.extend(all.into_iter().flatten());
    }
    let bundled = Baseline::bundled();
    let factor = env.tol("heisenberg_baseline");
    let mut recorded = match &args.record_baseline {
        Some(path) if path.exists() => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Some(Baseline::parse(&text)?)
        }
        Some(_) => Some(Baseline::empty()),
        None => None,
    };
    let mut rows = Vec::new();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let m = min_ratio[&k];
        match bundled.lookup(ctx.alpha(), a, b) {
            Some(e) => out.checks.push(Check::at_least(
                format!("a={a}, b={b}: min ratio vs {factor} x baseline"),
                m,
                factor * e.min_ratio,
            )),
            None => {
                out.checks.push(Check::new(format!("a={a}, b={b}: min ratio (no baseline)"), m, Relation::Above, 0.0))
            }
        }
        if let Some(bl) = recorded.as_mut() {
            bl.record(Entry { alpha: ctx.alpha(), a, b, min_ratio: m, functions: functions.clone() });
        }
        rows.push(serde_json::json!({ "a": a, "b": b, "min_ratio": m }));
    }
    if let (Some(bl), Some(path)) = (recorded, &args.record_baseline) {
        bl.write(path)?;
        out.data("baseline_written", path.display().to_string());
    }
    out.data("min_ratios", rows);
    out.data("functions", &functions);
    Ok(out)
}

/// Runs every combination of the config's sweep block, in parallel.
pub fn sweep(env: &Env<'_>) -> Result<Outcome, CliError> {
    let sw = &env.cfg.sweep;
    if sw.targets.is_empty() {
        return Err(CliError::Config("sweep.targets is empty".into()));
    }
    let mut runs = Vec::new();
    for &target in &sw.targets {
        let s_values: Vec<Option<f64>> = if target.default_s(&env.ctx).is_some() && !sw.s.is_empty() {
            sw.s.iter().map(|&s| Some(s)).collect()
        } else {
            vec![None]
        };
        let sets: Vec<Option<SetBlock>> =
            if target.uses_set() && !sw.e.is_empty() { sw.e.iter().cloned().map(Some).collect() } else { vec![None] };
        for s in &s_values {
            for e in &sets {
                let mut a = VerifyArgs::new(target);
                a.s = *s;
                a.set = e.clone();
                a.a = sw.a.clone();
                a.b = sw.b.clone();
                a.r = sw.r.clone();
                runs.push(a);
            }
        }
    }
    let results: Vec<Result<Outcome, CliError>> = runs.par_iter().map(|a| verify(env, a)).collect();
    let mut out = Outcome::default();
    let mut summaries = Vec::new();
    for (args, res) in runs.iter().zip(results) {
        let o = res?;
        summaries.push(serde_json::json!({ "args": args, "data": o.data, "passed": o.passed() }));
        out.reports.extend(o.reports);
        out.checks.extend(o.checks);
    }
    out.data("runs", summaries);
    Ok(out)
}
