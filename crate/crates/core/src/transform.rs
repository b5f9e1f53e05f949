//! The Laguerre–Bessel transform F f(λ,m) = ∫ f φ_(λ,m) dm_α, its synthesis
//! inverse, Plancherel checks, convolution (spectral for every α, through
//! the explicit translation at α = 0) and Young's inequality.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    lp_norm_space, Evaluator, SampledFunction, SpaceGrid, SpaceGridConfig, SpacePoint, SpectralFunction, SpectralGrid,
    SpectralMeasure,
};
use crate::quadrature::{GaussLegendre, Neumaier};
use crate::report::InequalityReport;
use crate::specfun::{laguerre_functions, AlphaContext, NormalizedBessel};

/// Precomputed transform between a space grid and a spectral grid.
///
/// The kernel φ_(λ,m)(x,t) = j_{α−½}(λt)·𝓛_m^α(λx²) factors, so the plan
/// keeps the Bessel values j_{α−½}(λ_i t_j) as a matrix and regenerates
/// the Laguerre factor by recurrence for each (λ_i, x_k).
#[derive(Debug, Clone)]
pub struct TransformPlan {
    ctx: AlphaContext,
    space: Arc<SpaceGrid>,
    spectral: Arc<SpectralGrid>,
    bessel: Vec<f64>,
    synthesis_weights: Vec<f64>,
}

pub fn plan(ctx: &AlphaContext, space: &Arc<SpaceGrid>, spectral: &Arc<SpectralGrid>) -> Result<TransformPlan> {
    TransformPlan::new(ctx, space, spectral)
}

impl TransformPlan {
    pub fn new(ctx: &AlphaContext, space: &Arc<SpaceGrid>, spectral: &Arc<SpectralGrid>) -> Result<Self> {
        if space.ctx().alpha() != ctx.alpha() || spectral.ctx().alpha() != ctx.alpha() {
            return Err(Error::Config(format!(
                "grids built for alpha = {} / {} but plan requested for alpha = {}",
                space.ctx().alpha(),
                spectral.ctx().alpha(),
                ctx.alpha()
            )));
        }
        let j = NormalizedBessel::new(ctx.bessel_order())?;
        let ts = space.t_nodes();
        let bessel: Vec<f64> = spectral
            .lambda_nodes()
            .par_iter()
            .flat_map_iter(|&l| ts.iter().map(|&t| j.eval(l * t)).collect::<Vec<_>>())
            .collect();
        let synthesis_weights = spectral.with_measure(SpectralMeasure::Plancherel).weights().to_vec();
        Ok(Self { ctx: *ctx, space: space.clone(), spectral: spectral.clone(), bessel, synthesis_weights })
    }

    pub fn ctx(&self) -> &AlphaContext {
        &self.ctx
    }

    pub fn space_grid(&self) -> &Arc<SpaceGrid> {
        &self.space
    }

    pub fn spectral_grid(&self) -> &Arc<SpectralGrid> {
        &self.spectral
    }

    /// φ at spectral node `k` (flat index) and space node `i`.
    pub fn kernel(&self, k: usize, i: usize) -> f64 {
        let li = self.lambda_index(k);
        let l = self.spectral.lambda_nodes()[li];
        let m = self.spectral.m_values()[k];
        let nt = self.space.nt();
        let x = self.space.x_nodes()[i / nt];
        let mut buf = vec![0.0; m + 1];
        laguerre_functions(self.ctx.alpha(), l * x * x, &mut buf);
        self.bessel[li * nt + i % nt] * buf[m]
    }

    fn lambda_index(&self, k: usize) -> usize {
        let n = self.spectral.n_lambda();
        let (mut lo, mut hi) = (0, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.spectral.range(mid).start <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Grid metadata for reports.
    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "space": self.space.describe(), "spectral": self.spectral.describe() })
    }

    fn check_space(&self, f: &SampledFunction) -> Result<()> {
        if Arc::ptr_eq(f.grid(), &self.space) || **f.grid() == *self.space {
            Ok(())
        } else {
            Err(Error::Shape("function is not sampled on the plan's space grid".into()))
        }
    }

    fn check_spectral(&self, g: &SpectralFunction) -> Result<()> {
        if Arc::ptr_eq(g.grid(), &self.spectral) || **g.grid() == *self.spectral {
            Ok(())
        } else {
            Err(Error::Shape("function does not live on the plan's spectral grid".into()))
        }
    }

    /// Sum over m of w·g·𝓛_m(λ_i x²) for every x, at λ node `i`.
    fn synthesis_row(&self, i: usize, g: &[f64], weights: &[f64]) -> Vec<f64> {
        let l = self.spectral.lambda_nodes()[i];
        let range = self.spectral.range(i);
        let ms = self.spectral.m_values_at(i);
        let coeff: Vec<f64> = range.clone().map(|k| weights[k] * g[k]).collect();
        let top = ms.iter().copied().max().unwrap_or(0);
        let mut buf = vec![0.0; top + 1];
        self.space
            .x_nodes()
            .iter()
            .map(|&x| {
                laguerre_functions(self.ctx.alpha(), l * x * x, &mut buf);
                ms.iter().zip(&coeff).map(|(&m, c)| c * buf[m]).sum()
            })
            .collect()
    }
}

/// F f on the plan's spectral grid.
pub fn forward(plan: &TransformPlan, f: &SampledFunction) -> Result<SpectralFunction> {
    plan.check_space(f)?;
    let space = &plan.space;
    let spectral = &plan.spectral;
    let (nx, nt) = (space.nx(), space.nt());
    let fv = f.values();
    let alpha = plan.ctx.alpha();
    let rows: Vec<Vec<f64>> = (0..spectral.n_lambda())
        .into_par_iter()
        .map(|i| {
            let l = spectral.lambda_nodes()[i];
            let jrow = &plan.bessel[i * nt..(i + 1) * nt];
            let jw: Vec<f64> = jrow.iter().zip(space.t_factor()).map(|(j, w)| j * w).collect();
            let ms = spectral.m_values_at(i);
            let top = ms.iter().copied().max().unwrap_or(0);
            let mut acc = vec![0.0; top + 1];
            let mut buf = vec![0.0; top + 1];
            for ix in 0..nx {
                let row = &fv[ix * nt..(ix + 1) * nt];
                let a: f64 = row.iter().zip(&jw).map(|(v, w)| v * w).sum::<f64>() * space.x_factor()[ix];
                if a == 0.0 {
                    continue;
                }
                let x = space.x_nodes()[ix];
                laguerre_functions(alpha, l * x * x, &mut buf);
                for (s, b) in acc.iter_mut().zip(&buf) {
                    *s += a * b;
                }
            }
            ms.iter().map(|&m| acc[m]).collect()
        })
        .collect();
    SpectralFunction::new(spectral.clone(), rows.concat())
}

/// Synthesis ∫ g φ_(λ,m)(x,t) dγ_α at the space nodes, with γ_α in the
/// Plancherel normalization so that `inverse(forward(f)) ≈ f`.
pub fn inverse(plan: &TransformPlan, g: &SpectralFunction) -> Result<SampledFunction> {
    plan.check_spectral(g)?;
    let space = &plan.space;
    let (nx, nt) = (space.nx(), space.nt());
    let nl = plan.spectral.n_lambda();
    let b: Vec<Vec<f64>> =
        (0..nl).into_par_iter().map(|i| plan.synthesis_row(i, g.values(), &plan.synthesis_weights)).collect();
    let out: Vec<f64> = (0..nx)
        .into_par_iter()
        .flat_map_iter(|ix| {
            let mut row = vec![0.0; nt];
            for (i, bi) in b.iter().enumerate() {
                let c = bi[ix];
                if c == 0.0 {
                    continue;
                }
                let jrow = &plan.bessel[i * nt..(i + 1) * nt];
                for (r, j) in row.iter_mut().zip(jrow) {
                    *r += c * j;
                }
            }
            row
        })
        .collect();
    SampledFunction::new(space.clone(), out)
}

/// The synthesis of `g` at an arbitrary point.
pub fn synthesize_at(plan: &TransformPlan, g: &SpectralFunction, p: SpacePoint) -> Result<f64> {
    plan.check_spectral(g)?;
    let j = NormalizedBessel::new(plan.ctx.bessel_order())?;
    let top = plan.spectral.max_m();
    let mut buf = vec![0.0; top + 1];
    let mut acc = Neumaier::default();
    for i in 0..plan.spectral.n_lambda() {
        let l = plan.spectral.lambda_nodes()[i];
        laguerre_functions(plan.ctx.alpha(), l * p.x * p.x, &mut buf);
        let jt = j.eval(l * p.t);
        for (k, &m) in plan.spectral.range(i).zip(plan.spectral.m_values_at(i)) {
            acc.add(plan.synthesis_weights[k] * g.values()[k] * buf[m] * jt);
        }
    }
    Ok(acc.sum())
}

/// ‖·‖_{γ_α,2} in the Plancherel normalization, whatever the grid's own measure.
pub fn plancherel_norm(plan: &TransformPlan, g: &SpectralFunction) -> Result<f64> {
    plan.check_spectral(g)?;
    let mut acc = Neumaier::default();
    for (v, w) in g.values().iter().zip(&plan.synthesis_weights) {
        acc.add(w * v * v);
    }
    Ok(acc.sum().sqrt())
}

/// |‖f‖_{α,2} − ‖F f‖_{γ_α,2}| / ‖f‖_{α,2}.
pub fn plancherel_defect(plan: &TransformPlan, f: &SampledFunction) -> Result<f64> {
    let n = lp_norm_space(f, 2.0)?;
    if n == 0.0 {
        return Err(Error::UndefinedRatio("Plancherel defect of the zero function".into()));
    }
    let g = forward(plan, f)?;
    Ok((n - plancherel_norm(plan, &g)?).abs() / n)
}

/// f ∗ g = synthesis of F f · F g.
pub fn convolve_spectral(plan: &TransformPlan, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    let ff = forward(plan, f)?;
    let fg = forward(plan, g)?;
    inverse(plan, &ff.multiply(&fg)?)
}

fn require_alpha_zero(ctx: &AlphaContext, what: &str) -> Result<()> {
    if ctx.alpha() != 0.0 {
        return Err(Error::Unsupported(format!("{what} is only available for alpha = 0, got {}", ctx.alpha())));
    }
    Ok(())
}

/// θ-quadrature for the α = 0 translation.
#[derive(Debug, Clone)]
pub struct ThetaRule {
    cos: Vec<f64>,
    sin: Vec<f64>,
    weights: Vec<f64>,
}

impl ThetaRule {
    pub fn new(n_theta: usize) -> Result<Self> {
        let gl = GaussLegendre::new(n_theta)?;
        let h = 0.5 * PI;
        let th: Vec<f64> = gl.nodes.iter().map(|x| h * (x + 1.0)).collect();
        Ok(Self {
            cos: th.iter().map(|t| t.cos()).collect(),
            sin: th.iter().map(|t| t.sin()).collect(),
            weights: gl.weights.iter().map(|w| h * w / (4.0 * PI)).collect(),
        })
    }

    fn translate(&self, x: f64, t: f64, f: &dyn Fn(f64, f64) -> f64, y: f64, s: f64) -> f64 {
        let mut acc = 0.0;
        for ((c, sn), w) in self.cos.iter().zip(&self.sin).zip(&self.weights) {
            let d = (x * x + y * y + 2.0 * x * y * c).max(0.0).sqrt();
            let yy = x * y * sn;
            let v = f(d, (yy + t + s).abs())
                + f(d, (yy + t - s).abs())
                + f(d, (yy - t + s).abs())
                + f(d, (yy - t - s).abs());
            acc += w * v;
        }
        acc
    }
}

/// T_{(x,t)} f(y,s) at α = 0:
/// (1/4π) Σ_{i,j} ∫_0^π f(Δ_θ(x,y), xy sin θ + (−1)^i t + (−1)^j s) dθ,
/// with Δ_θ(x,y) = √(x²+y²+2xy cos θ) and f extended evenly in its second argument.
pub fn translate_alpha0(
    ctx: &AlphaContext,
    xt: SpacePoint,
    f: &dyn Fn(f64, f64) -> f64,
    ys: SpacePoint,
    n_theta: usize,
) -> Result<f64> {
    require_alpha_zero(ctx, "the explicit translation")?;
    Ok(ThetaRule::new(n_theta)?.translate(xt.x, xt.t, f, ys.x, ys.t))
}

/// Quadrature used by the direct convolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirectConvolutionConfig {
    /// Grid for the (y, s) integral.
    pub inner: SpaceGridConfig,
    pub n_theta: usize,
}

impl Default for DirectConvolutionConfig {
    fn default() -> Self {
        Self {
            inner: SpaceGridConfig {
                x_max: 6.0,
                t_max: 6.0,
                panels_x: 6,
                panels_t: 6,
                nodes_per_panel: 8,
                ..SpaceGridConfig::default()
            },
            n_theta: 24,
        }
    }
}

/// (f ∗ g)(x,t) = ∫ T_{(x,t)} f(y,s) g(y,s) dm₀(y,s) at the nodes of `grid`.
pub fn convolve_direct_alpha0(
    f: &Evaluator,
    g: &Evaluator,
    grid: &Arc<SpaceGrid>,
    config: &DirectConvolutionConfig,
) -> Result<SampledFunction> {
    require_alpha_zero(grid.ctx(), "direct convolution")?;
    let inner = SpaceGrid::new(grid.ctx(), &config.inner)?;
    let rule = ThetaRule::new(config.n_theta)?;
    let nti = inner.nt();
    let mut terms: Vec<(f64, f64, f64)> = Vec::with_capacity(inner.len());
    for (k, w) in inner.weights().iter().enumerate() {
        let (y, s) = (inner.x_nodes()[k / nti], inner.t_nodes()[k % nti]);
        let gw = w * g(y, s);
        if gw != 0.0 {
            terms.push((y, s, gw));
        }
    }
    let nt = grid.nt();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (x, t) = (grid.x_nodes()[i / nt], grid.t_nodes()[i % nt]);
            let mut acc = Neumaier::default();
            for &(y, s, gw) in &terms {
                acc.add(gw * rule.translate(x, t, f.as_ref(), y, s));
            }
            acc.sum()
        })
        .collect();
    SampledFunction::new(grid.clone(), values)
}

/// Relative L² distance on `grid` between the direct α = 0 convolution and
/// the synthesis of F f · F g through `plan`.
pub fn convolution_route_agreement(
    plan: &TransformPlan,
    f: &Evaluator,
    g: &Evaluator,
    grid: &Arc<SpaceGrid>,
    config: &DirectConvolutionConfig,
) -> Result<f64> {
    let direct = convolve_direct_alpha0(f, g, grid, config)?;
    let fs = SampledFunction::from_fn(plan.space_grid(), |x, t| f(x, t));
    let gs = SampledFunction::from_fn(plan.space_grid(), |x, t| g(x, t));
    let product = forward(plan, &fs)?.multiply(&forward(plan, &gs)?)?;
    let values = (0..grid.len()).map(|i| synthesize_at(plan, &product, grid.point(i))).collect::<Result<Vec<_>>>()?;
    direct.relative_l2_distance(&SampledFunction::new(grid.clone(), values)?)
}

/// How `young_check` forms f ∗ g.
pub enum ConvolutionRoute<'a> {
    Spectral(&'a TransformPlan),
    /// α = 0 only: translation-based convolution sampled on `grid`; the
    /// norms of f and g are taken on the same grid.
    Direct {
        grid: &'a Arc<SpaceGrid>,
        config: &'a DirectConvolutionConfig,
    },
}

/// ‖f∗g‖_{α,r} ≤ ‖f‖_{α,p}‖g‖_{α,q} with 1/p + 1/q − 1 = 1/r.
pub fn young_check(
    route: ConvolutionRoute<'_>,
    f: &Evaluator,
    g: &Evaluator,
    p: f64,
    q: f64,
    r: f64,
) -> Result<InequalityReport> {
    let inv = |v: f64| if v.is_infinite() { 0.0 } else { 1.0 / v };
    if !(p >= 1.0 && q >= 1.0 && r >= 1.0) || (inv(p) + inv(q) - 1.0 - inv(r)).abs() > 1e-12 {
        return Err(Error::Domain(format!("Young exponents need 1/p + 1/q - 1 = 1/r, got ({p}, {q}, {r})")));
    }
    let (conv, norms_grid, grid_meta, err) = match route {
        ConvolutionRoute::Spectral(plan) => {
            let fs = SampledFunction::from_fn(plan.space_grid(), |x, t| f(x, t));
            let gs = SampledFunction::from_fn(plan.space_grid(), |x, t| g(x, t));
            let conv = convolve_spectral(plan, &fs, &gs)?;
            let defect = plancherel_defect(plan, &fs)?.max(plancherel_defect(plan, &gs)?);
            (conv, plan.space_grid().clone(), plan.describe(), 2.0 * defect)
        }
        ConvolutionRoute::Direct { grid, config } => {
            let conv = convolve_direct_alpha0(f, g, grid, config)?;
            let mut coarse_cfg = config.clone();
            coarse_cfg.n_theta = (config.n_theta / 2).max(2);
            let coarse = convolve_direct_alpha0(f, g, grid, &coarse_cfg)?;
            let theta_err = {
                let a = lp_norm_space(&conv, r)?;
                let b = lp_norm_space(&coarse, r)?;
                if a > 0.0 {
                    (a - b).abs() / a
                } else {
                    0.0
                }
            };
            let fs = SampledFunction::from_fn(grid, |x, t| f(x, t));
            let gs = SampledFunction::from_fn(grid, |x, t| g(x, t));
            let tails = conv.tail_fraction(r) + fs.tail_fraction(p) + gs.tail_fraction(q);
            // quadrature error of the outer grid, charged to both sides
            let fine = Arc::new(grid.refined()?);
            let norms = |on: &Arc<SpaceGrid>| -> Result<f64> {
                let a = lp_norm_space(&SampledFunction::from_fn(on, |x, t| f(x, t)), p)?;
                let b = lp_norm_space(&SampledFunction::from_fn(on, |x, t| g(x, t)), q)?;
                Ok(a * b)
            };
            let (coarse_rhs, fine_rhs) = (norms(grid)?, norms(&fine)?);
            let quad_err = if fine_rhs > 0.0 { 2.0 * (coarse_rhs - fine_rhs).abs() / fine_rhs } else { 0.0 };
            let meta = serde_json::json!({ "space": grid.describe(), "n_theta": config.n_theta });
            (conv, grid.clone(), meta, theta_err + tails + quad_err + 1e-12)
        }
    };
    let fs = SampledFunction::from_fn(&norms_grid, |x, t| f(x, t));
    let gs = SampledFunction::from_fn(&norms_grid, |x, t| g(x, t));
    let lhs = lp_norm_space(&conv, r)?;
    let rhs = lp_norm_space(&fs, p)? * lp_norm_space(&gs, q)?;
    Ok(InequalityReport::upper("young", lhs, rhs, None, err)
        .with_param("p", p)
        .with_param("q", q)
        .with_param("r", r)
        .with_grid(grid_meta))
}
