//! Heat semigroup e^{−sL} for Lφ_(λ,m) = 2λ(2m+α+1)φ_(λ,m), built
//! spectrally: h_s is the synthesis of the multiplier e^{−2λ(2m+α+1)s}.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::measure::{lp_norm_space, moment_norm, SampledFunction, SpectralFunction, SpectralGrid, SpectralMeasure};
use crate::quadrature::{tanh_sinh, GaussLegendre, Neumaier};
use crate::specfun::AlphaContext;
use crate::transform::{forward, inverse, TransformPlan};

/// 2λ(2m+α+1).
pub fn eigenvalue_l(ctx: &AlphaContext, lambda: f64, m: usize) -> f64 {
    2.0 * lambda * (2.0 * m as f64 + ctx.alpha() + 1.0)
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("diffusion time must be positive, got {s}"));
    }
    Ok(())
}

/// e^{−2λ(2m+α+1)s}.
pub fn heat_multiplier(ctx: &AlphaContext, s: f64, lambda: f64, m: usize) -> Result<f64> {
    check_s(s)?;
    Ok((-eigenvalue_l(ctx, lambda, m) * s).exp())
}

/// The multiplier sampled on a spectral grid.
pub fn heat_multiplier_on(grid: &std::sync::Arc<SpectralGrid>, s: f64) -> Result<SpectralFunction> {
    check_s(s)?;
    let ctx = *grid.ctx();
    Ok(SpectralFunction::from_fn(grid, |l, m| (-eigenvalue_l(&ctx, l, m) * s).exp()))
}

/// Smallest value of s·Λ_max·(2M_max+α+1) below which the multiplier has
/// not decayed at the edge of the spectral grid.
pub const SMALL_S_THRESHOLD: f64 = 20.0;

/// Whether the grid is too coarse for diffusion time `s`.
pub fn small_s_warning(plan: &TransformPlan, s: f64) -> Option<String> {
    let grid = plan.spectral_grid();
    let lmax = grid.lambda_axis().upper();
    let decay = s * lmax * (2.0 * grid.max_m() as f64 + plan.ctx().alpha() + 1.0);
    (decay < SMALL_S_THRESHOLD).then(|| {
        format!("s = {s}: s·Λ_max·(2M_max+α+1) = {decay:.3} < {SMALL_S_THRESHOLD}; the heat multiplier is truncated")
    })
}

/// h_s on the plan's space grid.
pub fn heat_kernel(plan: &TransformPlan, s: f64) -> Result<SampledFunction> {
    check_s(s)?;
    if let Some(w) = small_s_warning(plan, s) {
        log::warn!("{w}");
    }
    inverse(plan, &heat_multiplier_on(plan.spectral_grid(), s)?)
}

/// H^s f = f ∗ h_s.
pub fn heat_apply(plan: &TransformPlan, s: f64, f: &SampledFunction) -> Result<SampledFunction> {
    check_s(s)?;
    let g = forward(plan, f)?;
    inverse(plan, &heat_apply_spectral(plan, s, &g)?)
}

/// Multiplication by the heat multiplier on the spectral side.
pub fn heat_apply_spectral(plan: &TransformPlan, s: f64, g: &SpectralFunction) -> Result<SpectralFunction> {
    check_s(s)?;
    let ctx = *plan.ctx();
    Ok(g.map(|l, m, v| v * (-eigenvalue_l(&ctx, l, m) * s).exp()))
}

/// L^b f, with F(L^b f) = (2λ(2m+α+1))^b F f.
pub fn apply_l_power(plan: &TransformPlan, b: f64, f: &SampledFunction) -> Result<SampledFunction> {
    let g = forward(plan, f)?;
    inverse(plan, &apply_l_power_spectral(plan, b, &g)?)
}

pub fn apply_l_power_spectral(plan: &TransformPlan, b: f64, g: &SpectralFunction) -> Result<SpectralFunction> {
    if !(b > 0.0) {
        return domain(format!("power of L must be positive, got {b}"));
    }
    let ctx = *plan.ctx();
    Ok(g.map(|l, m, v| v * eigenvalue_l(&ctx, l, m).powf(b)))
}

/// ‖F h_s‖²_{γ_α,2} (classical normalization of γ_α) from the closed-form
/// reduction s^{−(3α+2)}/(2^{2α−1}Γ(α+½)) ∫_0^∞ (2 sinh 4u)^{−(α+1)} u^{3α+1} du.
pub fn heat_l2_norm_sq(ctx: &AlphaContext, s: f64, nodes_per_panel: usize) -> Result<f64> {
    check_s(s)?;
    let a = ctx.alpha();
    let integrand = |u: f64| -> f64 {
        // ln(2 sinh 4u) = 4u + ln(1 − e^{−8u}) once sinh would overflow
        let log_sinh = if u < 1.0 { (2.0 * (4.0 * u).sinh()).ln() } else { 4.0 * u + (-(-8.0 * u).exp()).ln_1p() };
        (-(a + 1.0) * log_sinh + (3.0 * a + 1.0) * u.ln()).exp()
    };
    let (head, _) = tanh_sinh(0.0, 1.0, 1e-15, integrand);
    // beyond u = 1 the integrand is below u^{3α+1}e^{−4(α+1)u}; stop at 1e-30 of the head
    let mut upper = 2.0;
    while integrand(upper) > 1e-30 * head {
        upper += 1.0;
    }
    let gl = GaussLegendre::new(nodes_per_panel)?;
    let mut tail = Neumaier::default();
    let mut lo = 1.0;
    while lo < upper {
        tail.add(gl.integrate(lo, lo + 1.0, integrand));
        lo += 1.0;
    }
    let pre = SpectralMeasure::Classical.prefactor(ctx);
    Ok(s.powf(-ctx.homogeneous_dim()) * pre * (head + tail.sum()))
}

/// ∫ |multiplier|² dγ_α on a spectral grid, for cross-checking the closed form.
pub fn multiplier_l2_norm_sq(grid: &std::sync::Arc<SpectralGrid>, s: f64) -> Result<f64> {
    let g = heat_multiplier_on(grid, s)?;
    let mut acc = Neumaier::default();
    for (v, w) in g.values().iter().zip(grid.weights()) {
        acc.add(w * v * v);
    }
    Ok(acc.sum())
}

/// ‖H^s f‖_{α,2} / (s^{−a/2}‖|(x,t)|^a f‖_{α,2}).
pub fn heat_smoothing_ratio(plan: &TransformPlan, f: &SampledFunction, a: f64, s: f64) -> Result<f64> {
    let n = plan.ctx().homogeneous_dim();
    if !(a > 0.0 && a < n) {
        return domain(format!("smoothing exponent needs 0 < a < 3α+2 = {n}, got {a}"));
    }
    check_s(s)?;
    let hs = heat_apply(plan, s, f)?;
    let num = lp_norm_space(&hs, 2.0)?;
    let den = s.powf(-0.5 * a) * moment_norm(f, a);
    if den == 0.0 {
        return Err(crate::Error::UndefinedRatio("moment norm of f vanishes".into()));
    }
    Ok(num / den)
}

/// max |(L + ∂_s)h_s| / max |h_s| over nodes with x, t ≥ `min_xt`, with
/// ∂_s by central differences of step `ds` and L applied spectrally.
pub fn heat_equation_residual(plan: &TransformPlan, s: f64, ds: f64, min_xt: f64) -> Result<f64> {
    check_s(s)?;
    if !(ds > 0.0 && ds < s) {
        return domain(format!("finite-difference step must lie in (0, s), got {ds}"));
    }
    let grid = plan.spectral_grid();
    let h = heat_kernel(plan, s)?;
    let lh = inverse(plan, &apply_l_power_spectral(plan, 1.0, &heat_multiplier_on(grid, s)?)?)?;
    let hp = heat_kernel(plan, s + ds)?;
    let hm = heat_kernel(plan, s - ds)?;
    let space = plan.space_grid();
    let nt = space.nt();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..space.len() {
        let (x, t) = (space.x_nodes()[i / nt], space.t_nodes()[i % nt]);
        scale = scale.max(h.values()[i].abs());
        if x >= min_xt && t >= min_xt {
            let dh = (hp.values()[i] - hm.values()[i]) / (2.0 * ds);
            worst = worst.max((lh.values()[i] + dh).abs());
        }
    }
    Ok(worst / scale)
}

/// ‖h_s‖²_{α,2} predicted from the closed form: the Plancherel measure is
/// the classical one divided by Γ(α+½)/(2π).
pub fn heat_space_norm_sq(ctx: &AlphaContext, s: f64) -> Result<f64> {
    Ok(heat_l2_norm_sq(ctx, s, 16)? * 2.0 * PI / ctx.gamma_alpha_plus_half())
}
