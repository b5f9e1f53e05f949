//! Special functions: Γ and B, the normalized Bessel function j_ν, Laguerre
//! polynomials and normalized Laguerre functions, and the joint
//! eigenfunctions φ_(λ,m)(x,t) = j_{α−½}(λt)·𝓛_m^α(λx²).

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// The deformation parameter α ≥ 0 with the gamma values used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaContext {
    alpha: f64,
    gamma_alpha_plus_1: f64,
    gamma_alpha_plus_half: f64,
}

impl AlphaContext {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be a finite number >= 0, got {alpha}"));
        }
        Ok(Self { alpha, gamma_alpha_plus_1: gamma_fn(alpha + 1.0)?, gamma_alpha_plus_half: gamma_fn(alpha + 0.5)? })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_alpha_plus_1(&self) -> f64 {
        self.gamma_alpha_plus_1
    }

    pub fn gamma_alpha_plus_half(&self) -> f64 {
        self.gamma_alpha_plus_half
    }

    /// Homogeneous dimension 3α+2.
    pub fn homogeneous_dim(&self) -> f64 {
        3.0 * self.alpha + 2.0
    }

    /// Order α−½ of the Bessel factor of the eigenfunctions.
    pub fn bessel_order(&self) -> f64 {
        self.alpha - 0.5
    }
}

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("gamma_fn needs x > 0, got {x}"));
    }
    let g = libm::tgamma(x);
    if !g.is_finite() {
        return Err(Error::Range(format!("gamma_fn overflows at x = {x}")));
    }
    Ok(g)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("ln_gamma needs x > 0, got {x}"));
    }
    Ok(libm::lgamma(x))
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("beta_fn needs a, b > 0, got ({a}, {b})"));
    }
    if a + b < 170.0 {
        Ok(libm::tgamma(a) * libm::tgamma(b) / libm::tgamma(a + b))
    } else {
        Ok((libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp())
    }
}

const SERIES_LIMIT: f64 = 12.0;

/// Evaluator for j_ν with the order-dependent constants computed once.
#[derive(Debug, Clone)]
pub struct NormalizedBessel {
    nu: f64,
    /// Γ(ν+1)·√(2/π)·2^ν, the factor in front of x^{−ν−½}(P cos ω − Q sin ω).
    asym_scale: f64,
    cos_phase: f64,
    sin_phase: f64,
    /// Hankel coefficients a_k(ν), truncated where they vanish or stop helping.
    hankel: Vec<f64>,
    terminating: bool,
}

impl NormalizedBessel {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= -0.5) || !nu.is_finite() {
            return domain(format!("Bessel order must be >= -1/2, got {nu}"));
        }
        if nu + 1.0 > 170.0 {
            return Err(Error::Range(format!("Bessel order {nu} too large")));
        }
        let phase = (0.5 * nu + 0.25) * std::f64::consts::PI;
        let four_nu2 = 4.0 * nu * nu;
        let mut hankel = vec![1.0];
        let mut terminating = false;
        let mut a = 1.0;
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            a *= (four_nu2 - odd * odd) / (k as f64 * 8.0);
            if a == 0.0 {
                terminating = true;
                break;
            }
            hankel.push(a);
        }
        let two_nu = 2.0 * nu;
        if (two_nu - two_nu.round()).abs() < 1e-15 && (two_nu.round() as i64) % 2 != 0 {
            terminating = true;
        }
        Ok(Self {
            nu,
            asym_scale: libm::tgamma(nu + 1.0) * (2.0 / std::f64::consts::PI).sqrt() * 2f64.powf(nu),
            cos_phase: if nu == -0.5 { 1.0 } else { phase.cos() },
            sin_phase: if nu == -0.5 { 0.0 } else { phase.sin() },
            hankel,
            terminating,
        })
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    /// j_ν(x); even in x.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        let use_asymptotic = x > SERIES_LIMIT || (self.terminating && x > 2.0 + 2.0 * self.nu);
        if use_asymptotic {
            self.asymptotic(x)
        } else {
            self.series(x)
        }
    }

    fn series(&self, x: f64) -> f64 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            term *= -q / ((k + 1.0) * (self.nu + k + 1.0));
            sum += term;
            k += 1.0;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > q.sqrt() {
                break;
            }
            if k > 400.0 {
                break;
            }
        }
        sum
    }

    fn asymptotic(&self, x: f64) -> f64 {
        let inv = 1.0 / x;
        let mut p = 0.0;
        let mut q = 0.0;
        let mut pow = 1.0;
        let mut last = f64::INFINITY;
        for (k, a) in self.hankel.iter().enumerate() {
            let term = a * pow;
            if !self.terminating {
                if term.abs() > last || term.abs() < 1e-17 {
                    break;
                }
                last = term.abs();
            }
            match k % 4 {
                0 => p += term,
                1 => q += term,
                2 => p -= term,
                _ => q -= term,
            }
            pow *= inv;
        }
        let (s, c) = x.sin_cos();
        let cos_w = c * self.cos_phase + s * self.sin_phase;
        let sin_w = s * self.cos_phase - c * self.sin_phase;
        self.asym_scale * x.powf(-self.nu - 0.5) * (p * cos_w - q * sin_w)
    }
}

/// j_ν(x) = Γ(ν+1) Σ_k (−1)^k (x/2)^{2k} / (k! Γ(ν+k+1)).
pub fn bessel_normalized(nu: f64, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Range(format!("bessel_normalized needs finite x, got {x}")));
    }
    Ok(NormalizedBessel::new(nu)?.eval(x))
}

/// L_m^α(x) by the three-term recurrence.
pub fn laguerre_poly(m: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// L_m^α(x) by the explicit alternating sum
/// Σ_j Γ(m+α+1)(−x)^j / (Γ(m−j+1)Γ(j+α+1) j!), with the terms generated by
/// their ratio and added with compensation. Cancels badly for large m·x.
pub fn laguerre_poly_sum(m: usize, alpha: f64, x: f64) -> f64 {
    // j = 0 term: Γ(m+α+1)/(Γ(m+1)Γ(α+1)) = L_m^α(0)
    let mut term = laguerre_at_zero(m, alpha);
    let mut acc = crate::quadrature::Neumaier::default();
    acc.add(term);
    for j in 0..m {
        let jf = j as f64;
        term *= -x * (m - j) as f64 / ((jf + alpha + 1.0) * (jf + 1.0));
        acc.add(term);
    }
    acc.sum()
}

/// L_m^α(0) = Γ(m+α+1)/(Γ(m+1)Γ(α+1)).
pub fn laguerre_at_zero(m: usize, alpha: f64) -> f64 {
    if m <= 4000 {
        let mut v = 1.0;
        for k in 1..=m {
            v *= (k as f64 + alpha) / k as f64;
        }
        v
    } else {
        (libm::lgamma(m as f64 + alpha + 1.0) - libm::lgamma(m as f64 + 1.0) - libm::lgamma(alpha + 1.0)).exp()
    }
}

/// 𝓛_m^α(x) = e^{−x/2} L_m^α(x) / L_m^α(0).
pub fn laguerre_function(m: usize, alpha: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("laguerre_function needs x >= 0, got {x}"));
    }
    let mut out = vec![0.0; m + 1];
    laguerre_functions(alpha, x, &mut out);
    Ok(out[m])
}

const RESCALE: f64 = 1e200;

/// Fill `out[m] = 𝓛_m^α(y)` for m = 0..out.len().
///
/// Runs the recurrence for ℓ_m = L_m^α/L_m^α(0),
/// (m+α+1)ℓ_{m+1} = (2m+α+1−y)ℓ_m − mℓ_{m−1}, carrying e^{−y/2} as a
/// separate log scale so neither factor over- or underflows.
pub fn laguerre_functions(alpha: f64, y: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let mut log_scale = -0.5 * y;
    let mut fac = log_scale.exp();
    let mut prev = 1.0;
    out[0] = fac;
    if n == 1 {
        return;
    }
    let mut cur = 1.0 - y / (alpha + 1.0);
    out[1] = cur * fac;
    for m in 1..n - 1 {
        let mf = m as f64;
        let next = ((2.0 * mf + alpha + 1.0 - y) * cur - mf * prev) / (mf + alpha + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
            fac = log_scale.exp();
        }
        out[m + 1] = cur * fac;
    }
}

/// Partial sum Σ_{m≤m_max} t^m L_m^α(x) and the closed form
/// (1−t)^{−α−1} e^{−xt/(1−t)} of the Laguerre generating function.
pub fn generating_function_check(alpha: f64, t: f64, x: f64, m_max: usize) -> Result<(f64, f64)> {
    if !(t.abs() < 1.0) {
        return domain(format!("generating function needs |t| < 1, got {t}"));
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    let mut acc = crate::quadrature::Neumaier::default();
    acc.add(1.0);
    let mut tp = 1.0;
    for k in 1..=m_max {
        tp *= t;
        acc.add(tp * cur);
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let closed = (1.0 - t).powf(-alpha - 1.0) * (-x * t / (1.0 - t)).exp();
    Ok((acc.sum(), closed))
}

/// φ_(λ,m)(x, t) = j_{α−½}(λt)·𝓛_m^α(λx²).
pub fn eigenfunction(ctx: &AlphaContext, lambda: f64, m: usize, x: f64, t: f64) -> f64 {
    let bessel = NormalizedBessel::new(ctx.bessel_order()).expect("alpha >= 0 gives order >= -1/2");
    let mut lag = vec![0.0; m + 1];
    laguerre_functions(ctx.alpha(), lambda * x * x, &mut lag);
    bessel.eval(lambda * t) * lag[m]
}

/// Residuals |D₁φ + λ²φ| and |D₂φ + 2λ(2m+α+1)φ| by central differences
/// with step `h`, where D₁ = ∂²_t + (2α/t)∂_t and
/// D₂ = ∂²_x + ((2α+1)/x)∂_x + x²D₁.
pub fn eigen_pde_residuals(ctx: &AlphaContext, lambda: f64, m: usize, x: f64, t: f64, h: f64) -> Result<(f64, f64)> {
    if !(x > h && t > h) {
        return domain(format!("PDE residual needs x, t > h, got x={x}, t={t}, h={h}"));
    }
    let a = ctx.alpha();
    let phi = |x: f64, t: f64| eigenfunction(ctx, lambda, m, x, t);
    let c = phi(x, t);
    let (tp, tm) = (phi(x, t + h), phi(x, t - h));
    let (xp, xm) = (phi(x + h, t), phi(x - h, t));
    let d1 = (tp - 2.0 * c + tm) / (h * h) + (2.0 * a / t) * (tp - tm) / (2.0 * h);
    let d2 = (xp - 2.0 * c + xm) / (h * h) + ((2.0 * a + 1.0) / x) * (xp - xm) / (2.0 * h) + x * x * d1;
    let eig = 2.0 * lambda * (2.0 * m as f64 + a + 1.0);
    Ok(((d1 + lambda * lambda * c).abs(), (d2 + eig * c).abs()))
}
