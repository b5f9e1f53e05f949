//! The versioned family of closed-form test functions used by the
//! inequality checks.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::measure::{dilate_normalized, rho, Evaluator};
use crate::specfun::{laguerre_function, AlphaContext};

/// Bump when any member changes.
pub const FAMILY_VERSION: u32 = 1;

/// Which space grid a member needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decay {
    /// Gaussian decay: the standard grid.
    Fast,
    /// Algebraic decay: the graded grid out to the tail.
    Slow,
}

#[derive(Clone)]
pub struct TestFunction {
    pub id: String,
    pub decay: Decay,
    pub eval: Evaluator,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("id", &self.id).field("decay", &self.decay).finish()
    }
}

pub const MEMBER_IDS: [&str; 7] = [
    "gaussian",
    "gaussian-dilated-0.5",
    "gaussian-dilated-2",
    "laguerre-gaussian-1",
    "laguerre-gaussian-2",
    "extremal",
    "extremal-perturbed",
];

/// Exponent s of the extremal profile (1+|(x,t)|^{2s})^{−1}: twice 3α+2.
pub fn extremal_exponent(ctx: &AlphaContext) -> f64 {
    2.0 * ctx.homogeneous_dim()
}

/// (1+|(x,t)|^{2s})^{−1}.
pub fn extremal(s: f64) -> Evaluator {
    Arc::new(move |x, t| 1.0 / (1.0 + rho(x, t).powf(2.0 * s)))
}

pub fn gaussian() -> Evaluator {
    Arc::new(|x, t| (-(x * x + t * t)).exp())
}

/// 𝓛_m^α(2x²)e^{−t²}.
pub fn laguerre_gaussian(ctx: &AlphaContext, m: usize) -> Evaluator {
    let a = ctx.alpha();
    Arc::new(move |x, t| laguerre_function(m, a, 2.0 * x * x).expect("x² >= 0") * (-t * t).exp())
}

pub fn member(ctx: &AlphaContext, id: &str) -> Result<TestFunction> {
    let (decay, eval) = match id {
        "gaussian" => (Decay::Fast, gaussian()),
        "gaussian-dilated-0.5" => (Decay::Fast, dilate_normalized(ctx, 0.5, gaussian())?),
        "gaussian-dilated-2" => (Decay::Fast, dilate_normalized(ctx, 2.0, gaussian())?),
        "laguerre-gaussian-1" => (Decay::Fast, laguerre_gaussian(ctx, 1)),
        "laguerre-gaussian-2" => (Decay::Fast, laguerre_gaussian(ctx, 2)),
        "extremal" => (Decay::Slow, extremal(extremal_exponent(ctx))),
        "extremal-perturbed" => {
            let base = extremal(extremal_exponent(ctx));
            (Decay::Slow, Arc::new(move |x: f64, t: f64| base(x, t) * (-0.1 * (x * x + t * t)).exp()) as Evaluator)
        }
        other => return domain(format!("unknown test function '{other}'; known: {}", MEMBER_IDS.join(", "))),
    };
    Ok(TestFunction { id: id.to_string(), decay, eval })
}

pub fn default_family(ctx: &AlphaContext) -> Vec<TestFunction> {
    MEMBER_IDS.iter().map(|id| member(ctx, id).expect("known id")).collect()
}

/// e^{−(a x² + b t²)}.
pub fn anisotropic_gaussian(a: f64, b: f64) -> Evaluator {
    Arc::new(move |x, t| (-(a * x * x + b * t * t)).exp())
}

/// Width pairs ((a₁, b₁), (a₂, b₂)) of the Gaussian pairs used for Young's inequality.
pub const YOUNG_PAIRS: [((f64, f64), (f64, f64)); 5] = [
    ((1.0, 1.0), (1.0, 1.0)),
    ((1.0, 1.0), (2.0, 2.0)),
    ((0.5, 1.0), (1.0, 0.5)),
    ((2.0, 1.0), (1.0, 2.0)),
    ((1.0, 3.0), (0.7, 0.7)),
];

pub fn young_pair(index: usize) -> Result<(Evaluator, Evaluator)> {
    let Some(&((a1, b1), (a2, b2))) = YOUNG_PAIRS.get(index) else {
        return domain(format!("Young pair index {index} out of range 0..{}", YOUNG_PAIRS.len()));
    };
    Ok((anisotropic_gaussian(a1, b1), anisotropic_gaussian(a2, b2)))
}
