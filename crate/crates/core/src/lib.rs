//! Numerical harmonic analysis on 𝕂 = [0,∞)² for the Laguerre–Bessel
//! transform: special functions, weighted measures and quadrature grids,
//! the transform and its inverse, the heat semigroup, and verification of
//! uncertainty inequalities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod family;
pub mod heat;
pub mod measure;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod transform;
pub mod uncertainty;

pub use error::{Error, Result};
pub use family::{Decay, TestFunction};
pub use measure::{
    Evaluator, FreqPoint, SampledFunction, SpaceGrid, SpaceGridConfig, SpacePoint, SpectralFunction, SpectralGrid,
    SpectralGridConfig, SpectralMeasure, SpectralSet,
};
pub use report::{Bound, InequalityReport};
pub use specfun::AlphaContext;
pub use transform::TransformPlan;
