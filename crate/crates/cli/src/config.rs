//! Run configuration: a TOML file, with command-line flags layered on top.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use lbharm_core::family::MEMBER_IDS;
use lbharm_core::measure::{SpaceGridConfig, SpectralGridConfig, SpectralSet};
use lbharm_core::AlphaContext;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Grid block of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    /// Optional; must agree with the top-level `alpha` when both are given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub x_max: f64,
    pub t_max: f64,
    pub lambda_max: f64,
    pub m_max: usize,
    /// Panels along x.
    pub panels: usize,
    pub panels_t: usize,
    pub lambda_panels: usize,
    pub nodes_per_panel: usize,
    /// Cap on λ·m for spectral nodes.
    pub resolution: f64,
    pub graded_tail: bool,
}

impl Default for GridBlock {
    fn default() -> Self {
        let s = SpaceGridConfig::default();
        let p = SpectralGridConfig::default();
        Self {
            alpha: None,
            x_max: s.x_max,
            t_max: s.t_max,
            lambda_max: p.lambda_max,
            m_max: p.m_max,
            panels: s.panels_x,
            panels_t: s.panels_t,
            lambda_panels: p.lambda_panels,
            nodes_per_panel: s.nodes_per_panel,
            resolution: p.resolution,
            graded_tail: s.graded_tail,
        }
    }
}

impl GridBlock {
    pub fn space(&self) -> SpaceGridConfig {
        SpaceGridConfig {
            x_max: self.x_max,
            t_max: self.t_max,
            panels_x: self.panels,
            panels_t: self.panels_t,
            nodes_per_panel: self.nodes_per_panel,
            graded_tail: self.graded_tail,
            ..SpaceGridConfig::default()
        }
    }

    pub fn spectral(&self) -> SpectralGridConfig {
        SpectralGridConfig {
            lambda_max: self.lambda_max,
            m_max: self.m_max,
            lambda_panels: self.lambda_panels,
            nodes_per_panel: self.nodes_per_panel,
            resolution: self.resolution,
        }
    }

    /// Space grid for slowly decaying functions: this block when it asks for
    /// a graded tail, the stock graded grid otherwise.
    pub fn graded_space(&self) -> SpaceGridConfig {
        if self.graded_tail {
            self.space()
        } else {
            SpaceGridConfig::graded()
        }
    }
}

/// Set E = [lambda_lo, lambda_hi] × m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetBlock {
    #[serde(default)]
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub m: Vec<usize>,
}

impl SetBlock {
    pub fn to_set(&self) -> Result<SpectralSet, CliError> {
        Ok(SpectralSet::new(self.lambda_lo, self.lambda_hi, self.m.iter().copied())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    LocalSmall,
    LocalLarge,
    LocalCritical,
    LemmaExtremal,
    Interpolation,
    Heisenberg,
    Young,
    Profile,
    BallMoment,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::LocalSmall => "local-small",
            Target::LocalLarge => "local-large",
            Target::LocalCritical => "local-critical",
            Target::LemmaExtremal => "lemma-extremal",
            Target::Interpolation => "interpolation",
            Target::Heisenberg => "heisenberg",
            Target::Young => "young",
            Target::Profile => "profile",
            Target::BallMoment => "ball-moment",
        }
    }

    /// Default s, or None when the target has no s.
    pub fn default_s(self, ctx: &AlphaContext) -> Option<f64> {
        let n = ctx.homogeneous_dim();
        match self {
            Target::LocalSmall | Target::Profile => Some(n / 2.0),
            Target::LocalLarge | Target::LemmaExtremal => Some(2.0 * n),
            Target::Interpolation => Some(2.0),
            _ => None,
        }
    }

    /// Default E.
    pub fn default_set(self) -> SetBlock {
        let m = match self {
            Target::LocalLarge => vec![0, 1],
            Target::LocalCritical => vec![0],
            _ => vec![0, 1, 2, 3, 4],
        };
        SetBlock { lambda_lo: 0.0, lambda_hi: 1.0, m }
    }

    pub fn uses_set(self) -> bool {
        matches!(self, Target::LocalSmall | Target::LocalLarge | Target::LocalCritical | Target::Profile)
    }
}

/// Checks that `s` satisfies the precondition of `target` at this α.
pub fn check_s(target: Target, ctx: &AlphaContext, s: f64) -> Result<(), CliError> {
    let n = ctx.homogeneous_dim();
    let ok = match target {
        Target::LocalSmall | Target::Profile => s > 0.0 && s < n,
        Target::LocalLarge | Target::LemmaExtremal => s > n,
        Target::Interpolation => s > 1.0,
        _ => true,
    };
    if ok {
        return Ok(());
    }
    let need = match target {
        Target::LocalSmall | Target::Profile => format!("0 < s < 3α+2 = {n}"),
        Target::LocalLarge | Target::LemmaExtremal => format!("s > 3α+2 = {n}"),
        _ => "s > 1".to_string(),
    };
    Err(CliError::Config(format!("{} requires {need}, got s = {s}", target.name())))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub targets: Vec<Target>,
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub r: Vec<f64>,
    pub e: Vec<SetBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Tolerances and their defaults; `[tolerances]` may override any of them.
pub const TOLERANCES: [(&str, f64); 14] = [
    ("plancherel_defect", 1e-3),
    ("round_trip", 1e-2),
    ("heat_mass", 1e-3),
    ("heat_negativity", 1e-3),
    ("heat_residual", 1e-2),
    ("heat_norm", 1e-2),
    ("semigroup", 1e-15),
    ("lemma_equality", 1e-4),
    ("lemma_perturbation", 1e-3),
    ("dilation", 1e-3),
    ("heisenberg_baseline", 0.99),
    ("convolution_agreement", 1e-2),
    ("profile_identity", 1e-12),
    ("profile_argmin", 1e-6),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub alpha: f64,
    pub grid: GridBlock,
    pub test_family: Vec<String>,
    pub sweep: SweepBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            grid: GridBlock::default(),
            test_family: MEMBER_IDS.iter().map(|s| s.to_string()).collect(),
            sweep: SweepBlock::default(),
            output: None,
            format: Format::Json,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn ctx(&self) -> Result<AlphaContext, CliError> {
        Ok(AlphaContext::new(self.alpha)?)
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCES.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).expect("tolerance key is registered")
        })
    }

    /// Fills every tolerance so the emitted config is fully resolved.
    pub fn resolve(&mut self) {
        for (k, v) in TOLERANCES {
            self.tolerances.entry(k.to_string()).or_insert(v);
        }
        self.grid.alpha = None;
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(CliError::Config(format!("alpha must be a finite number >= 0, got {}", self.alpha)));
        }
        if let Some(a) = self.grid.alpha {
            if a != self.alpha {
                return Err(CliError::Config(format!("grid.alpha = {a} disagrees with alpha = {}", self.alpha)));
            }
        }
        self.grid.space().validate()?;
        self.grid.spectral().validate()?;
        for id in &self.test_family {
            if !MEMBER_IDS.contains(&id.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown test function '{id}'; valid: {}",
                    MEMBER_IDS.join(", ")
                )));
            }
        }
        for (k, v) in &self.tolerances {
            if !TOLERANCES.iter().any(|(known, _)| known == k) {
                let keys: Vec<&str> = TOLERANCES.iter().map(|(k, _)| *k).collect();
                return Err(CliError::Config(format!("unknown tolerance '{k}'; valid: {}", keys.join(", "))));
            }
            if !(*v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance '{k}' must be positive, got {v}")));
            }
        }
        let ctx = self.ctx()?;
        for &t in &self.sweep.targets {
            for &s in &self.sweep.s {
                if t.default_s(&ctx).is_some() {
                    check_s(t, &ctx, s)?;
                }
            }
        }
        for e in &self.sweep.e {
            e.to_set()?;
        }
        for (name, vals) in [("a", &self.sweep.a), ("b", &self.sweep.b), ("r", &self.sweep.r)] {
            if let Some(v) = vals.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(CliError::Config(format!("sweep.{name} values must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Parses and validates a config; an empty text gives the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.grid.space(), SpaceGridConfig::default());
        assert_eq!(c.grid.spectral(), SpectralGridConfig::default());
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(matches!(parse_config("alpha = -1.0"), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_list_the_valid_ones() {
        let e = parse_config("alpah = 1.0").unwrap_err().to_string();
        assert!(e.contains("alpha") && e.contains("grid"), "{e}");
        let e = parse_config("[grid]\nxmax = 3.0").unwrap_err().to_string();
        assert!(e.contains("x_max"), "{e}");
        let e = parse_config("[tolerances]\nfoo = 1.0").unwrap_err().to_string();
        assert!(e.contains("plancherel_defect"), "{e}");
    }

    #[test]
    fn out_of_range_s_names_the_precondition() {
        let e = parse_config("[sweep]\ntargets = [\"local-small\"]\ns = [5.0]").unwrap_err().to_string();
        assert!(e.contains("0 < s < 3α+2 = 2"), "{e}");
        assert!(parse_config("alpha = 1.0\n[sweep]\ntargets = [\"local-small\"]\ns = [4.0]").is_ok());
    }

    #[test]
    fn grid_block_round_trips() {
        let c =
            parse_config("alpha = 0.5\n[grid]\nalpha = 0.5\nx_max = 10.0\npanels = 6\ngraded_tail = false").unwrap();
        assert_eq!(c.grid.space().x_max, 10.0);
        assert_eq!(c.grid.space().panels_x, 6);
        assert!(parse_config("alpha = 0.5\n[grid]\nalpha = 1.0").is_err());
        assert!(parse_config("[grid]\nnodes_per_panel = 0").is_err());
        assert!(parse_config("test_family = [\"nope\"]").is_err());
        assert!(parse_config("[[sweep.e]]\nlambda_hi = 1.0\nm = []").is_err());
    }
}
