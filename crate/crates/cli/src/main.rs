//! `lbharm`: transforms, heat semigroup checks and inequality reports for
//! Laguerre–Bessel harmonic analysis.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration
//! error, 3 I/O failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod baseline;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Env, HeatCheck, Route, SpecfunCheck, VerifyArgs};
use config::{parse_config, Format, RunConfig, SetBlock, Target};
use output::{Document, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Output(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<lbharm_core::Error> for CliError {
    fn from(e: lbharm_core::Error) -> Self {
        use lbharm_core::Error as E;
        match e {
            E::Range(_) | E::Accuracy(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 1,
            CliError::Output(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lbharm", version, about = "Laguerre–Bessel harmonic analysis toolkit")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Omit runtimes so identical runs give identical bytes.
    #[arg(long, global = true)]
    canonical: bool,
    /// Overrides the config's alpha.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Special-function identities: half-integer Bessel orders, Laguerre
    /// bounds, generating function, eigenfunction equations.
    Specfun {
        #[arg(long, value_enum, default_value = "all")]
        check: SpecfunCheck,
    },
    /// Round trip inverse(forward(f)) under spectral refinement.
    Transform {
        #[arg(long, default_value = "gaussian")]
        function: String,
        #[arg(long, default_value_t = 2)]
        refinements: usize,
    },
    /// Plancherel defect under spectral refinement.
    Plancherel {
        #[arg(long, default_value = "gaussian")]
        function: String,
        #[arg(long, default_value_t = 1)]
        refinements: usize,
    },
    /// Direct (alpha = 0) against spectral convolution of Gaussian pairs.
    Convolve {
        #[arg(long, value_delimiter = ',')]
        pair: Vec<usize>,
    },
    /// Young's inequality on Gaussian pairs.
    Young {
        #[arg(long, value_delimiter = ',')]
        pair: Vec<usize>,
        /// p,q,r; may be repeated.
        #[arg(long = "exponents", default_values = ["1,1,1", "1,2,2"])]
        exponents: Vec<String>,
        #[arg(long, value_enum, default_value = "auto")]
        route: Route,
    },
    /// Heat kernel and semigroup checks.
    Heat {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, value_enum, default_value = "all")]
        check: HeatCheck,
    },
    /// Closed-form and quadrature constants.
    Constants {
        #[arg(long)]
        s: Option<f64>,
    },
    /// Verify one inequality over the test family.
    Verify {
        #[arg(value_enum)]
        target: Target,
        /// Moment exponent; each target has its own default and range.
        #[arg(long)]
        s: Option<f64>,
        /// Space moment exponents (heisenberg) or ball-moment exponents.
        #[arg(long, value_delimiter = ',')]
        a: Vec<f64>,
        /// Spectral moment exponents (heisenberg).
        #[arg(long, value_delimiter = ',')]
        b: Vec<f64>,
        /// Dilation factors, or radii for ball-moment.
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        /// Lower λ edge of the spectral set E.
        #[arg(long)]
        lambda_lo: Option<f64>,
        /// Upper λ edge of the spectral set E.
        #[arg(long)]
        lambda_hi: Option<f64>,
        /// Laguerre indices of E; an empty value gives an empty set.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        m: Option<Vec<usize>>,
        /// Test-family members to run instead of the configured family.
        #[arg(long, value_delimiter = ',')]
        function: Vec<String>,
        /// Heisenberg only: write the observed minima to this baseline file.
        #[arg(long)]
        record_baseline: Option<PathBuf>,
    },
    /// Run every combination of the config's [sweep] block.
    Sweep,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(a) = cli.alpha {
        cfg.alpha = a;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.validate()?;
    cfg.resolve();
    Ok(cfg)
}

fn set_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LBHARM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("LBHARM_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))
}

fn verify_args(command: &Command) -> Result<VerifyArgs, CliError> {
    let Command::Verify { target, s, a, b, r, lambda_lo, lambda_hi, m, function, record_baseline } = command else {
        unreachable!("called for verify only")
    };
    let mut args = VerifyArgs::new(*target);
    args.s = *s;
    args.a = a.clone();
    args.b = b.clone();
    args.r = r.clone();
    if lambda_lo.is_some() || lambda_hi.is_some() || m.is_some() {
        let d = target.default_set();
        args.set = Some(SetBlock {
            lambda_lo: lambda_lo.unwrap_or(d.lambda_lo),
            lambda_hi: lambda_hi.unwrap_or(d.lambda_hi),
            m: m.clone().unwrap_or(d.m),
        });
    }
    if !function.is_empty() {
        args.functions = Some(function.clone());
    }
    if record_baseline.is_some() && *target != Target::Heisenberg {
        return Err(CliError::Config("--record-baseline applies to the heisenberg target only".into()));
    }
    args.record_baseline = record_baseline.clone();
    Ok(args)
}

fn run_command(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let env = Env::new(cfg)?;
    match &cli.command {
        Command::Specfun { check } => commands::specfun(&env, *check),
        Command::Transform { function, refinements } => commands::transform(&env, function, *refinements),
        Command::Plancherel { function, refinements } => commands::plancherel(&env, function, *refinements),
        Command::Convolve { pair } => commands::convolve(&env, pair),
        Command::Young { pair, exponents, route } => {
            let ex = exponents.iter().map(|e| commands::parse_exponents(e)).collect::<Result<Vec<_>, _>>()?;
            commands::young(&env, pair, &ex, *route)
        }
        Command::Heat { s, check } => commands::heat(&env, *s, *check),
        Command::Constants { s } => commands::constants(&env, *s),
        c @ Command::Verify { .. } => commands::verify(&env, &verify_args(c)?),
        Command::Sweep => commands::sweep(&env),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Specfun { .. } => "specfun",
        Command::Transform { .. } => "transform",
        Command::Plancherel { .. } => "plancherel",
        Command::Convolve { .. } => "convolve",
        Command::Young { .. } => "young",
        Command::Heat { .. } => "heat",
        Command::Constants { .. } => "constants",
        Command::Verify { .. } => "verify",
        Command::Sweep => "sweep",
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    set_threads()?;
    let cfg = load_config(cli)?;
    let name = command_name(&cli.command);
    let outcome = match run_command(cli, &cfg) {
        Ok(o) => o,
        Err(CliError::Numeric(msg)) => {
            // the report is still written on a numerical failure
            let mut o = Outcome::default();
            o.data("error", &msg);
            o.checks.push(output::Check::new("numerical failure", 1.0, output::Relation::AtMost, 0.0));
            output::emit(&Document::new(name, &cfg, &o), cfg.format, cli.canonical)?;
            return Err(CliError::Numeric(msg));
        }
        Err(e) => return Err(e),
    };
    output::emit(&Document::new(name, &cfg, &outcome), cfg.format, cli.canonical)?;
    for c in outcome.checks.iter().filter(|c| !c.pass) {
        log::error!("check failed: {} = {} (threshold {})", c.name, c.value, c.threshold);
    }
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lbharm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
