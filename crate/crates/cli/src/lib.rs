//! Command-line front-end for `poisson-core`.
//!
//! Every subcommand parses its expressions, runs one engine operation and
//! prints a [`report::Report`]. Exit codes: 0 success, 1 when the report
//! contains an obstruction or a failed check, 2 for usage and input errors.

pub mod commands;
pub mod config;
pub mod examples;
pub mod expr;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_core::poisson::SearchConfig;

use config::{ConfigError, FileConfig, Format, SessionConfig, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(
    name = "poisson",
    version,
    about = "Exact Poisson calculus and truncated deformation quantization"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Ring variables in order (default: every variable mentioned, sorted)
    #[arg(long, global = true, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
    /// Variables that are invertible (Laurent)
    #[arg(long, global = true, value_delimiter = ',')]
    pub invertible: Option<Vec<String>>,
    /// Truncation order in h
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Largest weight searched by the solvers
    #[arg(long, global = true)]
    pub weight_bound: Option<i64>,
    /// Exponent box for unit candidates and Laurent slices
    #[arg(long, global = true)]
    pub exponent_box: Option<i32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized certification
    #[arg(long, global = true, env = "POISSON_SEED")]
    pub seed: Option<u64>,
    /// TOML file with defaults for the flags above
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderArg {
    /// Moyal for constant structures, universal2 otherwise
    Auto,
    Moyal,
    Universal2,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check [pi, pi] = 0 order by order
    Jacobi {
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
    },
    /// Modular vector field of a volume form and its class
    Modular {
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
    },
    /// Search for an invariant volume form
    Unimodular {
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
    },
    /// Write a vector field as f^-1 [pi, f] for a unit f
    Logham {
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        field: String,
    },
    /// Write a vector field as [pi, f]
    Hamiltonian {
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        field: String,
    },
    /// Leading-order Poisson cohomology or homology by weight
    Hp {
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Compute homology of forms instead of cohomology of polyvectors
        #[arg(long)]
        homology: bool,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        to: i64,
    },
    /// Star product of two functions
    Star {
        #[arg(long, value_enum, default_value_t = ProviderArg::Auto)]
        provider: ProviderArg,
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
    },
    /// Quantize a Poisson vector field to a derivation
    Derivation {
        #[arg(long, value_enum, default_value_t = ProviderArg::Auto)]
        provider: ProviderArg,
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        /// Function to apply the derivation to
        #[arg(long, allow_hyphen_values = true)]
        apply: Option<String>,
    },
    /// Conjugating unit for the log-Hamiltonian field of a unit
    Lift {
        #[arg(long, value_enum, default_value_t = ProviderArg::Auto)]
        provider: ProviderArg,
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(long, allow_hyphen_values = true)]
        unit: String,
    },
    /// Crossed product by exp of a quantized field; `t` is reserved
    Crossed {
        #[arg(long, value_enum, default_value_t = ProviderArg::Auto)]
        provider: ProviderArg,
        #[arg(long, allow_hyphen_values = true)]
        pi: String,
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "omega",
            required_unless_present = "omega"
        )]
        field: Option<String>,
        /// Use the modular field of this volume form
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
    },
    /// Built-in example bank
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum ExamplesAction {
    List,
    Run {
        #[arg(long, conflicts_with = "name", required_unless_present = "name")]
        all: bool,
        name: Option<String>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Merges flags (and the seed environment variable) over the config file.
pub fn session(global: &GlobalArgs) -> Result<SessionConfig, ConfigError> {
    let file = match &global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let defaults = SearchConfig::default();
    let cfg = SessionConfig {
        vars: global.vars.clone().or(file.vars),
        invertible: global
            .invertible
            .clone()
            .or(file.invertible)
            .unwrap_or_default(),
        order: global.order.or(file.order),
        search: SearchConfig {
            weight_bound: global
                .weight_bound
                .or(file.weight_bound)
                .unwrap_or(defaults.weight_bound),
            exponent_box: global
                .exponent_box
                .or(file.exponent_box)
                .unwrap_or(defaults.exponent_box),
        },
        format: global.format.or(file.format).unwrap_or(Format::Text),
        seed: global.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            } else {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            };
        }
    };
    let failed = |msg: String| Outcome {
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
        code: 2,
    };
    let cfg = match session(&cli.global) {
        Ok(cfg) => cfg,
        Err(e) => return failed(e.to_string()),
    };
    match commands::dispatch(&cli.command, &cfg) {
        Ok(report) => Outcome {
            stdout: report.render(cfg.format),
            stderr: String::new(),
            code: report.get_status().exit_code(),
        },
        Err(e) => failed(e.to_string()),
    }
}
