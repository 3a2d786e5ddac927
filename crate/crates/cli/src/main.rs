//! `ivalid`: checks interventional validity of causal models described in
//! scenario files.
//!
//! Exit status: 0 when the check passes (VALID, abstraction holds, every
//! expectation met), 1 when it fails (FALSIFIED, ...), 2 on any error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ivalid_core::{builtin_scenario, parse_scenario, Scenario, Tolerances};

#[derive(Parser, Debug)]
#[command(
    name = "ivalid",
    version,
    about = "Interventional validity of causal Bayesian networks"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Named tolerance profile: default, strict or loose.
    #[arg(
        long,
        global = true,
        env = "IVALID_TOL_PROFILE",
        default_value = "default"
    )]
    tol_profile: String,
    /// Relative tolerance for Gaussian equality.
    #[arg(long, global = true)]
    eq_tol: Option<f64>,
    /// Eigenvalue cutoff ratio for pseudo-inverses.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Absolute tolerance for conditional independence.
    #[arg(long, global = true)]
    ci_tol: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Which process, network and representation a command works on.
#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Scenario file path, or the id of a builtin scenario.
    pub scenario: String,
    /// Network id.
    #[arg(long)]
    pub cbn: String,
    /// Process id; may be omitted when the scenario has one.
    #[arg(long)]
    pub dgp: Option<String>,
    /// Representation id; inferred from the variables when omitted.
    #[arg(long = "repr")]
    pub representation: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide validity of a network for an intervention set.
    Validate {
        #[command(flatten)]
        target: Target,
        /// Interpretation id.
        #[arg(long)]
        interp: String,
        /// Intervention set id; may be omitted when the network has one.
        #[arg(long)]
        set: Option<String>,
    },
    /// List which interventions each action is taken to implement.
    Interpret {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        interp: String,
        #[arg(long)]
        set: Option<String>,
        /// Restrict the listing to one action.
        #[arg(long)]
        action: Option<String>,
    },
    /// Look for an intervention set that falsifies the network.
    Falsify {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        interp: String,
    },
    /// Classify an intervention: targets, minimality, decomposability.
    Classify {
        scenario: String,
        /// Intervention id.
        intervention: String,
    },
    /// Build a complete network reproducing every action law.
    Emulate {
        scenario: String,
        /// Node order, comma separated, e.g. `B,A`.
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        #[arg(long)]
        dgp: Option<String>,
        #[arg(long = "repr")]
        representation: Option<String>,
    },
    /// Check the declared exact transformations between finite models.
    AbstractionCheck {
        scenario: String,
        /// Abstraction id; all of them when omitted.
        #[arg(long)]
        abstraction: Option<String>,
    },
    /// List or run scenarios and their expectations.
    Scenarios {
        #[command(subcommand)]
        action: ScenariosCmd,
    },
    /// Print a scenario file in canonical form.
    Fmt {
        file: PathBuf,
        /// Exit 1 instead of printing when the file is not canonical.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ScenariosCmd {
    /// Builtin scenario ids and titles.
    List,
    /// Evaluate expectations; every builtin when no scenario is named.
    Run { scenarios: Vec<String> },
}

/// Outcome of a command that did not error.
pub enum Status {
    Pass,
    Fail,
}

fn tolerances(g: &Global) -> Result<Tolerances> {
    let base = Tolerances::profile(&g.tol_profile).ok_or_else(|| {
        anyhow!(
            "unknown tolerance profile `{}` (expected default, strict or loose)",
            g.tol_profile
        )
    })?;
    Ok(Tolerances::new(
        g.eq_tol.unwrap_or(base.eq_tol),
        g.rank_tol.unwrap_or(base.rank_tol),
        g.ci_tol.unwrap_or(base.ci_tol),
    )?)
}

/// Reads a scenario from a path, falling back to the builtin ids.
pub fn load(arg: &str) -> Result<Scenario> {
    let path = PathBuf::from(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        return parse_scenario(&text).with_context(|| format!("in {}", path.display()));
    }
    match builtin_scenario(arg) {
        Some(s) => Ok(s),
        None => bail!("no scenario file or builtin scenario named `{arg}`"),
    }
}

fn run(cli: Cli) -> Result<Status> {
    let tol = tolerances(&cli.global)?;
    let fmt = cli.global.format;
    match cli.command {
        Command::Validate {
            target,
            interp,
            set,
        } => commands::validate(&target, &interp, set.as_deref(), &tol, fmt),
        Command::Interpret {
            target,
            interp,
            set,
            action,
        } => commands::interpret(
            &target,
            &interp,
            set.as_deref(),
            action.as_deref(),
            &tol,
            fmt,
        ),
        Command::Falsify { target, interp } => commands::falsify(&target, &interp, &tol, fmt),
        Command::Classify {
            scenario,
            intervention,
        } => commands::classify(&scenario, &intervention, &tol, fmt),
        Command::Emulate {
            scenario,
            order,
            dgp,
            representation,
        } => commands::emulate(
            &scenario,
            &order,
            dgp.as_deref(),
            representation.as_deref(),
            &tol,
            fmt,
        ),
        Command::AbstractionCheck {
            scenario,
            abstraction,
        } => commands::abstraction_check(&scenario, abstraction.as_deref(), &tol, fmt),
        Command::Scenarios { action } => match action {
            ScenariosCmd::List => commands::list(fmt),
            ScenariosCmd::Run { scenarios } => commands::run_scenarios(&scenarios, &tol, fmt),
        },
        Command::Fmt { file, check } => commands::fmt(&file, check),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::from(0),
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
