use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use cyccon::commands::{
    cmd_analyze, cmd_check, cmd_couple, cmd_decompose, cmd_oracle, cmd_verify, AnalyzeOptions,
    AnalyzeSource, CheckKind, CommandOutput,
};
use cyccon::error::CliError;
use cyccon::render::Render;

/// Decides whether cyclic systems of two-outcome measurements admit
/// maximally noncontextual descriptions, constructs the witnessing
/// couplings, and bounds the criterion from noisy data.
#[derive(Debug, Parser)]
#[command(name = "cyccon", version, max_term_width = 100)]
struct Cli {
    /// Print numbers as exact fractions instead of rounded decimals.
    #[arg(long, global = true)]
    exact: bool,

    /// Decimal digits for rounded output.
    #[arg(long, global = true, default_value_t = 3, value_name = "DIGITS")]
    precision: usize,

    /// Seed for randomized generation. Reserved: current commands are
    /// deterministic and accept it for script compatibility.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    /// Decisive test for any cyclic system.
    Main,
    /// Classical bound for consistently connected systems.
    Consistent,
    /// Necessary condition; violation is decisive, a pass is not.
    Necessary,
    /// Summed-probability test for five pairwise-exclusive events.
    Kcbs,
}

impl From<KindArg> for CheckKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Main => CheckKind::Main,
            KindArg::Consistent => CheckKind::Consistent,
            KindArg::Necessary => CheckKind::Necessary,
            KindArg::Kcbs => CheckKind::Kcbs,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoArg {
    /// The embedded reference experiment: a rank-5 system measured in 20
    /// replications.
    Lapkiewicz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Exact endpoint arithmetic; requires the correlation box to keep a
    /// fixed sign pattern.
    Conservative,
    /// Grid sweep with a certified slack of half a step per coordinate.
    Grid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a noncontextuality criterion for a system file.
    Check {
        /// System JSON document.
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Main)]
        kind: KindArg,
        /// Project infeasible context correlations onto their allowed range
        /// instead of rejecting the file.
        #[arg(long)]
        clamp: bool,
    },
    /// Construct the maximally noncontextual coupling, or report why none
    /// exists.
    Couple {
        /// System JSON document.
        system: PathBuf,
        /// Write the coupling to this file instead of embedding it in the
        /// report.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Project infeasible context correlations onto their allowed range
        /// instead of rejecting the file.
        #[arg(long)]
        clamp: bool,
    },
    /// Recompute a coupling's moments and compare them against a system.
    Verify {
        /// Coupling JSON document.
        coupling: PathBuf,
        /// System JSON document.
        system: PathBuf,
        /// Project infeasible context correlations onto their allowed range
        /// instead of rejecting the file.
        #[arg(long)]
        clamp: bool,
    },
    /// Cross-check the closed-form criterion against an exact
    /// linear-feasibility solve.
    Oracle {
        /// System JSON document.
        system: PathBuf,
        /// Demand within-connection equality with probability 1 instead of
        /// maximal agreement.
        #[arg(long)]
        traditional: bool,
        /// With --traditional, accept systems whose connection marginals
        /// differ; such runs are infeasible by construction.
        #[arg(long, requires = "traditional")]
        force: bool,
        /// Project infeasible context correlations onto their allowed range
        /// instead of rejecting the file.
        #[arg(long)]
        clamp: bool,
    },
    /// Estimate moments, build simultaneous confidence intervals, and range
    /// the criterion over them.
    Analyze {
        /// Trial records (.csv) or a system document with standard errors
        /// (.json).
        input: Option<PathBuf>,
        /// Analyze an embedded dataset instead of a file.
        #[arg(long, value_enum, value_name = "NAME")]
        demo: Option<DemoArg>,
        /// Total error probability split across all interval terms.
        #[arg(long, default_value = "1e-10")]
        alpha: String,
        /// Fixed half-width multiplier; overrides the alpha-based quantile.
        #[arg(long, value_name = "K")]
        factor: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Conservative)]
        mode: ModeArg,
        /// Grid step for --mode grid (default 0.001).
        #[arg(long, value_name = "H")]
        spacing: Option<String>,
        /// Project infeasible context correlations onto their allowed range
        /// instead of rejecting the file.
        #[arg(long)]
        clamp: bool,
    },
    /// List the cycles of a measurement layout.
    Decompose {
        /// Layout or system JSON document; moments are ignored.
        layout: PathBuf,
    },
}

fn run(cli: Cli) -> Result<CommandOutput, CliError> {
    let render = if cli.exact {
        Render::Exact
    } else {
        Render::Decimal(cli.precision)
    };
    match cli.command {
        Command::Check {
            system,
            kind,
            clamp,
        } => cmd_check(&system, kind.into(), clamp, render),
        Command::Couple { system, out, clamp } => {
            cmd_couple(&system, out.as_deref(), clamp, render)
        }
        Command::Verify {
            coupling,
            system,
            clamp,
        } => cmd_verify(&coupling, &system, clamp, render),
        Command::Oracle {
            system,
            traditional,
            force,
            clamp,
        } => cmd_oracle(&system, traditional, force, clamp, render),
        Command::Analyze {
            input,
            demo,
            alpha,
            factor,
            mode,
            spacing,
            clamp,
        } => {
            let source = match (input, demo) {
                (Some(path), None) => AnalyzeSource::File(path),
                (None, Some(DemoArg::Lapkiewicz)) => AnalyzeSource::Demo,
                (Some(_), Some(_)) => {
                    Cli::command()
                        .error(
                            clap::error::ErrorKind::ArgumentConflict,
                            "give either an input file or --demo, not both",
                        )
                        .exit();
                }
                (None, None) => {
                    Cli::command()
                        .error(
                            clap::error::ErrorKind::MissingRequiredArgument,
                            "analyze needs an input file or --demo",
                        )
                        .exit();
                }
            };
            let opts = AnalyzeOptions {
                alpha,
                factor,
                grid: matches!(mode, ModeArg::Grid),
                spacing,
                clamp,
            };
            cmd_analyze(&source, &opts, render)
        }
        Command::Decompose { layout } => cmd_decompose(&layout),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{}", output.stdout);
            eprintln!("{}", output.summary);
            ExitCode::from(output.code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
