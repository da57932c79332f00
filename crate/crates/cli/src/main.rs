use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quasikernel_cli::{cmd_check, cmd_elaborate, cmd_eval, cmd_lab, CliError, Report};
use quasikernel_core::checks::LabTarget;
use quasikernel_core::{CheckConfig, Suite};

#[derive(Parser)]
#[command(name = "quasikernel", version, about = "Constructed datatypes over a partial lambda calculus")]
struct Cli {
    /// Evaluation steps per evaluation
    #[arg(long, global = true, default_value_t = 10_000)]
    fuel: u64,
    /// Tree depth and path length for bounded observations
    #[arg(long, global = true, default_value_t = 4)]
    obs_depth: usize,
    /// Iterations for chains and fixed points
    #[arg(long, global = true, default_value_t = 32)]
    chain_bound: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Initial,
    Final,
    Cpo,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabArg {
    Rere,
    Spap,
    Mtypes,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, check positivity and print normal forms
    Elaborate { file: PathBuf },
    /// Evaluate an expression against the declarations
    Eval {
        file: PathBuf,
        #[arg(short = 'e', long = "expr")]
        expr: String,
    },
    /// Run the property suites for the declared types
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Run the finite-category certifications
    Lab {
        #[arg(value_enum)]
        which: LabArg,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = CheckConfig { fuel: cli.fuel, obs_depth: cli.obs_depth, chain_bound: cli.chain_bound, seed: cli.seed };
    match &cli.command {
        Command::Elaborate { file } => cmd_elaborate(file, &cfg),
        Command::Eval { file, expr } => cmd_eval(file, expr, &cfg),
        Command::Check { file, suite } => {
            let suite = match suite {
                SuiteArg::Initial => Suite::Initial,
                SuiteArg::Final => Suite::Final,
                SuiteArg::Cpo => Suite::Cpo,
                SuiteArg::All => Suite::All,
            };
            cmd_check(file, suite, &cfg)
        }
        Command::Lab { which } => {
            let which = match which {
                LabArg::Rere => LabTarget::Rere,
                LabArg::Spap => LabTarget::Spap,
                LabArg::Mtypes => LabTarget::Mtypes,
            };
            Ok(cmd_lab(which, &cfg))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.format {
        Format::Text => println!("{report}"),
        Format::Json => match report.to_json() {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    }
    if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
