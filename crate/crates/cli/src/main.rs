use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hamsym_cli::commands::{self, Context, Outcome};
use hamsym_cli::manifest::{Manifest, Model};
use hamsym_cli::selftest::{self, Options};
use hamsym_cli::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hamsym",
    version,
    about = "Geometry and symmetries of regular Hamiltonians"
)]
struct Cli {
    /// Manifest file, or a built-in manifest name (paper-example, free-particle)
    #[arg(long, global = true, default_value = "paper-example")]
    manifest: String,
    /// Override the manifest's sampling seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiply every default tolerance
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Write the machine-readable report to this path
    #[arg(long, global = true)]
    json: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pointwise geometry at a named point (default: every point)
    Report { point: Option<String> },
    /// Symmetry verdicts for a named field (default: every field)
    Symmetry { field: Option<String> },
    /// Complete or Newtonoid lift of a field at a point
    Lift {
        field: String,
        #[arg(long, default_value = "base")]
        point: String,
    },
    /// Integrate a named run (default: every run)
    Integrate { run: Option<String> },
    /// Run the acceptance criteria on the built-in manifests
    Selftest,
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if let Command::Selftest = cli.command {
        return Ok(selftest::selftest(&Options {
            seed: cli.seed,
            ..Options::default()
        }));
    }
    let model = Model::new(Manifest::load(&cli.manifest)?)?;
    let ctx = Context::new(model, cli.seed, cli.tol_scale)?;
    match &cli.command {
        Command::Report { point } => commands::report(&ctx, point.as_deref()),
        Command::Symmetry { field } => commands::symmetry(&ctx, field.as_deref()),
        Command::Lift { field, point } => commands::lift(&ctx, field, point),
        Command::Integrate { run } => commands::integrate(&ctx, run.as_deref()),
        Command::Selftest => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    print!("{}", outcome.text);
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, outcome.report.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(outcome.exit_code)
}
