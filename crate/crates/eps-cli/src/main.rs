use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eps_cli::commands::{self, Options, Z_LIMIT};
use eps_cli::output::Table;
use eps_cli::tables;
use eps_cli::{CliError, CliResult, RunConfig};

/// Pricing, hedging and premiums for equity protection swaps.
///
/// Exit codes: 0 success, 1 tolerance failure, 2 configuration error,
/// 3 numerical error.
#[derive(Debug, Parser)]
#[command(name = "eps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write full-precision CSV here (stdout shows 4 decimals).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Engine tag, overriding the config's engine list.
    #[arg(long, global = true)]
    engine: Option<String>,

    /// Monte Carlo path count.
    #[arg(long, global = true)]
    paths: Option<u64>,

    /// Number of return grid points for `payoff`.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Hedge only the protection leg (diagnostic).
    #[arg(long, global = true)]
    protection_only: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Option prices under each engine.
    Price,
    /// Static hedge legs and their cost under each engine.
    Hedge,
    /// Fair, default-adjusted and super-hedging premiums.
    Premium,
    /// Adjusted return, hedge payoff and cash flows over a return grid.
    Payoff,
    /// Regenerate the reference tables and report residuals.
    Tables,
    /// Monte Carlo estimate against its closed form.
    Mc,
}

fn emit(table: &Table, out: Option<&PathBuf>) -> CliResult<()> {
    if let Some(path) = out {
        table.write_file(path)?;
    }
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(table.to_display_string().as_bytes())?;
    Ok(())
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Err(CliError::Config("--config <path> is required".into())),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let opts = Options {
        engine: cli.engine.clone(),
        seed: cli.seed,
        paths: cli.paths,
        grid: cli.grid,
        protection_only: cli.protection_only,
    };
    match cli.command {
        Command::Price => emit(&commands::price(&load(cli)?, &opts)?, cli.out.as_ref()),
        Command::Hedge => emit(&commands::hedge(&load(cli)?, &opts)?, cli.out.as_ref()),
        Command::Premium => emit(&commands::premium(&load(cli)?, &opts)?, cli.out.as_ref()),
        Command::Payoff => emit(&commands::payoff(&load(cli)?, &opts)?, cli.out.as_ref()),
        Command::Mc => {
            let (table, worst) = commands::mc(&load(cli)?, &opts)?;
            emit(&table, cli.out.as_ref())?;
            if worst >= Z_LIMIT {
                return Err(CliError::Tolerance(format!(
                    "estimate is {worst:.2} standard errors from its closed form"
                )));
            }
            Ok(())
        }
        Command::Tables => {
            let reference = match &cli.config {
                Some(path) => RunConfig::load(path)?.reference,
                None => None,
            };
            let cells = tables::load_reference(reference.as_deref())?;
            let outcomes = tables::evaluate_all(&cells)?;
            if let Some(path) = &cli.out {
                tables::outcome_table(&outcomes).write_file(path)?;
            }
            let summary = tables::summary_table(&outcomes);
            print!("{}", summary.to_display_string());
            let failed: Vec<_> = outcomes.iter().filter(|o| o.status() == "fail").collect();
            let gated = outcomes
                .iter()
                .filter(|o| o.status() != "unreproduced")
                .count();
            println!(
                "{} of {} gated cells within tolerance",
                gated - failed.len(),
                gated
            );
            if failed.is_empty() {
                return Ok(());
            }
            for o in &failed {
                let c = &o.cell;
                println!(
                    "FAIL table {} {} row {} {}: reference {:.4} model {:.4} ({})",
                    c.table,
                    c.product,
                    c.row,
                    c.column,
                    c.value,
                    o.best().0,
                    o.best().1
                );
            }
            Err(CliError::Tolerance(format!(
                "{} cells outside tolerance",
                failed.len()
            )))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
