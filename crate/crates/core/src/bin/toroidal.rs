use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toroidal_core::report::{render_report, Format};
use toroidal_core::roots::RootSystem;
use toroidal_core::suite::{discrepancy_manifest, run_suite, SuiteConfig};
use toroidal_core::table::{generator_table, Variant};

const RELATION_LABELS: [&str; 13] = ["1", "2", "3+", "3-", "4", "5a+", "5a-", "5b+", "5b-", "5c+", "5c-", "5d+", "5d-"];

#[derive(Parser)]
#[command(name = "toroidal", version, about = "Relation checker for the level -1 Fock representation of toroidal D(m,n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the relation suite and write a report.
    Verify(VerifyArgs),
    /// Print a generator table in the table file format.
    Table(TableArgs),
    /// Recompute the discrepancy manifest between the shipped tables.
    Manifest(GridArgs),
}

#[derive(Args)]
struct RankArgs {
    #[arg(short, default_value_t = 2, allow_negative_numbers = true)]
    m: i64,
    #[arg(short, default_value_t = 1, allow_negative_numbers = true)]
    n: i64,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    rank: RankArgs,
    /// Check modes in [-B, B].
    #[arg(long = "modes", default_value_t = 2, allow_negative_numbers = true)]
    modes: i64,
    #[arg(long, default_value_t = 3)]
    energy_cap: u32,
    #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
    charge_cap: i64,
    #[arg(long, default_value_t = 2)]
    word_depth: u32,
    /// Comma separated relation ids or prefixes, e.g. `2,3+,5d`. Empty selects all.
    #[arg(long, value_delimiter = ',')]
    relations: Vec<String>,
    /// Check on the full tensor product instead of the factors the table acts on.
    #[arg(long)]
    no_reduce: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// as-printed, corrected or file=PATH
    #[arg(long, default_value = "corrected")]
    variant: String,
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    rank: RankArgs,
    #[arg(long, default_value = "corrected")]
    variant: String,
}

fn suite_config(grid: &GridArgs, variant: Variant) -> Result<SuiteConfig, String> {
    if grid.modes < 0 || grid.charge_cap < 0 {
        return Err("bounds must be non-negative".into());
    }
    for r in &grid.relations {
        if !RELATION_LABELS.iter().any(|l| l.starts_with(r.as_str())) || r.is_empty() {
            return Err(format!("unknown relation '{r}'"));
        }
    }
    Ok(SuiteConfig {
        m: grid.rank.m,
        n: grid.rank.n,
        mode_range: grid.modes,
        energy_cap: grid.energy_cap,
        charge_cap: grid.charge_cap,
        word_depth: grid.word_depth,
        variant,
        relations: grid.relations.clone(),
        reduce_spectators: !grid.no_reduce,
    })
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<bool, String> {
    let sys = RootSystem::build(args.grid.rank.m, args.grid.rank.n).map_err(|e| e.to_string())?;
    let variant: Variant = args.variant.parse().map_err(|e: toroidal_core::table::TableError| e.to_string())?;
    let format: Format = args.format.parse()?;
    let table = generator_table(&sys, &variant).map_err(|e| e.to_string())?;
    let config = suite_config(&args.grid, variant)?;
    let outcome = run_suite(&sys, &table, &config);
    write_output(&render_report(&config, &outcome, format), args.out.as_ref())?;
    Ok(outcome.summary.failed == 0)
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Verify(args) => verify(&args),
        Command::Table(args) => {
            let sys = RootSystem::build(args.rank.m, args.rank.n).map_err(|e| e.to_string())?;
            let variant: Variant = args.variant.parse().map_err(|e: toroidal_core::table::TableError| e.to_string())?;
            let table = generator_table(&sys, &variant).map_err(|e| e.to_string())?;
            write_output(&table.render(), None)?;
            Ok(true)
        }
        Command::Manifest(grid) => {
            let sys = RootSystem::build(grid.rank.m, grid.rank.n).map_err(|e| e.to_string())?;
            let config = suite_config(&grid, Variant::Corrected)?;
            let manifest = discrepancy_manifest(&sys, &config);
            let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?;
            text.push('\n');
            write_output(&text, None)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
