use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ksubmod::instances::Family;
use serde::Serialize;

mod commands;
mod rows;

#[derive(Parser, Debug)]
#[command(
    name = "ksubmod",
    version,
    about = "Maximize monotone k-submodular functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a greedy algorithm on an instance and report the solution.
    Solve(SolveArgs),
    /// Exhaustively check the lattice properties of an instance.
    Verify(VerifyArgs),
    /// Find an optimum by enumerating every vector.
    Brute(BruteArgs),
    /// Run the deterministic greedy over generated instances and emit CSV.
    Bench(BenchArgs),
    /// Generate a random monotone k-submodular instance.
    Gen(GenArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[value(name = "det", alias = "deterministic")]
    Deterministic,
    #[value(name = "rand", alias = "randomized")]
    Randomized,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "det")]
    pub algorithm: Algorithm,
    /// Required with `--algorithm rand`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON array of element names giving the processing order.
    #[arg(long)]
    pub order: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest lattice size enumerated for the optimum comparison.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Write the per-iteration trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest number of vector pairs scanned.
    #[arg(long, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct BruteArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct BenchArgs {
    /// Comma-separated `N:K:FAMILY:SEED` items; each field takes a value or
    /// an inclusive range `a-b`, and FAMILY may be `all`.
    #[arg(long, default_value = "2-4:1-3:all:0")]
    pub rows: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest lattice size enumerated for the optimum column.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_parser = parse_family)]
    #[serde(serialize_with = "family_name")]
    pub family: Family,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Proposals tried before giving up on a table instance.
    #[arg(long, default_value_t = ksubmod::instances::DEFAULT_REJECTION_BUDGET)]
    pub budget: usize,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn family_name<S: serde::Serializer>(f: &Family, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(f.name())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Verify(args) => commands::verify(args),
        Command::Brute(args) => commands::brute(args),
        Command::Bench(args) => commands::bench(args),
        Command::Gen(args) => commands::gen(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
