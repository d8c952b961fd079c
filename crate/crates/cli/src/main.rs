//! `kfull`: densities of integers classified by proper k-full integers
//! between consecutive kth powers.

mod commands;
mod config;
mod golden;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kfull::DensityMethod;

use config::{Format, PartialConfig};

#[derive(Parser, Debug)]
#[command(
    name = "kfull",
    version,
    about = "Densities of integers by the proper k-full integers between kth powers"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Largest ℓ and m in tables.
    #[arg(long = "max-index", value_name = "L", global = true)]
    max_index: Option<usize>,
    /// Certified decimal digits for the analytic quantities.
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Box size for the direct power-sum route.
    #[arg(long = "trunc-B", value_name = "B", global = true)]
    trunc_b: Option<u64>,
    /// Number of ξ terms kept (chosen from the tail bound if omitted).
    #[arg(long = "r-max", global = true)]
    r_max: Option<usize>,
    /// Primes up to this are handled one by one in the Euler product.
    #[arg(long = "prime-cutoff", global = true)]
    prime_cutoff: Option<u64>,
    /// Range 1..=N for empirical runs and membership listings.
    #[arg(long = "N", value_name = "N", global = true)]
    n: Option<u64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[arg(long, value_name = "PATH", global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Smaller ranges and sample sizes with widened tolerances.
    #[arg(long, global = true)]
    quick: bool,
    /// TOML file with defaults; flags take precedence.
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,
}

impl GlobalArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            k: self.k,
            max_index: self.max_index,
            digits: self.digits,
            trunc_b: self.trunc_b,
            r_max: self.r_max,
            prime_cutoff: self.prime_cutoff,
            n: self.n,
            format: self.format,
            out: self.out.clone(),
            threads: self.threads,
            quick: self.quick.then_some(true),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of d(A_{ℓ,m}) for 0 ≤ ℓ ≤ m ≤ L.
    Table {
        #[arg(long, default_value = "direct")]
        method: DensityMethod,
    },
    /// C_k, c_2, d_{k,ℓ} and the power sums P_k(m).
    Constants {
        /// Number of power sums listed.
        #[arg(long = "power-sums", default_value_t = 8)]
        power_sums: u32,
    },
    /// Runs every cross-check; exits 1 if any fails.
    Verify {
        /// Override a tolerance, as NAME=VALUE; NAME may be `all`.
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerance: Vec<String>,
    },
    /// Ascending listings.
    Enumerate {
        #[command(subcommand)]
        what: Enumerate,
    },
    /// Counts n ≤ N per cell and compares with the analytic table.
    Empirical,
}

#[derive(Subcommand, Debug)]
pub enum Enumerate {
    /// Elements λ ≤ bound of Λ_k.
    Lambda {
        #[arg(long)]
        bound: f64,
    },
    /// k-full integers ≤ bound (proper ones unless --include-powers).
    Kfull {
        #[arg(long)]
        bound: u128,
        #[arg(long = "include-powers")]
        include_powers: bool,
    },
    /// n ≤ N hit on the left exactly by I and on the right exactly by J.
    #[command(name = "members-b", visible_alias = "members_B", alias = "members_b")]
    MembersB {
        /// Elements as b-tuples separated by ';', e.g. "2;3" or "2,1;3,1".
        #[arg(long = "I", value_name = "TUPLES", default_value = "")]
        i: String,
        #[arg(long = "J", value_name = "TUPLES", default_value = "")]
        j: String,
    },
}

/// Marks errors that stem from the invocation rather than the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        // a closed pipe (e.g. `| head`) is not a failure
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let file = match &cli.global.config {
        Some(p) => PartialConfig::from_file(p).map_err(|e| UsageError(format!("{e:#}")))?,
        None => PartialConfig::default(),
    };
    let cfg = cli
        .global
        .partial()
        .over(file)
        .resolve()
        .map_err(|e| UsageError(format!("{e:#}")))?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match cli.command {
        Command::Table { method } => commands::table(&cfg, method),
        Command::Constants { power_sums } => commands::constants(&cfg, power_sums),
        Command::Verify { tolerance } => verify::run(&cfg, &tolerance),
        Command::Enumerate { what } => commands::enumerate(&cfg, what),
        Command::Empirical => commands::empirical(&cfg),
    }
}
