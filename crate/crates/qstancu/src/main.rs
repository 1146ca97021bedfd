use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qstancu::cli::{self, Config};

#[derive(Parser)]
#[command(name = "qstancu", version, about = "Experiment runner for Stancu-type q-Baskakov-Kantorovich operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify closed-form operator moments against direct evaluation.
    Moments(RunArgs),
    /// Run a statistical-convergence experiment and emit density curves.
    Converge(RunArgs),
    /// Check modulus-of-continuity and Lipschitz rate bounds on a grid.
    Rates(RunArgs),
    /// Bivariate moment verification and rate-bound checks.
    Bivariate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV and plot files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed pinned in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: &RunArgs, f: impl FnOnce(&Config, &std::path::Path) -> qstancu::Result<i32>) -> u8 {
    if let Some(k) = args.threads {
        // ignore the error if a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let mut cfg = match Config::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(s) = args.seed {
        cfg.run.seed = s;
    }
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return 2;
    }
    match f(&cfg, &args.out) {
        Ok(code) => code as u8,
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code(&e) as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Moments(a) => run(a, cli::cmd_moments),
        Command::Converge(a) => run(a, cli::cmd_converge),
        Command::Rates(a) => run(a, cli::cmd_rates),
        Command::Bivariate(a) => run(a, cli::cmd_bivariate),
    };
    ExitCode::from(code)
}
