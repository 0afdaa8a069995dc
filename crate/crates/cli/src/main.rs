use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrlsim::commands;
use qrlsim::config::Config;
use qrlsim::error::{CliError, CliResult};

/// Worker threads for shot-level parallelism; defaults to all cores.
const WORKERS_ENV: &str = "QRLSIM_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "qrlsim", version, about = "GKP quad-rail lattice simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration; built-in defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; must not already hold a manifest.
    #[arg(long, global = true, default_value = "qrlsim-out")]
    out: PathBuf,
    #[arg(long, global = true, value_parser = ["256", "512", "1024"])]
    grid: Option<String>,
    #[arg(long = "chi-max", global = true)]
    chi_max: Option<usize>,
    /// Write the manifest and schedule statistics only.
    #[arg(long = "dry-run", global = true)]
    dry_run: bool,
    /// Angle table for rb, grover and decode-demo.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Calibrate homodyne angle programs and write the angle table.
    Calibrate,
    /// Randomized benchmarking at each configured squeezing.
    Rb,
    /// Three-qubit Grover search with the configured oracles.
    Grover,
    /// Run one identity gadget and print its decoding.
    DecodeDemo,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.parse().map_err(|_| CliError::Config(format!("{WORKERS_ENV}={v} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Run(e.to_string()))?;
    }
    let mut cfg = Config::load(cli.config.as_deref())?;
    let grid = cli.grid.as_deref().map(|g| g.parse::<usize>().expect("validated by clap"));
    cfg.apply_overrides(cli.seed, grid, cli.chi_max);
    let manifest = match cli.command {
        Command::Calibrate => commands::calibrate(&cfg, &cli.out, cli.dry_run)?,
        Command::Rb => commands::rb(&cfg, &commands::resolve_table(cli.table.as_deref(), &cfg), &cli.out, cli.dry_run)?,
        Command::Grover => commands::grover(&cfg, &commands::resolve_table(cli.table.as_deref(), &cfg), &cli.out, cli.dry_run)?,
        Command::DecodeDemo => commands::decode_demo(&cfg, cli.table.as_deref().or(cfg.table.as_deref()), &cli.out)?,
    };
    eprintln!("wrote {} ({})", cli.out.join(qrlsim::output::MANIFEST).display(), manifest.outputs.join(", "));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(CliError::Config(String::new()).exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrlsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
