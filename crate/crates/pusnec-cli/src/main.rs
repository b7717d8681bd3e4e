//! `pusnec` batch front end: codec suites, path search, scenario sweeps and
//! analytic tables. Every command writes its outputs plus `manifest.json`
//! into `--out`.

mod analyze;
mod codec;
mod manifest;
mod pathfind;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit status carried through `anyhow` so `main` can map it.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub msg: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Exit {}

pub const EXIT_INVARIANT: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_PATHFIND: u8 = 4;

pub fn exit_err(code: u8, msg: impl Into<String>) -> anyhow::Error {
    Exit { code, msg: msg.into() }.into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "pusnec", version, about = "Secure network coding toolkit")]
pub struct Cli {
    /// Master seed for all randomness.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Property suites and test vectors for a registry code.
    Codec(codec::Args),
    /// Multicast path search on a synthetic grid or a node file.
    Pathfind(pathfind::Args),
    /// Monte Carlo scenario sweep from a TOML config.
    Simulate(simulate::Args),
    /// Analytic curves, threshold staircases and toy MI tables.
    Analyze(analyze::Args),
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(exit_err(EXIT_CONFIG, "--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    std::fs::create_dir_all(&cli.out)?;
    let mut m = manifest::RunManifest::start(cli);
    match &cli.command {
        Command::Codec(a) => codec::run(cli, a, &mut m)?,
        Command::Pathfind(a) => pathfind::run(cli, a, &mut m)?,
        Command::Simulate(a) => simulate::run(cli, a, &mut m)?,
        Command::Analyze(a) => analyze::run(cli, a, &mut m)?,
    }
    m.finish(&cli.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<Exit>().map_or(1, |x| x.code))
        }
    }
}
