mod bench;
mod config;
mod mesh;
mod output;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Input that could not be parsed or validated. Exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn enabled(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Parser)]
#[command(name = "polytherm", version, about = "Polygonal finite elements for thermal-stress analysis")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Parent-element matrix cache for quadtree elements.
    #[arg(long, global = true, value_enum)]
    pub accel: Option<Switch>,
    /// Triangle rule degree of the polygon quadrature.
    #[arg(long, global = true, value_parser = ["1", "2", "4"])]
    pub quad_degree: Option<String>,
    /// Seed for all random mesh generation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

impl Global {
    pub fn quad_degree(&self) -> Option<usize> {
        self.quad_degree.as_deref().map(|d| d.parse().expect("checked by clap"))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the analysis described by a JSON run configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate a mesh file.
    #[command(subcommand)]
    Mesh(mesh::MeshCommand),
    /// Run a verification benchmark and write its tables.
    #[command(subcommand)]
    Bench(bench::BenchCommand),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve { config } => solve::cmd_solve(&config, &cli.global),
        Command::Mesh(cmd) => mesh::cmd_mesh(cmd, &cli.global),
        Command::Bench(cmd) => bench::cmd_bench(cmd, &cli.global),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
