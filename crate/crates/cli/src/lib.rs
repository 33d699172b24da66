//! Command-line front end: region-count tables, separable packings, bound
//! tables and achievable-rate sweeps, written as CSV, SVG and JSON files.

pub mod arrangement_file;
mod bounds;
pub mod instances;
mod output;
mod pack;
mod plot;
mod regions;
pub mod sweep;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use bounds::{bound_rows, BoundRow, BoundsArgs};
pub use pack::{PackArgs, Preset};
pub use regions::RegionsArgs;
pub use sweep::{ExperimentSpec, SweepArgs, SweepOptions};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ONEBIT_MIMO_OUT_DIR";
pub(crate) const FALLBACK_OUT_DIR: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "onebit-mimo", version, about = "Capacity geometry of MIMO channels with one-bit threshold quantizers")]
pub struct Cli {
    /// Directory for result files [default: out]
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate maximal region counts, optionally checked by enumeration
    Regions(RegionsArgs),
    /// Pack unit spheres separable by an arrangement
    Pack(PackArgs),
    /// Evaluate the capacity bounds over a power sweep
    Bounds(BoundsArgs),
    /// Run the achievable-rate experiment
    Sweep(SweepArgs),
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let out = cli.out_dir.as_deref();
    match cli.command {
        Command::Regions(args) => regions::cmd_regions(&args, out),
        Command::Pack(args) => pack::cmd_pack(&args, out),
        Command::Bounds(args) => bounds::cmd_bounds(&args, out),
        Command::Sweep(args) => sweep::cmd_sweep(&args, out),
    }
}

fn out_dir_or_default(dir: Option<&Path>) -> PathBuf {
    dir.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR))
}
