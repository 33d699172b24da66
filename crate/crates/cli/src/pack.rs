use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use clap::{Args, ValueEnum};
use onebit_mimo::geometry::HyperplaneArrangement;
use onebit_mimo::packing::{pack_margin, r_ssps_oracle, validate_packing, Packing, DEFAULT_GRID_STEP};

use crate::arrangement_file::{parse_arrangement, parse_row};
use crate::instances::{central_layout, general_layout, grid_layout, select_layout};
use crate::output::write_files;
use crate::{out_dir_or_default, plot};

/// The four 2D layouts of the motivating example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Four parallel thresholds on one axis
    Fig2a,
    /// Four lines through the origin
    Fig2b,
    /// Two thresholds on each of two axes
    Fig2c,
    /// Four lines in general position, offsets scaled with the radius
    Fig2d,
}

impl Preset {
    pub fn default_radius(self) -> f64 {
        match self {
            Preset::Fig2a | Preset::Fig2b | Preset::Fig2c => 5.0,
            Preset::Fig2d => 32.0,
        }
    }

    pub fn arrangement(self, radius: f64) -> HyperplaneArrangement {
        match self {
            Preset::Fig2a => select_layout(),
            Preset::Fig2b => central_layout(),
            Preset::Fig2c => grid_layout(),
            Preset::Fig2d => general_layout(radius),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PackArgs {
    /// Arrangement file, one `a_1 ... a_m | b` per line
    #[arg(long, conflicts_with_all = ["hyperplane", "preset"])]
    pub file: Option<PathBuf>,
    /// Inline hyperplane `a_1 ... a_m | b` (repeatable)
    #[arg(long, conflicts_with = "preset")]
    pub hyperplane: Vec<String>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Ball radius sqrt(P) [default: 5, or 32 for fig2d]
    #[arg(long)]
    pub radius: Option<f64>,
    /// Also run the exhaustive grid and clique search (2D, radius <= 8)
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    pub grid_step: f64,
    /// Write an SVG drawing (2D only)
    #[arg(long)]
    pub svg: bool,
}

pub(crate) struct PackOutcome {
    pub packing: Packing,
    pub oracle: Option<usize>,
    pub radius: f64,
}

pub(crate) fn load(args: &PackArgs) -> anyhow::Result<(HyperplaneArrangement, f64)> {
    let default_radius = args.preset.map_or(5.0, Preset::default_radius);
    let radius = args.radius.unwrap_or(default_radius);
    ensure!(radius.is_finite() && radius > 0.0, "--radius must be positive, got {radius}");
    let arr = if let Some(preset) = args.preset {
        preset.arrangement(radius)
    } else if let Some(path) = &args.file {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        parse_arrangement(&text).with_context(|| format!("parsing {}", path.display()))?
    } else if !args.hyperplane.is_empty() {
        let mut rows = Vec::with_capacity(args.hyperplane.len());
        for (k, h) in args.hyperplane.iter().enumerate() {
            rows.push(parse_row(h, k + 1).with_context(|| format!("--hyperplane '{h}'"))?);
        }
        let dim = rows[0].0.len();
        ensure!(
            rows.iter().all(|r| r.0.len() == dim),
            "all --hyperplane values need {dim} coefficients"
        );
        HyperplaneArrangement::from_rows(dim, &rows)?
    } else {
        bail!("give an arrangement with --file, --hyperplane or --preset");
    };
    Ok((arr, radius))
}

pub(crate) fn run_pack(args: &PackArgs) -> anyhow::Result<PackOutcome> {
    let (arr, radius) = load(args)?;
    if args.svg {
        ensure!(arr.dim() == 2, "--svg draws 2D arrangements only (this one is {}D)", arr.dim());
    }
    let packing = pack_margin(&arr, radius)?;
    validate_packing(&packing).map_err(|v| anyhow::anyhow!("packing failed validation: {v:?}"))?;
    let oracle = if args.oracle {
        Some(r_ssps_oracle(&arr, radius, args.grid_step)?)
    } else {
        None
    };
    Ok(PackOutcome { packing, oracle, radius })
}

fn centers_csv(p: &Packing) -> String {
    let dim = p.arrangement.dim();
    let mut out = String::from("index,cell");
    for j in 1..=dim {
        write!(out, ",x{j}").unwrap();
    }
    out.push('\n');
    for (k, (c, cell)) in p.centers.iter().zip(&p.cells).enumerate() {
        write!(out, "{k},{cell}").unwrap();
        for x in c.iter() {
            write!(out, ",{x:.9}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub(crate) fn cmd_pack(args: &PackArgs, out_dir: Option<&Path>) -> anyhow::Result<()> {
    let outcome = run_pack(args)?;
    let p = &outcome.packing;
    println!("radius {}: {} unit spheres packed", outcome.radius, p.len());
    if let Some(k) = outcome.oracle {
        println!("oracle (grid step {}): {k}", args.grid_step);
    }
    let mut files = vec![("centers.csv", centers_csv(p).into_bytes())];
    if args.svg {
        let pts: Vec<(f64, f64)> = p.centers.iter().map(|c| (c[0], c[1])).collect();
        files.push(("pack.svg", plot::packing_svg(&p.arrangement, outcome.radius, &pts)?.into_bytes()));
    }
    write_files(&out_dir_or_default(out_dir), &files)?;
    Ok(())
}
