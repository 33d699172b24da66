use std::path::Path;

use anyhow::{bail, ensure, Context};
use clap::Args;
use onebit_mimo::counting::{r_central, r_general, r_parallel};
use onebit_mimo::geometry::enumerate_cells;

use crate::instances::{enumeration_radius, random_arrangement, Family};
use crate::output::write_files;
use crate::out_dir_or_default;

/// Largest dimension and hyperplane count accepted with `--verify`.
const VERIFY_MAX_DIM: u32 = 4;
const VERIFY_MAX_HYPERPLANES: u32 = 16;

#[derive(Debug, Clone, Args)]
pub struct RegionsArgs {
    /// Ambient dimensions
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub m: Vec<u32>,
    /// Hyperplane counts (ignored with --parallel)
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub n: Vec<u32>,
    /// Hyperplanes through the origin
    #[arg(long, conflicts_with = "parallel")]
    pub central: bool,
    /// Classes of parallel hyperplanes, sizes from --l and --d
    #[arg(long)]
    pub parallel: bool,
    /// Number of parallel classes
    #[arg(long, value_delimiter = ',', requires = "parallel")]
    pub l: Vec<u32>,
    /// Hyperplanes per parallel class
    #[arg(long, value_delimiter = ',', requires = "parallel")]
    pub d: Vec<u32>,
    /// Enumerate cells of a seeded random arrangement for every row
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file name inside the output directory
    #[arg(long, default_value = "regions.csv")]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Row {
    pub formula: &'static str,
    pub m: u32,
    pub n: u32,
    pub classes: Option<(u32, u32)>,
    pub regions: u64,
    pub enumerated: Option<u64>,
}

pub(crate) fn table(args: &RegionsArgs) -> anyhow::Result<Vec<Row>> {
    ensure!(!args.m.is_empty(), "--m needs at least one value");
    let mut rows = Vec::new();
    if args.parallel {
        ensure!(!args.l.is_empty() && !args.d.is_empty(), "--parallel needs --l and --d");
        for &m in &args.m {
            for &l in &args.l {
                for &d in &args.d {
                    let regions = r_parallel(m, l, d)?;
                    let n = l.checked_mul(d).context("l * d overflows")?;
                    rows.push(Row { formula: "parallel", m, n, classes: Some((l, d)), regions, enumerated: None });
                }
            }
        }
    } else {
        ensure!(!args.n.is_empty(), "--n needs at least one value");
        for &m in &args.m {
            for &n in &args.n {
                let (formula, regions) = if args.central {
                    ("central", r_central(n, m)?)
                } else {
                    ("general", r_general(m, n)?)
                };
                rows.push(Row { formula, m, n, classes: None, regions, enumerated: None });
            }
        }
    }
    Ok(rows)
}

fn family(row: &Row) -> Family {
    match (row.formula, row.classes) {
        ("central", _) => Family::Central,
        (_, Some((l, d))) => Family::Parallel { l: l as usize, d: d as usize },
        _ => Family::General,
    }
}

pub(crate) fn verify_row(row: &Row, seed: u64) -> anyhow::Result<u64> {
    if row.m > VERIFY_MAX_DIM || row.n > VERIFY_MAX_HYPERPLANES {
        bail!(
            "--verify supports m <= {VERIFY_MAX_DIM} and n <= {VERIFY_MAX_HYPERPLANES}, got m = {}, n = {}",
            row.m,
            row.n
        );
    }
    if row.n == 0 {
        return Ok(1);
    }
    let arr = random_arrangement(family(row), row.m as usize, row.n as usize, seed)?;
    let cells = enumerate_cells(&arr, enumeration_radius(&arr))?;
    Ok(cells.len() as u64)
}

fn render(rows: &[Row], verified: bool) -> String {
    let mut out = String::from("formula,m,n,l,d,regions");
    if verified {
        out.push_str(",enumerated");
    }
    out.push('\n');
    for r in rows {
        let (l, d) = r.classes.map_or((String::new(), String::new()), |(l, d)| (l.to_string(), d.to_string()));
        out.push_str(&format!("{},{},{},{l},{d},{}", r.formula, r.m, r.n, r.regions));
        if let Some(e) = r.enumerated {
            out.push_str(&format!(",{e}"));
        }
        out.push('\n');
    }
    out
}

pub(crate) fn cmd_regions(args: &RegionsArgs, out_dir: Option<&Path>) -> anyhow::Result<()> {
    let mut rows = table(args)?;
    let mut mismatches = Vec::new();
    if args.verify {
        for row in &mut rows {
            let got = verify_row(row, args.seed)?;
            row.enumerated = Some(got);
            if got != row.regions {
                mismatches.push(format!(
                    "{} m = {} n = {}: formula {} but enumeration found {got}",
                    row.formula, row.m, row.n, row.regions
                ));
            }
        }
    }
    let text = render(&rows, args.verify);
    print!("{text}");
    write_files(&out_dir_or_default(out_dir), &[(args.out.as_str(), text.into_bytes())])?;
    if !mismatches.is_empty() {
        bail!("region counts disagree:\n  {}", mismatches.join("\n  "));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        args: RegionsArgs,
    }

    fn parse(argv: &[&str]) -> RegionsArgs {
        Wrap::try_parse_from(std::iter::once("regions").chain(argv.iter().copied()))
            .unwrap()
            .args
    }

    #[test]
    fn motivating_counts() {
        assert_eq!(table(&parse(&["--m", "2", "--n", "4"])).unwrap()[0].regions, 11);
        assert_eq!(table(&parse(&["--central", "--n", "4", "--m", "2"])).unwrap()[0].regions, 8);
        let par = table(&parse(&["--parallel", "--m", "2", "--l", "2", "--d", "2"])).unwrap();
        assert_eq!(par[0].regions, 9);
        assert_eq!(par[0].n, 4);
    }

    #[test]
    fn grids_expand_in_order() {
        let rows = table(&parse(&["--m", "2,3", "--n", "1,2,3"])).unwrap();
        let got: Vec<_> = rows.iter().map(|r| (r.m, r.n, r.regions)).collect();
        assert_eq!(got, vec![(2, 1, 2), (2, 2, 4), (2, 3, 7), (3, 1, 2), (3, 2, 4), (3, 3, 8)]);
    }

    #[test]
    fn verification_matches_formulas() {
        let args = parse(&["--m", "2,3", "--n", "3,5", "--verify"]);
        for row in table(&args).unwrap() {
            assert_eq!(verify_row(&row, 3).unwrap(), row.regions, "{row:?}");
        }
        let args = parse(&["--central", "--m", "2,3", "--n", "4"]);
        for row in table(&args).unwrap() {
            assert_eq!(verify_row(&row, 3).unwrap(), row.regions, "{row:?}");
        }
        let args = parse(&["--parallel", "--m", "2", "--l", "2,3", "--d", "2"]);
        for row in table(&args).unwrap() {
            assert_eq!(verify_row(&row, 3).unwrap(), row.regions, "{row:?}");
        }
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(table(&parse(&["--m", "0"])).is_err());
        assert!(table(&parse(&["--parallel", "--l", "2"])).is_err());
        assert!(Wrap::try_parse_from(["regions", "--central", "--parallel"]).is_err());
        assert!(Wrap::try_parse_from(["regions", "--l", "2"]).is_err());
        let row = table(&parse(&["--m", "5"])).unwrap()[0];
        assert!(verify_row(&row, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = table(&parse(&["--parallel", "--m", "2", "--l", "1", "--d", "4"])).unwrap();
        assert_eq!(render(&rows, false), "formula,m,n,l,d,regions\nparallel,2,4,1,4,5\n");
        let rows = table(&parse(&["--m", "2", "--n", "4"])).unwrap();
        assert_eq!(render(&rows, false), "formula,m,n,l,d,regions\ngeneral,2,4,,,11\n");
    }
}
