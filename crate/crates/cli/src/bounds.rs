use std::path::Path;

use anyhow::{ensure, Context};
use clap::Args;
use nalgebra::DMatrix;
use onebit_mimo::bounds::{
    prop1_report, prop2_reports, prop3_upper, theorem1_upper, unquantized_report, BoundOptions,
    BoundReport, KConvention, Prop3Exponent,
};
use onebit_mimo::configs::{build_config, induced_arrangement, Architecture, ChannelInstance};
use onebit_mimo::simulate::{db_to_power, sample_channel, RateCurveParams};

use crate::output::write_files;
use crate::out_dir_or_default;

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Channel rows separated by ';', entries by spaces or commas
    #[arg(long)]
    pub channel: Option<String>,
    /// Seed of the sampled channel when --channel is absent
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub n_t: usize,
    #[arg(long, default_value_t = 3)]
    pub n_r: usize,
    #[arg(long, default_value_t = 4)]
    pub n_tq: usize,
    /// Power grid in dB [default: -10 to 40 in steps of 5]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub power_db: Vec<f64>,
    #[arg(long, value_enum, default_value = "printed")]
    pub k_convention: KArg,
    #[arg(long, value_enum, default_value = "printed")]
    pub prop3_exponent: ExponentArg,
    #[arg(long, default_value = "bounds.csv")]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KArg {
    Printed,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExponentArg {
    Printed,
    Squared,
}

impl BoundsArgs {
    fn options(&self) -> BoundOptions {
        BoundOptions {
            k_convention: match self.k_convention {
                KArg::Printed => KConvention::Printed,
                KArg::Min => KConvention::Min,
            },
            prop3_exponent: match self.prop3_exponent {
                ExponentArg::Printed => Prop3Exponent::Printed,
                ExponentArg::Squared => Prop3Exponent::Squared,
            },
        }
    }
}

pub(crate) fn parse_channel(text: &str) -> anyhow::Result<ChannelInstance> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, row) in text.split(';').enumerate() {
        let values = row
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().with_context(|| format!("channel row {}: '{t}' is not a number", i + 1)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        rows.push(values);
    }
    let n_t = rows[0].len();
    ensure!(n_t > 0, "channel rows must be nonempty");
    ensure!(rows.iter().all(|r| r.len() == n_t), "channel rows must have equal length");
    let flat: Vec<f64> = rows.concat();
    Ok(ChannelInstance::new(DMatrix::from_row_slice(rows.len(), n_t, &flat))?)
}

/// One CSV row: the bound's name (suffixed with the architecture for the
/// packing bound) and its report.
#[derive(Debug, Clone)]
pub struct BoundRow {
    pub power_db: f64,
    pub name: String,
    pub report: BoundReport,
}

/// Every bound for `ch` at one power. Architectures whose configuration
/// does not exist for this channel shape are skipped.
pub fn bound_rows(ch: &ChannelInstance, n_tq: usize, power_db: f64, opts: BoundOptions) -> anyhow::Result<Vec<BoundRow>> {
    let power = db_to_power(power_db);
    let (n_t, n_r) = (ch.n_t(), ch.n_r());
    let h_max = ch.row_norms().iter().copied().fold(0.0, f64::max);
    let top = ch.singular_values()[0];
    let lambdas: Vec<f64> = ch.singular_values()[..n_t.min(n_r)]
        .iter()
        .copied()
        .filter(|l| *l > 1e-12 * top)
        .collect();

    let mut reports = vec![prop1_report(h_max, power, n_tq)?];
    reports.extend(prop2_reports(n_r, n_t)?);
    reports.push(prop3_upper(&lambdas, power, n_tq, n_t, n_r, opts)?);
    let mut rows: Vec<BoundRow> = reports
        .into_iter()
        .map(|report| BoundRow { power_db, name: report.name.name().to_string(), report })
        .collect();
    for arch in Architecture::ALL {
        let Ok(cfg) = build_config(arch, ch, n_tq, power) else {
            continue;
        };
        let induced = induced_arrangement(ch, &cfg)?;
        let report = theorem1_upper(&[induced.arrangement], power, n_t, n_r, opts)?;
        rows.push(BoundRow { power_db, name: format!("{}_{}", report.name.name(), arch.name()), report });
    }
    let report = unquantized_report(ch, power)?;
    rows.push(BoundRow { power_db, name: report.name.name().to_string(), report });
    Ok(rows)
}

pub(crate) fn render(rows: &[BoundRow]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["power_db", "bound_name", "value_bits", "gap_bits", "assumptions"])?;
    for r in rows {
        w.write_record([
            format!("{}", r.power_db),
            r.name.clone(),
            format!("{:.6}", r.report.value_bits),
            format!("{:.6}", r.report.gap_bits),
            r.report.assumptions.join("; "),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub(crate) fn cmd_bounds(args: &BoundsArgs, out_dir: Option<&Path>) -> anyhow::Result<()> {
    let ch = match &args.channel {
        Some(text) => parse_channel(text)?,
        None => sample_channel(args.n_t, args.n_r, args.seed)?,
    };
    let grid = if args.power_db.is_empty() {
        RateCurveParams::reference().power_db
    } else {
        args.power_db.clone()
    };
    ensure!(grid.iter().all(|p| p.is_finite()), "--power-db values must be finite");
    let mut rows = Vec::new();
    for &db in &grid {
        rows.extend(bound_rows(&ch, args.n_tq, db, args.options())?);
    }
    let bytes = render(&rows)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    write_files(&out_dir_or_default(out_dir), &[(args.out.as_str(), bytes)])?;
    Ok(())
}
