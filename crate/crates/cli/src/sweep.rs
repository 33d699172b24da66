//! The achievable-rate experiment: a JSON spec in, `rates.csv`,
//! `records.csv`, `bounds.csv`, `rates.svg` and `manifest.json` out.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use onebit_mimo::bounds::{prop3_upper, theorem1_upper, BoundOptions, KConvention, Prop3Exponent};
use onebit_mimo::configs::{build_config, induced_arrangement, Architecture};
use onebit_mimo::simulate::{
    db_to_power, rate_curve_with, sample_channel, trial_channel_seed, RateCurve, RateCurveParams, Series,
};
use onebit_mimo::Exec;
use serde::{Deserialize, Serialize};

use crate::output::write_files;
use crate::plot::{curves_svg, Curve};
use crate::FALLBACK_OUT_DIR;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub k_convention: KConvention,
    pub prop3_exponent: Prop3Exponent,
    pub optimize_prior: bool,
}

/// Full description of one run. Missing keys take the reference values;
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n_t: usize,
    pub n_r: usize,
    pub n_tq: usize,
    pub power_db: Vec<f64>,
    pub strategies: Vec<Architecture>,
    pub trials: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub options: SweepOptions,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let r = RateCurveParams::reference();
        ExperimentSpec {
            n_t: r.n_t,
            n_r: r.n_r,
            n_tq: r.n_tq,
            power_db: r.power_db,
            strategies: r.strategies,
            trials: r.trials,
            mc_samples: r.mc_samples,
            seed: r.seed,
            output_dir: None,
            options: SweepOptions::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn params(&self) -> RateCurveParams {
        RateCurveParams {
            strategies: self.strategies.clone(),
            power_db: self.power_db.clone(),
            n_t: self.n_t,
            n_r: self.n_r,
            n_tq: self.n_tq,
            trials: self.trials,
            mc_samples: self.mc_samples,
            seed: self.seed,
            optimize_prior: self.options.optimize_prior,
        }
    }

    pub fn bound_options(&self) -> BoundOptions {
        BoundOptions {
            k_convention: self.options.k_convention,
            prop3_exponent: self.options.prop3_exponent,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.params().validate().context("invalid experiment spec")?;
        let mut seen = self.strategies.clone();
        seen.sort_by_key(|a| a.name());
        seen.dedup();
        anyhow::ensure!(seen.len() == self.strategies.len(), "strategies must not repeat");
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Experiment spec (JSON); the reference setup when omitted
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Override the spec's seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the spec's trial count
    #[arg(long)]
    pub trials: Option<usize>,
    /// Override the spec's Monte-Carlo sample count
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Run on one thread
    #[arg(long)]
    pub sequential: bool,
    /// Print the reference spec as JSON and exit
    #[arg(long)]
    pub print_default_spec: bool,
    /// Do not echo the rate table and written files
    #[arg(long, short)]
    pub quiet: bool,
}

impl SweepArgs {
    pub fn resolve_spec(&self) -> anyhow::Result<ExperimentSpec> {
        let mut spec = match &self.spec {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentSpec::default(),
        };
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(t) = self.trials {
            spec.trials = t;
        }
        if let Some(n) = self.mc_samples {
            spec.mc_samples = n;
        }
        Ok(spec)
    }
}

/// The finished run and the bytes of every output file.
pub struct SweepOutput {
    pub curve: RateCurve,
    pub files: Vec<(&'static str, Vec<u8>)>,
}

fn series_list(spec: &ExperimentSpec) -> Vec<Series> {
    let mut s: Vec<Series> = spec.strategies.iter().map(|&a| Series::Quantized(a)).collect();
    s.push(Series::Unquantized);
    s
}

fn rates_csv(curve: &RateCurve) -> String {
    let mut out = String::from("power_db,strategy,mean_rate_bits,std_rate_bits,trials\n");
    for e in &curve.entries {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{}",
            e.power_db,
            e.series.name(),
            e.mean_rate_bits,
            e.std_rate_bits,
            e.trials
        )
        .unwrap();
    }
    out
}

fn records_csv(curve: &RateCurve) -> String {
    let mut out = String::from("trial,power_db,strategy,rate_bits,points,margin,exact\n");
    for r in &curve.records {
        writeln!(
            out,
            "{},{},{},{:.6},{},{:.6},{}",
            r.trial,
            r.power_db,
            r.series.name(),
            r.rate_bits,
            r.points,
            r.margin,
            r.exact
        )
        .unwrap();
    }
    out
}

/// Trial-averaged linear-combining bound and per-strategy packing bound.
fn bounds_csv(spec: &ExperimentSpec) -> anyhow::Result<String> {
    let opts = spec.bound_options();
    let channels = (0..spec.trials as u64)
        .map(|t| sample_channel(spec.n_t, spec.n_r, trial_channel_seed(spec.seed, t)))
        .collect::<onebit_mimo::Result<Vec<_>>>()?;
    let mut out = String::from("power_db,bound_name,mean_value_bits,gap_bits,trials\n");
    for &db in &spec.power_db {
        let power = db_to_power(db);
        let mut rows: Vec<(String, Vec<f64>, f64)> = Vec::new();
        let mut linear = Vec::new();
        let mut gap = 0.0;
        for ch in &channels {
            let k = spec.n_t.min(spec.n_r);
            let r = prop3_upper(&ch.singular_values()[..k], power, spec.n_tq, spec.n_t, spec.n_r, opts)?;
            gap = r.gap_bits;
            linear.push(r.value_bits);
        }
        rows.push(("linear_upper".into(), linear, gap));
        for &arch in &spec.strategies {
            let mut values = Vec::new();
            let mut gap = 0.0;
            for ch in &channels {
                let cfg = build_config(arch, ch, spec.n_tq, power)?;
                let arr = induced_arrangement(ch, &cfg)?.arrangement;
                let r = theorem1_upper(&[arr], power, spec.n_t, spec.n_r, opts)?;
                gap = r.gap_bits;
                values.push(r.value_bits);
            }
            rows.push((format!("packing_upper_{}", arch.name()), values, gap));
        }
        for (name, values, gap) in rows {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            writeln!(out, "{db},{name},{mean:.6},{gap:.6},{}", values.len()).unwrap();
        }
    }
    Ok(out)
}

fn rates_svg(spec: &ExperimentSpec, curve: &RateCurve) -> anyhow::Result<String> {
    let curves: Vec<Curve<'_>> = series_list(spec)
        .into_iter()
        .map(|s| Curve {
            label: s.name(),
            points: curve
                .entries
                .iter()
                .filter(|e| e.series == s)
                .map(|e| (e.power_db, e.mean_rate_bits))
                .collect(),
        })
        .collect();
    curves_svg(&curves, "power (dB)", "rate (bits per channel use)")
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    spec: &'a ExperimentSpec,
    outputs: &'a [&'static str],
}

/// Runs the experiment described by `spec` and renders every output file.
pub fn execute(spec: &ExperimentSpec, exec: Exec) -> anyhow::Result<SweepOutput> {
    spec.validate()?;
    let curve = rate_curve_with(&spec.params(), exec)?;
    let names = ["rates.csv", "records.csv", "bounds.csv", "rates.svg", "manifest.json"];
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        spec,
        outputs: &names,
    };
    let mut manifest_json = serde_json::to_string_pretty(&manifest)?;
    manifest_json.push('\n');
    let files = vec![
        (names[0], rates_csv(&curve).into_bytes()),
        (names[1], records_csv(&curve).into_bytes()),
        (names[2], bounds_csv(spec)?.into_bytes()),
        (names[3], rates_svg(spec, &curve)?.into_bytes()),
        (names[4], manifest_json.into_bytes()),
    ];
    Ok(SweepOutput { curve, files })
}

pub fn cmd_sweep(args: &SweepArgs, out_dir: Option<&Path>) -> anyhow::Result<()> {
    let spec = args.resolve_spec()?;
    if args.print_default_spec {
        println!("{}", serde_json::to_string_pretty(&spec)?);
        return Ok(());
    }
    spec.validate()?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| spec.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR));
    let exec = if args.sequential { Exec::Sequential } else { Exec::Parallel };
    let output = execute(&spec, exec)?;
    let written = write_files(&dir, &output.files)?;
    if !args.quiet {
        for e in &output.curve.entries {
            println!("{:>6} dB  {:<16} {:.4} bits", e.power_db, e.series.name(), e.mean_rate_bits);
        }
        for p in written {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentSpec {
        ExperimentSpec {
            power_db: vec![0.0, 20.0],
            trials: 2,
            mc_samples: 2000,
            seed: 5,
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn defaults_match_reference() {
        let spec = ExperimentSpec::default();
        assert_eq!(spec.params(), RateCurveParams::reference());
        let round = ExperimentSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(round, spec);
        assert_eq!(ExperimentSpec::from_json("{}").unwrap(), spec);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentSpec::from_json(r#"{"trails": 3}"#).is_err());
        assert!(ExperimentSpec::from_json(r#"{"options": {"optimise_prior": true}}"#).is_err());
        let spec = ExperimentSpec::from_json(
            r#"{"strategies": ["select", "gp"], "options": {"k_convention": "min"}}"#,
        );
        assert!(spec.is_err(), "spec files use the canonical names");
        let spec = ExperimentSpec::from_json(
            r#"{"strategies": ["select", "general_position"], "options": {"k_convention": "min"}}"#,
        )
        .unwrap();
        assert_eq!(spec.options.k_convention, KConvention::Min);
    }

    #[test]
    fn invalid_specs_fail_before_work() {
        let bad = ExperimentSpec { trials: 0, ..small() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { strategies: vec![Architecture::Select, Architecture::Select], ..small() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { n_t: 4, n_r: 3, ..small() };
        assert!(execute(&bad, Exec::Sequential).is_err());
    }

    #[test]
    fn outputs_are_deterministic_and_shaped() {
        let a = execute(&small(), Exec::Sequential).unwrap();
        let b = execute(&small(), Exec::Parallel).unwrap();
        assert_eq!(a.files, b.files);
        let rates = String::from_utf8(a.files[0].1.clone()).unwrap();
        let mut lines = rates.lines();
        assert_eq!(lines.next(), Some("power_db,strategy,mean_rate_bits,std_rate_bits,trials"));
        assert_eq!(lines.count(), 2 * 5);
        let bounds = String::from_utf8(a.files[2].1.clone()).unwrap();
        assert!(bounds.contains("packing_upper_general_position"));
        let manifest: serde_json::Value = serde_json::from_slice(&a.files[4].1).unwrap();
        assert_eq!(manifest["spec"]["seed"], 5);
    }
}
