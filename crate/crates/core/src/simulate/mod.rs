//! Random channels, quantized channel laws, mutual information and
//! achievable-rate sweeps.
//!
//! The transmitter uses unit-sphere centers packed in the receiver's
//! induced arrangement as its constellation, uniformly. Each receiver
//! output pattern is the cell the noisy point lands in, so the achievable
//! rate is the mutual information of the resulting discrete channel.

mod information;
mod law;

use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bounds::unquantized_capacity;
use crate::configs::{build_config, induced_arrangement, Architecture, ChannelInstance, ReceiverConfig, RANK_TOL};
use crate::error::invalid;
use crate::geometry::{enumerate_cells_with, max_margin_center, HyperplaneArrangement};
use crate::packing::pack_margin_with;
use crate::rng::{domain, stream};
use crate::{Error, Exec, Result};

pub use information::{mutual_information, optimize_input, MAX_ITERATIONS};
pub use law::{
    gaussian_tail, transition_exact, transition_mc, transition_mc_with, TransitionMatrix,
    INDEPENDENCE_TOL, MAX_QUANTIZERS,
};

const CHANNEL_RETRIES: u64 = 100;
const RELAX_STEPS: usize = 40;
/// Stopping tolerance (bits) when the input prior is optimized.
pub const PRIOR_TOL: f64 = 1e-6;

/// An i.i.d. standard normal `N_r x N_t` channel with unit-norm rows,
/// redrawn while it is rank deficient.
pub fn sample_channel(n_t: usize, n_r: usize, seed: u64) -> Result<ChannelInstance> {
    if n_t == 0 || n_r == 0 {
        return invalid("channel dimensions must be at least 1");
    }
    for attempt in 0..CHANNEL_RETRIES {
        let mut rng = stream(seed, &[domain::CHANNEL, attempt]);
        let h = DMatrix::from_fn(n_r, n_t, |_, _| StandardNormal.sample(&mut rng));
        if h.row_iter().any(|r| r.norm() == 0.0) {
            continue;
        }
        let ch = ChannelInstance::normalized(h)?;
        if ch.is_full_rank() {
            return Ok(ch);
        }
    }
    Err(Error::RankDeficient(format!(
        "no full-rank channel after {CHANNEL_RETRIES} draws (relative tolerance {RANK_TOL})"
    )))
}

/// Seed of the channel used by trial `trial` of a sweep with master seed
/// `seed`.
pub fn trial_channel_seed(seed: u64, trial: u64) -> u64 {
    stream(seed, &[domain::TRIAL, trial]).next_u64()
}

/// Transmit points with an input distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    pub points: Vec<DVector<f64>>,
    pub prior: Vec<f64>,
    /// Common distance of every point to every hyperplane: 1 for a unit
    /// packing, smaller when relaxed at low power, 0 for the lone origin.
    pub margin: f64,
}

impl Constellation {
    pub fn uniform(points: Vec<DVector<f64>>) -> Self {
        let n = points.len();
        Constellation {
            points,
            prior: vec![1.0 / n as f64; n],
            margin: 1.0,
        }
    }

    fn origin(dim: usize) -> Self {
        let mut c = Self::uniform(vec![DVector::zeros(dim)]);
        c.margin = 0.0;
        c
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_relaxed(&self) -> bool {
        self.margin < 1.0
    }

    pub fn average_power(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.prior)
            .map(|(x, p)| p * x.norm_squared())
            .sum()
    }
}

pub fn constellation_from_config(
    ch: &ChannelInstance,
    cfg: &ReceiverConfig,
    power: f64,
) -> Result<Constellation> {
    constellation_from_config_with(ch, cfg, power, Exec::default())
}

/// Unit-sphere centers packed in the induced arrangement inside the ball of
/// radius `sqrt(power)`. With fewer than two such spheres the common margin
/// `m` is relaxed to the largest value in `(0, 1)` for which at least two
/// cells hold a point at distance `m` from every hyperplane within radius
/// `sqrt(power) - m`; failing that, the constellation is the origin alone.
pub fn constellation_from_config_with(
    ch: &ChannelInstance,
    cfg: &ReceiverConfig,
    power: f64,
    exec: Exec,
) -> Result<Constellation> {
    if !(power >= 0.0) || !power.is_finite() {
        return invalid(format!("power must be nonnegative and finite, got {power}"));
    }
    let arr = induced_arrangement(ch, cfg)?.arrangement;
    let r = power.sqrt();
    if r > 1.0 {
        let packing = pack_margin_with(&arr, r, exec)?;
        if packing.len() >= 2 {
            return Ok(clip(Constellation::uniform(packing.centers), r));
        }
    }
    if r == 0.0 || arr.count() == 0 {
        return Ok(Constellation::origin(ch.n_t()));
    }
    relaxed(&arr, r, exec)
}

fn relaxed(arr: &HyperplaneArrangement, r: f64, exec: Exec) -> Result<Constellation> {
    let cells = enumerate_cells_with(arr, r, exec)?;
    if cells.len() < 2 {
        return Ok(Constellation::origin(arr.dim()));
    }
    let place = |m: f64| -> Result<Vec<DVector<f64>>> {
        let found = exec.map(&cells, |cell| max_margin_center(arr, &cell.sign_vector, r - m));
        let mut centers = Vec::new();
        for f in found {
            if let Some((c, margin)) = f? {
                if margin >= m * (1.0 - 1e-9) {
                    centers.push(c);
                }
            }
        }
        Ok(centers)
    };
    let mut lo = 1e-6 * r.min(1.0);
    let mut best = place(lo)?;
    if best.len() < 2 {
        return Ok(Constellation::origin(arr.dim()));
    }
    let mut hi = r.min(1.0);
    for _ in 0..RELAX_STEPS {
        let mid = 0.5 * (lo + hi);
        let centers = place(mid)?;
        if centers.len() >= 2 {
            lo = mid;
            best = centers;
        } else {
            hi = mid;
        }
    }
    let mut cons = clip(Constellation::uniform(best), r);
    cons.margin = lo;
    Ok(cons)
}

// guards the peak constraint against rounding in the placement step
fn clip(mut cons: Constellation, r: f64) -> Constellation {
    for x in &mut cons.points {
        let n = x.norm();
        if n > r {
            *x *= r / n;
        }
    }
    cons
}

/// One curve of a sweep: a quantized architecture or the unquantized
/// reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Quantized(Architecture),
    Unquantized,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Quantized(a) => a.name(),
            Series::Unquantized => "unquantized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurveParams {
    pub strategies: Vec<Architecture>,
    pub power_db: Vec<f64>,
    pub n_t: usize,
    pub n_r: usize,
    pub n_tq: usize,
    pub trials: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Report the capacity over the constellation instead of the
    /// uniform-input rate.
    pub optimize_prior: bool,
}

impl RateCurveParams {
    /// Two transmit and three receive antennas, four quantizers, all four
    /// architectures from -10 dB to 40 dB.
    pub fn reference() -> Self {
        RateCurveParams {
            strategies: Architecture::ALL.to_vec(),
            power_db: (-2..=8).map(|k| 5.0 * k as f64).collect(),
            n_t: 2,
            n_r: 3,
            n_tq: 4,
            trials: 50,
            mc_samples: 100_000,
            seed: 0,
            optimize_prior: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return invalid("at least one strategy is required");
        }
        if self.power_db.is_empty() || self.power_db.iter().any(|p| !p.is_finite()) {
            return invalid("power grid must be nonempty and finite");
        }
        if self.trials == 0 || self.mc_samples == 0 {
            return invalid("trials and mc_samples must be at least 1");
        }
        if self.n_t == 0 || self.n_r == 0 || self.n_tq == 0 {
            return invalid("antenna and quantizer counts must be at least 1");
        }
        if self.n_tq > MAX_QUANTIZERS {
            return invalid(format!("at most {MAX_QUANTIZERS} quantizers are supported"));
        }
        let needs_left_inverse = self.strategies.iter().any(|a| {
            *a == Architecture::GeneralPosition || (*a == Architecture::Sign && self.n_tq > self.n_r)
        });
        if needs_left_inverse && self.n_t > self.n_r {
            return invalid("general-position and central configurations need n_t <= n_r");
        }
        let k = self.n_t.min(self.n_r);
        if self.strategies.contains(&Architecture::SvdGrid) && self.n_tq < k {
            return invalid(format!("svd_grid needs n_tq >= {k}"));
        }
        Ok(())
    }
}

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// The outcome of one (trial, series, power) unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub power_db: f64,
    pub series: Series,
    pub rate_bits: f64,
    /// Constellation size (0 for the unquantized reference).
    pub points: usize,
    pub margin: f64,
    /// The channel law was evaluated in closed form rather than sampled.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub power_db: f64,
    pub series: Series,
    pub mean_rate_bits: f64,
    pub std_rate_bits: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    /// Grouped by power, strategies in request order, reference last.
    pub entries: Vec<RateEntry>,
    pub records: Vec<TrialRecord>,
}

impl RateCurve {
    pub fn entry(&self, power_db: f64, series: Series) -> Option<&RateEntry> {
        self.entries
            .iter()
            .find(|e| e.power_db == power_db && e.series == series)
    }
}

fn architecture_code(a: Architecture) -> u64 {
    match a {
        Architecture::Select => 1,
        Architecture::Sign => 2,
        Architecture::SvdGrid => 3,
        Architecture::GeneralPosition => 4,
    }
}

fn unit_rate(
    ch: &ChannelInstance,
    params: &RateCurveParams,
    trial: usize,
    arch: Architecture,
    power_db: f64,
) -> Result<TrialRecord> {
    let power = db_to_power(power_db);
    let cfg = build_config(arch, ch, params.n_tq, power)?;
    let cons = constellation_from_config_with(ch, &cfg, power, Exec::Sequential)?;
    let exact = cfg.max_noise_correlation() <= INDEPENDENCE_TOL;
    let tm = if exact {
        transition_exact(ch, &cfg, &cons)?
    } else {
        let labels = [domain::UNIT, trial as u64, architecture_code(arch), power_db.to_bits()];
        let seed = stream(params.seed, &labels).next_u64();
        transition_mc_with(ch, &cfg, &cons, params.mc_samples, seed, Exec::Sequential)?
    };
    let rate_bits = if params.optimize_prior {
        optimize_input(&tm, PRIOR_TOL)?.0
    } else {
        mutual_information(&tm, &cons.prior)?
    };
    Ok(TrialRecord {
        trial,
        power_db,
        series: Series::Quantized(arch),
        rate_bits,
        points: cons.len(),
        margin: cons.margin,
        exact,
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn rate_curve(params: &RateCurveParams) -> Result<RateCurve> {
    rate_curve_with(params, Exec::default())
}

/// Average achievable rate of every strategy over `trials` random channels
/// at every power, plus the unquantized capacity. Work units run in
/// parallel under `exec`; every unit owns its random streams and results
/// are reduced in a fixed order, so the output does not depend on `exec`.
pub fn rate_curve_with(params: &RateCurveParams, exec: Exec) -> Result<RateCurve> {
    params.validate()?;
    let trials: Vec<u64> = (0..params.trials as u64).collect();
    let channels = exec
        .map(&trials, |&t| sample_channel(params.n_t, params.n_r, trial_channel_seed(params.seed, t)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut units = Vec::new();
    for trial in 0..params.trials {
        for &arch in &params.strategies {
            for &db in &params.power_db {
                units.push((trial, arch, db));
            }
        }
    }
    let mut records = exec
        .map(&units, |&(trial, arch, db)| unit_rate(&channels[trial], params, trial, arch, db))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    for (trial, ch) in channels.iter().enumerate() {
        for &db in &params.power_db {
            records.push(TrialRecord {
                trial,
                power_db: db,
                series: Series::Unquantized,
                rate_bits: unquantized_capacity(ch, db_to_power(db))?,
                points: 0,
                margin: 0.0,
                exact: true,
            });
        }
    }

    let mut series: Vec<Series> = params.strategies.iter().map(|&a| Series::Quantized(a)).collect();
    series.push(Series::Unquantized);
    let mut entries = Vec::new();
    for &db in &params.power_db {
        for &s in &series {
            let rates: Vec<f64> = records
                .iter()
                .filter(|r| r.series == s && r.power_db == db)
                .map(|r| r.rate_bits)
                .collect();
            let (mean, std) = mean_std(&rates);
            entries.push(RateEntry {
                power_db: db,
                series: s,
                mean_rate_bits: mean,
                std_rate_bits: std,
                trials: rates.len(),
            });
        }
    }
    Ok(RateCurve { entries, records })
}
