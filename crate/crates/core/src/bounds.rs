//! Closed-form capacity bounds for one-bit quantized MIMO receivers, the
//! waterfilling allocation they rely on, the packing-based upper bound, and
//! the unquantized capacity used as a reference curve.
//!
//! All rates are in bits per channel use.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::configs::ChannelInstance;
use crate::counting::r_central;
use crate::error::invalid;
use crate::geometry::HyperplaneArrangement;
use crate::packing::log_r_ssps;
use crate::Result;

const BISECTION_STEPS: usize = 200;

/// Which dimension constant `K` the linear-combining and packing bounds
/// use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KConvention {
    /// `K = max(N_t, N_r)`.
    #[default]
    Printed,
    /// `K = min(N_t, N_r)`, the number of SVD sub-channels.
    Min,
}

impl KConvention {
    pub fn k(self, n_t: usize, n_r: usize) -> usize {
        match self {
            KConvention::Printed => n_t.max(n_r),
            KConvention::Min => n_t.min(n_r),
        }
    }
}

/// Gain exponent in the first branch of the linear-combining bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop3Exponent {
    /// `1/2 log(1 + lambda_i P_i)`, as stated alongside a branch condition
    /// written with `lambda_i^2`.
    #[default]
    Printed,
    /// `1/2 log(1 + lambda_i^2 P_i)`, consistent with the condition.
    Squared,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundOptions {
    #[serde(default)]
    pub k_convention: KConvention,
    #[serde(default)]
    pub prop3_exponent: Prop3Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    SelectUpper,
    SignLower,
    SignUpper,
    LinearUpper,
    PackingUpper,
    Unquantized,
}

impl BoundName {
    pub fn name(self) -> &'static str {
        match self {
            BoundName::SelectUpper => "select_upper",
            BoundName::SignLower => "sign_lower",
            BoundName::SignUpper => "sign_upper",
            BoundName::LinearUpper => "linear_upper",
            BoundName::PackingUpper => "packing_upper",
            BoundName::Unquantized => "unquantized",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: BoundName,
    pub value_bits: f64,
    /// Guaranteed distance between the bound and an achievable rate.
    pub gap_bits: f64,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub per_channel: Vec<f64>,
    pub water_level: f64,
    pub total: f64,
}

impl PowerAllocation {
    /// Largest violation of the allocation's optimality conditions:
    /// total power and `P_i = max(0, mu - lambda_i^-2)`.
    pub fn kkt_residual(&self, lambdas: &[f64]) -> f64 {
        let sum: f64 = self.per_channel.iter().sum();
        let mut worst = (sum - self.total).abs();
        for (p, l) in self.per_channel.iter().zip(lambdas) {
            worst = worst.max((p - (self.water_level - l.powi(-2)).max(0.0)).abs());
        }
        worst
    }
}

fn filled(floors: &[f64], mu: f64) -> f64 {
    floors.iter().map(|g| (mu - g).max(0.0)).sum()
}

/// Waterfilling over parallel Gaussian sub-channels with gains
/// `lambda_i^2`: `P_i = max(0, mu - lambda_i^-2)` with `sum P_i = power`.
///
/// `mu` is bracketed and bisected, then refined in closed form on the
/// active set so the total is met to rounding error.
pub fn waterfilling(lambdas: &[f64], power: f64) -> Result<PowerAllocation> {
    if lambdas.is_empty() {
        return invalid("waterfilling needs at least one sub-channel");
    }
    if lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return invalid("sub-channel gains must be positive and finite");
    }
    if !(power >= 0.0) || !power.is_finite() {
        return invalid(format!("power must be nonnegative and finite, got {power}"));
    }
    let floors: Vec<f64> = lambdas.iter().map(|l| l.powi(-2)).collect();
    let lowest = floors.iter().copied().fold(f64::INFINITY, f64::min);
    let highest = floors.iter().copied().fold(0.0, f64::max);

    let (mut lo, mut hi) = (lowest, highest + power);
    let target = 1e-10 * power.max(1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let sum = filled(&floors, mid);
        if (sum - power).abs() <= target * 1e-3 {
            lo = mid;
            hi = mid;
            break;
        }
        if sum < power {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut mu = 0.5 * (lo + hi);

    // closed form on the active set; repeat while the set moves
    for _ in 0..lambdas.len() {
        let active: Vec<f64> = floors.iter().copied().filter(|g| *g < mu).collect();
        if active.is_empty() {
            break;
        }
        let refined = (power + active.iter().sum::<f64>()) / active.len() as f64;
        let same = floors.iter().all(|g| (*g < mu) == (*g < refined));
        mu = refined;
        if same {
            break;
        }
    }
    if power == 0.0 {
        mu = lowest;
    }
    Ok(PowerAllocation {
        per_channel: floors.iter().map(|g| (mu - g).max(0.0)).collect(),
        water_level: mu,
        total: power,
    })
}

/// Antenna-selection bound: `1/2 log2 min(1 + |h_max|^2 P, (N_tq + 1)^2)`.
pub fn prop1_upper(h_max_norm: f64, power: f64, n_tq: usize) -> Result<f64> {
    if !(h_max_norm > 0.0) || !(power >= 0.0) || n_tq == 0 {
        return invalid("selection bound needs |h_max| > 0, P >= 0 and N_tq >= 1");
    }
    let levels = (n_tq as f64 + 1.0).powi(2);
    Ok(0.5 * (1.0 + h_max_norm * h_max_norm * power).min(levels).log2())
}

pub fn prop1_report(h_max_norm: f64, power: f64, n_tq: usize) -> Result<BoundReport> {
    Ok(BoundReport {
        name: BoundName::SelectUpper,
        value_bits: prop1_upper(h_max_norm, power, n_tq)?,
        gap_bits: 2.0,
        assumptions: vec!["all quantizers observe the strongest receive antenna".into()],
    })
}

/// High-SNR sign-quantization capacity brackets
/// `(log2 r0(N_r, N_t), log2(r0(N_r, N_t) + 1))`.
pub fn prop2_bounds(n_r: usize, n_t: usize) -> Result<(f64, f64)> {
    let r = r_central(to_u32(n_r)?, to_u32(n_t)?)? as f64;
    Ok((r.log2(), (r + 1.0).log2()))
}

pub fn prop2_reports(n_r: usize, n_t: usize) -> Result<[BoundReport; 2]> {
    let (lower, upper) = prop2_bounds(n_r, n_t)?;
    let assumptions = vec![
        "high-SNR limit".to_string(),
        "one sign quantizer per receive antenna, zero thresholds".to_string(),
    ];
    Ok([
        BoundReport {
            name: BoundName::SignLower,
            value_bits: lower,
            gap_bits: 0.0,
            assumptions: assumptions.clone(),
        },
        BoundReport {
            name: BoundName::SignUpper,
            value_bits: upper,
            gap_bits: 0.0,
            assumptions,
        },
    ])
}

fn to_u32(n: usize) -> Result<u32> {
    u32::try_from(n).or_else(|_| invalid(format!("{n} is too large")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prop3Branch {
    /// Noise limited: waterfilled per-sub-channel rates.
    PowerLimited,
    /// Quantizer limited: `K log2(N_tq / K + 1)`.
    QuantizerLimited,
}

/// The rate term `R*` of the linear-combining bound and the branch taken.
/// The branch test `sum(sqrt(1 + lambda_i^2 P_i) - 1) <= N_tq` is the same
/// under both exponent options.
pub fn prop3_rate(
    lambdas: &[f64],
    power: f64,
    n_tq: usize,
    k: usize,
    exponent: Prop3Exponent,
) -> Result<(f64, Prop3Branch)> {
    if n_tq == 0 || k == 0 {
        return invalid("linear-combining bound needs N_tq >= 1 and K >= 1");
    }
    let alloc = waterfilling(lambdas, power)?;
    let spread: f64 = lambdas
        .iter()
        .zip(&alloc.per_channel)
        .map(|(l, p)| (1.0 + l * l * p).sqrt() - 1.0)
        .sum();
    if spread <= n_tq as f64 {
        let rate = lambdas
            .iter()
            .zip(&alloc.per_channel)
            .map(|(l, p)| {
                let gain = match exponent {
                    Prop3Exponent::Printed => *l,
                    Prop3Exponent::Squared => l * l,
                };
                0.5 * (1.0 + gain * p).log2()
            })
            .sum();
        Ok((rate, Prop3Branch::PowerLimited))
    } else {
        let k_f = k as f64;
        Ok((k_f * (n_tq as f64 / k_f + 1.0).log2(), Prop3Branch::QuantizerLimited))
    }
}

/// Linear-combining bound `R* + K` with achievability gap `3K`.
pub fn prop3_upper(
    lambdas: &[f64],
    power: f64,
    n_tq: usize,
    n_t: usize,
    n_r: usize,
    opts: BoundOptions,
) -> Result<BoundReport> {
    let k = opts.k_convention.k(n_t, n_r);
    let (rate, branch) = prop3_rate(lambdas, power, n_tq, k, opts.prop3_exponent)?;
    let mut assumptions = vec![
        format!("K = {k} ({})", k_label(opts.k_convention)),
        match branch {
            Prop3Branch::PowerLimited => "power-limited branch".to_string(),
            Prop3Branch::QuantizerLimited => "quantizer-limited branch".to_string(),
        },
    ];
    if branch == Prop3Branch::PowerLimited {
        assumptions.push(match opts.prop3_exponent {
            Prop3Exponent::Printed => "rate term uses lambda_i P_i while the branch test uses lambda_i^2 P_i".into(),
            Prop3Exponent::Squared => "rate term uses lambda_i^2 P_i".into(),
        });
    }
    Ok(BoundReport {
        name: BoundName::LinearUpper,
        value_bits: rate + k as f64,
        gap_bits: 3.0 * k as f64,
        assumptions,
    })
}

fn k_label(c: KConvention) -> &'static str {
    match c {
        KConvention::Printed => "max(N_t, N_r)",
        KConvention::Min => "min(N_t, N_r)",
    }
}

/// Packing bound `max_A log2 r_ssps(A, sqrt(P)) + 1.5 K + 3` over a finite
/// family of induced arrangements, with gap `2.5 N_t`. The packing count is
/// a lower bound on `r_ssps`, so the reported value is the bound evaluated
/// at that count.
pub fn theorem1_upper(
    arrangements: &[HyperplaneArrangement],
    power: f64,
    n_t: usize,
    n_r: usize,
    opts: BoundOptions,
) -> Result<BoundReport> {
    if arrangements.is_empty() {
        return invalid("packing bound needs at least one arrangement");
    }
    if !(power >= 0.0) || !power.is_finite() {
        return invalid(format!("power must be nonnegative and finite, got {power}"));
    }
    let k = opts.k_convention.k(n_t, n_r);
    let mut best = 0.0_f64;
    for arr in arrangements {
        best = best.max(log_r_ssps(arr, power.sqrt())?);
    }
    Ok(BoundReport {
        name: BoundName::PackingUpper,
        value_bits: best + 1.5 * k as f64 + 3.0,
        gap_bits: 2.5 * n_t as f64,
        assumptions: vec![
            format!("K = {k} ({})", k_label(opts.k_convention)),
            format!("maximum over {} supplied arrangement(s)", arrangements.len()),
            "r_ssps evaluated by the per-cell unit-margin packing".into(),
        ],
    })
}

/// Waterfilled capacity `sum 1/2 log2(1 + lambda_i^2 P_i)` of parallel
/// real Gaussian sub-channels.
pub fn unquantized_capacity_from(lambdas: &[f64], power: f64) -> Result<f64> {
    let alloc = waterfilling(lambdas, power)?;
    Ok(lambdas
        .iter()
        .zip(&alloc.per_channel)
        .map(|(l, p)| 0.5 * (l * l * p).ln_1p() / std::f64::consts::LN_2)
        .sum())
}

/// Capacity of `W = H X + Z` without quantization, under total power `P`.
pub fn unquantized_capacity(ch: &ChannelInstance, power: f64) -> Result<f64> {
    let k = ch.n_t().min(ch.n_r());
    let top = ch.singular_values()[0];
    let lambdas: Vec<f64> = ch.singular_values()[..k]
        .iter()
        .copied()
        .filter(|l| *l > 1e-12 * top)
        .collect();
    if lambdas.is_empty() {
        return Ok(0.0);
    }
    unquantized_capacity_from(&lambdas, power)
}

pub fn unquantized_report(ch: &ChannelInstance, power: f64) -> Result<BoundReport> {
    Ok(BoundReport {
        name: BoundName::Unquantized,
        value_bits: unquantized_capacity(ch, power)?,
        gap_bits: 0.0,
        assumptions: vec!["no quantization, waterfilled Gaussian input".into()],
    })
}
