//! Receiver configurations `{V, t}` for four quantizer architectures and the
//! transmit-space arrangement they induce.
//!
//! The receiver outputs `y = sign(V (H x + z) + t)`. Without noise, output
//! `j` flips where `v_j^T H x = -t_j`, so the induced arrangement has
//! normals `V H` and offsets `-t`; a cell's sign vector is then exactly the
//! noiseless output.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::waterfilling;
use crate::error::invalid;
use crate::geometry::HyperplaneArrangement;
use crate::{Error, Result};

/// Relative singular-value threshold below which a channel is rank deficient.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Every quantizer watches the strongest antenna, thresholds spread out.
    Select,
    /// Zero-threshold quantizers (central arrangement).
    Sign,
    /// Quantizers split over the SVD sub-channels (grid arrangement).
    SvdGrid,
    /// Hyperplanes in general position.
    GeneralPosition,
}

impl Architecture {
    pub const ALL: [Architecture; 4] = [
        Architecture::Select,
        Architecture::Sign,
        Architecture::SvdGrid,
        Architecture::GeneralPosition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Select => "select",
            Architecture::Sign => "sign",
            Architecture::SvdGrid => "svd_grid",
            Architecture::GeneralPosition => "general_position",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "select" => Ok(Architecture::Select),
            "sign" => Ok(Architecture::Sign),
            "svd_grid" | "svd" => Ok(Architecture::SvdGrid),
            "general_position" | "gp" => Ok(Architecture::GeneralPosition),
            _ => invalid(format!(
                "unknown architecture '{s}' (expected select, sign, svd_grid or general_position)"
            )),
        }
    }
}

/// A channel matrix `H` (`N_r x N_t`) with its singular values, sorted
/// descending, and row norms.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelInstance {
    matrix: DMatrix<f64>,
    singular_values: Vec<f64>,
    row_norms: Vec<f64>,
}

impl ChannelInstance {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return invalid("channel matrix must be nonempty");
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return invalid("channel matrix has non-finite entries");
        }
        let mut singular_values: Vec<f64> = matrix.singular_values().iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let row_norms = matrix.row_iter().map(|r| r.norm()).collect();
        Ok(ChannelInstance {
            matrix,
            singular_values,
            row_norms,
        })
    }

    /// Divides every row by its 2-norm, so that `diag(H H^T) = 1`.
    pub fn normalized(matrix: DMatrix<f64>) -> Result<Self> {
        let mut matrix = matrix;
        for (i, mut row) in matrix.row_iter_mut().enumerate() {
            let norm = row.norm();
            if !(norm > 0.0) {
                return invalid(format!("channel row {i} is zero"));
            }
            row /= norm;
        }
        Self::new(matrix)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_t(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn n_r(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn row_norms(&self) -> &[f64] {
        &self.row_norms
    }

    pub fn is_full_rank(&self) -> bool {
        let k = self.n_t().min(self.n_r());
        let top = self.singular_values[0];
        top > 0.0 && self.singular_values[k - 1] > RANK_TOL * top
    }
}

/// Combiner `V` (`N_tq x N_r`, unit rows) and thresholds `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConfig {
    pub combiner: DMatrix<f64>,
    pub thresholds: DVector<f64>,
    pub architecture: Architecture,
}

impl ReceiverConfig {
    pub fn n_tq(&self) -> usize {
        self.combiner.nrows()
    }

    /// Largest off-diagonal magnitude of `V V^T`; zero means the combined
    /// noise samples are independent.
    pub fn max_noise_correlation(&self) -> f64 {
        let gram = &self.combiner * self.combiner.transpose();
        let n = gram.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(gram[(i, j)].abs());
                }
            }
        }
        worst
    }
}

fn check_common(n_tq: usize, power: f64) -> Result<()> {
    if n_tq == 0 {
        return invalid("at least one quantizer is required");
    }
    if !(power > 0.0) || !power.is_finite() {
        return invalid(format!("power must be positive and finite, got {power}"));
    }
    Ok(())
}

/// `n` values equally spaced strictly inside `(-half_width, half_width)`.
fn spread(half_width: f64, n: usize) -> impl Iterator<Item = f64> {
    let n_f = n as f64;
    (1..=n).map(move |j| half_width * (2.0 * j as f64 - n_f - 1.0) / (n_f + 1.0))
}

pub fn select_config(ch: &ChannelInstance, n_tq: usize, power: f64) -> Result<ReceiverConfig> {
    check_common(n_tq, power)?;
    let mut best = 0;
    for (i, &norm) in ch.row_norms().iter().enumerate() {
        if norm > ch.row_norms()[best] {
            best = i;
        }
    }
    let combiner = DMatrix::from_fn(n_tq, ch.n_r(), |_, j| if j == best { 1.0 } else { 0.0 });
    let thresholds = DVector::from_iterator(n_tq, spread(ch.row_norms()[best] * power.sqrt(), n_tq));
    Ok(ReceiverConfig {
        combiner,
        thresholds,
        architecture: Architecture::Select,
    })
}

/// Sign quantization of the first `n_tq` antennas, zero thresholds.
pub fn sign_config(ch: &ChannelInstance, n_tq: usize) -> Result<ReceiverConfig> {
    if n_tq == 0 {
        return invalid("at least one quantizer is required");
    }
    if n_tq > ch.n_r() {
        return invalid(format!(
            "{n_tq} sign quantizers on {} antennas would duplicate antenna rows; use central_config",
            ch.n_r()
        ));
    }
    Ok(ReceiverConfig {
        combiner: DMatrix::identity(n_tq, ch.n_r()),
        thresholds: DVector::zeros(n_tq),
        architecture: Architecture::Sign,
    })
}

/// Zero-threshold quantizers whose induced hyperplanes pass through the
/// origin in general position, for more quantizers than antennas.
pub fn central_config(ch: &ChannelInstance, n_tq: usize) -> Result<ReceiverConfig> {
    if n_tq == 0 {
        return invalid("at least one quantizer is required");
    }
    let targets = target_normals(ch.n_t(), n_tq);
    let mut cfg = combine_for_targets(ch, &targets, &DVector::zeros(n_tq))?;
    cfg.architecture = Architecture::Sign;
    Ok(cfg)
}

/// The architecture's default configuration: for `Sign`, antenna sign
/// quantization when `n_tq <= N_r` and the central arrangement otherwise.
pub fn build_config(
    arch: Architecture,
    ch: &ChannelInstance,
    n_tq: usize,
    power: f64,
) -> Result<ReceiverConfig> {
    match arch {
        Architecture::Select => select_config(ch, n_tq, power),
        Architecture::Sign if n_tq <= ch.n_r() => sign_config(ch, n_tq),
        Architecture::Sign => central_config(ch, n_tq),
        Architecture::SvdGrid => svd_grid_config(ch, n_tq, power),
        Architecture::GeneralPosition => gp_config(ch, n_tq, power),
    }
}

/// Left singular vectors and singular values of `H`, sorted descending.
fn sorted_svd(ch: &ChannelInstance) -> (Vec<DVector<f64>>, Vec<f64>) {
    let svd = ch.matrix().clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let vectors = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    (vectors, values)
}

/// Quantizers per sub-channel: as equal as possible, the remainder going to
/// the strongest sub-channels.
pub fn split_quantizers(n_tq: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n_tq / k + usize::from(i < n_tq % k)).collect()
}

pub fn svd_grid_config(ch: &ChannelInstance, n_tq: usize, power: f64) -> Result<ReceiverConfig> {
    check_common(n_tq, power)?;
    let k = ch.n_t().min(ch.n_r());
    if n_tq < k {
        return invalid(format!("SVD grid needs at least {k} quantizers, got {n_tq}"));
    }
    if !ch.is_full_rank() {
        return Err(Error::RankDeficient("SVD grid needs a full-rank channel".into()));
    }
    let (vectors, lambdas) = sorted_svd(ch);
    let alloc = waterfilling(&lambdas[..k], power)?;
    let counts = split_quantizers(n_tq, k);

    let mut combiner = DMatrix::zeros(n_tq, ch.n_r());
    let mut thresholds = Vec::with_capacity(n_tq);
    let mut row = 0;
    for sub in 0..k {
        let half = lambdas[sub] * alloc.per_channel[sub].sqrt();
        for t in spread(half, counts[sub]) {
            combiner.row_mut(row).copy_from(&vectors[sub].transpose());
            thresholds.push(t);
            row += 1;
        }
    }
    Ok(ReceiverConfig {
        combiner,
        thresholds: DVector::from_vec(thresholds),
        architecture: Architecture::SvdGrid,
    })
}

/// Target transmit-space normals in general position: `n` directions
/// spread over the half circle in the plane, moment-curve points in higher
/// dimension.
fn target_normals(n_t: usize, n: usize) -> DMatrix<f64> {
    let n_f = n as f64;
    match n_t {
        1 => DMatrix::from_element(n, 1, 1.0),
        2 => DMatrix::from_fn(n, 2, |k, j| {
            let theta = k as f64 * std::f64::consts::PI / n_f + std::f64::consts::PI / (2.0 * n_f);
            if j == 0 {
                theta.cos()
            } else {
                theta.sin()
            }
        }),
        _ => {
            let mut g = DMatrix::from_fn(n, n_t, |k, j| {
                let s = if n == 1 { 0.0 } else { -1.0 + 2.0 * k as f64 / (n_f - 1.0) };
                s.powi(j as i32)
            });
            for mut row in g.row_iter_mut() {
                let norm = row.norm();
                row /= norm;
            }
            g
        }
    }
}

/// Target offsets: alternating `-+ sqrt(P)/4` (growing slowly with the
/// index above two dimensions), equally spaced slabs on a line.
fn target_offsets(n_t: usize, n: usize, power: f64) -> DVector<f64> {
    let amp = power.sqrt() / 4.0;
    match n_t {
        1 => DVector::from_iterator(n, spread(power.sqrt(), n)),
        2 => DVector::from_fn(n, |k, _| if k % 2 == 0 { -amp } else { amp }),
        _ => DVector::from_fn(n, |k, _| {
            let s = if k % 2 == 0 { -1.0 } else { 1.0 };
            s * amp * (1.0 + k as f64 / n as f64)
        }),
    }
}

/// `V = G H^+` with unit rows and thresholds chosen so that the induced
/// arrangement is exactly `{G x = b}`.
fn combine_for_targets(
    ch: &ChannelInstance,
    targets: &DMatrix<f64>,
    offsets: &DVector<f64>,
) -> Result<ReceiverConfig> {
    if ch.n_t() > ch.n_r() {
        return invalid(format!(
            "general-position combining needs N_t <= N_r (got N_t = {}, N_r = {})",
            ch.n_t(),
            ch.n_r()
        ));
    }
    if !ch.is_full_rank() {
        return Err(Error::RankDeficient(
            "general-position combining needs a full-column-rank channel".into(),
        ));
    }
    let pinv = ch
        .matrix()
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let mut combiner = targets * pinv;
    let mut thresholds = -offsets.clone();
    for k in 0..combiner.nrows() {
        let norm = combiner.row(k).norm();
        combiner.row_mut(k).unscale_mut(norm);
        thresholds[k] /= norm;
    }
    Ok(ReceiverConfig {
        combiner,
        thresholds,
        architecture: Architecture::GeneralPosition,
    })
}

pub fn gp_config(ch: &ChannelInstance, n_tq: usize, power: f64) -> Result<ReceiverConfig> {
    check_common(n_tq, power)?;
    let targets = target_normals(ch.n_t(), n_tq);
    let offsets = target_offsets(ch.n_t(), n_tq, power);
    combine_for_targets(ch, &targets, &offsets)
}

/// Arrangement induced in transmit space, and how many quantizers were
/// dropped because their combiner row is orthogonal to the channel range.
#[derive(Clone, Debug)]
pub struct InducedArrangement {
    pub arrangement: HyperplaneArrangement,
    pub dropped: usize,
}

pub fn induced_arrangement(ch: &ChannelInstance, cfg: &ReceiverConfig) -> Result<InducedArrangement> {
    if cfg.combiner.ncols() != ch.n_r() {
        return invalid(format!(
            "combiner has {} columns but the channel has {} receive antennas",
            cfg.combiner.ncols(),
            ch.n_r()
        ));
    }
    if cfg.thresholds.len() != cfg.combiner.nrows() {
        return invalid("threshold count does not match combiner rows");
    }
    let normals = &cfg.combiner * ch.matrix();
    let floor = 1e-12 * ch.singular_values()[0].max(f64::MIN_POSITIVE);
    let rows: Vec<(Vec<f64>, f64)> = normals
        .row_iter()
        .zip(cfg.thresholds.iter())
        .filter(|(row, _)| row.norm() > floor)
        .map(|(row, t)| (row.iter().copied().collect(), -t))
        .collect();
    let dropped = cfg.n_tq() - rows.len();
    Ok(InducedArrangement {
        arrangement: HyperplaneArrangement::from_rows(ch.n_t(), &rows)?,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_cells, is_general_position, parallel_classes, DEFAULT_GP_TOL};

    fn identity_like() -> ChannelInstance {
        ChannelInstance::normalized(DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]))
            .unwrap()
    }

    fn cells(ch: &ChannelInstance, cfg: &ReceiverConfig, power: f64) -> usize {
        let induced = induced_arrangement(ch, cfg).unwrap();
        enumerate_cells(&induced.arrangement, power.sqrt()).unwrap().len()
    }

    #[test]
    fn region_counts_of_the_four_architectures() {
        let ch = identity_like();
        let p = 25.0;
        let counts: Vec<usize> = Architecture::ALL
            .iter()
            .map(|&a| cells(&ch, &build_config(a, &ch, 4, p).unwrap(), p))
            .collect();
        assert_eq!(counts, vec![5, 8, 9, 11]);
    }

    #[test]
    fn select_on_identity_gives_unit_slabs() {
        let ch = ChannelInstance::normalized(DMatrix::identity(2, 2)).unwrap();
        let cfg = select_config(&ch, 4, 25.0).unwrap();
        assert_eq!(cfg.thresholds.as_slice(), &[-3.0, -1.0, 1.0, 3.0]);
        for j in 0..4 {
            assert_eq!(cfg.thresholds[j], -cfg.thresholds[3 - j]);
        }
        let induced = induced_arrangement(&ch, &cfg).unwrap();
        assert_eq!(parallel_classes(&induced.arrangement, 1e-12).len(), 1);
        let single = select_config(&ch, 1, 25.0).unwrap();
        assert_eq!(cells(&ch, &single, 25.0), 2);
    }

    #[test]
    fn sign_config_is_central() {
        let ch = identity_like();
        let cfg = sign_config(&ch, 3).unwrap();
        assert!(cfg.thresholds.iter().all(|&t| t == 0.0));
        let induced = induced_arrangement(&ch, &cfg).unwrap();
        assert!(induced.arrangement.offsets().iter().all(|&b| b == 0.0));
        assert_eq!(cells(&ch, &cfg, 1.0), 6);
        assert!(sign_config(&ch, 4).is_err());
    }

    #[test]
    fn svd_grid_structure() {
        assert_eq!(split_quantizers(4, 2), vec![2, 2]);
        assert_eq!(split_quantizers(5, 2), vec![3, 2]);
        let ch = identity_like();
        let cfg = svd_grid_config(&ch, 4, 100.0).unwrap();
        let induced = induced_arrangement(&ch, &cfg).unwrap();
        assert_eq!(parallel_classes(&induced.arrangement, 1e-9).len(), 2);
        for row in cfg.combiner.row_iter() {
            assert!((row.norm() - 1.0).abs() < 1e-12);
        }
        assert!(svd_grid_config(&ch, 1, 1.0).is_err());
        // one sub-channel: slabs along the principal direction
        let ch1 = ChannelInstance::normalized(DMatrix::from_row_slice(2, 1, &[1.0, 1.0])).unwrap();
        let cfg1 = svd_grid_config(&ch1, 4, 25.0).unwrap();
        assert_eq!(cells(&ch1, &cfg1, 25.0), 5);
    }

    #[test]
    fn gp_targets_are_reproduced_exactly() {
        let ch = ChannelInstance::normalized(DMatrix::from_row_slice(
            3,
            2,
            &[0.3, -1.2, 0.8, 0.5, -0.4, 0.9],
        ))
        .unwrap();
        let cfg = gp_config(&ch, 4, 25.0).unwrap();
        let induced = induced_arrangement(&ch, &cfg).unwrap().arrangement;
        let g = target_normals(2, 4);
        let b = target_offsets(2, 4, 25.0);
        for k in 0..4 {
            let a = induced.normals().row(k);
            let cos = a.dot(&g.row(k)) / (a.norm() * g.row(k).norm());
            assert!((cos - 1.0).abs() < 1e-12);
            assert!((induced.offsets()[k] / a.norm() - b[k]).abs() < 1e-9);
        }
        assert!(is_general_position(&induced, DEFAULT_GP_TOL).unwrap());
        assert_eq!(enumerate_cells(&induced, 5.0).unwrap().len(), 11);
    }

    #[test]
    fn gp_on_identity_is_the_target() {
        let ch = ChannelInstance::new(DMatrix::identity(2, 2)).unwrap();
        let cfg = gp_config(&ch, 4, 4.0).unwrap();
        assert!((&cfg.combiner - target_normals(2, 4)).amax() < 1e-12);
    }

    #[test]
    fn gp_preconditions() {
        let wide = ChannelInstance::normalized(DMatrix::from_row_slice(1, 2, &[1.0, 1.0])).unwrap();
        assert!(gp_config(&wide, 4, 1.0).is_err());
        let deficient =
            ChannelInstance::normalized(DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, -1.0, -1.0]))
                .unwrap();
        assert!(matches!(gp_config(&deficient, 4, 1.0), Err(Error::RankDeficient(_))));
        let three = ChannelInstance::new(DMatrix::identity(3, 3)).unwrap();
        let cfg = gp_config(&three, 6, 16.0).unwrap();
        let arr = induced_arrangement(&three, &cfg).unwrap().arrangement;
        assert!(is_general_position(&arr, DEFAULT_GP_TOL).unwrap());
    }

    #[test]
    fn orthogonal_rows_are_dropped() {
        let ch = ChannelInstance::new(DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
            .unwrap();
        let cfg = sign_config(&ch, 3).unwrap();
        let induced = induced_arrangement(&ch, &cfg).unwrap();
        assert_eq!(induced.dropped, 1);
        assert_eq!(induced.arrangement.count(), 2);
    }

    #[test]
    fn architecture_names_round_trip() {
        for a in Architecture::ALL {
            assert_eq!(a.name().parse::<Architecture>().unwrap(), a);
        }
        assert_eq!("gp".parse::<Architecture>().unwrap(), Architecture::GeneralPosition);
        assert!("bogus".parse::<Architecture>().is_err());
    }
}
