//! The quantized channel law `p(y | x)` for `y = sign(V (H x + z) + t)`,
//! `z ~ N(0, I)`, evaluated exactly when the combined noise is independent
//! across quantizers and by Monte Carlo otherwise.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::Constellation;
use crate::configs::{ChannelInstance, ReceiverConfig};
use crate::error::invalid;
use crate::geometry::SignVector;
use crate::rng::{domain, stream};
use crate::{Error, Exec, Result};

/// Largest off-diagonal `|V V^T|` for which quantizer noises count as
/// independent.
pub const INDEPENDENCE_TOL: f64 = 1e-9;

/// Output alphabets beyond `2^MAX_QUANTIZERS` are not tabulated.
pub const MAX_QUANTIZERS: usize = 20;

/// Conditional output probabilities, one row per constellation point and
/// one column per output. Column `k` is the output with `y_j = +1` exactly
/// for the bits `j` set in `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub rows: DMatrix<f64>,
    pub n_tq: usize,
}

impl TransitionMatrix {
    pub fn new(rows: DMatrix<f64>, n_tq: usize) -> Result<Self> {
        if rows.ncols() != 1 << n_tq {
            return invalid(format!("{} columns cannot label {n_tq} binary outputs", rows.ncols()));
        }
        if rows.iter().any(|p| !(*p >= 0.0)) {
            return invalid("transition probabilities must be nonnegative");
        }
        Ok(TransitionMatrix { rows, n_tq })
    }

    pub fn label(&self, column: usize) -> SignVector {
        SignVector::from_index(column, self.n_tq)
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.nrows()
    }
}

fn check_shapes(ch: &ChannelInstance, cfg: &ReceiverConfig, cons: &Constellation) -> Result<()> {
    if cfg.combiner.ncols() != ch.n_r() || cfg.thresholds.len() != cfg.n_tq() {
        return invalid("receiver configuration does not match the channel");
    }
    if cfg.n_tq() > MAX_QUANTIZERS {
        return invalid(format!("at most {MAX_QUANTIZERS} quantizers are supported"));
    }
    if cons.points.iter().any(|x| x.len() != ch.n_t()) {
        return invalid("constellation points do not match the transmit dimension");
    }
    Ok(())
}

/// Noiseless combiner outputs `V H x + t` for every point.
fn means(ch: &ChannelInstance, cfg: &ReceiverConfig, cons: &Constellation) -> Vec<DVector<f64>> {
    let vh = &cfg.combiner * ch.matrix();
    cons.points.iter().map(|x| &vh * x + &cfg.thresholds).collect()
}

/// Gaussian upper tail `Q(x)`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn transition_exact(
    ch: &ChannelInstance,
    cfg: &ReceiverConfig,
    cons: &Constellation,
) -> Result<TransitionMatrix> {
    check_shapes(ch, cfg, cons)?;
    let correlation = cfg.max_noise_correlation();
    if correlation > INDEPENDENCE_TOL {
        return Err(Error::CorrelatedNoise(correlation));
    }
    let n = cfg.n_tq();
    let sigma: Vec<f64> = cfg.combiner.row_iter().map(|r| r.norm()).collect();
    let means = means(ch, cfg, cons);
    let mut rows = DMatrix::zeros(cons.points.len(), 1 << n);
    for (i, mu) in means.iter().enumerate() {
        // p(y_j = +1 | x) = P(mu_j + sigma_j z >= 0)
        let plus: Vec<f64> = (0..n).map(|j| gaussian_tail(-mu[j] / sigma[j])).collect();
        let minus: Vec<f64> = (0..n).map(|j| gaussian_tail(mu[j] / sigma[j])).collect();
        for k in 0..1usize << n {
            rows[(i, k)] = (0..n)
                .map(|j| if k >> j & 1 == 1 { plus[j] } else { minus[j] })
                .product();
        }
    }
    TransitionMatrix::new(rows, n)
}

pub fn transition_mc(
    ch: &ChannelInstance,
    cfg: &ReceiverConfig,
    cons: &Constellation,
    n_samples: usize,
    seed: u64,
) -> Result<TransitionMatrix> {
    transition_mc_with(ch, cfg, cons, n_samples, seed, Exec::default())
}

/// Empirical output frequencies over `n_samples` noise draws per point.
/// Point `i` always uses the noise stream `(seed, i)`.
pub fn transition_mc_with(
    ch: &ChannelInstance,
    cfg: &ReceiverConfig,
    cons: &Constellation,
    n_samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<TransitionMatrix> {
    check_shapes(ch, cfg, cons)?;
    if n_samples == 0 {
        return invalid("Monte Carlo needs at least one sample");
    }
    let n = cfg.n_tq();
    let n_r = ch.n_r();
    let v = &cfg.combiner;
    let indexed: Vec<(usize, DVector<f64>)> = means(ch, cfg, cons).into_iter().enumerate().collect();
    let counts = exec.map(&indexed, |(i, mu)| {
        let mut rng = stream(seed, &[domain::NOISE, *i as u64]);
        let mut tally = vec![0u64; 1 << n];
        let mut z = vec![0.0; n_r];
        for _ in 0..n_samples {
            for zr in z.iter_mut() {
                *zr = StandardNormal.sample(&mut rng);
            }
            let mut k = 0usize;
            for j in 0..n {
                let mut s = mu[j];
                for (r, zr) in z.iter().enumerate() {
                    s += v[(j, r)] * zr;
                }
                if s >= 0.0 {
                    k |= 1 << j;
                }
            }
            tally[k] += 1;
        }
        tally
    });
    let total = n_samples as f64;
    let rows = DMatrix::from_fn(cons.points.len(), 1 << n, |i, k| counts[i][k] as f64 / total);
    TransitionMatrix::new(rows, n)
}
