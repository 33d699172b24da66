//! Mutual information of a discrete channel and its capacity over a fixed
//! input support (Blahut-Arimoto).

use super::law::TransitionMatrix;
use crate::error::invalid;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100_000;

fn check_prior(tm: &TransitionMatrix, prior: &[f64]) -> Result<()> {
    if prior.len() != tm.n_inputs() {
        return invalid(format!(
            "prior has {} entries for {} inputs",
            prior.len(),
            tm.n_inputs()
        ));
    }
    if prior.iter().any(|p| !(*p >= 0.0)) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return invalid("prior must be a probability vector");
    }
    Ok(())
}

fn output_law(tm: &TransitionMatrix, prior: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; tm.rows.ncols()];
    for (x, &px) in prior.iter().enumerate() {
        if px > 0.0 {
            for (y, qy) in q.iter_mut().enumerate() {
                *qy += px * tm.rows[(x, y)];
            }
        }
    }
    q
}

/// `D(p(.|x) || q)` in bits for every input.
fn divergences(tm: &TransitionMatrix, q: &[f64]) -> Vec<f64> {
    tm.rows
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(q)
                .filter(|(p, _)| **p > 0.0)
                .map(|(p, qy)| p * (p / qy).log2())
                .sum()
        })
        .collect()
}

/// `I(X; Y)` in bits for the given input prior.
pub fn mutual_information(tm: &TransitionMatrix, prior: &[f64]) -> Result<f64> {
    check_prior(tm, prior)?;
    let q = output_law(tm, prior);
    let d = divergences(tm, &q);
    let i: f64 = prior.iter().zip(&d).map(|(p, d)| p * d).sum();
    Ok(i.max(0.0))
}

/// Capacity over the rows' support, to within `tol` bits. The returned
/// value is the information of the returned prior; the stopping rule
/// `max_x D(p(.|x) || q) - I <= tol` certifies it is within `tol` of the
/// optimum.
pub fn optimize_input(tm: &TransitionMatrix, tol: f64) -> Result<(f64, Vec<f64>)> {
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let n = tm.n_inputs();
    if n == 0 {
        return invalid("channel has no inputs");
    }
    let mut prior = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let q = output_law(tm, &prior);
        let d = divergences(tm, &q);
        let info: f64 = prior.iter().zip(&d).map(|(p, d)| p * d).sum();
        let top = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        residual = top - info;
        if residual <= tol {
            return Ok((info.max(0.0), prior));
        }
        // shift by the maximum before exponentiating
        let weights: Vec<f64> = prior.iter().zip(&d).map(|(p, d)| p * (d - top).exp2()).collect();
        let total: f64 = weights.iter().sum();
        prior = weights.into_iter().map(|w| w / total).collect();
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn matrix(rows: usize, cols: usize, data: &[f64]) -> TransitionMatrix {
        let n_tq = cols.trailing_zeros() as usize;
        TransitionMatrix::new(DMatrix::from_row_slice(rows, cols, data), n_tq).unwrap()
    }

    fn h2(q: f64) -> f64 {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }

    #[test]
    fn noiseless_and_useless_channels() {
        let eye = matrix(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.]);
        assert!((mutual_information(&eye, &[0.25; 4]).unwrap() - 2.0).abs() < 1e-12);
        let same = matrix(2, 2, &[0.3, 0.7, 0.3, 0.7]);
        assert_eq!(mutual_information(&same, &[0.5, 0.5]).unwrap(), 0.0);
        let (c, _) = optimize_input(&eye, 1e-9).unwrap();
        assert!((c - 2.0).abs() < 1e-9);
        assert!(mutual_information(&eye, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn binary_symmetric_channel() {
        let q = 0.1587;
        let bsc = matrix(2, 2, &[1.0 - q, q, q, 1.0 - q]);
        let i = mutual_information(&bsc, &[0.5, 0.5]).unwrap();
        assert!((i - (1.0 - h2(q))).abs() < 1e-12);
        assert!((i - 0.36881).abs() < 1e-5);
        let (c, prior) = optimize_input(&bsc, 1e-10).unwrap();
        assert!((c - i).abs() < 1e-10);
        assert!((prior[0] - 0.5).abs() < 1e-9);
    }

    // Oracle: brute-force grid over the 2-simplex.
    #[test]
    fn redundant_input_loses_its_mass() {
        // input 2 is a noisy mixture of the two clean inputs
        let tm = matrix(3, 2, &[0.95, 0.05, 0.05, 0.95, 0.5, 0.5]);
        let (c, prior) = optimize_input(&tm, 1e-9).unwrap();
        assert!(prior[2] < 1e-3);
        let steps = 400;
        let mut best = 0.0_f64;
        for a in 0..=steps {
            for b in 0..=steps - a {
                let p = [a as f64 / steps as f64, b as f64 / steps as f64, (steps - a - b) as f64 / steps as f64];
                best = best.max(mutual_information(&tm, &p).unwrap());
            }
        }
        assert!(c >= best - 1e-9);
        assert!(c - best < 1e-4);
        assert!(c >= mutual_information(&tm, &[1.0 / 3.0; 3]).unwrap());
    }
}
