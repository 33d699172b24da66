//! Seeded random arrangements for cross-checks and the fixed 2D layouts of
//! the motivating example.

use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use onebit_mimo::geometry::{is_general_position, HyperplaneArrangement};
use onebit_mimo::rng::stream;
use onebit_mimo::{Error, Result};
use rand::Rng;

/// Label separating these streams from the simulation domains.
const DOMAIN: u64 = 0x5245_4749;
const MAX_DRAWS: u64 = 1000;
// relative singular-value floor; far above rounding so counts are robust
const GP_MARGIN: f64 = 1e-4;
/// Random instances are redrawn until every vertex lies this close to the
/// origin, which keeps cell enumeration inside a modest ball.
pub const MAX_VERTEX_RADIUS: f64 = 1000.0;

/// Kinds of random arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    General,
    Central,
    /// `l` directions in general position, each with `d` parallel copies.
    Parallel { l: usize, d: usize },
}

impl Family {
    fn code(self) -> u64 {
        match self {
            Family::General => 1,
            Family::Central => 2,
            Family::Parallel { .. } => 3,
        }
    }
}

/// Largest norm of a point where `m` hyperplanes with independent normals
/// meet; 0 when there is no such point.
pub fn vertex_radius(arr: &HyperplaneArrangement) -> f64 {
    let m = arr.dim();
    let mut worst = 0.0_f64;
    for rows in (0..arr.count()).combinations(m) {
        let a = DMatrix::from_fn(m, m, |i, j| arr.normals()[(rows[i], j)]);
        let b = DVector::from_fn(m, |i, _| arr.offsets()[rows[i]]);
        if a.clone().singular_values().min() < 1e-9 * a.norm() {
            continue;
        }
        if let Some(x) = a.lu().solve(&b) {
            worst = worst.max(x.norm());
        }
    }
    worst
}

/// Ball radius large enough for enumeration to see every cell of `arr`.
pub fn enumeration_radius(arr: &HyperplaneArrangement) -> f64 {
    2.0 * vertex_radius(arr) + 1.0
}

fn unit_direction(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// A seeded arrangement of `n` hyperplanes in `R^m` (`n = l d` for the
/// parallel family), redrawn until its normals are in general position and
/// its vertices are within [`MAX_VERTEX_RADIUS`].
pub fn random_arrangement(family: Family, m: usize, n: usize, seed: u64) -> Result<HyperplaneArrangement> {
    for draw in 0..MAX_DRAWS {
        let mut rng = stream(seed, &[DOMAIN, family.code(), m as u64, n as u64, draw]);
        let rows: Vec<(Vec<f64>, f64)> = match family {
            Family::General => (0..n)
                .map(|_| (unit_direction(&mut rng, m), rng.random_range(-2.0..2.0)))
                .collect(),
            Family::Central => (0..n).map(|_| (unit_direction(&mut rng, m), 0.0)).collect(),
            Family::Parallel { l, d } => {
                let mut rows = Vec::with_capacity(l * d);
                for _ in 0..l {
                    let dir = unit_direction(&mut rng, m);
                    let start = rng.random_range(-2.0..0.0);
                    let mut b = start;
                    for _ in 0..d {
                        rows.push((dir.clone(), b));
                        b += rng.random_range(0.5..1.5);
                    }
                }
                rows
            }
        };
        let arr = HyperplaneArrangement::from_rows(m, &rows)?;
        let directions = match family {
            Family::Parallel { l, d } => {
                let firsts: Vec<_> = (0..l).map(|c| rows[c * d].clone()).collect();
                HyperplaneArrangement::from_rows(m, &firsts)?
            }
            _ => arr.clone(),
        };
        if !is_general_position(&directions, GP_MARGIN)? {
            continue;
        }
        if vertex_radius(&arr) <= MAX_VERTEX_RADIUS {
            return Ok(arr);
        }
    }
    Err(Error::InvalidInput(format!(
        "no well-conditioned {m}-dimensional arrangement of {n} hyperplanes after {MAX_DRAWS} draws"
    )))
}

fn slanted_normals() -> Vec<Vec<f64>> {
    (0..4)
        .map(|k| {
            let theta = k as f64 * PI / 4.0 + PI / 8.0;
            vec![theta.cos(), theta.sin()]
        })
        .collect()
}

/// Selection: four parallel thresholds on one axis.
pub fn select_layout() -> HyperplaneArrangement {
    let rows: Vec<_> = [-3.0, -1.0, 1.0, 3.0].iter().map(|&b| (vec![1.0, 0.0], b)).collect();
    HyperplaneArrangement::from_rows(2, &rows).expect("fixed layout")
}

/// Sign quantizers: four lines through the origin.
pub fn central_layout() -> HyperplaneArrangement {
    let rows: Vec<_> = slanted_normals().into_iter().map(|a| (a, 0.0)).collect();
    HyperplaneArrangement::from_rows(2, &rows).expect("fixed layout")
}

/// Two thresholds on each of two orthogonal axes.
pub fn grid_layout() -> HyperplaneArrangement {
    let rows = vec![
        (vec![1.0, 0.0], -1.0),
        (vec![1.0, 0.0], 1.0),
        (vec![0.0, 1.0], -1.0),
        (vec![0.0, 1.0], 1.0),
    ];
    HyperplaneArrangement::from_rows(2, &rows).expect("fixed layout")
}

/// Four lines in general position with offsets `-+ radius / 4`.
pub fn general_layout(radius: f64) -> HyperplaneArrangement {
    let rows: Vec<_> = slanted_normals()
        .into_iter()
        .enumerate()
        .map(|(k, a)| (a, if k % 2 == 0 { -radius / 4.0 } else { radius / 4.0 }))
        .collect();
    HyperplaneArrangement::from_rows(2, &rows).expect("fixed layout")
}

#[cfg(test)]
mod tests {
    use super::*;
    use onebit_mimo::geometry::enumerate_cells;

    #[test]
    fn layouts_have_expected_cells() {
        let count = |a: &HyperplaneArrangement| enumerate_cells(a, enumeration_radius(a)).unwrap().len();
        assert_eq!(count(&select_layout()), 5);
        assert_eq!(count(&central_layout()), 8);
        assert_eq!(count(&grid_layout()), 9);
        assert_eq!(count(&general_layout(32.0)), 11);
    }

    #[test]
    fn random_instances_are_seeded_and_bounded() {
        let a = random_arrangement(Family::General, 3, 6, 9).unwrap();
        assert_eq!(a, random_arrangement(Family::General, 3, 6, 9).unwrap());
        assert_ne!(a, random_arrangement(Family::General, 3, 6, 10).unwrap());
        assert!(vertex_radius(&a) <= MAX_VERTEX_RADIUS);

        let c = random_arrangement(Family::Central, 2, 5, 1).unwrap();
        assert!(c.offsets().iter().all(|b| *b == 0.0));
        assert_eq!(vertex_radius(&c), 0.0);

        let p = random_arrangement(Family::Parallel { l: 2, d: 3 }, 2, 6, 4).unwrap();
        assert_eq!(p.count(), 6);
        assert_eq!(p.normal(0), p.normal(2));
    }

    #[test]
    fn vertex_radius_of_a_square() {
        assert!((vertex_radius(&grid_layout()) - 2f64.sqrt()).abs() < 1e-12);
    }
}
