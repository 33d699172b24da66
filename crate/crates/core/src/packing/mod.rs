//! Unit-sphere packings inside `S(0, r)` that are separable by an
//! arrangement: every pair of spheres lies in opposite closed half-spaces of
//! at least one hyperplane.
//!
//! [`pack_margin`] is the working solver. It places one sphere per cell at
//! that cell's max-margin center and keeps it when the center is at
//! distance at least 1 from every hyperplane, which is sufficient for
//! pairwise separability because distinct cells differ in some sign. The
//! count is therefore a certified lower bound on the largest separable
//! packing. [`r_ssps_oracle`] searches grid candidates exhaustively for
//! small planar instances.

mod oracle;

use nalgebra::DVector;

use crate::error::invalid;
use crate::geometry::{enumerate_cells_with, max_margin_center, HyperplaneArrangement, SignVector};
use crate::{Exec, Result};

pub use oracle::{r_ssps_oracle, DEFAULT_GRID_STEP};

/// Slack allowed when checking unit distances and the containing ball.
pub const PACKING_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct Packing {
    pub centers: Vec<DVector<f64>>,
    /// Cell of each center, in the same order.
    pub cells: Vec<SignVector>,
    pub outer_radius: f64,
    pub arrangement: HyperplaneArrangement,
}

impl Packing {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

pub fn pack_margin(arr: &HyperplaneArrangement, r: f64) -> Result<Packing> {
    pack_margin_with(arr, r, Exec::default())
}

pub fn pack_margin_with(arr: &HyperplaneArrangement, r: f64, exec: Exec) -> Result<Packing> {
    if !(r > 1.0) || !r.is_finite() {
        return invalid(format!("outer radius must exceed 1 (got {r}); no unit sphere fits"));
    }
    let cells = enumerate_cells_with(arr, r, exec)?;
    let placed = exec.map(&cells, |cell| {
        max_margin_center(arr, &cell.sign_vector, r - 1.0)
            .map(|found| found.filter(|(_, margin)| *margin >= 1.0 - PACKING_TOL))
    });
    let mut centers = Vec::new();
    let mut kept = Vec::new();
    for (cell, found) in cells.iter().zip(placed) {
        if let Some((center, _)) = found? {
            centers.push(center);
            kept.push(cell.sign_vector.clone());
        }
    }
    Ok(Packing {
        centers,
        cells: kept,
        outer_radius: r,
        arrangement: arr.clone(),
    })
}

/// `log2(max(1, |pack_margin(arr, r)|))`, a lower bound on
/// `log2 r_ssps(arr, r)`. Radii that cannot hold a unit sphere give 0.
pub fn log_r_ssps(arr: &HyperplaneArrangement, r: f64) -> Result<f64> {
    if r <= 1.0 {
        return Ok(0.0);
    }
    let count = pack_margin(arr, r)?.len().max(1);
    Ok((count as f64).log2())
}

/// A violated packing invariant, as reported by [`validate_packing`].
#[derive(Clone, Debug, PartialEq)]
pub enum PackingViolation {
    OutsideBall { center: usize, norm: f64 },
    NotSeparated { first: usize, second: usize },
}

/// Direct check of the two packing invariants: every center lies within
/// `r - 1` of the origin, and every pair is split by some hyperplane with
/// both centers at normalized distance at least 1 from it.
pub fn validate_packing(p: &Packing) -> std::result::Result<(), PackingViolation> {
    let arr = &p.arrangement;
    let limit = p.outer_radius - 1.0 + PACKING_TOL;
    for (i, c) in p.centers.iter().enumerate() {
        if c.norm() > limit {
            return Err(PackingViolation::OutsideBall {
                center: i,
                norm: c.norm(),
            });
        }
    }
    for i in 0..p.centers.len() {
        for j in i + 1..p.centers.len() {
            let (ci, cj) = (p.centers[i].as_slice(), p.centers[j].as_slice());
            let split = (0..arr.count()).any(|h| {
                let di = arr.signed_distance(h, ci);
                let dj = arr.signed_distance(h, cj);
                di.abs() >= 1.0 - PACKING_TOL
                    && dj.abs() >= 1.0 - PACKING_TOL
                    && di.signum() != dj.signum()
            });
            if !split {
                return Err(PackingViolation::NotSeparated { first: i, second: j });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertical_lines(xs: &[f64]) -> HyperplaneArrangement {
        let rows: Vec<_> = xs.iter().map(|&x| (vec![1.0, 0.0], x)).collect();
        HyperplaneArrangement::from_rows(2, &rows).unwrap()
    }

    fn grid_lines() -> HyperplaneArrangement {
        HyperplaneArrangement::from_rows(
            2,
            &[
                (vec![1.0, 0.0], -1.0),
                (vec![1.0, 0.0], 1.0),
                (vec![0.0, 1.0], -1.0),
                (vec![0.0, 1.0], 1.0),
            ],
        )
        .unwrap()
    }

    fn sorted_points(p: &Packing) -> Vec<(i64, i64)> {
        let mut pts: Vec<_> = p
            .centers
            .iter()
            .map(|c| ((c[0] * 1e6).round() as i64, (c[1] * 1e6).round() as i64))
            .collect();
        pts.sort();
        pts
    }

    #[test]
    fn five_slabs() {
        let p = pack_margin(&vertical_lines(&[-3.0, -1.0, 1.0, 3.0]), 5.0).unwrap();
        assert_eq!(p.len(), 5);
        let want: Vec<(i64, i64)> = [-4, -2, 0, 2, 4].iter().map(|&x| (x * 1_000_000, 0)).collect();
        assert_eq!(sorted_points(&p), want);
        validate_packing(&p).unwrap();
    }

    #[test]
    fn three_by_three_grid() {
        let p = pack_margin(&grid_lines(), 8.0_f64.sqrt() + 1.0).unwrap();
        assert_eq!(p.len(), 9);
        let mut want = Vec::new();
        for x in [-2i64, 0, 2] {
            for y in [-2i64, 0, 2] {
                want.push((x * 1_000_000, y * 1_000_000));
            }
        }
        want.sort();
        assert_eq!(sorted_points(&p), want);
        validate_packing(&p).unwrap();
        assert!((log_r_ssps(&grid_lines(), 8.0_f64.sqrt() + 1.0).unwrap() - 9f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn small_radius_cases() {
        let one = vertical_lines(&[0.0]);
        assert_eq!(pack_margin(&one, 1.5).unwrap().len(), 0);
        assert!(pack_margin(&one, 1.0).is_err());
        assert_eq!(log_r_ssps(&one, 0.5).unwrap(), 0.0);
        let empty = HyperplaneArrangement::empty(2).unwrap();
        assert_eq!(pack_margin(&empty, 3.0).unwrap().len(), 1);
        assert_eq!(log_r_ssps(&empty, 3.0).unwrap(), 0.0);
        assert!((log_r_ssps(&vertical_lines(&[-3.0, -1.0, 1.0, 3.0]), 5.0).unwrap() - 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn validator_catches_violations() {
        let arr = vertical_lines(&[0.0]);
        let mut p = pack_margin(&arr, 3.0).unwrap();
        assert_eq!(p.len(), 2);
        validate_packing(&p).unwrap();
        p.centers[1] = DVector::from_vec(vec![0.5, 0.0]);
        assert!(matches!(validate_packing(&p), Err(PackingViolation::NotSeparated { .. })));
        p.centers[1] = DVector::from_vec(vec![2.5, 0.0]);
        assert!(matches!(validate_packing(&p), Err(PackingViolation::OutsideBall { .. })));
    }

    #[test]
    fn monotone_in_radius() {
        let arr = HyperplaneArrangement::from_rows(
            2,
            &[
                (vec![1.0, 0.2], 0.5),
                (vec![-0.3, 1.0], -1.0),
                (vec![0.7, 0.7], 2.0),
                (vec![1.0, -0.8], -0.4),
            ],
        )
        .unwrap();
        let cells = crate::geometry::enumerate_cells(&arr, 8.0).unwrap().len();
        assert_eq!(cells, 11);
        let mut last = 0;
        for r in [1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 8.0, 12.0, 20.0] {
            let p = pack_margin(&arr, r).unwrap();
            validate_packing(&p).unwrap();
            assert!(p.len() >= last && p.len() <= cells);
            last = p.len();
        }
        // the bounded cells are too thin for a unit disk at any radius
        assert_eq!(last, 8);
    }
}
