//! Max-margin (Chebyshev-style) centers of cells intersected with a ball.
//!
//! The program is
//!
//! ```text
//! maximize eps  s.t.  s_i (a_i·x - b_i) >= eps |a_i|   for every i
//!                     |x|_2 <= R
//! ```
//!
//! The ball is replaced by a polytope of tangent half-spaces (64 facets in
//! the plane, 128 in 3D and above), refined with tangent cuts at any
//! optimum that still lies outside the ball. A final violation is removed
//! by radial scaling and the margin is recomputed at the returned point, so
//! reported margins are always attained.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{HyperplaneArrangement, SignVector};
use crate::error::invalid;
use crate::lp::Lp;
use crate::Result;

const MAX_CUTS: usize = 60;
const BALL_SLACK: f64 = 1e-10;

/// Scale-aware cutoff below which a max margin counts as infeasible.
pub(crate) fn feasibility_cutoff(arr: &HyperplaneArrangement) -> f64 {
    1e-9 * arr.scale()
}

/// Unit outward normals of the polytope that circumscribes the unit ball.
fn ball_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|k| {
                let (s, c) = (2.0 * PI * k as f64 / 64.0).sin_cos();
                vec![c, s]
            })
            .collect(),
        3 => {
            // Fibonacci lattice on the sphere
            let count = 128;
            let golden = PI * (3.0 - 5.0_f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let (s, c) = (golden * k as f64).sin_cos();
                    vec![r * c, r * s, z]
                })
                .collect()
        }
        _ => {
            let mut dirs = Vec::with_capacity(128.max(2 * dim));
            for axis in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut e = vec![0.0; dim];
                    e[axis] = sign;
                    dirs.push(e);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba11);
            while dirs.len() < 128 {
                let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                dirs.push(v.iter().map(|x| x / norm).collect());
            }
            dirs
        }
    }
}

struct MarginProblem<'a> {
    arr: &'a HyperplaneArrangement,
    signs: &'a [i8],
    radius: f64,
    cuts: Vec<Vec<f64>>,
}

impl<'a> MarginProblem<'a> {
    fn new(arr: &'a HyperplaneArrangement, signs: &'a [i8], radius: f64) -> Self {
        Self {
            arr,
            signs,
            radius,
            cuts: ball_directions(arr.dim()),
        }
    }

    fn margin_at(&self, x: &[f64]) -> f64 {
        self.signs
            .iter()
            .enumerate()
            .map(|(i, &s)| f64::from(s) * self.arr.signed_distance(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Hyperplane `i` as a `G x <= h` row (normalized, no epsilon column).
    fn hyperplane_row(&self, i: usize) -> (Vec<f64>, f64) {
        let s = f64::from(self.signs[i]);
        let norm = self.arr.normal_norm(i);
        let row = self.arr.normal(i).iter().map(|a| -s * a / norm).collect();
        (row, -s * self.arr.offsets()[i] / norm)
    }

    fn solve_max_margin(&mut self) -> Result<Vec<f64>> {
        let m = self.arr.dim();
        let k = self.signs.len();
        let cap = self.radius
            + (0..k)
                .map(|i| self.arr.offsets()[i].abs() / self.arr.normal_norm(i))
                .fold(0.0, f64::max)
            + 1.0;
        let mut start_eps = cap;
        let mut base = Lp::new(m + 1);
        for i in 0..k {
            let (mut row, rhs) = self.hyperplane_row(i);
            row.push(1.0);
            base.push(&row, rhs);
            start_eps = start_eps.min(rhs);
        }
        let mut cap_row = vec![0.0; m + 1];
        cap_row[m] = 1.0;
        base.push(&cap_row, cap);
        let mut start = vec![0.0; m + 1];
        start[m] = start_eps;
        let mut objective = vec![0.0; m + 1];
        objective[m] = 1.0;

        for round in 0..=MAX_CUTS {
            let mut lp = base.clone();
            for u in &self.cuts {
                let mut row = u.clone();
                row.push(0.0);
                lp.push(&row, self.radius);
            }
            let z = lp.maximize(&objective, &start)?;
            let x = &z[..m];
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= self.radius * (1.0 + BALL_SLACK) || round == MAX_CUTS {
                return Ok(x.to_vec());
            }
            self.cuts.push(x.iter().map(|v| v / norm).collect());
        }
        unreachable!("cut loop returns within MAX_CUTS + 1 rounds")
    }

    /// Among points keeping margin >= `target`, find one of least L1 norm.
    /// Used only to make centers canonical when the max-margin optimum is
    /// not unique.
    fn min_l1_with_margin(&self, from: &[f64], target: f64) -> Result<Vec<f64>> {
        let m = self.arr.dim();
        let mut lp = Lp::new(2 * m);
        for i in 0..self.signs.len() {
            let (mut row, rhs) = self.hyperplane_row(i);
            row.extend(std::iter::repeat(0.0).take(m));
            lp.push(&row, rhs - target);
        }
        for u in &self.cuts {
            let mut row = u.clone();
            row.extend(std::iter::repeat(0.0).take(m));
            lp.push(&row, self.radius);
        }
        for j in 0..m {
            let mut row = vec![0.0; 2 * m];
            row[j] = 1.0;
            row[m + j] = -1.0;
            lp.push(&row, 0.0);
            row[j] = -1.0;
            lp.push(&row, 0.0);
        }
        let mut start = from.to_vec();
        start.extend(from.iter().map(|v| v.abs()));
        let mut objective = vec![0.0; 2 * m];
        for t in &mut objective[m..] {
            *t = -1.0;
        }
        let z = lp.maximize(&objective, &start)?;
        Ok(z[..m].to_vec())
    }

    fn project(&self, mut x: Vec<f64>) -> Vec<f64> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > self.radius {
            for v in &mut x {
                *v *= self.radius / norm;
            }
        }
        x
    }
}

/// Max-margin point for the first `signs.len()` hyperplanes inside the ball
/// of radius `radius`. Returns the point and its exact margin, which may be
/// nonpositive when the prefix is infeasible.
pub(crate) fn max_margin_prefix(
    arr: &HyperplaneArrangement,
    signs: &[i8],
    radius: f64,
) -> Result<(Vec<f64>, f64)> {
    if signs.is_empty() {
        return Ok((vec![0.0; arr.dim()], f64::INFINITY));
    }
    let mut problem = MarginProblem::new(arr, signs, radius);
    let x = problem.solve_max_margin()?;
    let x = problem.project(x);
    let margin = problem.margin_at(&x);
    Ok((x, margin))
}

/// Center of the largest ball (in normalized distance) inside the cell
/// `sv` and within `|x| <= ball_radius`. Returns `None` when that cell does
/// not meet the ball with positive margin. Ties between optimal centers are
/// broken toward the smallest L1 norm.
pub fn max_margin_center(
    arr: &HyperplaneArrangement,
    sv: &SignVector,
    ball_radius: f64,
) -> Result<Option<(DVector<f64>, f64)>> {
    if !(ball_radius > 0.0) {
        return invalid("ball radius must be positive");
    }
    if sv.len() != arr.count() {
        return invalid(format!(
            "sign vector has {} entries for {} hyperplanes",
            sv.len(),
            arr.count()
        ));
    }
    if sv.is_empty() {
        return Ok(Some((DVector::zeros(arr.dim()), f64::INFINITY)));
    }
    let mut problem = MarginProblem::new(arr, sv.as_slice(), ball_radius);
    let raw = problem.solve_max_margin()?;
    let x = problem.project(raw);
    let margin = problem.margin_at(&x);
    if margin <= feasibility_cutoff(arr) {
        return Ok(None);
    }

    let target = margin - 1e-10 * (1.0 + margin.abs());
    let (x, margin) = match problem.min_l1_with_margin(&x, target) {
        Ok(y) => {
            let y = problem.project(y);
            let my = problem.margin_at(&y);
            if my >= target - 1e-9 * (1.0 + margin.abs()) {
                (y, my)
            } else {
                (x, margin)
            }
        }
        Err(_) => (x, margin),
    };
    Ok(Some((DVector::from_vec(x), margin)))
}
