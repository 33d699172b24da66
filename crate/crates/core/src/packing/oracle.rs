//! Exhaustive grid-restricted search for the largest separable packing of a
//! planar arrangement.
//!
//! Each grid candidate is reduced to its profile: for every hyperplane, the
//! side it lies on when its distance is at least 1, or 0 otherwise. Two
//! candidates are compatible exactly when some coordinate has opposite
//! nonzero signs. A profile whose nonzero entries are contained in another
//! profile is dominated (swapping it for the larger one never breaks a
//! clique), so only maximal profiles enter the clique search.

use std::collections::BTreeSet;

use super::PACKING_TOL;
use crate::error::invalid;
use crate::geometry::HyperplaneArrangement;
use crate::Result;

pub const DEFAULT_GRID_STEP: f64 = 0.25;

const MAX_RADIUS: f64 = 8.0;

type Profile = Vec<i8>;

fn compatible(p: &Profile, q: &Profile) -> bool {
    p.iter().zip(q).any(|(a, b)| a * b < 0)
}

fn dominates(p: &Profile, q: &Profile) -> bool {
    p.iter().zip(q).all(|(a, b)| *b == 0 || a == b)
}

/// Largest set of grid points `c` with `|c| <= r - 1` that are pairwise
/// separated by some hyperplane at distance at least 1 from both. Planar
/// arrangements, `r <= 8` and `0 < grid_step <= 0.25` only.
pub fn r_ssps_oracle(arr: &HyperplaneArrangement, r: f64, grid_step: f64) -> Result<usize> {
    if arr.dim() != 2 {
        return invalid(format!("oracle is planar only, got dimension {}", arr.dim()));
    }
    if !(r > 0.0 && r <= MAX_RADIUS) {
        return invalid(format!("oracle radius must lie in (0, {MAX_RADIUS}], got {r}"));
    }
    if !(grid_step > 0.0 && grid_step <= DEFAULT_GRID_STEP) {
        return invalid(format!("grid step must lie in (0, {DEFAULT_GRID_STEP}], got {grid_step}"));
    }
    let inner = r - 1.0;
    if inner < 0.0 {
        return Ok(0);
    }

    let reach = (inner / grid_step).floor() as i64;
    let mut profiles = BTreeSet::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            let c = [i as f64 * grid_step, j as f64 * grid_step];
            if c[0].hypot(c[1]) > inner + 1e-9 {
                continue;
            }
            let profile: Profile = (0..arr.count())
                .map(|h| {
                    let d = arr.signed_distance(h, &c);
                    if d.abs() < 1.0 - PACKING_TOL {
                        0
                    } else if d > 0.0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            profiles.insert(profile);
        }
    }

    let all: Vec<Profile> = profiles.into_iter().collect();
    let maximal: Vec<&Profile> = all
        .iter()
        .filter(|p| !all.iter().any(|q| q != *p && dominates(q, p)))
        .collect();
    let adjacency: Vec<Vec<bool>> = maximal
        .iter()
        .map(|p| maximal.iter().map(|q| compatible(p, q)).collect())
        .collect();
    Ok(max_clique(&adjacency))
}

fn max_clique(adj: &[Vec<bool>]) -> usize {
    let mut order: Vec<usize> = (0..adj.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].iter().filter(|&&e| e).count()));
    let mut best = 0;
    expand(adj, 0, order, &mut best);
    best
}

// Branch and bound with a greedy-colouring upper bound.
fn expand(adj: &[Vec<bool>], size: usize, candidates: Vec<usize>, best: &mut usize) {
    if candidates.is_empty() {
        *best = (*best).max(size);
        return;
    }
    let (ordered, colours) = colour(adj, &candidates);
    for k in (0..ordered.len()).rev() {
        if size + colours[k] <= *best {
            return;
        }
        let v = ordered[k];
        let next: Vec<usize> = ordered[..k].iter().copied().filter(|&u| adj[v][u]).collect();
        expand(adj, size + 1, next, best);
    }
}

fn colour(adj: &[Vec<bool>], candidates: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in candidates {
        match classes.iter_mut().find(|c| c.iter().all(|&u| !adj[v][u])) {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut ordered = Vec::with_capacity(candidates.len());
    let mut bounds = Vec::with_capacity(candidates.len());
    for (k, class) in classes.into_iter().enumerate() {
        for v in class {
            ordered.push(v);
            bounds.push(k + 1);
        }
    }
    (ordered, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::pack_margin;

    #[test]
    fn trivial_instances() {
        let empty = HyperplaneArrangement::empty(2).unwrap();
        assert_eq!(r_ssps_oracle(&empty, 8.0, 0.25).unwrap(), 1);
        let line = HyperplaneArrangement::from_rows(2, &[(vec![1.0, 1.0], 0.0)]).unwrap();
        assert_eq!(r_ssps_oracle(&line, 3.0, 0.25).unwrap(), 2);
        assert_eq!(r_ssps_oracle(&line, 0.5, 0.25).unwrap(), 0);
    }

    #[test]
    fn rejects_out_of_scope_instances() {
        let line = HyperplaneArrangement::from_rows(2, &[(vec![1.0, 0.0], 0.0)]).unwrap();
        assert!(r_ssps_oracle(&line, 9.0, 0.25).is_err());
        assert!(r_ssps_oracle(&line, 3.0, 0.5).is_err());
        let plane = HyperplaneArrangement::from_rows(3, &[(vec![1.0, 0.0, 0.0], 0.0)]).unwrap();
        assert!(r_ssps_oracle(&plane, 3.0, 0.25).is_err());
    }

    #[test]
    fn five_slabs_exact() {
        let rows: Vec<_> = [-3.0, -1.0, 1.0, 3.0].iter().map(|&b| (vec![1.0, 0.0], b)).collect();
        let arr = HyperplaneArrangement::from_rows(2, &rows).unwrap();
        assert_eq!(r_ssps_oracle(&arr, 5.0, 0.25).unwrap(), 5);
    }

    // The weak pairwise condition can beat the per-cell one: three
    // concurrent lines with r = 2.5 admit no point at distance 1 from all
    // of them, yet pairs across single lines still fit.
    #[test]
    fn pairwise_condition_can_exceed_per_cell() {
        let rows: Vec<_> = [0.0f64, 60.0, 120.0]
            .iter()
            .map(|t| {
                let (s, c) = t.to_radians().sin_cos();
                (vec![c, s], 0.0)
            })
            .collect();
        let arr = HyperplaneArrangement::from_rows(2, &rows).unwrap();
        let oracle = r_ssps_oracle(&arr, 2.5, 0.25).unwrap();
        let packed = pack_margin(&arr, 2.5).unwrap().len();
        assert!(oracle >= packed);
        assert!(oracle >= 2);
    }

    #[test]
    fn clique_search_on_known_graphs() {
        // 5-cycle has clique number 2, complete graph on 4 has 4
        let cycle: Vec<Vec<bool>> = (0..5)
            .map(|i| (0..5).map(|j| (i + 1) % 5 == j || (j + 1) % 5 == i).collect())
            .collect();
        assert_eq!(max_clique(&cycle), 2);
        let complete: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i != j).collect()).collect();
        assert_eq!(max_clique(&complete), 4);
        assert_eq!(max_clique(&[]), 0);
    }
}
