//! Cell enumeration by depth-first extension of sign prefixes.
//!
//! A node at depth `k` holds a sign pattern for the first `k` hyperplanes
//! and a witness point that satisfies it with margin above the feasibility
//! cutoff. Each child either inherits the parent's witness (when the
//! witness already lies strictly on the child's side of hyperplane `k`) or
//! is decided by a max-margin program. Infeasible prefixes are pruned.

use nalgebra::DVector;

use super::margin::{feasibility_cutoff, max_margin_prefix};
use super::{Cell, HyperplaneArrangement, SignVector};
use crate::error::invalid;
use crate::{Exec, Result};

/// Depth down to which subtrees are forked onto the thread pool.
const FORK_DEPTH: usize = 6;

struct Search<'a> {
    arr: &'a HyperplaneArrangement,
    radius: f64,
    cutoff: f64,
    exec: Exec,
}

struct Node {
    signs: Vec<i8>,
    witness: Vec<f64>,
    margin: f64,
    // witness came from the max-margin program for exactly this prefix
    exact: bool,
}

impl Search<'_> {
    fn child(&self, node: &Node, sign: i8) -> Result<Option<Node>> {
        let depth = node.signs.len();
        let mut signs = node.signs.clone();
        signs.push(sign);
        let slack = f64::from(sign) * self.arr.signed_distance(depth, &node.witness);
        let inherited = slack.min(node.margin);
        if inherited >= self.cutoff {
            return Ok(Some(Node {
                signs,
                witness: node.witness.clone(),
                margin: inherited,
                exact: false,
            }));
        }
        let (witness, margin) = max_margin_prefix(self.arr, &signs, self.radius)?;
        if margin < self.cutoff {
            return Ok(None);
        }
        Ok(Some(Node {
            signs,
            witness,
            margin,
            exact: true,
        }))
    }

    fn leaf(&self, node: Node) -> Result<Cell> {
        let (witness, margin) = if node.exact {
            (node.witness, node.margin)
        } else {
            max_margin_prefix(self.arr, &node.signs, self.radius)?
        };
        Ok(Cell {
            sign_vector: SignVector(node.signs),
            witness: DVector::from_vec(witness),
            margin,
        })
    }

    fn explore(&self, node: Node) -> Result<Vec<Cell>> {
        if node.signs.len() == self.arr.count() {
            return Ok(vec![self.leaf(node)?]);
        }
        let depth = node.signs.len();
        let run = |sign: i8| -> Result<Vec<Cell>> {
            match self.child(&node, sign)? {
                Some(child) => self.explore(child),
                None => Ok(Vec::new()),
            }
        };
        let (neg, pos) = if depth < FORK_DEPTH {
            self.exec.join(|| run(-1), || run(1))
        } else {
            (run(-1), run(1))
        };
        let mut cells = neg?;
        cells.extend(pos?);
        Ok(cells)
    }
}

/// Enumerates every nonempty open cell of `arr`, one [`Cell`] per region,
/// sorted by sign vector. Witnesses are max-margin points inside the ball
/// of radius `10 * bound_radius`; cells that do not reach that ball are not
/// reported.
pub fn enumerate_cells(arr: &HyperplaneArrangement, bound_radius: f64) -> Result<Vec<Cell>> {
    enumerate_cells_with(arr, bound_radius, Exec::default())
}

pub fn enumerate_cells_with(
    arr: &HyperplaneArrangement,
    bound_radius: f64,
    exec: Exec,
) -> Result<Vec<Cell>> {
    if !(bound_radius > 0.0) || !bound_radius.is_finite() {
        return invalid("bound radius must be positive and finite");
    }
    for i in 0..arr.count() {
        if arr.normal_norm(i) == 0.0 {
            return invalid(format!("hyperplane {i} has a zero normal"));
        }
    }
    let search = Search {
        arr,
        radius: 10.0 * bound_radius,
        cutoff: feasibility_cutoff(arr),
        exec,
    };
    let root = Node {
        signs: Vec::new(),
        witness: vec![0.0; arr.dim()],
        margin: f64::INFINITY,
        exact: true,
    };
    let mut cells = search.explore(root)?;
    cells.sort_by(|a, b| a.sign_vector.cmp(&b.sign_vector));
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{r_central, r_general};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lines(angles_deg: &[f64], offsets: &[f64]) -> HyperplaneArrangement {
        let rows: Vec<_> = angles_deg
            .iter()
            .zip(offsets)
            .map(|(t, b)| {
                let (s, c) = t.to_radians().sin_cos();
                (vec![c, s], *b)
            })
            .collect();
        HyperplaneArrangement::from_rows(2, &rows).unwrap()
    }

    #[test]
    fn quadrants() {
        let arr = lines(&[0.0, 90.0], &[0.0, 0.0]);
        let cells = enumerate_cells(&arr, 1.0).unwrap();
        assert_eq!(cells.len(), 4);
    }

    #[test]
    fn four_general_lines_give_eleven() {
        let arr = lines(&[22.5, 67.5, 112.5, 157.5], &[-1.25, 1.25, -1.25, 1.25]);
        let cells = enumerate_cells(&arr, 5.0).unwrap();
        assert_eq!(cells.len(), 11);
    }

    #[test]
    fn four_concurrent_lines_give_eight() {
        let arr = lines(&[0.0, 45.0, 90.0, 135.0], &[0.0; 4]);
        let cells = enumerate_cells(&arr, 1.0).unwrap();
        assert_eq!(cells.len(), 8);
        // antipodal pairs
        for c in &cells {
            assert!(cells.iter().any(|d| d.sign_vector == c.sign_vector.negated()));
        }
    }

    #[test]
    fn witnesses_strictly_satisfy_their_cells() {
        let arr = lines(&[10.0, 50.0, 100.0, 170.0, 130.0], &[0.5, -1.0, 0.2, 1.5, -0.3]);
        for cell in enumerate_cells(&arr, 3.0).unwrap() {
            assert!(cell.margin > 0.0);
            for (i, &s) in cell.sign_vector.as_slice().iter().enumerate() {
                let d = f64::from(s) * arr.signed_distance(i, cell.witness.as_slice());
                assert!(d >= cell.margin - 1e-12);
            }
        }
    }

    #[test]
    fn empty_arrangement_has_one_cell() {
        let arr = HyperplaneArrangement::empty(3).unwrap();
        let cells = enumerate_cells(&arr, 1.0).unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].sign_vector.is_empty());
        assert!(enumerate_cells(&arr, 0.0).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let arr = lines(&[10.0, 50.0, 100.0, 170.0, 130.0, 75.0], &[0.5, -1.0, 0.2, 1.5, -0.3, 0.9]);
        let a = enumerate_cells_with(&arr, 3.0, Exec::Sequential).unwrap();
        let b = enumerate_cells_with(&arr, 3.0, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    fn random_arrangement(rng: &mut ChaCha8Rng, m: usize, n: usize, central: bool) -> HyperplaneArrangement {
        let rows: Vec<_> = (0..n)
            .map(|_| {
                let a: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
                let b = if central { 0.0 } else { rng.random_range(-1.0..1.0) };
                (a, b)
            })
            .collect();
        HyperplaneArrangement::from_rows(m, &rows).unwrap()
    }

    #[test]
    fn random_3d_counts_match_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 3..=6 {
            let arr = random_arrangement(&mut rng, 3, n, true);
            let cells = enumerate_cells(&arr, 1.0).unwrap();
            assert_eq!(cells.len() as u64, r_central(n as u32, 3).unwrap());
        }
        // affine, with a radius that covers every vertex
        let arr = random_arrangement(&mut rng, 3, 6, false);
        let cells = enumerate_cells(&arr, 1e3).unwrap();
        assert_eq!(cells.len() as u64, r_general(3, 6).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn row_order_only_permutes_sign_coordinates(seed in 0u64..10_000, n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let arr = random_arrangement(&mut rng, 2, n, false);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.reverse();
            perm.rotate_left(seed as usize % n);
            let permuted = arr.permuted(&perm).unwrap();
            let mut direct: Vec<Vec<i8>> = enumerate_cells(&arr, 1e3)
                .unwrap()
                .into_iter()
                .map(|c| perm.iter().map(|&p| c.sign_vector.as_slice()[p]).collect())
                .collect();
            let mut via: Vec<Vec<i8>> = enumerate_cells(&permuted, 1e3)
                .unwrap()
                .into_iter()
                .map(|c| c.sign_vector.as_slice().to_vec())
                .collect();
            direct.sort();
            via.sort();
            prop_assert_eq!(direct, via);
        }
    }
}
