//! Affine hyperplane arrangements `{x : a_i·x = b_i}` in `R^m` and the
//! open cells (regions) they cut out.

mod cells;
mod margin;
mod position;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::Result;

pub use cells::{enumerate_cells, enumerate_cells_with};
pub use margin::max_margin_center;
pub use position::{is_general_position, parallel_classes, DEFAULT_GP_TOL};

/// A finite set of affine hyperplanes in `R^dim`, stored as the rows of a
/// normal matrix plus an offset vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneArrangement {
    normals: DMatrix<f64>,
    offsets: DVector<f64>,
}

impl HyperplaneArrangement {
    /// Builds an arrangement, rejecting zero-norm normals, non-finite
    /// entries and mismatched shapes.
    pub fn new(normals: DMatrix<f64>, offsets: DVector<f64>) -> Result<Self> {
        if normals.ncols() == 0 {
            return invalid("arrangement dimension must be positive");
        }
        if normals.nrows() != offsets.len() {
            return invalid(format!(
                "{} normals but {} offsets",
                normals.nrows(),
                offsets.len()
            ));
        }
        if normals.iter().chain(offsets.iter()).any(|v| !v.is_finite()) {
            return invalid("arrangement entries must be finite");
        }
        for (i, row) in normals.row_iter().enumerate() {
            if row.norm() == 0.0 {
                return invalid(format!("hyperplane {i} has a zero normal"));
            }
        }
        Ok(Self { normals, offsets })
    }

    /// Convenience constructor from `(normal, offset)` pairs.
    pub fn from_rows(dim: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut normals = DMatrix::zeros(rows.len(), dim);
        let mut offsets = DVector::zeros(rows.len());
        for (i, (a, b)) in rows.iter().enumerate() {
            if a.len() != dim {
                return invalid(format!(
                    "hyperplane {i} has {} coefficients, expected {dim}",
                    a.len()
                ));
            }
            for (j, v) in a.iter().enumerate() {
                normals[(i, j)] = *v;
            }
            offsets[i] = *b;
        }
        Self::new(normals, offsets)
    }

    /// The arrangement with no hyperplanes: a single cell, all of `R^dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(0, dim), DVector::zeros(0))
    }

    pub fn normals(&self) -> &DMatrix<f64> {
        &self.normals
    }

    pub fn offsets(&self) -> &DVector<f64> {
        &self.offsets
    }

    pub fn dim(&self) -> usize {
        self.normals.ncols()
    }

    pub fn count(&self) -> usize {
        self.normals.nrows()
    }

    pub fn normal(&self, i: usize) -> Vec<f64> {
        self.normals.row(i).iter().copied().collect()
    }

    pub fn normal_norm(&self, i: usize) -> f64 {
        self.normals.row(i).norm()
    }

    /// `(a_i·x - b_i) / |a_i|`.
    pub fn signed_distance(&self, i: usize, x: &[f64]) -> f64 {
        let row = self.normals.row(i);
        let dot: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum();
        (dot - self.offsets[i]) / row.norm()
    }

    /// Sign pattern of a point; points on a hyperplane count as `+1`.
    pub fn sign_vector_of(&self, x: &[f64]) -> SignVector {
        SignVector(
            (0..self.count())
                .map(|i| if self.signed_distance(i, x) >= 0.0 { 1 } else { -1 })
                .collect(),
        )
    }

    /// Smallest signed slack `s_i (a_i·x - b_i) / |a_i|` over all
    /// hyperplanes; `+inf` for the empty arrangement.
    pub fn margin_of(&self, signs: &SignVector, x: &[f64]) -> f64 {
        signs
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &s)| f64::from(s) * self.signed_distance(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Reorders hyperplanes: row `k` of the result is row `perm[k]` here.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return invalid("not a permutation of the hyperplane indices");
        }
        let normals = DMatrix::from_fn(n, self.dim(), |i, j| self.normals[(perm[i], j)]);
        let offsets = DVector::from_fn(n, |i, _| self.offsets[perm[i]]);
        Self::new(normals, offsets)
    }

    /// Scales every offset by `factor`, which scales the whole picture
    /// about the origin.
    pub fn with_scaled_offsets(&self, factor: f64) -> Result<Self> {
        Self::new(self.normals.clone(), &self.offsets * factor)
    }

    /// Largest `|b_i| + |a_i|` scale used by feasibility cutoffs.
    pub(crate) fn scale(&self) -> f64 {
        let max_b = self.offsets.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
        let max_a = (0..self.count()).fold(0.0_f64, |m, i| m.max(self.normal_norm(i)));
        max_b + max_a
    }
}

/// A `±1` pattern, one entry per hyperplane. Ordered lexicographically with
/// `-1 < +1`, which is the canonical order for cell lists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return invalid("sign vector entries must be +1 or -1");
        }
        Ok(Self(signs))
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Index with bit `j` set iff entry `j` is `+1`.
    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .fold(0, |acc, (j, _)| acc | (1 << j))
    }

    pub fn from_index(index: usize, len: usize) -> Self {
        Self((0..len).map(|j| if index >> j & 1 == 1 { 1 } else { -1 }).collect())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// One nonempty open region of an arrangement together with an interior
/// witness point and the normalized slack of that witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub sign_vector: SignVector,
    pub witness: DVector<f64>,
    pub margin: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_normal_and_shape_mismatch() {
        let err = HyperplaneArrangement::from_rows(2, &[(vec![1.0, 0.0], 0.0), (vec![0.0, 0.0], 1.0)]);
        assert!(err.is_err());
        let err = HyperplaneArrangement::new(DMatrix::zeros(2, 2), DVector::zeros(3));
        assert!(err.is_err());
        assert!(HyperplaneArrangement::empty(0).is_err());
        assert_eq!(HyperplaneArrangement::empty(3).unwrap().count(), 0);
    }

    #[test]
    fn sign_vector_index_roundtrip() {
        let sv = SignVector::new(vec![1, -1, 1, 1]).unwrap();
        assert_eq!(sv.to_index(), 0b1101);
        assert_eq!(SignVector::from_index(0b1101, 4), sv);
        assert_eq!(sv.to_string(), "+-++");
        assert!(SignVector::new(vec![0]).is_err());
    }

    #[test]
    fn permutation_validation() {
        let arr = HyperplaneArrangement::from_rows(1, &[(vec![1.0], 0.0), (vec![1.0], 1.0)]).unwrap();
        assert!(arr.permuted(&[0, 0]).is_err());
        let p = arr.permuted(&[1, 0]).unwrap();
        assert_eq!(p.offsets()[0], 1.0);
    }
}
