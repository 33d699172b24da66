use itertools::Itertools;
use nalgebra::DMatrix;

use super::HyperplaneArrangement;
use crate::error::invalid;
use crate::Result;

/// Default relative singular-value threshold for [`is_general_position`].
pub const DEFAULT_GP_TOL: f64 = 1e-10;

/// General-position test: every subset of `k = min(n, m)` normals must have
/// rank `k`, certified by its smallest singular value exceeding
/// `tol * sigma_max(normals)`. The empty arrangement is trivially in
/// general position.
pub fn is_general_position(arr: &HyperplaneArrangement, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return invalid("general-position tolerance must be positive");
    }
    let n = arr.count();
    if n == 0 {
        return Ok(true);
    }
    let m = arr.dim();
    let k = n.min(m);
    let normals = arr.normals();
    let sigma_max = normals
        .clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b));
    let threshold = tol * sigma_max;

    for rows in (0..n).combinations(k) {
        let sub = DMatrix::from_fn(k, m, |i, j| normals[(rows[i], j)]);
        let smallest = sub
            .singular_values()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if !(smallest > threshold) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Groups hyperplanes whose normals are parallel (`|cos angle| >= 1 - tol`).
/// Groups are listed by their smallest member index.
pub fn parallel_classes(arr: &HyperplaneArrangement, tol: f64) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..arr.count() {
        let ai = arr.normals().row(i);
        let found = classes.iter_mut().find(|class| {
            let aj = arr.normals().row(class[0]);
            let cos = ai.dot(&aj) / (ai.norm() * aj.norm());
            cos.abs() >= 1.0 - tol
        });
        match found {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}
