//! Closed-form region counts for arrangements in general position.
//!
//! All counts use exact integer arithmetic. Hyperplane counts are capped at
//! 63 so every count of at most `2^n` regions fits in a `u64`; products
//! that still overflow are reported as [`Error::Overflow`].

use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::{Error, Result};

pub const MAX_HYPERPLANES: u32 = 63;

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // exact: each partial product is itself a binomial coefficient
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn check_n(n: u32) -> Result<()> {
    if n > MAX_HYPERPLANES {
        return invalid(format!(
            "at most {MAX_HYPERPLANES} hyperplanes supported, got {n}"
        ));
    }
    Ok(())
}

fn narrow(v: u128, what: &str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Overflow(what.to_string()))
}

/// Maximum number of regions of `n` affine hyperplanes in `R^m`:
/// `sum_{i=0}^{m} C(n, i)`.
pub fn r_general(m: u32, n: u32) -> Result<u64> {
    if m == 0 {
        return invalid("dimension must be at least 1");
    }
    check_n(n)?;
    let total: u128 = (0..=m.min(n)).map(|i| binomial(n, i)).sum();
    narrow(total, "r_general")
}

/// Maximum number of regions of `n` hyperplanes through the origin in
/// `R^m`: `2 sum_{i=0}^{m-1} C(n-1, i)`.
pub fn r_central(n: u32, m: u32) -> Result<u64> {
    if n == 0 || m == 0 {
        return invalid("central count needs n >= 1 and m >= 1");
    }
    check_n(n)?;
    let half: u128 = (0..m).map(|i| binomial(n - 1, i)).sum();
    narrow(2 * half, "r_central")
}

/// Maximum number of regions when each of `l` hyperplanes in general
/// position is replaced by `d` parallel copies:
/// `sum_{i=0}^{m} C(l, i) d^i`.
pub fn r_parallel(m: u32, l: u32, d: u32) -> Result<u64> {
    if m == 0 || l == 0 || d == 0 {
        return invalid("parallel count needs m, l, d >= 1");
    }
    check_n(l)?;
    let mut total: u128 = 0;
    for i in 0..=m.min(l) {
        let term = u128::from(d)
            .checked_pow(i)
            .and_then(|p| p.checked_mul(binomial(l, i)))
            .ok_or_else(|| Error::Overflow(format!("r_parallel({m}, {l}, {d})")))?;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Overflow(format!("r_parallel({m}, {l}, {d})")))?;
    }
    narrow(total, "r_parallel")
}

/// A region-count question: `hyperplanes` in general position in `R^dim`,
/// or `l` classes of `d` parallel hyperplanes when `parallel_classes` is
/// set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCountQuery {
    pub dim: u32,
    pub hyperplanes: u32,
    pub parallel_classes: Option<(u32, u32)>,
}

impl RegionCountQuery {
    pub fn count(&self) -> Result<u64> {
        match self.parallel_classes {
            None => r_general(self.dim, self.hyperplanes),
            Some((l, d)) => {
                if u64::from(l) * u64::from(d) != u64::from(self.hyperplanes) {
                    return invalid(format!(
                        "{} hyperplanes cannot form {l} classes of {d}",
                        self.hyperplanes
                    ));
                }
                r_parallel(self.dim, l, d)
            }
        }
    }
}
