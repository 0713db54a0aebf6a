// SPDX-License-Identifier: Apache-2.0

//! Giant component and 2-core fractions of G(n, c₁/n) in the limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErCoreSolution {
    pub c1: f64,
    /// Root in (0, 1) of `t·e^{−t} = c₁·e^{−c₁}`.
    pub t: f64,
    /// Limiting giant-component fraction `1 − t/c₁`.
    pub b: f64,
}

impl ErCoreSolution {
    /// Limiting 2-core fraction of the giant component, `b(1−t)`.
    pub fn core_fraction(&self) -> f64 {
        self.b * (1.0 - self.t)
    }
}

pub fn solve_er_core(c1: f64) -> Result<ErCoreSolution> {
    if !(c1 > 1.0 && c1.is_finite()) {
        return Err(Error::invalid(format!("c1 must exceed 1, got {c1}")));
    }
    let target = c1 * (-c1).exp();
    // t·e^{−t} rises on (0, 1) to 1/e; a target within round-off of 1/e has
    // no root distinguishable from t = 1.
    if (-1f64).exp() - target < 1e-12 {
        return Err(Error::invalid(format!(
            "c1 = {c1} is too close to 1 to resolve the root"
        )));
    }
    let f = |t: f64| t * (-t).exp() - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(ErCoreSolution { c1, t, b: 1.0 - t / c1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_two_matches_grid_scan() {
        let s = solve_er_core(2.0).unwrap();
        let target = 2.0 * (-2.0f64).exp();
        // Independent grid scan over (0, 1).
        let grid = (1..1_000_000)
            .map(|i| i as f64 * 1e-6)
            .min_by(|a, b| {
                let da = (a * (-a).exp() - target).abs();
                let db = (b * (-b).exp() - target).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        assert!((s.t - grid).abs() < 2e-6, "{} vs {grid}", s.t);
        assert!((s.t * (-s.t).exp() - target).abs() < 1e-10);
        assert!((s.t - 0.406).abs() < 1e-3);
        assert!((s.b - 0.797).abs() < 1e-3);
        assert!((s.core_fraction() - 0.473).abs() < 1e-3);
    }

    #[test]
    fn large_c1_has_small_t() {
        let s = solve_er_core(12.0).unwrap();
        assert!(s.t < 1e-3);
        assert!(s.b > 0.9999);
    }

    #[test]
    fn domain_edges() {
        assert!(solve_er_core(1.0 + 1e-9).is_err());
        assert!(solve_er_core(1.0).is_err());
        assert!(solve_er_core(0.5).is_err());
        assert!(solve_er_core(f64::NAN).is_err());
    }
}
