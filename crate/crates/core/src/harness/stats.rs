// SPDX-License-Identifier: Apache-2.0

//! Small statistics helpers shared by reports and the acceptance suite.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Unbiased sample standard deviation; `None` below two observations.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Two-sided 95% Student-t interval for the mean. A single observation
/// gives a zero-width interval.
pub fn ci95(xs: &[f64]) -> Option<(f64, f64)> {
    let m = mean(xs)?;
    let Some(sd) = sample_sd(xs) else {
        return Some((m, m));
    };
    let t = StudentsT::new(0.0, 1.0, (xs.len() - 1) as f64).ok()?.inverse_cdf(0.975);
    let half = t * sd / (xs.len() as f64).sqrt();
    Some((m - half, m + half))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts to category probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::invalid(
            "observed and expected must be non-empty and of equal length",
        ));
    }
    let total: u64 = observed.iter().sum();
    let statistic: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = observed.len() - 1;
    if df == 0 {
        return Ok(ChiSquareTest {
            statistic: 0.0,
            df,
            p_value: 1.0,
        });
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        df,
        p_value: dist.sf(statistic),
    })
}
