// SPDX-License-Identifier: Apache-2.0

//! The d⁻² Zipf degree sequence: `⌊nc/i²⌋` nodes of degree `i`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BISECTION_TOL: f64 = 1e-12;

/// Node counts per degree. Degree arithmetic is exact; only the Zipf
/// constant `c` is floating point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeSequence {
    n: u64,
    counts: BTreeMap<u32, u64>,
    c: f64,
}

impl DegreeSequence {
    /// Builds a sequence from explicit counts. Zero counts are dropped.
    pub fn from_counts(counts: impl IntoIterator<Item = (u32, u64)>, c: f64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (d, k) in counts {
            if k > 0 {
                *map.entry(d).or_insert(0) += k;
            }
        }
        let n = map.values().sum();
        let seq = DegreeSequence { n, counts: map, c };
        if !seq.degree_sum().is_multiple_of(2) {
            return Err(Error::invalid("degree sum is odd"));
        }
        Ok(seq)
    }

    /// Builds a sequence from a per-node degree list.
    pub fn from_degrees(degrees: &[u32], c: f64) -> Result<Self> {
        Self::from_counts(degrees.iter().map(|&d| (d, 1)), c)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    pub fn count(&self, degree: u32) -> u64 {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    pub fn degree_sum(&self) -> u64 {
        self.counts.iter().map(|(&d, &k)| d as u64 * k).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Per-node degrees, highest degree first. Node `i` of a generated graph
    /// gets `degrees()[i]`.
    pub fn degrees(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.n as usize);
        for (&d, &k) in self.counts.iter().rev() {
            out.extend(std::iter::repeat_n(d, k as usize));
        }
        out
    }

    /// `degree count` lines in ascending degree, preceded by a header comment.
    pub fn to_text(&self) -> String {
        let mut s = format!("# n={} c={}\n", self.n, self.c);
        for (d, k) in &self.counts {
            let _ = writeln!(s, "{d} {k}");
        }
        s
    }

    /// Parses the format written by [`DegreeSequence::to_text`]. The `c=`
    /// header is optional (defaults to NaN).
    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let mut c = f64::NAN;
        let mut counts = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                for tok in comment.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("c=") {
                        c = v.parse().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("bad zipf constant {v:?}"),
                        })?;
                    }
                }
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let (Some(d), Some(k), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected `degree count`".into(),
                });
            };
            let parse = |s: &str| {
                s.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("not a non-negative integer: {s:?}"),
                })
            };
            let d = parse(d)?;
            let d = u32::try_from(d).map_err(|_| Error::Parse {
                line: line_no,
                message: "degree too large".into(),
            })?;
            counts.push((d, parse(k)?));
        }
        Self::from_counts(counts, c)
    }
}

/// Closed-form statistics of a degree sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceStats {
    pub m: u64,
    pub avg_degree: f64,
    pub count_ge: Vec<ThresholdCount>,
}

/// Number of nodes with degree at least `delta·√n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCount {
    pub delta: f64,
    pub threshold: f64,
    pub count: u64,
}

fn zipf_total(n: u64, c: f64) -> u64 {
    let x = n as f64 * c;
    let mut total = 0u64;
    let mut i = 1u64;
    loop {
        let term = (x / (i * i) as f64).floor() as u64;
        if term == 0 {
            break;
        }
        total += term;
        i += 1;
    }
    total
}

/// Smallest `c` (to within 10⁻¹²) with `Σ_{i≥1} ⌊nc/i²⌋ ≥ n`.
///
/// The sum is a non-decreasing step function of `c`, so bisection on the
/// bracket `[0, 1]` converges to the first step reaching `n`. When the step
/// jumps over `n` the returned `c` overshoots; [`zipf_sequence`] absorbs the
/// surplus into the degree-1 count.
pub fn solve_zipf_constant(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("zipf sequence needs n >= 2, got {n}")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    debug_assert!(zipf_total(n, hi) >= n);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if zipf_total(n, mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The Zipf degree sequence on exactly `n` nodes with an even degree sum.
pub fn zipf_sequence(n: u64) -> Result<DegreeSequence> {
    let c = solve_zipf_constant(n)?;
    let x = n as f64 * c;
    let mut counts = BTreeMap::new();
    let mut i = 2u64;
    loop {
        let term = (x / (i * i) as f64).floor() as u64;
        if term == 0 {
            break;
        }
        counts.insert(i as u32, term);
        i += 1;
    }
    let higher: u64 = counts.values().sum();
    let full_ones = x.floor() as u64;
    let surplus = (full_ones + higher)
        .checked_sub(n)
        .ok_or_else(|| Error::Internal(format!("zipf constant {c} undershoots n={n}")))?;
    let mut ones = full_ones
        .checked_sub(surplus)
        .ok_or_else(|| Error::Internal(format!("surplus {surplus} exceeds degree-1 count")))?;
    let higher_sum: u64 = counts.iter().map(|(&d, &k)| d as u64 * k).sum();
    let mut zeros = 0u64;
    if (ones + higher_sum) % 2 == 1 {
        if ones == 0 {
            return Err(Error::Internal("cannot fix degree-sum parity".into()));
        }
        ones -= 1;
        zeros = 1;
    }
    counts.insert(1, ones);
    if zeros > 0 {
        counts.insert(0, zeros);
    }
    counts.retain(|_, k| *k > 0);
    let seq = DegreeSequence { n, counts, c };
    if seq.counts.values().sum::<u64>() != n || !seq.degree_sum().is_multiple_of(2) {
        return Err(Error::Internal(format!(
            "zipf sequence for n={n} violates its invariants"
        )));
    }
    Ok(seq)
}

/// Erdős–Gallai test. The input is sorted internally, so any order is accepted.
pub fn erdos_gallai_feasible(degrees: &[u64]) -> bool {
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let len = d.len();
    let total: u64 = d.iter().sum();
    if !total.is_multiple_of(2) {
        return false;
    }
    // suffix[i] = Σ_{j≥i} d[j]
    let mut suffix = vec![0u64; len + 1];
    for i in (0..len).rev() {
        suffix[i] = suffix[i + 1] + d[i];
    }
    // `ge` = number of entries ≥ k; shrinks as k grows.
    let mut ge = len;
    let mut prefix = 0u64;
    for k in 1..=len {
        prefix += d[k - 1];
        let kk = k as u64;
        while ge > 0 && d[ge - 1] < kk {
            ge -= 1;
        }
        let tail = if ge > k {
            (ge - k) as u64 * kk + suffix[ge]
        } else {
            suffix[k]
        };
        if prefix > kk * (kk - 1) + tail {
            return false;
        }
    }
    true
}

/// Exact edge count, average degree and, for each `delta`, the number of
/// nodes of degree at least `delta·√n`.
pub fn sequence_stats(seq: &DegreeSequence, deltas: &[f64]) -> SequenceStats {
    let sum = seq.degree_sum();
    let m = sum / 2;
    let avg_degree = if seq.n == 0 { 0.0 } else { sum as f64 / seq.n as f64 };
    let sqrt_n = (seq.n as f64).sqrt();
    let count_ge = deltas
        .iter()
        .map(|&delta| {
            let threshold = delta * sqrt_n;
            let count = seq
                .counts
                .iter()
                .filter(|(&d, _)| d as f64 >= threshold)
                .map(|(_, &k)| k)
                .sum();
            ThresholdCount {
                delta,
                threshold,
                count,
            }
        })
        .collect();
    SequenceStats {
        m,
        avg_degree,
        count_ge,
    }
}
