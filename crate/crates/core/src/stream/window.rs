// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Reservoir, TimestampedEdge};
use crate::error::{Error, Result};

/// Sliding windows of length `tau` advancing by `lambda` ticks. Window
/// `i ≥ 1` covers the closed interval `[λ(i−1), τ + λ(i−1)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    tau: u64,
    lambda: u64,
}

impl WindowConfig {
    pub fn new(tau: u64, lambda: u64) -> Result<Self> {
        if lambda == 0 || lambda >= tau || !tau.is_multiple_of(lambda) {
            return Err(Error::invalid(format!(
                "window needs 0 < lambda < tau with lambda | tau, got tau={tau} lambda={lambda}"
            )));
        }
        Ok(WindowConfig { tau, lambda })
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// Number of window indices per window length (`τ/λ`); windows whose
    /// indices differ by at least this much share at most an endpoint tick.
    pub fn stride(&self) -> usize {
        (self.tau / self.lambda) as usize
    }

    pub fn start(&self, index: usize) -> u64 {
        self.lambda * (index as u64 - 1)
    }

    pub fn end(&self, index: usize) -> u64 {
        self.tau + self.start(index)
    }

    /// First window whose interval contains `ts`.
    pub fn first_containing(&self, ts: u64) -> usize {
        if ts <= self.tau {
            1
        } else {
            ((ts - self.tau).div_ceil(self.lambda) + 1) as usize
        }
    }

    /// Last window whose interval contains `ts`.
    pub fn last_containing(&self, ts: u64) -> usize {
        (ts / self.lambda + 1) as usize
    }
}

/// Incremental per-window sampling: one independent reservoir per open
/// window, at most `τ/λ + 1` open at a time.
#[derive(Debug)]
pub struct WindowSampler {
    cfg: WindowConfig,
    capacity: usize,
    seed: u64,
    open: VecDeque<(usize, Reservoir)>,
    next_index: usize,
    last_ts: Option<u64>,
}

impl WindowSampler {
    pub fn new(cfg: WindowConfig, capacity: usize, seed: u64) -> Self {
        WindowSampler {
            cfg,
            capacity,
            seed,
            open: VecDeque::new(),
            next_index: 1,
            last_ts: None,
        }
    }

    /// Feeds one edge and returns the windows that closed before it.
    pub fn push(&mut self, e: TimestampedEdge) -> Result<Vec<(usize, Reservoir)>> {
        if let Some(last) = self.last_ts {
            if e.ts < last {
                return Err(Error::MalformedStream(format!(
                    "timestamp {} after {last} is decreasing",
                    e.ts
                )));
            }
        }
        self.last_ts = Some(e.ts);
        let newest = self.cfg.last_containing(e.ts);
        while self.next_index <= newest {
            let r = Reservoir::with_stream(self.capacity, self.seed, self.next_index as u64);
            self.open.push_back((self.next_index, r));
            self.next_index += 1;
        }
        let mut closed = Vec::new();
        while let Some((idx, _)) = self.open.front() {
            if self.cfg.end(*idx) < e.ts {
                closed.push(self.open.pop_front().expect("front exists"));
            } else {
                break;
            }
        }
        for (_, r) in self.open.iter_mut() {
            r.offer(e);
        }
        Ok(closed)
    }

    /// Flushes the windows up to the first one whose right end reaches the
    /// last timestamp; later windows would only repeat the tail.
    pub fn finish(mut self) -> Vec<(usize, Reservoir)> {
        let Some(last) = self.last_ts else {
            return Vec::new();
        };
        let final_index = self.cfg.first_containing(last);
        self.open.drain(..).filter(|(i, _)| *i <= final_index).collect()
    }
}

/// Runs a whole stream through a [`WindowSampler`].
pub fn window_reservoirs<I>(stream: I, cfg: WindowConfig, capacity: usize, seed: u64) -> Result<Vec<(usize, Reservoir)>>
where
    I: IntoIterator<Item = TimestampedEdge>,
{
    let mut sampler = WindowSampler::new(cfg, capacity, seed);
    let mut out = Vec::new();
    for e in stream {
        out.extend(sampler.push(e)?);
    }
    out.extend(sampler.finish());
    Ok(out)
}
