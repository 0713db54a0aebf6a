// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TimestampedEdge;
use crate::types::Edge;

/// ChaCha keyed by (seed, stream); the draw for offer `i` lives at a fixed
/// word offset, so replays are identical however the input is buffered.
#[derive(Clone, Debug)]
struct PositionalRng {
    rng: ChaCha8Rng,
}

impl PositionalRng {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        PositionalRng { rng }
    }

    /// Uniform draw in `[0, bound)` tied to `position`. Multiply-shift on one
    /// 64-bit word; the bias is at most `bound / 2^64`.
    fn below(&mut self, position: u64, bound: u64) -> u64 {
        let word = u128::from(position) * 2;
        if self.rng.get_word_pos() != word {
            self.rng.set_word_pos(word);
        }
        let x = self.rng.next_u64();
        ((u128::from(x) * u128::from(bound)) >> 64) as u64
    }
}

/// Fixed-capacity uniform sample of an edge stream (Algorithm R).
#[derive(Clone, Debug)]
pub struct Reservoir {
    capacity: usize,
    samples: Vec<TimestampedEdge>,
    seen: u64,
    rng: PositionalRng,
}

impl Reservoir {
    pub fn new(capacity: usize, seed: u64) -> Self {
        Self::with_stream(capacity, seed, 0)
    }

    /// Independent reservoirs sharing a seed must use distinct `stream`s.
    pub fn with_stream(capacity: usize, seed: u64, stream: u64) -> Self {
        Reservoir {
            capacity,
            samples: Vec::with_capacity(capacity.min(1 << 20)),
            seen: 0,
            rng: PositionalRng::new(seed, stream),
        }
    }

    /// Offers one edge. Self-loops are ignored and not counted. Returns
    /// whether the edge entered the sample.
    pub fn offer(&mut self, e: TimestampedEdge) -> bool {
        if e.u == e.v {
            return false;
        }
        self.seen += 1;
        if self.samples.len() < self.capacity {
            self.samples.push(e);
            return true;
        }
        // Offer i > k is kept with probability k/i in a uniform slot.
        let slot = self.rng.below(self.seen, self.seen);
        if (slot as usize) < self.capacity {
            self.samples[slot as usize] = e;
            true
        } else {
            false
        }
    }

    pub fn extend<I: IntoIterator<Item = TimestampedEdge>>(&mut self, edges: I) {
        for e in edges {
            self.offer(e);
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[TimestampedEdge] {
        &self.samples
    }

    /// Snapshot of the sampled edges without timestamps.
    pub fn edges(&self) -> Vec<Edge> {
        self.samples.iter().map(TimestampedEdge::edge).collect()
    }

    /// Edge-file snapshot with a `# k=<k> seen=<seen>` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("# k={} seen={}\n", self.capacity, self.seen);
        for e in &self.samples {
            let _ = writeln!(s, "{} {} {}", e.u, e.v, e.ts);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(i: u32) -> TimestampedEdge {
        TimestampedEdge::new(i, i + 1_000_000, i as u64)
    }

    #[test]
    fn fill_phase_keeps_everything() {
        let mut r = Reservoir::new(3, 1);
        r.extend((0..3).map(edge));
        assert_eq!(r.samples(), &[edge(0), edge(1), edge(2)]);
        assert_eq!(r.seen(), 3);
    }

    #[test]
    fn size_is_min_of_capacity_and_seen() {
        let mut r = Reservoir::new(5, 2);
        for i in 0..40 {
            r.offer(edge(i));
            assert_eq!(r.len() as u64, r.seen().min(5));
        }
    }

    #[test]
    fn zero_capacity_never_stores() {
        let mut r = Reservoir::new(0, 2);
        r.extend((0..10).map(edge));
        assert!(r.is_empty());
        assert_eq!(r.seen(), 10);
    }

    #[test]
    fn self_loops_are_dropped() {
        let mut r = Reservoir::new(4, 0);
        assert!(!r.offer(TimestampedEdge::new(3, 3, 0)));
        assert_eq!(r.seen(), 0);
    }

    #[test]
    fn replay_is_bit_identical_regardless_of_chunking() {
        let mut a = Reservoir::new(7, 99);
        a.extend((0..500).map(edge));
        let mut b = Reservoir::new(7, 99);
        for chunk in (0..500).collect::<Vec<_>>().chunks(13) {
            let mut clone = b.clone();
            clone.extend(chunk.iter().copied().map(edge));
            b = clone;
        }
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn snapshot_header() {
        let mut r = Reservoir::new(2, 0);
        r.extend((0..5).map(edge));
        assert!(r.to_text().starts_with("# k=2 seen=5\n"));
        assert_eq!(r.to_text().lines().count(), 3);
    }
}
