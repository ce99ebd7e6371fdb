//! Labelled, bit-accounted random streams.
//!
//! Every random decision in a run is drawn from a [`RandomStream`] identified
//! by the run seed and a [`StreamLabel`]. Streams consume the underlying
//! generator one bit at a time so the number of random bits a run uses is an
//! exact, reproducible quantity.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::graph::Vertex;

/// Identifies the stage a substream serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamLabel {
    /// Random graph generation.
    Generation,
    /// Base colouring of the component whose lowest vertex id is given.
    Base(Vertex),
    /// The i-th switching step.
    Step(usize),
    /// One Monte Carlo trial.
    Trial(u64),
    /// Resampling used by confidence intervals.
    Bootstrap,
}

impl StreamLabel {
    fn code(self) -> u64 {
        const INDEX_MASK: u64 = (1 << 56) - 1;
        let (tag, index) = match self {
            StreamLabel::Generation => (1u64, 0u64),
            StreamLabel::Base(v) => (2, v as u64),
            StreamLabel::Step(i) => (3, i as u64),
            StreamLabel::Trial(t) => (4, t),
            StreamLabel::Bootstrap => (5, 0),
        };
        (tag << 56) | (index & INDEX_MASK)
    }
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent run derived from a master seed.
///
/// Run 0 uses the master seed itself, so a batch of one run reproduces a
/// single direct run.
pub fn run_seed(seed: u64, index: u64) -> u64 {
    if index == 0 {
        seed
    } else {
        mix64(seed ^ mix64(index))
    }
}

/// Source of the random decisions made by the samplers.
///
/// The production implementation is [`RandomStream`]; exact-distribution
/// oracles implement it by enumerating every branch.
pub trait Chooser {
    /// Index drawn uniformly from `0..n`. `n` must be positive.
    fn pick_uniform(&mut self, n: usize) -> usize;

    /// Index drawn with probability proportional to `weights[i]`. At least one
    /// weight must be non-zero.
    fn pick_weighted(&mut self, weights: &[BigUint]) -> usize;
}

pub struct RandomStream {
    rng: ChaCha8Rng,
    buffer: u64,
    available: u32,
    consumed: u64,
}

impl RandomStream {
    pub fn new(seed: u64, label: StreamLabel) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(label.code());
        RandomStream {
            rng,
            buffer: 0,
            available: 0,
            consumed: 0,
        }
    }

    /// Total random bits drawn so far.
    pub fn bits_consumed(&self) -> u64 {
        self.consumed
    }

    /// The next `count` bits (at most 64) as an integer.
    pub fn bits(&mut self, count: u32) -> u64 {
        assert!(count <= 64);
        if count == 0 {
            return 0;
        }
        self.consumed += count as u64;
        if count <= self.available {
            let out = if count == 64 {
                self.buffer
            } else {
                self.buffer & ((1u64 << count) - 1)
            };
            self.buffer = if count == 64 { 0 } else { self.buffer >> count };
            self.available -= count;
            return out;
        }
        let low = self.buffer;
        let have = self.available;
        let word = self.rng.next_u64();
        let need = count - have;
        let high = if need == 64 { word } else { word & ((1u64 << need) - 1) };
        self.buffer = if need == 64 { 0 } else { word >> need };
        self.available = 64 - need;
        if have == 0 {
            high
        } else {
            low | (high << have)
        }
    }

    /// Uniform integer in `0..bound` by rejection on `ceil(log2 bound)` bits.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        if bound == 1 {
            return 0;
        }
        let width = 64 - (bound - 1).leading_zeros();
        loop {
            let x = self.bits(width);
            if x < bound {
                return x;
            }
        }
    }

    /// Uniform big integer in `0..bound`.
    pub fn uniform_below_big(&mut self, bound: &BigUint) -> BigUint {
        assert!(!bound.is_zero(), "empty range");
        if bound.is_one() {
            return BigUint::zero();
        }
        let width = (bound - 1u32).bits();
        loop {
            let mut digits = Vec::with_capacity(width.div_ceil(64) as usize);
            let mut left = width;
            while left > 0 {
                let take = left.min(64) as u32;
                digits.push(self.bits(take));
                left -= take as u64;
            }
            let x = BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &x < bound {
                return x;
            }
        }
    }

    /// Uniform double in `[0, 1)` built from 53 bits.
    pub fn uniform_f64(&mut self) -> f64 {
        self.bits(53) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        self.uniform_f64() < p
    }
}

impl Chooser for RandomStream {
    fn pick_uniform(&mut self, n: usize) -> usize {
        self.uniform_below(n as u64) as usize
    }

    fn pick_weighted(&mut self, weights: &[BigUint]) -> usize {
        let total: BigUint = weights.iter().sum();
        let mut x = self.uniform_below_big(&total);
        for (i, w) in weights.iter().enumerate() {
            if &x < w {
                return i;
            }
            x -= w;
        }
        unreachable!("draw below the total always lands in some bucket")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_label_same_draws() {
        let mut a = RandomStream::new(42, StreamLabel::Step(3));
        let mut b = RandomStream::new(42, StreamLabel::Step(3));
        let xs: Vec<u64> = (0..100).map(|_| a.uniform_below(1000)).collect();
        let ys: Vec<u64> = (0..100).map(|_| b.uniform_below(1000)).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.bits_consumed(), b.bits_consumed());
    }

    #[test]
    fn labels_give_distinct_streams() {
        let mut a = RandomStream::new(42, StreamLabel::Step(3));
        let mut b = RandomStream::new(42, StreamLabel::Step(4));
        let mut c = RandomStream::new(42, StreamLabel::Base(3));
        let xa: Vec<u64> = (0..8).map(|_| a.bits(64)).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.bits(64)).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.bits(64)).collect();
        assert_ne!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn bit_accounting_is_exact() {
        let mut s = RandomStream::new(1, StreamLabel::Generation);
        s.bits(3);
        s.bits(64);
        s.bits(61);
        s.bits(1);
        assert_eq!(s.bits_consumed(), 129);
        // A range of size one needs no randomness.
        s.uniform_below(1);
        assert_eq!(s.bits_consumed(), 129);
        // Powers of two are never rejected.
        s.uniform_below(8);
        assert_eq!(s.bits_consumed(), 132);
    }

    #[test]
    fn bits_concatenate_consistently() {
        // Drawing 64 bits in two halves equals drawing them at once.
        let mut a = RandomStream::new(9, StreamLabel::Trial(1));
        let mut b = RandomStream::new(9, StreamLabel::Trial(1));
        let whole = a.bits(64);
        let lo = b.bits(20);
        let hi = b.bits(44);
        assert_eq!(whole, lo | (hi << 20));
    }

    #[test]
    fn uniform_below_covers_range() {
        let mut s = RandomStream::new(5, StreamLabel::Bootstrap);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            seen[s.uniform_below(7) as usize] += 1;
        }
        for c in seen {
            assert!((800..1200).contains(&c), "{seen:?}");
        }
    }

    #[test]
    fn big_uniform_stays_below_bound() {
        let mut s = RandomStream::new(5, StreamLabel::Bootstrap);
        let bound = BigUint::from(3u32).pow(90);
        for _ in 0..200 {
            assert!(s.uniform_below_big(&bound) < bound);
        }
        let small = BigUint::from(5u32);
        let mut seen = [0u32; 5];
        for _ in 0..5000 {
            let x = s.uniform_below_big(&small);
            seen[x.to_u32_digits().first().copied().unwrap_or(0) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| (800..1200).contains(&c)), "{seen:?}");
    }

    #[test]
    fn weighted_pick_skips_zero_weights() {
        let mut s = RandomStream::new(3, StreamLabel::Generation);
        let w = vec![BigUint::zero(), BigUint::from(2u32), BigUint::zero(), BigUint::one()];
        let mut counts = [0u32; 4];
        for _ in 0..3000 {
            counts[s.pick_weighted(&w)] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[2], 0);
        assert!((1850..2150).contains(&counts[1]), "{counts:?}");
    }

    #[test]
    fn run_seed_zero_is_identity() {
        assert_eq!(run_seed(77, 0), 77);
        assert_ne!(run_seed(77, 1), run_seed(77, 2));
    }
}
