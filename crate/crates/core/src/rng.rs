//! Seeded randomness shared by every stochastic component.
//!
//! All randomness flows from a single 64-bit run seed. Each consumer names a
//! purpose (`"synth"`, `"holdout"`, `"skipgram"`, ...); the purpose label is
//! hashed with FNV-1a, mixed with the run seed through SplitMix64, and the
//! result seeds a ChaCha8 generator. Independent sub-streams (one per
//! synthetic record, one per training worker) use ChaCha's native 64-bit
//! stream selector, so generating record 17 never depends on records 0..16.
//!
//! Integer and float draws are implemented here on top of `next_u64` rather
//! than through `rand` distributions so the exact output is pinned by this
//! crate and not by a dependency version.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type Rng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for the generator serving `purpose` under run seed `seed`.
pub fn derive_seed(seed: u64, purpose: &str) -> u64 {
    splitmix64(seed ^ splitmix64(fnv1a(purpose)))
}

/// Generator for `purpose`, positioned on sub-stream `stream`.
pub fn stream(seed: u64, purpose: &str, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, purpose));
    rng.set_stream(stream);
    rng
}

/// Draw helpers with platform-independent results.
pub trait Draw: RngCore {
    /// Uniform in [0, 1) with 53 bits of precision.
    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

impl<R: RngCore + ?Sized> Draw for R {}
