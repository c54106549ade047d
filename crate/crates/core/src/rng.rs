//! Seeded, splittable random sources.
//!
//! Every random quantity in the crate is drawn from a [`RngStream`], a
//! `(master_seed, stream_id)` pair mapped onto a ChaCha8 key and stream
//! number. Trial `k` of an experiment uses `stream.derive(k)`, so results do
//! not depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identifier of the underlying generator, recorded in every experiment result.
pub const GENERATOR_ID: &str = "chacha8/rand_chacha-0.9/seed_from_u64+set_stream";

/// Concrete generator handed out by [`RngStream::rng`].
pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Stream 0 of `master_seed`.
    pub fn from_seed(master_seed: u64) -> Self {
        Self::new(master_seed, 0)
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream `index`. Children of distinct parents or with distinct
    /// indices land on distinct stream ids with overwhelming probability.
    pub fn derive(&self, index: u64) -> RngStream {
        let mixed = splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)));
        RngStream::new(self.master_seed, mixed)
    }

    /// Child stream keyed by a label, for separating the sub-parts of one experiment.
    pub fn derive_named(&self, label: &str) -> RngStream {
        // FNV-1a
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.derive(h)
    }
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(rng: &mut Rng) -> f64 {
    use rand::RngCore;
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw.
#[inline]
pub fn normal(rng: &mut Rng) -> f64 {
    use rand::Rng as _;
    rng.sample(rand_distr::StandardNormal)
}

/// Buffered source of uniformly random 2-bit symbols, for lattice walks.
pub struct DirectionBits {
    word: u64,
    left: u32,
}

impl DirectionBits {
    pub fn new() -> Self {
        Self { word: 0, left: 0 }
    }

    #[inline]
    pub fn next(&mut self, rng: &mut Rng) -> u8 {
        use rand::RngCore;
        if self.left == 0 {
            self.word = rng.next_u64();
            self.left = 32;
        }
        let d = (self.word & 3) as u8;
        self.word >>= 2;
        self.left -= 1;
        d
    }
}

impl Default for DirectionBits {
    fn default() -> Self {
        Self::new()
    }
}
