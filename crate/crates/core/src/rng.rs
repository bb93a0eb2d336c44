//! Counter-based 64-bit random streams.
//!
//! Every draw is a pure function of `(key, counter)`:
//!
//! ```text
//! z      = key + counter * 0x9E37_79B9_7F4A_7C15        (wrapping)
//! output = splitmix64_finalizer(z)
//! ```
//!
//! which is SplitMix64 evaluated in counter mode. Stream keys are derived from
//! `(base_seed, replication, lane)` by chaining the same finalizer, so the
//! stream for replication `r` never depends on how many values other
//! replications consumed. All arithmetic is wrapping `u64`, making streams
//! bit-identical across platforms.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const REPLICATION_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const LANE_SALT: u64 = 0x8CB9_2BA7_2F3D_8DD7;

/// The SplitMix64 output finalizer (Stafford variant 13).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the key of an independent stream for a replication.
///
/// `lane` separates streams used for different purposes inside one
/// replication (e.g. chain transitions vs. within-bin refinement).
pub fn derive_key(base_seed: u64, replication: u64, lane: u64) -> u64 {
    let k = mix64(base_seed ^ GOLDEN_GAMMA);
    let k = mix64(k ^ replication.wrapping_mul(REPLICATION_SALT));
    mix64(k ^ lane.wrapping_mul(LANE_SALT).wrapping_add(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn from_seed(seed: u64, lane: u64) -> Self {
        Self::new(derive_key(seed, 0, lane))
    }

    /// Value at an arbitrary position of the stream, without advancing.
    #[inline]
    pub fn at(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn position(&self) -> u64 {
        self.counter
    }
}
