//! Deterministic random-number plumbing.
//!
//! Every stochastic component in the crate draws from a [`Rng`] seeded
//! through this module. Independent concerns (genotype initialisation,
//! mutation, fitness noise, task-level randomness) each get their own
//! stream derived from a root seed with a textual label, so that e.g.
//! enabling fitness noise does not perturb the mutation sequence.

use rand::SeedableRng;

/// The PRNG used throughout the crate. ChaCha8 is deterministic across
/// platforms and fast enough that seeding thousands of streams is free.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Creates a generator from a bare seed.
pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Derives the seed for a named stream under `root`.
pub fn stream_seed(root: u64, label: &str) -> u64 {
    SeedMix::new().u64(root).str(label).finish()
}

/// Creates the generator for a named stream under `root`.
pub fn stream(root: u64, label: &str) -> Rng {
    from_seed(stream_seed(root, label))
}

/// Builds seeds by folding heterogeneous values into an FNV-1a hash with a
/// SplitMix64 finaliser. Used for stream derivation above and by the harness
/// to assign every (configuration, replication) cell a stable seed that does
/// not depend on execution order.
#[derive(Clone, Copy)]
pub struct SeedMix(u64);

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

impl SeedMix {
    pub fn new() -> Self {
        SeedMix(FNV_OFFSET)
    }

    pub fn byte(self, b: u8) -> Self {
        SeedMix((self.0 ^ b as u64).wrapping_mul(FNV_PRIME))
    }

    pub fn u64(self, v: u64) -> Self {
        v.to_le_bytes().into_iter().fold(self, Self::byte)
    }

    /// Folds in a float by its bit pattern, so e.g. 0.01 and 0.010000000001
    /// derive different seeds.
    pub fn f64(self, v: f64) -> Self {
        self.u64(v.to_bits())
    }

    /// Length-prefixed so that ("ab", "c") and ("a", "bc") differ.
    pub fn str(self, s: &str) -> Self {
        s.bytes().fold(self.u64(s.len() as u64), Self::byte)
    }

    pub fn finish(self) -> u64 {
        // SplitMix64 finaliser: FNV alone mixes the high bits poorly.
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

impl Default for SeedMix {
    fn default() -> Self {
        Self::new()
    }
}
