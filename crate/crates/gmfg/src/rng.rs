//! Seedable RNG plumbing.
//!
//! Every stochastic operation in this crate takes an explicit `u64` seed and
//! derives independent substreams from it, so results are reproducible and
//! independent of thread scheduling. Substreams are keyed by integer tuples
//! (e.g. `(episode, agent, t)`) run through a SplitMix64-style mixer, and the
//! derived value seeds a `ChaCha8Rng`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer; bijective on u64.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a substream seed from a base seed and a key tuple.
///
/// Distinct key tuples yield statistically independent seeds; the same
/// `(seed, keys)` pair always yields the same value.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    let mut s = mix(seed ^ GAMMA);
    for &k in keys {
        s = mix(s ^ mix(k.wrapping_add(GAMMA)));
    }
    s
}

/// A generator for the given base seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// A generator for the substream identified by `keys` under `seed`.
pub fn substream(seed: u64, keys: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, keys))
}

/// Samples an index from a probability vector using a single uniform draw.
///
/// Walks the CDF; any residual mass from floating-point slack goes to the
/// last entry.
pub fn sample_index(rng: &mut Rng, probs: &[f64]) -> usize {
    use rand::Rng as _;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
