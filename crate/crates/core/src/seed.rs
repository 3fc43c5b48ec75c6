//! Seed derivation and the crate-wide RNG type.
//!
//! A global experiment seed fans out into per-component streams:
//!
//! ```text
//! sub_seed = u64_le(SHA-256("beamsnet/seed/v1" || u64_le(global) || u64_le(len(name)) || name || u64_le(index))[0..8])
//! ```
//!
//! Adding a component with a new name never perturbs the streams of the
//! others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Counter-based generator used everywhere randomness is consumed.
pub type Rng = ChaCha8Rng;

const DOMAIN: &[u8] = b"beamsnet/seed/v1";

pub fn derive_seed(global: u64, component: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(DOMAIN);
    h.update(global.to_le_bytes());
    h.update((component.len() as u64).to_le_bytes());
    h.update(component.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shorthand for `rng_from_seed(derive_seed(global, component, index))`.
pub fn component_rng(global: u64, component: &str, index: u64) -> Rng {
    rng_from_seed(derive_seed(global, component, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn derivation_is_stable_and_separating() {
        let a = derive_seed(42, "dvl_noise", 0);
        assert_eq!(a, derive_seed(42, "dvl_noise", 0));
        assert_ne!(a, derive_seed(42, "dvl_noise", 1));
        assert_ne!(a, derive_seed(42, "imu_noise", 0));
        assert_ne!(a, derive_seed(43, "dvl_noise", 0));
        // name/index framing: "ab"+1 must not collide with "a"+... style splits
        assert_ne!(derive_seed(0, "ab", 0), derive_seed(0, "a", 0));
    }

    #[test]
    fn same_seed_same_stream() {
        let mut r1 = component_rng(7, "x", 3);
        let mut r2 = component_rng(7, "x", 3);
        for _ in 0..100 {
            assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        }
    }
}
