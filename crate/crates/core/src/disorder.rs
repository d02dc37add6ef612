//! Reproducible on-site potential disorder.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`). Its 256-bit key is
//! expanded from the 64-bit seed with SplitMix64, so the stream depends only on
//! the seed and not on any library default. Each orbital takes one draw, in
//! row-major site order: `ε = (next_u64 >> 11) · 2⁻⁵³ − 1/2`, uniform on
//! `[-1/2, 1/2)`. Both spin components of an orbital share the draw.

use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::lattice::LatticeGeometry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderSpec {
    /// Strength `W ≥ 0`; the potential is `W·ε` with `ε ∈ [-1/2, 1/2)`.
    pub strength: f64,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn new(strength: f64, seed: u64) -> Self {
        Self { strength, seed }
    }
}

/// One SplitMix64 step: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one member of a disorder ensemble.
///
/// Chains SplitMix64 over the base seed, the strength index and the
/// realization index: `s1 = mix(base)`, `s2 = mix(s1 ^ stream)`,
/// `seed = mix(s2 ^ realization)`.
pub fn derive_seed(base: u64, stream: u64, realization: u64) -> u64 {
    let mut s = base;
    let s1 = splitmix64(&mut s);
    let mut s = s1 ^ stream;
    let s2 = splitmix64(&mut s);
    let mut s = s2 ^ realization;
    splitmix64(&mut s)
}

fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha20Rng::from_seed(key)
}

/// On-site potential `W·ε_r` for every basis state of `geom`.
pub fn disorder_potential(geom: &LatticeGeometry, dis: &DisorderSpec) -> Vec<f64> {
    let mult = geom.spin_multiplicity();
    let mut out = Vec::with_capacity(geom.num_sites());
    if dis.strength == 0.0 {
        out.resize(geom.num_sites(), 0.0);
        return out;
    }
    let mut rng = rng_from_seed(dis.seed);
    let scale = 1.0 / (1u64 << 53) as f64;
    for _ in 0..geom.num_orbitals() {
        let eps = (rng.next_u64() >> 11) as f64 * scale - 0.5;
        for _ in 0..mult {
            out.push(dis.strength * eps);
        }
    }
    out
}
