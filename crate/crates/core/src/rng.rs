//! Reproducible random streams.
//!
//! Every Monte Carlo replicate draws from its own ChaCha stream whose key is
//! derived from `(master_seed, domain, sub)` and whose 64-bit stream id is the
//! replicate index. A replicate's numbers therefore depend only on those
//! coordinates, never on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Stream families. Distinct domains never share keys for the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    LimitLaw = 1,
    SegmentBefore = 2,
    SegmentAfter = 3,
    Remainder = 4,
    Probe = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for replicate `index` of the family `(master_seed, domain, sub)`.
pub fn stream(master_seed: u64, domain: Domain, sub: u64, index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(master_seed) ^ splitmix64((domain as u64) << 32 ^ sub);
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uniform on the open interval (0, 1) with 53-bit resolution.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal variates by inversion of the CDF.
#[derive(Debug, Clone)]
pub struct InverseNormal(Normal);

impl Default for InverseNormal {
    fn default() -> Self {
        InverseNormal(Normal::standard())
    }
}

impl InverseNormal {
    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.0.inverse_cdf(open_unit(rng))
    }
}
