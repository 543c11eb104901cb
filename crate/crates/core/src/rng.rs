//! The toolkit's deterministic bit source.
//!
//! All randomness (pseudorandom watermark planes, salt-and-pepper noise) comes
//! from PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`) seeded through
//! `SeedableRng::seed_from_u64`. Draws are derived from raw `next_u64` output
//! only, never from distribution helpers, so streams are identical on every
//! platform and across `rand` releases.

use rand_core::{RngCore, SeedableRng};
use rand_pcg::Pcg64;

pub struct BitSource {
    inner: Pcg64,
}

impl BitSource {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Pcg64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Fair coin: the top bit of the next output.
    pub fn next_bit(&mut self) -> u8 {
        (self.inner.next_u64() >> 63) as u8
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
