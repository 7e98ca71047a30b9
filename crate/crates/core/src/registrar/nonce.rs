use rand::{RngCore, SeedableRng, TryRngCore};
use rand_chacha::ChaCha20Rng;

/// Where registration nonces come from.
pub trait NonceSource: Send + Sync {
    fn fill(&mut self, out: &mut [u8; 32]);
}

/// Operating-system randomness.
#[derive(Debug, Default, Clone, Copy)]
pub struct OsNonceSource;

impl NonceSource for OsNonceSource {
    fn fill(&mut self, out: &mut [u8; 32]) {
        rand::rngs::OsRng
            .try_fill_bytes(out)
            .expect("operating system randomness unavailable");
    }
}

/// Deterministic nonces for tests, simulations and audit replay.
#[derive(Debug, Clone)]
pub struct SeededNonceSource {
    rng: ChaCha20Rng,
}

impl SeededNonceSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }
}

impl NonceSource for SeededNonceSource {
    fn fill(&mut self, out: &mut [u8; 32]) {
        self.rng.fill_bytes(out);
    }
}
