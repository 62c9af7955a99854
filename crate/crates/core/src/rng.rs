//! Portable, seedable randomness.
//!
//! Everything random in the experiments derives from SplitMix64 (Steele, Lea
//! and Flood) with the constants below, so another implementation can
//! reproduce every noisy traversal bit for bit:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! Sub-streams are keyed: the stream for key words `k0, k1, ...` starts from
//! `seed ^ h` where `h` folds each word through the SplitMix64 finaliser.
//! Uniforms take the top 53 bits; Gaussians use the cosine branch of
//! Box–Muller on two consecutive uniforms.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a key path.
pub fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(GOLDEN, |h, &w| {
        finalize(h ^ finalize(w.wrapping_add(GOLDEN)))
    })
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for `key` under `seed`.
    pub fn stream(seed: u64, key: &[u64]) -> Self {
        Self::new(seed ^ hash_words(key))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        finalize(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate.
    pub fn next_gaussian(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1]
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
