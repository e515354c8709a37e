use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counter-based Gaussian source addressed by `(trajectory, step, frequency)`.
///
/// The ChaCha key is derived from `(base_seed, trajectory)`, the stream
/// number is the step index and the block position is the frequency key, so a
/// draw never depends on the order in which modes or trajectories are
/// visited.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    base_seed: u64,
    trajectory: u64,
}

/// 32-bit words reserved per frequency (one ChaCha block).
const WORDS_PER_KEY: u128 = 16;

impl NoiseStream {
    pub fn new(base_seed: u64, trajectory: u64) -> Self {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&base_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&trajectory.to_le_bytes());
        seed[16..24].copy_from_slice(b"snlw-psi");
        Self { rng: ChaCha8Rng::from_seed(seed), base_seed, trajectory }
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn trajectory(&self) -> u64 {
        self.trajectory
    }

    /// Four independent standard normals for `(step, key)`.
    pub fn normals(&mut self, step: u64, key: u64) -> [f64; 4] {
        self.rng.set_stream(step);
        self.rng.set_word_pos(key as u128 * WORDS_PER_KEY);
        let (a, b) = box_muller(self.rng.next_u64(), self.rng.next_u64());
        let (c, d) = box_muller(self.rng.next_u64(), self.rng.next_u64());
        [a, b, c, d]
    }
}

fn box_muller(x: u64, y: u64) -> (f64, f64) {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let u1 = ((x >> 11) + 1) as f64 * SCALE;
    let u2 = (y >> 11) as f64 * SCALE;
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}
