//! Genericity data: every random choice is derived from one seed and a
//! path (tag plus indices), so parallel evaluation stays deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{rat, Rational};
use crate::linalg;

pub const DEFAULT_HEIGHT: u32 = 97;
pub const DEFAULT_SLICE_TRIALS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPack {
    pub seed: u64,
    /// Smoothing exponent; `None` means `2 + max degree of the input`.
    pub n_exp: Option<u32>,
    pub slice_trials: u32,
    /// Random integers are drawn from `[-height, height] \ {0}`.
    pub height: u32,
    /// Test hook: all smoothing constants are zero.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl ParamPack {
    pub fn new(seed: u64) -> Self {
        ParamPack {
            seed,
            n_exp: None,
            slice_trials: DEFAULT_SLICE_TRIALS,
            height: DEFAULT_HEIGHT,
            degenerate: false,
        }
    }

    pub fn with_n_exp(mut self, n: u32) -> Self {
        self.n_exp = Some(n);
        self
    }

    pub fn with_trials(mut self, trials: u32) -> Self {
        self.slice_trials = trials.max(1);
        self
    }

    /// A pack whose smoothing constants vanish; only for tests.
    pub fn degenerate_for_tests(mut self) -> Self {
        self.degenerate = true;
        self
    }

    pub fn smoothing_exponent(&self, max_degree: i64) -> u32 {
        self.n_exp.unwrap_or(2 + max_degree.max(0) as u32)
    }

    /// A generator determined by the seed, a tag and a path of indices.
    pub fn rng(&self, tag: &str, path: &[u64]) -> ChaCha8Rng {
        let mut h = splitmix(self.seed);
        for b in tag.bytes() {
            h = splitmix(h ^ u64::from(b));
        }
        for &p in path {
            h = splitmix(h ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        }
        ChaCha8Rng::seed_from_u64(h)
    }

    /// An independent pack for a sub-computation, with the same settings.
    pub fn derive(&self, tag: &str, path: &[u64]) -> ParamPack {
        ParamPack {
            seed: self.rng(tag, path).gen(),
            ..self.clone()
        }
    }

    pub fn random_rational(&self, rng: &mut ChaCha8Rng) -> Rational {
        random_nonzero(rng, self.height)
    }

    pub fn random_vector(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
        (0..len).map(|_| self.random_rational(rng)).collect()
    }

    /// Random matrix with full row rank (redrawn until it has it).
    pub fn random_full_rank(&self, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<Rational>> {
        loop {
            let m: Vec<Vec<Rational>> = (0..rows).map(|_| self.random_vector(rng, cols)).collect();
            if linalg::rank(&m) == rows.min(cols) {
                return m;
            }
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn random_nonzero(rng: &mut ChaCha8Rng, height: u32) -> Rational {
    let h = i64::from(height.max(1));
    loop {
        let v = rng.gen_range(-h..=h);
        if v != 0 {
            return rat(v);
        }
    }
}

/// Encodes a recursion trace as a path for [`ParamPack::rng`].
pub fn trace_path(trace: &[usize]) -> Vec<u64> {
    let mut p = vec![trace.len() as u64];
    p.extend(trace.iter().map(|&j| j as u64));
    p
}
