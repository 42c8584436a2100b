//! Counter-based pseudorandom stream.
//!
//! Each draw mixes `seed` with an incrementing counter through the
//! splitmix64 finalizer, so a given seed yields the same sequence on every
//! platform and the state is two integers. Gaussians come from Box–Muller
//! over the uniform stream (two uniforms per draw, nothing cached).

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    counter: u64,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, counter: 0 }
    }

    /// Independent stream derived from this rng's seed and a stream id.
    /// Used to give pipeline stages their own reproducible substreams.
    pub fn derive(&self, stream: u64) -> Rng {
        Rng::new(self.derive_seed(stream))
    }

    /// The seed [`Rng::derive`] would use, for configs that carry seeds.
    pub fn derive_seed(&self, stream: u64) -> u64 {
        mix(self.seed ^ mix(stream.wrapping_add(0x9E37_79B9_7F4A_7C15)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.seed.wrapping_add(self.counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box–Muller. The first uniform is shifted into
    /// `(0, 1]` so the log never sees zero.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform index in `[0, n)`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.uniform() * n as f64) as usize;
        i.min(n - 1)
    }

    /// Bernoulli draw.
    pub fn flip(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Index sampled from an (unnormalized is fine) non-negative weight
    /// vector.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.uniform() * total;
        for (i, w) in weights.iter().enumerate() {
            u -= w;
            if u < 0.0 {
                return i;
            }
        }
        weights.len() - 1
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
