//! Seeded random instance generation.
//!
//! The PRNG is SplitMix64, spelled out here so a seed is reproducible from
//! the documentation alone. Draw order per equation: slots in (variable,
//! order) lexicographic order, one density draw each and a coefficient draw
//! when the slot is kept, then the free-term draws.

use tropdiff_core::{ExtNat, LinearEquation, LinearSystem, Slot};

/// SplitMix64: state advances by the golden-ratio increment, output is the
/// finalizer mix of the new state.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1), from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, bound); the modulo bias is irrelevant at the bounds
    /// used here. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

#[derive(Copy, Clone, Debug)]
pub struct GeneratorConfig {
    pub n: usize,
    pub r: u64,
    pub k: usize,
    /// Coefficients are drawn uniformly from [0, max_coeff].
    pub max_coeff: u64,
    /// Probability that a slot carries a finite coefficient.
    pub density: f64,
    /// Probability that an equation carries a finite free term.
    pub free_prob: f64,
    pub seed: u64,
}

pub fn generate_random_system(config: &GeneratorConfig) -> LinearSystem {
    let mut rng = SplitMix64::new(config.seed);
    let mut equations = Vec::with_capacity(config.k);
    for _ in 0..config.k {
        let mut terms = Vec::new();
        for var in 0..config.n {
            for order in 0..=config.r {
                if rng.next_f64() < config.density {
                    terms.push((Slot::new(var, order), rng.below(config.max_coeff + 1)));
                }
            }
        }
        let free = if rng.next_f64() < config.free_prob {
            ExtNat::Fin(rng.below(config.max_coeff + 1))
        } else {
            ExtNat::Inf
        };
        equations.push(LinearEquation::new(terms, free));
    }
    LinearSystem::new(config.n, config.r, equations).expect("generated slots are in range")
}
