//! Seeded 64-bit generator shared by samplers, generators and test oracles.
//!
//! The stream is SplitMix64, fixed by its integer recurrence (all arithmetic
//! wrapping mod 2^64):
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15
//! z     <- state
//! z     <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z     <- (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out   <- z ^ (z >> 31)
//! ```
//!
//! Uniform reals use the top 53 bits: `(out >> 11) * 2^-53`, in `[0, 1)`.
//! Any implementation reproducing these two rules reproduces every trace.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent child stream, used to give every trial of a batch its own
    /// generator regardless of which worker runs it.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut mixer = Self::new(seed ^ index.wrapping_mul(GOLDEN_GAMMA).rotate_left(17));
        Self::new(mixer.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        Self::unit_from_bits(self.next_u64())
    }

    pub fn unit_from_bits(bits: u64) -> f64 {
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`. Uses the float path, so a tiny modulo bias
    /// is irrelevant at the sizes used here (n is a leg count or a support size).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Standard normal via Box-Muller (one value per call, the partner is dropped).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference outputs of the recurrence, computed independently.
    #[test]
    fn matches_reference_vectors() {
        let mut rng = SplitMix64::new(1234567);
        let got: Vec<u64> = (0..5).map(|_| rng.next_u64()).collect();
        assert_eq!(
            got,
            [
                6457827717110365317,
                3203168211198807973,
                9817491932198370423,
                4593380528125082431,
                16408922859458223821
            ]
        );

        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 16294208416658607535);
        assert_eq!(rng.next_u64(), 7960286522194355700);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
        assert_eq!(
            SplitMix64::unit_from_bits(u64::MAX),
            1.0 - f64::EPSILON / 2.0
        );
        assert_eq!(SplitMix64::unit_from_bits(0), 0.0);
    }

    #[test]
    fn below_covers_all_values() {
        let mut rng = SplitMix64::new(3);
        let mut hits = [0usize; 5];
        for _ in 0..5000 {
            hits[rng.below(5)] += 1;
        }
        assert!(hits.iter().all(|&h| h > 800));
    }

    #[test]
    fn derived_streams_differ() {
        let a = SplitMix64::derive(7, 0).next_u64();
        let b = SplitMix64::derive(7, 1).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, SplitMix64::derive(7, 0).next_u64());
    }
}
