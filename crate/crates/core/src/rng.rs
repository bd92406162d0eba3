//! Seeded, platform-independent source of uniform integers, reals and big
//! integers.
//!
//! All samplers in this crate take a `&mut RngStream` explicitly. The stream
//! wraps ChaCha12 and only ever consumes whole 64-bit words, so a given seed
//! produces the same values everywhere.

use num_bigint::BigUint;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha12Rng,
    int_draws: u64,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha12Rng::seed_from_u64(seed),
            int_draws: 0,
        }
    }

    /// Independent stream number `index` under the same seed.
    pub fn derived(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self {
            inner,
            int_draws: 0,
        }
    }

    pub fn next_word(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Number of uniform integer draws served so far (each may consume more
    /// than one word because of rejection).
    pub fn integer_draws(&self) -> u64 {
        self.int_draws
    }

    /// Uniform integer in `0..bound`. Lemire's multiply-shift with rejection,
    /// so the result is unbiased.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        self.int_draws += 1;
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let product = u128::from(self.next_word()) * u128::from(bound);
            if (product as u64) >= threshold {
                return (product >> 64) as u64;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn uniform_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        lo + self.uniform_below((hi - lo) as u64 + 1) as usize
    }

    /// Uniform real in `[0, 1)` with 53 random bits.
    pub fn uniform_unit(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial with the exact rational probability `num / den`.
    pub fn bernoulli_ratio(&mut self, num: u64, den: u64) -> bool {
        debug_assert!(num <= den && den > 0);
        if num == 0 {
            return false;
        }
        if num == den {
            return true;
        }
        self.uniform_below(den) < num
    }

    /// Uniform big integer in `0..bound`: draw as many words as `bound` has
    /// bits, mask the top word and reject values `>= bound`.
    pub fn uniform_big_below(&mut self, bound: &BigUint) -> BigUint {
        let bits = bound.bits();
        assert!(bits > 0, "empty range");
        let words = bits.div_ceil(64) as usize;
        let top_bits = bits - 64 * (words as u64 - 1);
        let mask = if top_bits == 64 {
            u64::MAX
        } else {
            (1u64 << top_bits) - 1
        };
        let mut digits = vec![0u32; 2 * words];
        loop {
            for w in 0..words {
                let mut word = self.next_word();
                if w + 1 == words {
                    word &= mask;
                }
                digits[2 * w] = word as u32;
                digits[2 * w + 1] = (word >> 32) as u32;
            }
            let candidate = BigUint::new(digits.clone());
            if &candidate < bound {
                return candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RngStream::from_seed(42);
        let mut b = RngStream::from_seed(42);
        for _ in 0..100 {
            assert_eq!(a.next_word(), b.next_word());
        }
        let mut c = RngStream::derived(42, 1);
        let mut d = RngStream::derived(42, 2);
        assert_ne!(c.next_word(), d.next_word());
    }

    #[test]
    fn uniform_below_stays_in_range_and_covers_it() {
        let mut rng = RngStream::from_seed(1);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            seen[rng.uniform_below(7) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800 && c < 1200), "{seen:?}");
        assert_eq!(rng.integer_draws(), 7000);
        assert_eq!(rng.uniform_below(1), 0);
    }

    #[test]
    fn unit_interval() {
        let mut rng = RngStream::from_seed(9);
        let mean: f64 = (0..10_000).map(|_| rng.uniform_unit()).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn big_below_is_uniform_on_small_bound() {
        let mut rng = RngStream::from_seed(3);
        let bound = BigUint::from(5u32);
        let mut seen = [0u32; 5];
        for _ in 0..5000 {
            let x = rng.uniform_big_below(&bound);
            seen[usize::try_from(&x).unwrap()] += 1;
        }
        assert!(seen.iter().all(|&c| c > 850 && c < 1150), "{seen:?}");
    }

    #[test]
    fn big_below_handles_multiword_bounds() {
        let mut rng = RngStream::from_seed(4);
        let bound = (BigUint::from(1u32) << 130u32) + BigUint::from(17u32);
        for _ in 0..200 {
            assert!(rng.uniform_big_below(&bound) < bound);
        }
        let exact = BigUint::from(1u32) << 64u32;
        for _ in 0..200 {
            assert!(rng.uniform_big_below(&exact) < exact);
        }
    }
}
