//! Variations: sequences of non-negative integers whose positive entries are
//! a permutation of `1..=d`, i.e. permutations interleaved with zeros.

use num_bigint::BigUint;

use crate::rng::RngStream;

/// A sequence whose positive values are exactly `{1, ..., d}` with no repeats.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variation(Vec<u32>);

impl Variation {
    pub fn new(values: Vec<u32>) -> Option<Self> {
        is_variation(&values).then_some(Variation(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn into_values(self) -> Vec<u32> {
        self.0
    }

    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&v| v == 0).count()
    }
}

/// True iff every positive value occurs once and the positive values are
/// `1..=d` for some `d`.
pub fn is_variation(values: &[u32]) -> bool {
    let mut seen = vec![false; values.len() + 1];
    let mut positives = 0usize;
    for &v in values {
        if v == 0 {
            continue;
        }
        let v = v as usize;
        if v > values.len() || seen[v] {
            return false;
        }
        seen[v] = true;
        positives += 1;
    }
    // distinct positives all lying in 1..=positives means they are exactly that set
    seen[1..=positives].iter().all(|&s| s)
}

/// Signed-input variant: negative entries are never part of a variation.
pub fn is_variation_signed(values: &[i64]) -> bool {
    values.iter().all(|&v| v >= 0 && v <= u32::MAX as i64)
        && is_variation(&values.iter().map(|&v| v as u32).collect::<Vec<_>>())
}

/// `v_{n,p} = n!/p!`: variations of size `n` with exactly `p` zeros.
pub fn variation_count_by_zeros(n: usize, p: usize) -> BigUint {
    if p > n {
        return BigUint::ZERO;
    }
    ((p + 1)..=n).fold(BigUint::from(1u32), |acc, x| acc * x as u64)
}

/// `v_n = sum_p n!/p!`.
pub fn variation_count(n: usize) -> BigUint {
    // n!/p! for p = n, n-1, ..., 0 accumulates as a running product
    let mut total = BigUint::ZERO;
    let mut term = BigUint::from(1u32);
    for p in (0..=n).rev() {
        total += &term;
        if p > 0 {
            term *= p as u64;
        }
    }
    total
}

/// Poisson(lambda) conditioned on being at most `n`: Knuth's product of
/// uniforms, restarting as soon as the count exceeds `n`.
pub fn bounded_poisson(rng: &mut RngStream, lambda: f64, n: usize) -> usize {
    assert!(lambda > 0.0, "lambda must be positive");
    let threshold = (-lambda).exp();
    loop {
        let mut k = 0usize;
        let mut p = rng.uniform_unit();
        while k <= n && p > threshold {
            k += 1;
            p *= rng.uniform_unit();
        }
        if k <= n {
            return k;
        }
    }
}

/// Uniform variation of size `n`: draw the number of zeros from the bounded
/// Poisson(1) law, then Fisher-Yates shuffle `[0; p] ++ [1..=n-p]`.
pub fn sample_variation(rng: &mut RngStream, n: usize) -> Variation {
    let mut values = vec![0u32; n];
    fill_variation(rng, &mut values);
    Variation(values)
}

/// Overwrites `out` with a uniform variation of size `out.len()`.
pub(crate) fn fill_variation(rng: &mut RngStream, out: &mut [u32]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let zeros = bounded_poisson(rng, 1.0, n);
    for (idx, slot) in out.iter_mut().enumerate() {
        *slot = if idx < zeros { 0 } else { (idx - zeros + 1) as u32 };
    }
    for i in 0..n - 1 {
        let r = rng.uniform_inclusive(i, n - 1);
        out.swap(i, r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        assert!(is_variation(&[6, 2, 3, 0, 0, 1, 4, 0, 5]));
        assert!(!is_variation(&[1, 0, 3]));
        assert!(!is_variation(&[1, 0, 2, 2]));
        assert!(is_variation(&[]));
        assert!(is_variation(&[0, 0]));
        assert!(!is_variation(&[2]));
        assert!(!is_variation_signed(&[1, -1]));
        assert!(is_variation_signed(&[0, 1]));
    }

    #[test]
    fn counts() {
        assert_eq!(variation_count(0), BigUint::from(1u32));
        assert_eq!(variation_count(1), BigUint::from(2u32));
        assert_eq!(variation_count(3), BigUint::from(16u32));
        assert_eq!(variation_count_by_zeros(3, 1), BigUint::from(6u32));
        assert_eq!(variation_count_by_zeros(3, 4), BigUint::ZERO);
        assert_eq!(variation_count_by_zeros(4, 0), BigUint::from(24u32));
    }

    #[test]
    fn poisson_with_zero_bound_is_zero() {
        let mut rng = RngStream::from_seed(5);
        for _ in 0..1000 {
            assert_eq!(bounded_poisson(&mut rng, 1.0, 0), 0);
        }
    }

    #[test]
    fn sampled_variations_are_variations() {
        let mut rng = RngStream::from_seed(11);
        for n in 0..40 {
            let v = sample_variation(&mut rng, n);
            assert_eq!(v.values().len(), n);
            assert!(is_variation(v.values()));
        }
    }

    #[test]
    fn size_one_is_fair() {
        let mut rng = RngStream::from_seed(12);
        let zeros = (0..100_000)
            .filter(|_| sample_variation(&mut rng, 1).values()[0] == 0)
            .count();
        assert!((zeros as f64 / 1e5 - 0.5).abs() < 0.01);
    }
}
