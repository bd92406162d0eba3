//! Table-free uniform DOAG sampling by vertex count: rejection over variation
//! matrices, either naively or with early abort.

use crate::error::{Error, Result};
use crate::graph::{decode, is_valid_transition_matrix, Doag, TransitionMatrix};
use crate::rng::RngStream;
use crate::variations::{bounded_poisson, fill_variation};

/// Counters collected by the rejection samplers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RejectionStats {
    /// Attempts made, including the accepted one.
    pub attempts: u64,
    /// Matrix cells drawn during the attempts that were rejected.
    pub rejected_cells: u64,
    /// Swaps performed in the matrix over the whole run.
    pub swaps: u64,
}

impl RejectionStats {
    pub fn rejected_attempts(&self) -> u64 {
        self.attempts.saturating_sub(1)
    }
}

/// Which rejection sampler [`sample_doag_by_vertices`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Naive,
    Fast,
    /// Naive up to 8 vertices, fast beyond.
    Auto,
}

/// Fills every row with an independent uniform variation until the matrix
/// is a labelled transition matrix.
pub fn sample_doag_naive(rng: &mut RngStream, n: usize) -> TransitionMatrix {
    sample_doag_naive_with_stats(rng, n).0
}

pub fn sample_doag_naive_with_stats(rng: &mut RngStream, n: usize) -> (TransitionMatrix, RejectionStats) {
    let mut stats = RejectionStats::default();
    let mut a = TransitionMatrix::zero(n);
    loop {
        stats.attempts += 1;
        for r in 0..n {
            fill_variation(rng, &mut a.row_mut(r)[r + 1..]);
            stats.swaps += (n - r).saturating_sub(2) as u64;
        }
        if is_valid_transition_matrix(&a) {
            return (a, stats);
        }
        stats.rejected_cells += (n * n.saturating_sub(1) / 2) as u64;
    }
}

/// Same distribution as [`sample_doag_naive`], but cells are drawn lazily
/// column by column and an attempt stops at the first violation.
pub fn sample_doag_fast(rng: &mut RngStream, n: usize) -> TransitionMatrix {
    sample_doag_fast_with_stats(rng, n).0
}

/// Row `r` stores a permutation of `1..=n-1-r` in its cells right of the
/// diagonal. The row's Poisson draw `p` turns the `p` largest values into
/// zeros: a value above `thr[r] = n-1-r-p` reads as zero.
pub fn sample_doag_fast_with_stats(rng: &mut RngStream, n: usize) -> (TransitionMatrix, RejectionStats) {
    let mut stats = RejectionStats::default();
    let mut a = TransitionMatrix::zero(n);
    for r in 0..n {
        for (offset, cell) in a.row_mut(r)[r + 1..].iter_mut().enumerate() {
            *cell = offset as u32 + 1;
        }
    }
    if n < 2 {
        stats.attempts = 1;
        return (a, stats);
    }
    let mut thr = vec![0u32; n];
    let mut drawn = vec![0usize; n];
    let mut epoch = if cfg!(debug_assertions) { vec![0u64; n * n] } else { Vec::new() };
    let draw_threshold = |rng: &mut RngStream, r: usize| {
        let len = n - 1 - r;
        (len - bounded_poisson(rng, 1.0, len)) as u32
    };

    loop {
        stats.attempts += 1;
        let attempt = stats.attempts;
        let mut cells = 0u64;
        let accepted = 'attempt: {
            let (mut c, mut r) = (1, 0);
            let mut b_prev: Option<usize> = None;
            thr[0] = draw_threshold(rng, 0);
            loop {
                let u = rng.uniform_inclusive(c, n - 1);
                a.row_mut(r).swap(c, u);
                stats.swaps += 1;
                cells += 1;
                drawn[r] = c;
                if cfg!(debug_assertions) {
                    epoch[r * n + c] = attempt;
                }
                let value = a.get(r, c);
                let nonzero = value <= thr[r];
                let column_done = if b_prev == Some(r) {
                    debug_assert_eq!(epoch[r * n + c - 1], attempt, "stale cell read");
                    if !nonzero || value < a.get(r, c - 1) {
                        break 'attempt false;
                    }
                    true
                } else if nonzero {
                    b_prev = Some(r);
                    true
                } else if r == 0 {
                    b_prev = None;
                    true
                } else {
                    r -= 1;
                    false
                };
                if column_done {
                    if c == n - 1 {
                        break 'attempt true;
                    }
                    c += 1;
                    r = c - 1;
                    thr[r] = draw_threshold(rng, r);
                }
            }
        };
        if accepted {
            break;
        }
        stats.rejected_cells += cells;
    }

    for r in 0..n - 1 {
        let row = a.row_mut(r);
        for q in drawn[r] + 1..n - 1 {
            let u = rng.uniform_inclusive(q, n - 1);
            row.swap(q, u);
            stats.swaps += 1;
        }
        for cell in &mut row[r + 1..] {
            if *cell > thr[r] {
                *cell = 0;
            }
        }
    }
    (a, stats)
}

/// Uniform DOAG with `n` vertices.
pub fn sample_doag_by_vertices(rng: &mut RngStream, n: usize, method: Method) -> Result<Doag> {
    if n == 0 {
        return Err(Error::TooSmall { n });
    }
    let fast = match method {
        Method::Naive => false,
        Method::Fast => true,
        Method::Auto => n > 8,
    };
    let matrix = if fast {
        sample_doag_fast(rng, n)
    } else {
        sample_doag_naive(rng, n)
    };
    decode(&matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::encode;

    #[test]
    fn single_vertex() {
        let mut rng = RngStream::from_seed(1);
        assert_eq!(sample_doag_naive(&mut rng, 1), TransitionMatrix::zero(1));
        assert_eq!(sample_doag_fast(&mut rng, 1), TransitionMatrix::zero(1));
        for method in [Method::Naive, Method::Fast, Method::Auto] {
            assert_eq!(sample_doag_by_vertices(&mut rng, 1, method).unwrap(), Doag::single());
        }
        assert!(sample_doag_by_vertices(&mut rng, 0, Method::Auto).is_err());
    }

    #[test]
    fn outputs_are_valid() {
        let mut rng = RngStream::from_seed(2);
        for n in 2..40 {
            let a = sample_doag_fast(&mut rng, n);
            assert!(a.is_variation_matrix());
            assert!(is_valid_transition_matrix(&a));
            assert_eq!(encode(&decode(&a).unwrap()), a);
            let b = sample_doag_naive(&mut rng, n.min(12));
            assert!(is_valid_transition_matrix(&b));
        }
    }

    #[test]
    fn naive_acceptance_at_four() {
        let mut rng = RngStream::from_seed(3);
        let mut attempts = 0;
        let runs = 20_000;
        for _ in 0..runs {
            attempts += sample_doag_naive_with_stats(&mut rng, 4).1.attempts;
        }
        let rate = runs as f64 / attempts as f64;
        assert!((rate - 95.0 / 160.0).abs() < 0.01, "{rate}");
    }

    #[test]
    fn fast_acceptance_matches_exact_probability() {
        use crate::counting::SourceCountTable;
        use crate::variations::variation_count;
        use num_traits::ToPrimitive;

        let n = 50;
        let doags = SourceCountTable::build(n).unwrap().total(n).unwrap();
        let matrices: num_bigint::BigUint = (1..n).map(variation_count).product();
        let scale = num_bigint::BigUint::from(1u64 << 52);
        let p = (doags * &scale / matrices).to_f64().unwrap() / scale.to_f64().unwrap();
        let mut rng = RngStream::from_seed(4);
        let runs = 2_000.0;
        let attempts: u64 = (0..runs as u64)
            .map(|_| sample_doag_fast_with_stats(&mut rng, n).1.attempts)
            .sum();
        let expected = runs / p;
        let sd = (runs * (1.0 - p)).sqrt() / p;
        assert!((attempts as f64 - expected).abs() < 4.0 * sd, "{attempts} vs {expected} +- {sd}");
    }

    #[test]
    fn swap_count_near_half_square() {
        let mut rng = RngStream::from_seed(5);
        let n = 500usize;
        let runs = 20;
        let swaps: u64 = (0..runs).map(|_| sample_doag_fast_with_stats(&mut rng, n).1.swaps).sum();
        let mean = swaps as f64 / runs as f64;
        let bound = 0.5 * (n * n) as f64 + 20.0 * (n as f64).powf(1.5);
        assert!(mean <= bound, "{mean} > {bound}");
    }
}
