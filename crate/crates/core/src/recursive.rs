//! Exactly uniform DOAG sampling from a [`DoagCountTable`].
//!
//! A sample is drawn in two passes. Going down from `(n, m, k)`, every stage
//! picks the out-degree `p` of the smallest source and the number `i` of its
//! edges that land on internal vertices. Going back up, the new sources are
//! created right to left in one vertex array, so that slot `q` ends up holding
//! the vertex with canonical label `q`.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::counting::wedge::{choose2, support};
use crate::counting::{DoagCoefficients, DoagCountTable};
use crate::error::{Error, Result};
use crate::graph::{encode, Doag, TransitionMatrix};
use crate::rng::RngStream;

/// Work done by one call to [`sample_doag_counted`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleCost {
    /// Big-integer products `D * C(j+i,i) * C(p,i) * i!` evaluated while
    /// picking degree splits.
    pub multiplications: u64,
}

fn empty_class(table: &DoagCountTable, n: usize, m: usize, k: usize) -> Error {
    let reason = match support(n, k) {
        None => format!("the source count must satisfy 1 <= k <= n = {n}"),
        Some((lo, hi)) if m < lo || m > hi => {
            format!("edges must satisfy n-k <= m <= C(n,2)-C(k,2), here {lo} <= m <= {hi}")
        }
        Some(_) => format!("no such DOAG has all out-degrees in policy {}", table.policy()),
    };
    Error::EmptyClass { n, m, k, reason }
}

fn pick_counted(
    rng: &mut RngStream,
    table: &DoagCountTable,
    n: usize,
    m: usize,
    k: usize,
    cost: &mut SampleCost,
) -> Result<(usize, usize)> {
    let total = table.get(n, m, k);
    if total.is_zero() || n < 2 {
        return Err(empty_class(table, n, m, k));
    }
    let mut r = rng.uniform_big_below(total);
    for p in table.policy().degrees_upto(n - k) {
        if p > m {
            break;
        }
        for (i, coef) in DoagCoefficients::new(n - k - p, p).enumerate() {
            let sub_sources = k - 1 + p - i;
            let sub = table.get(n - 1, m - p, sub_sources);
            if sub_sources == 0 || sub.is_zero() {
                continue;
            }
            let weight = sub * coef;
            cost.multiplications += 1;
            if r < weight {
                return Ok((p, i));
            }
            r -= weight;
        }
    }
    Err(Error::Internal(format!(
        "split weights of ({n}, {m}, {k}) sum to less than the table entry"
    )))
}

/// Picks `(p, i)` with probability `W(p,i) / D_{n,m,k}`.
pub fn pick_degree_split(
    rng: &mut RngStream,
    table: &DoagCountTable,
    n: usize,
    m: usize,
    k: usize,
) -> Result<(usize, usize)> {
    table.count(n, m, k)?;
    pick_counted(rng, table, n, m, k, &mut SampleCost::default())
}

/// Out-edges of a new source: an ordered uniform `i`-subset of `internals`
/// shuffled uniformly among the last `s` entries of `sources`, which keep
/// their relative order. `internals` is permuted in place.
pub fn sample_new_source(
    rng: &mut RngStream,
    i: usize,
    s: usize,
    internals: &mut [u32],
    sources: &[u32],
) -> Result<Vec<u32>> {
    if i > internals.len() || s > sources.len() {
        return Err(Error::Bounds(format!(
            "cannot pick {i} of {} internal vertices and {s} of {} sources",
            internals.len(),
            sources.len()
        )));
    }
    let len = internals.len();
    for t in 0..i {
        let u = rng.uniform_inclusive(t, len - 1);
        internals.swap(t, u);
    }
    let chosen_sources = &sources[sources.len() - s..];
    let mut out = vec![0; i + s];
    let (mut left_i, mut left_s) = (i, s);
    for slot in out.iter_mut().rev() {
        let take_internal = if left_s == 0 {
            true
        } else if left_i == 0 {
            false
        } else {
            rng.bernoulli_ratio(left_i as u64, (left_i + left_s) as u64)
        };
        if take_internal {
            left_i -= 1;
            *slot = internals[left_i];
        } else {
            left_s -= 1;
            *slot = chosen_sources[left_s];
        }
    }
    Ok(out)
}

/// Uniform DOAG with `n` vertices, `m` edges and `k` sources whose
/// out-degrees follow the table's policy.
pub fn sample_doag(rng: &mut RngStream, table: &DoagCountTable, n: usize, m: usize, k: usize) -> Result<Doag> {
    sample_doag_counted(rng, table, n, m, k).map(|(d, _)| d)
}

/// [`sample_doag`] together with the number of big multiplications it made.
pub fn sample_doag_counted(
    rng: &mut RngStream,
    table: &DoagCountTable,
    n: usize,
    m: usize,
    k: usize,
) -> Result<(Doag, SampleCost)> {
    if table.count(n, m, k)?.is_zero() {
        return Err(empty_class(table, n, m, k));
    }
    let mut cost = SampleCost::default();
    let mut picks = Vec::with_capacity(n - 1);
    let (mut m_cur, mut k_cur) = (m, k);
    for size in (2..=n).rev() {
        let (p, i) = pick_counted(rng, table, size, m_cur, k_cur, &mut cost)?;
        picks.push((p, i));
        m_cur -= p;
        k_cur = k_cur - 1 + p - i;
    }
    debug_assert_eq!((m_cur, k_cur), (0, 1));

    let mut out_edges = vec![Vec::new(); n];
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut sources = 1;
    for (slot, &(p, i)) in picks.iter().enumerate().rev() {
        let base = slot + 1;
        let (front, internals) = pool.split_at_mut(base + sources);
        let s = p - i;
        out_edges[slot] = sample_new_source(rng, i, s, internals, &front[base..])?;
        sources = sources + 1 - s;
    }
    Ok((Doag::from_canonical_unchecked(out_edges), cost))
}

/// Uniform DOAG over the union of classes left open: when `m` or `k` is
/// `None`, it is first drawn proportionally to the table mass.
pub fn sample_doag_marginal(
    rng: &mut RngStream,
    table: &DoagCountTable,
    n: usize,
    m: Option<usize>,
    k: Option<usize>,
) -> Result<Doag> {
    let m_needed = m.unwrap_or(choose2(n));
    table.count(n, m_needed, 1)?;
    let ms: Vec<usize> = match m {
        Some(m) => vec![m],
        None => (0..=choose2(n)).collect(),
    };
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (1..=n).collect(),
    };
    let classes: Vec<(usize, usize, &BigUint)> = ms
        .iter()
        .flat_map(|&m| ks.iter().map(move |&k| (m, k)))
        .map(|(m, k)| (m, k, table.get(n, m, k)))
        .filter(|(_, _, c)| !c.is_zero())
        .collect();
    let total: BigUint = classes.iter().map(|(_, _, c)| *c).sum();
    if total.is_zero() {
        return Err(match (m, k) {
            (Some(m), Some(k)) => empty_class(table, n, m, k),
            _ => Error::EmptyClass {
                n,
                m: m.unwrap_or(0),
                k: k.unwrap_or(0),
                reason: format!("no DOAG with the fixed parameters fits policy {}", table.policy()),
            },
        });
    }
    let mut r = rng.uniform_big_below(&total);
    for (m, k, c) in classes {
        if r < *c {
            return sample_doag(rng, table, n, m, k);
        }
        r -= c;
    }
    unreachable!("r is below the total mass")
}

/// The matrix encoding of a [`sample_doag`] draw.
pub fn sample_labelled_transition(
    rng: &mut RngStream,
    table: &DoagCountTable,
    n: usize,
    m: usize,
    k: usize,
) -> Result<TransitionMatrix> {
    sample_doag(rng, table, n, m, k).map(|d| encode(&d))
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::counting::DegreePolicy;
    use crate::graph::is_valid_transition_matrix;

    #[test]
    fn single_vertex() {
        let table = DoagCountTable::build(3, 3, DegreePolicy::All).unwrap();
        let mut rng = RngStream::from_seed(1);
        assert_eq!(sample_doag(&mut rng, &table, 1, 0, 1).unwrap(), Doag::single());
        let m = sample_labelled_transition(&mut rng, &table, 1, 0, 1).unwrap();
        assert_eq!(m, TransitionMatrix::zero(1));
    }

    #[test]
    fn forced_splits() {
        let table = DoagCountTable::build(4, 6, DegreePolicy::All).unwrap();
        let mut rng = RngStream::from_seed(2);
        for _ in 0..20 {
            assert_eq!(pick_degree_split(&mut rng, &table, 2, 1, 1).unwrap(), (1, 0));
            assert_eq!(pick_degree_split(&mut rng, &table, 2, 0, 2).unwrap(), (0, 0));
        }
    }

    #[test]
    fn empty_class_names_support() {
        let table = DoagCountTable::build(3, 7, DegreePolicy::All).unwrap();
        let mut rng = RngStream::from_seed(3);
        let err = sample_doag(&mut rng, &table, 3, 7, 1).unwrap_err();
        match err {
            Error::EmptyClass { reason, .. } => assert!(reason.contains("2 <= m <= 3"), "{reason}"),
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(
            sample_doag(&mut rng, &table, 4, 0, 4),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn new_source_bounds() {
        let mut rng = RngStream::from_seed(4);
        let mut internals = vec![5, 6];
        assert!(sample_new_source(&mut rng, 3, 0, &mut internals, &[1]).is_err());
        assert!(sample_new_source(&mut rng, 0, 2, &mut internals, &[1]).is_err());
        assert_eq!(sample_new_source(&mut rng, 0, 2, &mut internals, &[1, 2, 3]).unwrap(), vec![2, 3]);
    }

    #[test]
    fn new_source_outcomes_are_uniform() {
        let mut rng = RngStream::from_seed(5);
        let mut counts: HashMap<Vec<u32>, u32> = HashMap::new();
        let draws = 40_000;
        for _ in 0..draws {
            let mut internals = vec![10, 11];
            let out = sample_new_source(&mut rng, 1, 1, &mut internals, &[1]).unwrap();
            *counts.entry(out).or_default() += 1;
        }
        assert_eq!(counts.len(), 4);
        for &c in counts.values() {
            let f = f64::from(c) / f64::from(draws);
            assert!((f - 0.25).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn samples_have_requested_shape() {
        let table = DoagCountTable::build(9, 20, DegreePolicy::AtMost(3)).unwrap();
        let mut rng = RngStream::from_seed(6);
        for k in 1..=3 {
            for _ in 0..50 {
                let d = sample_doag(&mut rng, &table, 9, 14, k).unwrap();
                let stats = d.stats();
                assert_eq!((stats.vertices, stats.edges, stats.sources), (9, 14, k));
                assert!(table.policy().admits_sequence(&d.out_degrees()));
                assert!(is_valid_transition_matrix(&encode(&d)));
            }
        }
    }

    #[test]
    fn multiplications_scale_with_squared_degrees() {
        let options = crate::counting::BuildOptions::default();
        let table = DoagCountTable::build_for_target(100, 500, DegreePolicy::AtMost(10), &options).unwrap();
        assert!(table.is_pruned());
        assert!(table.count(100, 400, 1).is_err());
        let mut rng = RngStream::from_seed(7);
        for _ in 0..5 {
            let (d, cost) = sample_doag_counted(&mut rng, &table, 100, 500, 3).unwrap();
            let squares: u64 = d.out_degrees().iter().map(|&x| (x * x) as u64).sum();
            assert!(cost.multiplications <= 4 * squares, "{cost:?} vs {squares}");
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let table = DoagCountTable::build(12, 30, DegreePolicy::All).unwrap();
        let a = sample_doag(&mut RngStream::from_seed(9), &table, 12, 30, 2).unwrap();
        let b = sample_doag(&mut RngStream::from_seed(9), &table, 12, 30, 2).unwrap();
        assert_eq!(a, b);
    }
}
