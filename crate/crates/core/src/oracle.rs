//! Brute-force enumerations and chi-square tests used as ground truth for
//! the counting tables and the samplers. Nothing here relies on the fast
//! paths' validity checks.

use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::TransitionMatrix;
use crate::labelled::LabelledDag;

pub const MAX_VARIATION_SIZE: usize = 8;
pub const MAX_DOAG_SIZE: usize = 5;
pub const MAX_LABELLED_DAG_SIZE: usize = 4;

fn check_cap(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::SizeLimit { n, max });
    }
    Ok(())
}

/// Positive entries are distinct and form `{1, ..., d}`.
fn variation_ok(values: &[u32]) -> bool {
    let mut positives: Vec<u32> = values.iter().copied().filter(|&v| v > 0).collect();
    positives.sort_unstable();
    positives.iter().zip(1u32..).all(|(&v, want)| v == want)
}

/// Every sequence in `{0..n}^n` that is a variation, in lexicographic order.
pub fn enumerate_variations(n: usize) -> Result<Vec<Vec<u32>>> {
    check_cap(n, MAX_VARIATION_SIZE)?;
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    loop {
        if variation_ok(&current) {
            out.push(current.clone());
        }
        // odometer increment, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if current[pos] < n as u32 {
                current[pos] += 1;
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Every `n x n` matrix with variation rows right of the diagonal, in
/// lexicographic row order.
pub fn enumerate_variation_matrices(n: usize) -> Result<Vec<TransitionMatrix>> {
    check_cap(n, MAX_DOAG_SIZE)?;
    let rows: Vec<Vec<Vec<u32>>> = (0..n).map(|r| enumerate_variations(n - 1 - r)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let full: Vec<Vec<u32>> = (0..n)
            .map(|r| {
                let mut row = vec![0u32; r + 1];
                row.extend(&rows[r][choice[r]]);
                row
            })
            .collect();
        out.push(TransitionMatrix::from_rows(&full)?);
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if choice[pos] + 1 < rows[pos].len() {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Reads the matrix as a graph (edge `i -> j` of rank `a[i][j]`), peels
/// sources in decomposition order and checks that it visits `0, 1, ..., n-1`.
fn labels_follow_decomposition(a: &TransitionMatrix) -> bool {
    let n = a.dim();
    let mut indegree: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| a.get(i, j) > 0).count()).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        if v != head {
            return false;
        }
        head += 1;
        let mut children: Vec<(u32, usize)> = (0..n).filter(|&j| a.get(v, j) > 0).map(|j| (a.get(v, j), j)).collect();
        children.sort_unstable();
        for (_, j) in children {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                queue.push(j);
            }
        }
    }
    head == n
}

/// All DOAGs with `n` vertices, as the matrices whose labelling is the
/// decomposition order.
pub fn enumerate_doags(n: usize) -> Result<Vec<TransitionMatrix>> {
    Ok(enumerate_variation_matrices(n)?
        .into_iter()
        .filter(labels_follow_decomposition)
        .collect())
}

/// Edge count, source count and out-degrees of an enumerated DOAG matrix.
pub fn doag_matrix_shape(a: &TransitionMatrix) -> (usize, usize, Vec<usize>) {
    let n = a.dim();
    let degrees: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| a.get(i, j) > 0).count()).collect();
    let sources = (0..n).filter(|&j| (0..n).all(|i| a.get(i, j) == 0)).count();
    (degrees.iter().sum(), sources, degrees)
}

fn acyclic(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut reach = vec![vec![false; n]; n];
    for &(u, v) in edges {
        reach[u as usize][v as usize] = true;
    }
    for mid in 0..n {
        for from in 0..n {
            if reach[from][mid] {
                for to in 0..n {
                    if reach[mid][to] {
                        reach[from][to] = true;
                    }
                }
            }
        }
    }
    (0..n).all(|v| !reach[v][v])
}

/// All acyclic edge sets on `n` labelled vertices, ordered by the bitmask
/// over the lexicographically listed ordered pairs.
pub fn enumerate_labelled_dags(n: usize) -> Result<Vec<LabelledDag>> {
    check_cap(n, MAX_LABELLED_DAG_SIZE)?;
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|u| (0..n as u32).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(u32, u32)> = (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
        if acyclic(n, &edges) {
            out.push(LabelledDag::from_sorted_unchecked(n, edges));
        }
    }
    Ok(out)
}

/// Groups labelled DAGs by `(edges, sources)` and counts each group.
pub fn labelled_dag_shapes(dags: &[LabelledDag]) -> HashMap<(usize, usize), u64> {
    let mut out = HashMap::new();
    for d in dags {
        let n = d.vertex_count();
        let mut has_parent = vec![false; n];
        for &(_, v) in d.edges() {
            has_parent[v as usize] = true;
        }
        let sources = has_parent.iter().filter(|&&p| !p).count();
        *out.entry((d.edge_count(), sources)).or_insert(0) += 1;
    }
    out
}

fn p_value(statistic: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Ok(1.0);
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(dist.sf(statistic))
}

fn ensure_sampled(total: u64, classes: usize) -> Result<()> {
    let needed = 10 * classes as u64;
    if total < needed {
        return Err(Error::UnderSampled {
            total,
            classes,
            needed,
        });
    }
    Ok(())
}

/// p-value of Pearson's test that `observed` is uniform over `classes`
/// outcomes (outcomes never seen count as zero).
pub fn chi_square_uniformity<T: Eq + Hash>(observed: &HashMap<T, u64>, classes: usize) -> Result<f64> {
    if observed.len() > classes {
        return Err(Error::Internal(format!(
            "{} distinct outcomes but only {classes} classes",
            observed.len()
        )));
    }
    let total: u64 = observed.values().sum();
    ensure_sampled(total, classes)?;
    let expected = total as f64 / classes as f64;
    let seen: f64 = observed
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let unseen = (classes - observed.len()) as f64 * expected;
    p_value(seen + unseen, classes - 1)
}

/// p-value of Pearson's test of `observed` against the distribution
/// `probabilities` (same order, summing to one).
pub fn chi_square_goodness_of_fit(observed: &[u64], probabilities: &[f64]) -> Result<f64> {
    if observed.len() != probabilities.len() {
        return Err(Error::Internal("observed and expected lengths differ".into()));
    }
    let total: u64 = observed.iter().sum();
    ensure_sampled(total, observed.len())?;
    let statistic: f64 = observed
        .iter()
        .zip(probabilities)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    p_value(statistic, observed.len() - 1)
}

/// p-value of the chi-square test that two samples come from the same
/// distribution.
pub fn chi_square_two_sample<T: Eq + Hash + Clone>(a: &HashMap<T, u64>, b: &HashMap<T, u64>) -> Result<f64> {
    let mut keys: Vec<&T> = a.keys().collect();
    keys.extend(b.keys().filter(|k| !a.contains_key(*k)));
    let classes = keys.len();
    let (total_a, total_b): (u64, u64) = (a.values().sum(), b.values().sum());
    ensure_sampled(total_a, classes)?;
    ensure_sampled(total_b, classes)?;
    let (ta, tb) = (total_a as f64, total_b as f64);
    let statistic: f64 = keys
        .iter()
        .map(|k| {
            let oa = *a.get(*k).unwrap_or(&0) as f64;
            let ob = *b.get(*k).unwrap_or(&0) as f64;
            let pooled = (oa + ob) / (ta + tb);
            let (ea, eb) = (pooled * ta, pooled * tb);
            (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb
        })
        .sum();
    p_value(statistic, classes.saturating_sub(1))
}
