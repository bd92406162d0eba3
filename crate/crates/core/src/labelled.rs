//! Vertex-labelled DAGs: exact counts by vertices, edges and sources, and a
//! uniform sampler driven by the same tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::Zero;

use crate::counting::wedge::{choose2, layer_bounds, support, Layer, Row, Wedge};
use crate::counting::{self, BuildOptions, CacheHeader, CacheKind, DegreePolicy};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A DAG on the labels `0..n` (printed as `1..=n`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelledDag {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl LabelledDag {
    /// Rejects self-loops, out-of-range labels and cycles; duplicate edges
    /// collapse.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let edges: Vec<(u32, u32)> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Malformed(format!("edge {u} -> {v} leaves the vertex range")));
            }
            if u == v {
                return Err(Error::Malformed(format!("self-loop on {u}")));
            }
        }
        let dag = LabelledDag { n, edges };
        let mut indegree = dag.in_degrees();
        let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let adjacency = dag.adjacency();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &t in &adjacency[v] {
                indegree[t as usize] -= 1;
                if indegree[t as usize] == 0 {
                    stack.push(t as usize);
                }
            }
        }
        if seen != n {
            return Err(Error::Malformed("graph has a cycle".into()));
        }
        Ok(dag)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        LabelledDag { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            out[u as usize].push(v);
        }
        out
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for &(_, v) in &self.edges {
            out[v as usize] += 1;
        }
        out
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for &(u, _) in &self.edges {
            out[u as usize] += 1;
        }
        out
    }

    pub fn source_count(&self) -> usize {
        self.in_degrees().iter().filter(|&&d| d == 0).count()
    }

    pub fn sink_count(&self) -> usize {
        self.out_degrees().iter().filter(|&&d| d == 0).count()
    }

    /// `n` on the first line, then one `u v` line per edge, 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| Error::Parse("edge list must start with the vertex count".into()))?;
        let mut edges = Vec::new();
        for line in lines {
            let fields: Vec<u32> = line
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad edge line `{line}`"))))
                .collect::<Result<_>>()?;
            match fields.as_slice() {
                &[u, v] if u >= 1 && v >= 1 => edges.push((u - 1, v - 1)),
                _ => return Err(Error::Parse(format!("edge line needs `u v`: `{line}`"))),
            }
        }
        Self::new(n, edges)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for v in 0..self.n {
            writeln!(out, "  {};", v + 1).unwrap();
        }
        for &(u, v) in &self.edges {
            writeln!(out, "  {} -> {};", u + 1, v + 1).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn binom(n: usize, k: usize) -> BigUint {
    binomial(BigUint::from(n), BigUint::from(k))
}

fn unpoint(layer: &Layer) -> Vec<Row> {
    layer
        .iter()
        .enumerate()
        .map(|(k_idx, row)| Row {
            m_lo: row.m_lo,
            values: row.values.iter().map(|v| v / (k_idx + 1)).collect(),
        })
        .collect()
}

fn dag_row(policy: &DegreePolicy, prev: &[Row], n: usize, k: usize, lo: usize, hi: usize) -> Vec<BigUint> {
    let mut values = vec![BigUint::ZERO; hi - lo + 1];
    for p in policy.degrees_upto(n - k) {
        for i in 0..=p {
            let sub_sources = k - 1 + p - i;
            if sub_sources == 0 || sub_sources > n - 1 {
                continue;
            }
            let coef = binom(n - k - p + i, i) * binom(sub_sources, p - i) * n;
            let row = &prev[sub_sources - 1];
            let range = row.m_range();
            let start = lo.max(range.start + p);
            let end = (hi + 1).min(range.end + p);
            for m in start..end {
                let sub = &row.values[m - p - range.start];
                if !sub.is_zero() {
                    values[m - lo] += sub * &coef;
                }
            }
        }
    }
    values
}

/// Counts `A_{n,m,k}` of labelled DAGs with `n` vertices, `m` edges and `k`
/// sources under a degree policy. Entries are stored pointed, as `k * A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagCountTable {
    policy: DegreePolicy,
    pointed: Wedge,
}

impl DagCountTable {
    pub fn build(max_n: usize, max_m: usize, policy: DegreePolicy) -> Result<Self> {
        Self::build_with(max_n, max_m, policy, &BuildOptions::default())
    }

    pub fn build_with(max_n: usize, max_m: usize, policy: DegreePolicy, options: &BuildOptions) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::OutOfRange {
                n: 0,
                m: max_m,
                max_n: 0,
                max_m,
            });
        }
        let pointed = Wedge::build(
            max_n,
            max_m,
            layer_bounds(max_n, policy.max_degree(), None),
            options.threads,
            options.memory_budget,
            unpoint,
            |_, plain, n, k, lo, hi| dag_row(&policy, plain, n, k, lo, hi),
        )?;
        Ok(DagCountTable { policy, pointed })
    }

    pub fn policy(&self) -> &DegreePolicy {
        &self.policy
    }

    pub fn max_n(&self) -> usize {
        self.pointed.max_n
    }

    pub fn max_m(&self) -> usize {
        self.pointed.max_m
    }

    /// `k * A_{n,m,k}`, zero outside the table.
    pub fn pointed(&self, n: usize, m: usize, k: usize) -> &BigUint {
        self.pointed.get(n, m, k)
    }

    fn get(&self, n: usize, m: usize, k: usize) -> BigUint {
        let p = self.pointed(n, m, k);
        if p.is_zero() {
            BigUint::ZERO
        } else {
            p / k
        }
    }

    /// `A_{n,m,k}`; zero outside the support.
    pub fn count(&self, n: usize, m: usize, k: usize) -> Result<BigUint> {
        self.pointed.check_range(n, m)?;
        Ok(self.get(n, m, k))
    }

    fn check_complete(&self, n: usize) -> Result<()> {
        self.pointed.check_range(n, 0)?;
        if self.max_m() < choose2(n) {
            return Err(Error::OutOfRange {
                n,
                m: choose2(n),
                max_n: self.max_n(),
                max_m: self.max_m(),
            });
        }
        Ok(())
    }

    pub fn count_by_vertices(&self, n: usize) -> Result<BigUint> {
        self.check_complete(n)?;
        Ok((0..=choose2(n)).flat_map(|m| (1..=n).map(move |k| (m, k))).map(|(m, k)| self.get(n, m, k)).sum())
    }

    pub fn count_by_edges(&self, n: usize, m: usize) -> Result<BigUint> {
        self.pointed.check_range(n, m)?;
        Ok((1..=n).map(|k| self.get(n, m, k)).sum())
    }

    pub fn count_by_sources(&self, n: usize, k: usize) -> Result<BigUint> {
        self.check_complete(n)?;
        Ok((0..=choose2(n)).map(|m| self.get(n, m, k)).sum())
    }

    pub fn edge_profile(&self, n: usize) -> Result<Vec<BigUint>> {
        self.check_complete(n)?;
        (0..=choose2(n)).map(|m| self.count_by_edges(n, m)).collect()
    }

    pub fn header(&self) -> CacheHeader {
        CacheHeader {
            kind: CacheKind::Dag,
            policy: self.policy.clone(),
            max_n: self.max_n(),
            max_m: self.max_m(),
        }
    }

    /// Writes the pointed entries `k * A`.
    pub fn write_cache<W: Write>(&self, out: &mut W) -> Result<()> {
        let entries = self
            .pointed
            .nonzero_entries()
            .into_iter()
            .map(|(n, m, k, v)| (vec![n, m, k], v.clone()));
        counting::write_table(out, &self.header(), entries)
    }

    pub fn read_cache<R: BufRead>(mut input: R) -> Result<Self> {
        let header = counting::read_header(&mut input)?;
        if header.kind != CacheKind::Dag {
            return Err(Error::Parse("cache does not hold a labelled-DAG table".into()));
        }
        let entries = counting::read_entries(input, CacheKind::Dag)?;
        if let Some((idx, _)) = entries.iter().find(|(idx, v)| !(v % idx[2]).is_zero()) {
            return Err(Error::Parse(format!(
                "pointed entry ({}, {}, {}) is not divisible by its source count",
                idx[0], idx[1], idx[2]
            )));
        }
        let pointed = Wedge::from_entries(
            header.max_n,
            header.max_m,
            layer_bounds(header.max_n, header.policy.max_degree(), None),
            entries.into_iter().map(|(idx, v)| (idx[0], idx[1], idx[2], v)),
        )?;
        Ok(DagCountTable {
            policy: header.policy,
            pointed,
        })
    }

    pub fn load_or_build(
        path: &Path,
        max_n: usize,
        max_m: usize,
        policy: DegreePolicy,
        options: &BuildOptions,
    ) -> Result<(Self, bool)> {
        let wanted = CacheHeader {
            kind: CacheKind::Dag,
            policy: policy.clone(),
            max_n,
            max_m,
        };
        counting::load_or_build(
            path,
            &wanted,
            Self::read_cache,
            || Self::build_with(max_n, max_m, policy, options),
            |table, out| table.write_cache(out),
        )
    }

    /// Recomputes every entry from the layer below it.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let layers = &self.pointed.layers;
        if layers.first().map(|l| l[0].get(0)) != Some(&BigUint::from(1u32)) {
            return Err("A(1,0,1) must be 1".into());
        }
        for n in 2..=layers.len() {
            let plain = unpoint(&layers[n - 2]);
            for k in 1..=n {
                let row = &layers[n - 1][k - 1];
                if row.values.is_empty() {
                    continue;
                }
                let lo = row.m_lo;
                let expect = dag_row(&self.policy, &plain, n, k, lo, lo + row.values.len() - 1);
                if let Some(off) = (0..expect.len()).find(|&i| expect[i] != row.values[i]) {
                    return Err(format!(
                        "entry (n={n}, m={}, k={k}) does not satisfy the recurrence",
                        lo + off
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Number of labelled DAGs with one source and one sink on `n` vertices;
/// `table` must be built with the positive policy.
pub fn dag_count_single_source_sink(table: &DagCountTable, n: usize) -> Result<BigUint> {
    if *table.policy() != DegreePolicy::Positive {
        return Err(Error::Internal("the table must use the positive degree policy".into()));
    }
    table.count_by_sources(n, 1)
}

fn empty_class(table: &DagCountTable, n: usize, m: usize, k: usize) -> Error {
    let reason = match support(n, k) {
        None => format!("the source count must satisfy 1 <= k <= n = {n}"),
        Some((lo, hi)) if m < lo || m > hi => {
            format!("edges must satisfy n-k <= m <= C(n,2)-C(k,2), here {lo} <= m <= {hi}")
        }
        Some(_) => format!("no such DAG has all out-degrees in policy {}", table.policy()),
    };
    Error::EmptyClass { n, m, k, reason }
}

fn pick_split(rng: &mut RngStream, table: &DagCountTable, n: usize, m: usize, k: usize) -> Result<(usize, usize)> {
    let mut weights = Vec::new();
    for p in table.policy().degrees_upto(n - k) {
        if p > m {
            break;
        }
        for i in 0..=p {
            let sub_sources = k - 1 + p - i;
            let sub = table.get(n - 1, m - p, sub_sources);
            if sub_sources == 0 || sub.is_zero() {
                continue;
            }
            weights.push(((p, i), sub * binom(n - k - p + i, i) * binom(sub_sources, p - i)));
        }
    }
    let total: BigUint = weights.iter().map(|(_, w)| w).sum();
    if total.is_zero() {
        return Err(Error::Internal(format!("no split weight for ({n}, {m}, {k})")));
    }
    let mut r = rng.uniform_big_below(&total);
    for (split, w) in weights {
        if r < w {
            return Ok(split);
        }
        r -= w;
    }
    unreachable!("r is below the total weight")
}

/// Moves a uniform `count`-subset of `from` to its end and splits it off.
fn take_subset(rng: &mut RngStream, from: &mut Vec<u32>, count: usize) -> Vec<u32> {
    let len = from.len();
    for t in 0..count {
        let u = rng.uniform_inclusive(t, len - 1);
        from.swap(t, u);
    }
    from.drain(..count).collect()
}

/// Uniform labelled DAG with `n` vertices, `m` edges and `k` sources.
pub fn sample_dag(rng: &mut RngStream, table: &DagCountTable, n: usize, m: usize, k: usize) -> Result<LabelledDag> {
    if table.count(n, m, k)?.is_zero() {
        return Err(empty_class(table, n, m, k));
    }
    let mut picks = Vec::with_capacity(n - 1);
    let (mut m_cur, mut k_cur) = (m, k);
    for size in (2..=n).rev() {
        let (p, i) = pick_split(rng, table, size, m_cur, k_cur)?;
        picks.push((p, i));
        m_cur -= p;
        k_cur = k_cur - 1 + p - i;
    }

    // Vertices are numbered by creation; `order` lists them by final label.
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m);
    let mut sources: Vec<u32> = vec![0];
    let mut internals: Vec<u32> = Vec::new();
    let mut order: Vec<u32> = vec![0];
    for (created, &(p, i)) in (1u32..).zip(picks.iter().rev()) {
        let covered = take_subset(rng, &mut sources, p - i);
        let targets = take_subset(rng, &mut internals, i);
        edges.extend(covered.iter().chain(&targets).map(|&t| (created, t)));
        internals.extend(targets);
        internals.extend(covered);
        sources.push(created);
        let label = rng.uniform_below(order.len() as u64 + 1) as usize;
        order.insert(label, created);
    }
    let mut label_of = vec![0u32; n];
    for (label, &v) in order.iter().enumerate() {
        label_of[v as usize] = label as u32;
    }
    LabelledDag::new(n, edges.into_iter().map(|(u, v)| (label_of[u as usize], label_of[v as usize])))
}

/// Uniform labelled DAG over the classes left open by `m` and `k`.
pub fn sample_dag_marginal(
    rng: &mut RngStream,
    table: &DagCountTable,
    n: usize,
    m: Option<usize>,
    k: Option<usize>,
) -> Result<LabelledDag> {
    table.count(n, m.unwrap_or(choose2(n)), 1)?;
    let ms: Vec<usize> = m.map_or_else(|| (0..=choose2(n)).collect(), |m| vec![m]);
    let ks: Vec<usize> = k.map_or_else(|| (1..=n).collect(), |k| vec![k]);
    let classes: Vec<(usize, usize, BigUint)> = ms
        .iter()
        .flat_map(|&m| ks.iter().map(move |&k| (m, k)))
        .map(|(m, k)| (m, k, table.get(n, m, k)))
        .filter(|(_, _, c)| !c.is_zero())
        .collect();
    let total: BigUint = classes.iter().map(|(_, _, c)| c).sum();
    if total.is_zero() {
        return Err(match (m, k) {
            (Some(m), Some(k)) => empty_class(table, n, m, k),
            _ => Error::EmptyClass {
                n,
                m: m.unwrap_or(0),
                k: k.unwrap_or(0),
                reason: format!("no DAG with the fixed parameters fits policy {}", table.policy()),
            },
        });
    }
    let mut r = rng.uniform_big_below(&total);
    for (m, k, c) in classes {
        if r < c {
            return sample_dag(rng, table, n, m, k);
        }
        r -= c;
    }
    unreachable!("r is below the total mass")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(n: usize, policy: DegreePolicy) -> DagCountTable {
        DagCountTable::build(n, choose2(n), policy).unwrap()
    }

    #[test]
    fn small_counts() {
        let t = full(6, DegreePolicy::All);
        assert_eq!(t.count(1, 0, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(t.count(2, 1, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(t.count(2, 0, 2).unwrap(), BigUint::from(1u32));
        assert!(t.count(2, 0, 3).unwrap().is_zero());
        let totals: Vec<BigUint> = (1..=6).map(|n| t.count_by_vertices(n).unwrap()).collect();
        let expect: Vec<BigUint> = [1u32, 3, 25, 543, 29281, 3781503].map(BigUint::from).to_vec();
        assert_eq!(totals, expect);
        t.verify().unwrap();
    }

    #[test]
    fn cache_round_trip_and_tamper() {
        let t = full(5, DegreePolicy::Positive);
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        assert_eq!(DagCountTable::read_cache(buf.as_slice()).unwrap(), t);
        let text = String::from_utf8(buf).unwrap();
        let tampered = text.replacen("\n2 1 1 2\n", "\n2 1 1 3\n", 1);
        assert_ne!(tampered, text);
        let reread = DagCountTable::read_cache(tampered.as_bytes()).unwrap();
        assert!(reread.verify().is_err());
        let odd = text.replacen("\n3 2 2 6\n", "\n3 2 2 7\n", 1);
        assert_ne!(odd, text);
        assert!(DagCountTable::read_cache(odd.as_bytes()).is_err());
    }

    #[test]
    fn single_source_sink_needs_positive_policy() {
        assert!(dag_count_single_source_sink(&full(3, DegreePolicy::All), 2).is_err());
        let t = full(3, DegreePolicy::Positive);
        assert_eq!(dag_count_single_source_sink(&t, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(dag_count_single_source_sink(&t, 2).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn samples_have_requested_shape() {
        let t = DagCountTable::build(10, 25, DegreePolicy::AtMost(3)).unwrap();
        let mut rng = RngStream::from_seed(11);
        for k in 1..=3 {
            for _ in 0..50 {
                let d = sample_dag(&mut rng, &t, 10, 18, k).unwrap();
                assert_eq!((d.vertex_count(), d.edge_count(), d.source_count()), (10, 18, k));
                assert!(d.out_degrees().iter().all(|&x| x <= 3));
            }
        }
        assert!(matches!(sample_dag(&mut rng, &t, 3, 7, 1), Err(Error::EmptyClass { .. })));
    }

    #[test]
    fn formats_round_trip() {
        let d = LabelledDag::new(3, [(2, 0), (0, 1)]).unwrap();
        assert_eq!(LabelledDag::from_edge_list(&d.to_edge_list()).unwrap(), d);
        assert!(d.to_dot().contains("  3 -> 1;"));
        assert!(LabelledDag::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(LabelledDag::new(2, [(0, 0)]).is_err());
    }
}
