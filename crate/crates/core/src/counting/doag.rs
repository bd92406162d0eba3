use std::io::{BufRead, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;

use super::cache::{self, CacheHeader, CacheKind};
use super::policy::DegreePolicy;
use super::wedge::{choose2, layer_bounds, Layer, Wedge};
use crate::error::{Error, Result};

/// Knobs for table construction.
#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Abort with [`Error::ResourceLimit`] once the stored entries exceed this
    /// many bytes. `None` means unbounded.
    pub memory_budget: Option<usize>,
    /// Worker threads used inside one layer. `None` or `Some(1)` builds
    /// sequentially.
    pub threads: Option<usize>,
}

/// Coefficients `C(j+i, i) * C(p, i) * i!` for `i = 0..=p`, obtained from one
/// another by the exact ratio `(j+i)(p-i+1)/i`.
pub(crate) struct DoagCoefficients {
    j: u64,
    p: u64,
    i: u64,
    value: BigUint,
}

impl DoagCoefficients {
    pub fn new(j: usize, p: usize) -> Self {
        DoagCoefficients {
            j: j as u64,
            p: p as u64,
            i: 0,
            value: BigUint::from(1u32),
        }
    }
}

impl Iterator for DoagCoefficients {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        if self.i > self.p {
            return None;
        }
        if self.i > 0 {
            self.value *= (self.j + self.i) * (self.p - self.i + 1);
            self.value /= self.i;
        }
        self.i += 1;
        Some(self.value.clone())
    }
}

/// Counts `D_{n,m,k}` of DOAGs with `n` vertices, `m` edges and `k` sources
/// whose removed vertices all have an out-degree allowed by the policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoagCountTable {
    policy: DegreePolicy,
    wedge: Wedge,
}

fn doag_row(policy: &DegreePolicy, prev: &Layer, n: usize, k: usize, lo: usize, hi: usize) -> Vec<BigUint> {
    let mut values = vec![BigUint::ZERO; hi - lo + 1];
    for p in policy.degrees_upto(n - k) {
        let j = n - k - p;
        for (i, coef) in DoagCoefficients::new(j, p).enumerate() {
            let sub_sources = k - 1 + p - i;
            if sub_sources == 0 {
                continue;
            }
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

impl DoagCountTable {
    pub fn build(max_n: usize, max_m: usize, policy: DegreePolicy) -> Result<Self> {
        Self::build_with(max_n, max_m, policy, &BuildOptions::default())
    }

    pub fn build_with(
        max_n: usize,
        max_m: usize,
        policy: DegreePolicy,
        options: &BuildOptions,
    ) -> Result<Self> {
        Self::build_bounded(max_n, max_m, None, policy, options)
    }

    /// Table that only answers the queries needed to sample graphs with
    /// exactly `n` vertices and `m` edges: entries that no such graph can
    /// decompose into are left out, and querying them is an
    /// [`Error::OutOfRange`]. Much cheaper than a full table when the policy
    /// bounds the out-degree.
    pub fn build_for_target(n: usize, m: usize, policy: DegreePolicy, options: &BuildOptions) -> Result<Self> {
        Self::build_bounded(n, m, Some(m), policy, options)
    }

    fn build_bounded(
        max_n: usize,
        max_m: usize,
        target_m: Option<usize>,
        policy: DegreePolicy,
        options: &BuildOptions,
    ) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::OutOfRange {
                n: 0,
                m: max_m,
                max_n: 0,
                max_m,
            });
        }
        let wedge = Wedge::build(
            max_n,
            max_m,
            layer_bounds(max_n, policy.max_degree(), target_m),
            options.threads,
            options.memory_budget,
            |_| (),
            |prev, _, n, k, lo, hi| doag_row(&policy, prev, n, k, lo, hi),
        )?;
        Ok(DoagCountTable { policy, wedge })
    }

    pub fn policy(&self) -> &DegreePolicy {
        &self.policy
    }

    pub fn max_n(&self) -> usize {
        self.wedge.max_n
    }

    pub fn max_m(&self) -> usize {
        self.wedge.max_m
    }

    /// `D_{n,m,k}` without range checks; zero outside the stored region.
    pub fn get(&self, n: usize, m: usize, k: usize) -> &BigUint {
        self.wedge.get(n, m, k)
    }

    pub fn count(&self, n: usize, m: usize, k: usize) -> Result<BigUint> {
        self.wedge.check_range(n, m)?;
        Ok(self.get(n, m, k).clone())
    }

    fn check_complete(&self, n: usize) -> Result<()> {
        self.wedge.check_range(n, 0)?;
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

    /// `D_n`, summed over all edge and source counts.
    pub fn count_by_vertices(&self, n: usize) -> Result<BigUint> {
        self.check_complete(n)?;
        Ok((1..=n).map(|k| self.count_by_sources_unchecked(n, k)).sum())
    }

    /// `sum_k D_{n,m,k}`.
    pub fn count_by_edges(&self, n: usize, m: usize) -> Result<BigUint> {
        self.wedge.check_range(n, m)?;
        Ok((1..=n).map(|k| self.get(n, m, k)).sum())
    }

    /// `sum_m D_{n,m,k}`.
    pub fn count_by_sources(&self, n: usize, k: usize) -> Result<BigUint> {
        self.check_complete(n)?;
        Ok(self.count_by_sources_unchecked(n, k))
    }

    fn count_by_sources_unchecked(&self, n: usize, k: usize) -> BigUint {
        self.wedge
            .row(n, k)
            .map(|row| row.values.iter().sum())
            .unwrap_or_default()
    }

    /// `(D_{n,0}, D_{n,1}, ..., D_{n,C(n,2)})`.
    pub fn edge_profile(&self, n: usize) -> Result<Vec<BigUint>> {
        self.check_complete(n)?;
        (0..=choose2(n)).map(|m| self.count_by_edges(n, m)).collect()
    }

    /// Recomputes every entry from the layer below it and reports the first
    /// disagreement, if any.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let layers = &self.wedge.layers;
        if layers.first().map(|l| l[0].get(0)) != Some(&BigUint::from(1u32)) {
            return Err("D(1,0,1) must be 1".into());
        }
        for n in 2..=layers.len() {
            for k in 1..=n {
                let row = &layers[n - 1][k - 1];
                if row.values.is_empty() {
                    continue;
                }
                let lo = row.m_lo;
                let hi = lo + row.values.len() - 1;
                let expect = doag_row(&self.policy, &layers[n - 2], n, k, lo, hi);
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

    pub fn header(&self) -> CacheHeader {
        CacheHeader {
            kind: CacheKind::Doag,
            policy: self.policy.clone(),
            max_n: self.max_n(),
            max_m: self.max_m(),
        }
    }

    /// Whether the table was built for a single target and misses entries.
    pub fn is_pruned(&self) -> bool {
        self.wedge.is_pruned()
    }

    pub fn write_cache<W: Write>(&self, out: &mut W) -> Result<()> {
        if self.is_pruned() {
            return Err(Error::Internal("a target-pruned table cannot be cached".into()));
        }
        let entries = self
            .wedge
            .nonzero_entries()
            .into_iter()
            .map(|(n, m, k, v)| (vec![n, m, k], v.clone()));
        cache::write_table(out, &self.header(), entries)
    }

    pub fn read_cache<R: BufRead>(mut input: R) -> Result<Self> {
        let header = cache::read_header(&mut input)?;
        if header.kind != CacheKind::Doag {
            return Err(Error::Parse("cache does not hold a DOAG table".into()));
        }
        let entries = cache::read_entries(input, CacheKind::Doag)?;
        let wedge = Wedge::from_entries(
            header.max_n,
            header.max_m,
            layer_bounds(header.max_n, header.policy.max_degree(), None),
            entries.into_iter().map(|(idx, v)| (idx[0], idx[1], idx[2], v)),
        )?;
        Ok(DoagCountTable {
            policy: header.policy,
            wedge,
        })
    }

    /// Loads the table from `path` when its header matches the request,
    /// otherwise builds it and (re)writes the file. Returns whether the cache
    /// was hit.
    pub fn load_or_build(
        path: &Path,
        max_n: usize,
        max_m: usize,
        policy: DegreePolicy,
        options: &BuildOptions,
    ) -> Result<(Self, bool)> {
        let wanted = CacheHeader {
            kind: CacheKind::Doag,
            policy: policy.clone(),
            max_n,
            max_m,
        };
        cache::load_or_build(
            path,
            &wanted,
            Self::read_cache,
            || Self::build_with(max_n, max_m, policy, options),
            |table, out| table.write_cache(out),
        )
    }
}
