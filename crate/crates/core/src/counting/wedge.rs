//! Storage shared by the DOAG and labelled-DAG tables: for every `(n, k)` a
//! contiguous run of entries over the edge counts `m` that can be non-zero.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub(crate) static ZERO: BigUint = BigUint::ZERO;

pub(crate) fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Edge counts `m` for which a graph with `n` vertices and `k` sources can
/// exist: `n - k <= m <= C(n,2) - C(k,2)`.
pub(crate) fn support(n: usize, k: usize) -> Option<(usize, usize)> {
    if n == 0 || k == 0 || k > n {
        return None;
    }
    Some((n - k, choose2(n) - choose2(k)))
}

/// Per-layer edge-count window `(floor, ceiling)`. The ceiling is the most
/// edges `n` vertices can carry when every removed vertex has out-degree at
/// most `max_degree`. With a target `(max_n, m)`, the floor drops every entry
/// that cannot lie on a decomposition path of a graph with `m` edges.
pub(crate) fn layer_bounds(
    max_n: usize,
    max_degree: Option<usize>,
    target_m: Option<usize>,
) -> impl Fn(usize) -> (usize, usize) {
    let cap = move |t: usize| max_degree.map_or(t - 1, |d| d.min(t - 1));
    let mut ceilings = vec![0usize; max_n + 1];
    for t in 2..=max_n {
        ceilings[t] = ceilings[t - 1] + cap(t);
    }
    let mut floors = vec![0usize; max_n + 1];
    if let Some(m) = target_m {
        let mut removable = 0usize;
        for t in (1..=max_n).rev() {
            floors[t] = m.saturating_sub(removable);
            removable += if t >= 2 { cap(t) } else { 0 };
        }
    }
    move |n| (floors[n], ceilings[n])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Row {
    pub m_lo: usize,
    pub values: Vec<BigUint>,
}

impl Row {
    pub fn empty() -> Self {
        Row {
            m_lo: 0,
            values: Vec::new(),
        }
    }

    pub fn get(&self, m: usize) -> &BigUint {
        m.checked_sub(self.m_lo)
            .and_then(|idx| self.values.get(idx))
            .unwrap_or(&ZERO)
    }

    pub fn m_range(&self) -> std::ops::Range<usize> {
        self.m_lo..self.m_lo + self.values.len()
    }

    fn approx_bytes(&self) -> usize {
        self.values
            .iter()
            .map(|v| std::mem::size_of::<BigUint>() + v.bits().div_ceil(8) as usize)
            .sum()
    }
}

/// Layer `n` holds one row per `k` in `1..=n`.
pub(crate) type Layer = Vec<Row>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Wedge {
    pub max_n: usize,
    pub max_m: usize,
    pub layers: Vec<Layer>,
    /// Smallest edge count computed in each layer; all zero unless the table
    /// was pruned towards one target.
    pub floors: Vec<usize>,
}

impl Wedge {
    pub fn get(&self, n: usize, m: usize, k: usize) -> &BigUint {
        if n == 0 || k == 0 || n > self.layers.len() || k > n {
            return &ZERO;
        }
        self.layers[n - 1][k - 1].get(m)
    }

    pub fn row(&self, n: usize, k: usize) -> Option<&Row> {
        if n == 0 || k == 0 || k > n {
            return None;
        }
        self.layers.get(n - 1).map(|layer| &layer[k - 1])
    }

    pub fn check_range(&self, n: usize, m: usize) -> Result<()> {
        if n > self.max_n || m > self.max_m || (n >= 1 && m < self.floors[n - 1]) {
            return Err(Error::OutOfRange {
                n,
                m,
                max_n: self.max_n,
                max_m: self.max_m,
            });
        }
        Ok(())
    }

    pub fn approx_bytes(&self) -> usize {
        self.layers.iter().flatten().map(Row::approx_bytes).sum()
    }

    pub fn is_pruned(&self) -> bool {
        self.floors.iter().any(|&f| f > 0)
    }

    /// Grows the table layer by layer. Layer `n` covers the edge counts in
    /// `bounds(n)` (intersected with the support and `max_m`).
    /// `prepare(prev_layer)` runs once per layer;
    /// `make_row(prev_layer, prepared, n, k, lo, hi)` must return the entries
    /// for `m` in `lo..=hi`.
    pub fn build<P, G, F>(
        max_n: usize,
        max_m: usize,
        bounds: impl Fn(usize) -> (usize, usize),
        threads: Option<usize>,
        budget: Option<usize>,
        prepare: G,
        make_row: F,
    ) -> Result<Self>
    where
        P: Sync,
        G: Fn(&Layer) -> P,
        F: Fn(&Layer, &P, usize, usize, usize, usize) -> Vec<BigUint> + Sync,
    {
        let mut wedge = Wedge {
            max_n,
            max_m,
            layers: Vec::with_capacity(max_n),
            floors: (1..=max_n).map(|n| bounds(n).0).collect(),
        };
        if max_n == 0 {
            return Ok(wedge);
        }
        wedge.layers.push(vec![Row {
            m_lo: 0,
            values: vec![BigUint::from(1u32)],
        }]);
        let pool = match threads {
            Some(t) if t > 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Internal(e.to_string()))?,
            ),
            _ => None,
        };
        let mut used = wedge.approx_bytes();
        for n in 2..=max_n {
            let prev = wedge.layers.last().expect("layer 1 exists");
            let prepared = prepare(prev);
            let (floor, ceiling) = bounds(n);
            let one_row = |k: usize| -> Row {
                match support(n, k) {
                    Some((lo, hi)) if lo.max(floor) <= hi.min(max_m).min(ceiling) => {
                        let lo = lo.max(floor);
                        let hi = hi.min(max_m).min(ceiling);
                        let values = make_row(prev, &prepared, n, k, lo, hi);
                        debug_assert_eq!(values.len(), hi - lo + 1);
                        Row { m_lo: lo, values }
                    }
                    _ => Row::empty(),
                }
            };
            let layer: Layer = match &pool {
                Some(pool) => pool.install(|| (1..=n).into_par_iter().map(one_row).collect()),
                None => (1..=n).map(one_row).collect(),
            };
            used += layer.iter().map(Row::approx_bytes).sum::<usize>();
            if let Some(budget) = budget {
                if used > budget {
                    return Err(Error::ResourceLimit {
                        needed: used,
                        budget,
                    });
                }
            }
            wedge.layers.push(layer);
        }
        Ok(wedge)
    }

    /// Iterates over the non-zero entries in lexicographic `(n, m, k)` order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, usize, &BigUint)> {
        let mut out = Vec::new();
        for (n_idx, layer) in self.layers.iter().enumerate() {
            let n = n_idx + 1;
            let m_max = layer.iter().map(|r| r.m_range().end).max().unwrap_or(0);
            for m in 0..m_max {
                for (k_idx, row) in layer.iter().enumerate() {
                    let v = row.get(m);
                    if !v.is_zero() {
                        out.push((n, m, k_idx + 1, v));
                    }
                }
            }
        }
        out
    }

    /// Rebuilds a wedge from sparse entries; entries outside the support are
    /// rejected.
    pub fn from_entries(
        max_n: usize,
        max_m: usize,
        bounds: impl Fn(usize) -> (usize, usize),
        entries: impl IntoIterator<Item = (usize, usize, usize, BigUint)>,
    ) -> Result<Self> {
        let mut layers: Vec<Layer> = (1..=max_n)
            .map(|n| {
                let ceiling = bounds(n).1;
                (1..=n)
                    .map(|k| match support(n, k) {
                        Some((lo, hi)) if lo <= hi.min(max_m).min(ceiling) => Row {
                            m_lo: lo,
                            values: vec![BigUint::ZERO; hi.min(max_m).min(ceiling) - lo + 1],
                        },
                        _ => Row::empty(),
                    })
                    .collect()
            })
            .collect();
        for (n, m, k, v) in entries {
            let slot = (n >= 1 && n <= max_n && k >= 1 && k <= n)
                .then(|| &mut layers[n - 1][k - 1])
                .and_then(|row| {
                    let lo = row.m_lo;
                    m.checked_sub(lo).and_then(|idx| row.values.get_mut(idx))
                });
            match slot {
                Some(slot) => *slot = v,
                None => {
                    return Err(Error::Parse(format!(
                        "entry ({n}, {m}, {k}) lies outside the table support"
                    )))
                }
            }
        }
        Ok(Wedge {
            max_n,
            max_m,
            layers,
            floors: vec![0; max_n],
        })
    }
}
