use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::cache::{self, CacheHeader, CacheKind};
use super::policy::DegreePolicy;
use crate::error::{Error, Result};

/// Memoized `gamma(a, b) = sum_i C(b+i, b) C(a, i) i!`, filled through
/// `gamma(a, b) = gamma(a, b-1) + a gamma(a-1, b) + [b = 0]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GammaTable {
    rows: Vec<Vec<BigUint>>,
}

impl GammaTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, a: usize, b: usize) {
        while self.rows.len() <= a {
            self.rows.push(Vec::new());
        }
        for row_a in 0..=a {
            let (done, rest) = self.rows.split_at_mut(row_a);
            let row = &mut rest[0];
            while row.len() <= b {
                let col = row.len();
                let value = if row_a == 0 {
                    BigUint::from(1u32)
                } else {
                    let left = if col == 0 {
                        BigUint::from(1u32)
                    } else {
                        row[col - 1].clone()
                    };
                    left + &done[row_a - 1][col] * row_a as u64
                };
                row.push(value);
            }
        }
    }

    /// Makes every `gamma(a, b)` with `a + b <= limit` available.
    pub fn ensure_triangle(&mut self, limit: usize) {
        for a in 0..=limit {
            self.ensure(a, limit - a);
        }
    }

    /// `gamma(a, b)`, zero for negative arguments.
    pub fn get(&mut self, a: i64, b: i64) -> BigUint {
        if a < 0 || b < 0 {
            return BigUint::ZERO;
        }
        self.value(a as usize, b as usize).clone()
    }

    pub fn value(&mut self, a: usize, b: usize) -> &BigUint {
        if self.rows.get(a).is_none_or(|r| r.len() <= b) {
            self.ensure(a, b);
        }
        &self.rows[a][b]
    }

    fn peek(&self, a: usize, b: usize) -> &BigUint {
        &self.rows[a][b]
    }

    pub fn write_cache<W: Write>(&self, out: &mut W) -> Result<()> {
        let max_a = self.rows.len().saturating_sub(1);
        let max_b = self.rows.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1);
        let header = CacheHeader {
            kind: CacheKind::Gamma,
            policy: DegreePolicy::All,
            max_n: max_a,
            max_m: max_b,
        };
        let entries = self.rows.iter().enumerate().flat_map(|(a, row)| {
            row.iter().enumerate().map(move |(b, v)| (vec![a, b], v.clone()))
        });
        cache::write_table(out, &header, entries)
    }

    pub fn read_cache<R: BufRead>(mut input: R) -> Result<Self> {
        let header = cache::read_header(&mut input)?;
        if header.kind != CacheKind::Gamma {
            return Err(Error::Parse("cache does not hold a gamma table".into()));
        }
        let mut rows: Vec<Vec<BigUint>> = Vec::new();
        for (idx, v) in cache::read_entries(input, CacheKind::Gamma)? {
            let (a, b) = (idx[0], idx[1]);
            if a == rows.len() {
                rows.push(Vec::new());
            } else if a + 1 != rows.len() {
                return Err(Error::Parse(format!("gamma entry ({a}, {b}) out of order")));
            }
            if rows[a].len() != b {
                return Err(Error::Parse(format!("gamma entry ({a}, {b}) leaves a gap")));
            }
            rows[a].push(v);
        }
        Ok(GammaTable { rows })
    }
}

/// Edge-agnostic counts `D_{n,k}` of DOAGs with `n` vertices and `k` sources,
/// `D_{n,k} = sum_s D_{n-1,k-1+s} gamma(n-k-s, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceCountTable {
    /// `layers[n-1][k-1] = D_{n,k}`.
    layers: Vec<Vec<BigUint>>,
}

impl SourceCountTable {
    pub fn build(max_n: usize) -> Result<Self> {
        Self::build_with_threads(max_n, None)
    }

    pub fn build_with_threads(max_n: usize, threads: Option<usize>) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::OutOfRange {
                n: 0,
                m: 0,
                max_n: 0,
                max_m: 0,
            });
        }
        let mut gamma = GammaTable::new();
        gamma.ensure_triangle(max_n);
        let mut layers: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u32)]];
        let pool = match threads {
            Some(t) if t > 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Internal(e.to_string()))?,
            ),
            _ => None,
        };
        for n in 2..=max_n {
            let prev = &layers[n - 2];
            let gamma = &gamma;
            let entry = |k: usize| -> BigUint {
                let mut total = BigUint::ZERO;
                for s in 0..=(n - k) {
                    let sub_sources = k - 1 + s;
                    if sub_sources == 0 {
                        continue;
                    }
                    total += &prev[sub_sources - 1] * gamma.peek(n - k - s, s);
                }
                total
            };
            let layer: Vec<BigUint> = match &pool {
                Some(pool) => pool.install(|| (1..=n).into_par_iter().map(entry).collect()),
                None => (1..=n).map(entry).collect(),
            };
            layers.push(layer);
        }
        Ok(SourceCountTable { layers })
    }

    pub fn max_n(&self) -> usize {
        self.layers.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.max_n() {
            return Err(Error::OutOfRange {
                n,
                m: 0,
                max_n: self.max_n(),
                max_m: 0,
            });
        }
        Ok(())
    }

    /// `D_{n,k}`; zero outside `1 <= k <= n`.
    pub fn count(&self, n: usize, k: usize) -> Result<BigUint> {
        self.check(n)?;
        if n == 0 || k == 0 || k > n {
            return Ok(BigUint::ZERO);
        }
        Ok(self.layers[n - 1][k - 1].clone())
    }

    /// `D_n = sum_k D_{n,k}`.
    pub fn total(&self, n: usize) -> Result<BigUint> {
        self.check(n)?;
        if n == 0 {
            return Ok(BigUint::ZERO);
        }
        Ok(self.layers[n - 1].iter().sum())
    }

    /// `D*_n = D_{n,1}`, DOAGs with a single source.
    pub fn single_source(&self, n: usize) -> Result<BigUint> {
        self.count(n, 1)
    }

    pub fn write_cache<W: Write>(&self, out: &mut W) -> Result<()> {
        let header = CacheHeader {
            kind: CacheKind::Source,
            policy: DegreePolicy::All,
            max_n: self.max_n(),
            max_m: 0,
        };
        let entries = self.layers.iter().enumerate().flat_map(|(n, layer)| {
            layer.iter().enumerate().map(move |(k, v)| (vec![n + 1, k + 1], v.clone()))
        });
        cache::write_table(out, &header, entries)
    }

    pub fn read_cache<R: BufRead>(mut input: R) -> Result<Self> {
        let header = cache::read_header(&mut input)?;
        if header.kind != CacheKind::Source {
            return Err(Error::Parse("cache does not hold a source table".into()));
        }
        let mut layers: Vec<Vec<BigUint>> = (1..=header.max_n).map(|n| Vec::with_capacity(n)).collect();
        for (idx, v) in cache::read_entries(input, CacheKind::Source)? {
            let (n, k) = (idx[0], idx[1]);
            if n == 0 || n > header.max_n || k != layers[n - 1].len() + 1 || k > n {
                return Err(Error::Parse(format!("source entry ({n}, {k}) out of place")));
            }
            layers[n - 1].push(v);
        }
        if layers.iter().enumerate().any(|(i, l)| l.len() != i + 1) {
            return Err(Error::Parse("source table is incomplete".into()));
        }
        Ok(SourceCountTable { layers })
    }
}

/// `sf(k) = 0! 1! ... k!` for `k = 0..=max`.
pub fn superfactorials(max: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(max + 1);
    let mut fact = BigUint::from(1u32);
    let mut sf = BigUint::from(1u32);
    out.push(sf.clone());
    for i in 1..=max {
        fact *= i as u64;
        sf *= &fact;
        out.push(sf.clone());
    }
    out
}

/// Natural logarithm of `num / den`, accurate to a few ulps even when both
/// are far beyond the `f64` range.
pub(crate) fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    const PRECISION: i64 = 64;
    let shift = den.bits() as i64 - num.bits() as i64 + PRECISION;
    let quotient = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = quotient.to_f64().expect("quotient has about 64 bits");
    q.ln() - shift as f64 * std::f64::consts::LN_2
}

/// `(D_j sqrt(j) / (sf(j-1) e^(j-1)))_{j=1..=n}` for all DOAGs and for the
/// single-source ones.
pub fn normalized_constant_sequence(table: &SourceCountTable, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    table.check(n)?;
    let sf = superfactorials(n);
    let mut all = Vec::with_capacity(n);
    let mut single = Vec::with_capacity(n);
    for j in 1..=n {
        let scale = 0.5 * (j as f64).ln() - (j - 1) as f64;
        let total = table.total(j)?;
        let star = table.single_source(j)?;
        all.push((ln_ratio(&total, &sf[j - 1]) + scale).exp());
        single.push((ln_ratio(&star, &sf[j - 1]) + scale).exp());
    }
    Ok((all, single))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_gamma(a: u64, b: u64) -> BigUint {
        fn fact(n: u64) -> BigUint {
            (1..=n).map(BigUint::from).product()
        }
        fn binom(n: u64, k: u64) -> BigUint {
            fact(n) / (fact(k) * fact(n - k))
        }
        (0..=a).map(|i| binom(b + i, b) * binom(a, i) * fact(i)).sum()
    }

    #[test]
    fn gamma_recurrence_matches_direct_sum() {
        let mut g = GammaTable::new();
        for a in 0..8u64 {
            for b in 0..8u64 {
                assert_eq!(g.get(a as i64, b as i64), direct_gamma(a, b), "({a},{b})");
            }
        }
    }

    #[test]
    fn gamma_boundary_values() {
        let mut g = GammaTable::new();
        assert_eq!(g.get(0, 5), BigUint::from(1u32));
        assert_eq!(g.get(1, 0), BigUint::from(2u32));
        assert_eq!(g.get(-1, 3), BigUint::ZERO);
        assert_eq!(g.get(2, -1), BigUint::ZERO);
    }

    #[test]
    fn gamma_cache_round_trip() {
        let mut g = GammaTable::new();
        g.ensure_triangle(6);
        let mut buf = Vec::new();
        g.write_cache(&mut buf).unwrap();
        let back = GammaTable::read_cache(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn source_table_small_values() {
        let t = SourceCountTable::build(5).unwrap();
        assert_eq!(t.count(1, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(t.count(5, 1).unwrap(), BigUint::from(3399u32));
        assert_eq!(t.total(4).unwrap(), BigUint::from(95u32));
        assert!(t.count(6, 1).is_err());
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        assert_eq!(SourceCountTable::read_cache(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn superfactorial_values() {
        let sf = superfactorials(4);
        let want: Vec<BigUint> = [1u32, 1, 2, 12, 288].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(sf, want);
    }

    #[test]
    fn ln_ratio_is_accurate() {
        let a = BigUint::from(95u32);
        let b = BigUint::from(12u32);
        assert!((ln_ratio(&a, &b) - (95.0f64 / 12.0).ln()).abs() < 1e-14);
        let big = BigUint::from(3u32).pow(500);
        let small = BigUint::from(7u32);
        let want = 500.0 * 3f64.ln() - 7f64.ln();
        assert!((ln_ratio(&big, &small) - want).abs() < 1e-10);
        assert!((ln_ratio(&small, &big) + want).abs() < 1e-10);
    }

    #[test]
    fn normalized_first_terms() {
        let t = SourceCountTable::build(4).unwrap();
        let (all, single) = normalized_constant_sequence(&t, 4).unwrap();
        assert!((single[0] - 1.0).abs() < 1e-12);
        let want = 95.0 * 2.0 / (12.0 * 3f64.exp());
        assert!((all[3] - want).abs() < 1e-9 * want);
    }
}
