use std::fmt;
use std::str::FromStr;

use super::doag::Doag;
use crate::error::{Error, Result};
use crate::variations::is_variation;

/// Square integer matrix whose entry `(i, j)` is the rank of edge `i -> j`
/// among the out-edges of `i` (1-based), or zero when there is no such edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionMatrix {
    n: usize,
    cells: Vec<u32>,
}

impl TransitionMatrix {
    pub fn zero(n: usize) -> Self {
        TransitionMatrix {
            n,
            cells: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix rows must all have length n".into()));
        }
        Ok(TransitionMatrix {
            n,
            cells: rows.concat(),
        })
    }

    /// Builds an `n x n` strictly upper triangular matrix from its row
    /// suffixes: `suffixes[i]` holds `(a[i][j])_{j>i}`.
    pub fn from_row_suffixes(n: usize, suffixes: &[Vec<u32>]) -> Result<Self> {
        let mut m = Self::zero(n);
        if suffixes.len() > n {
            return Err(Error::Parse("too many rows".into()));
        }
        for (i, suffix) in suffixes.iter().enumerate() {
            if suffix.len() != n - 1 - i {
                return Err(Error::Parse(format!("row {i} suffix must have length {}", n - 1 - i)));
            }
            m.row_mut(i)[i + 1..].copy_from_slice(suffix);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u32) {
        self.cells[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.cells[i * self.n..(i + 1) * self.n]
    }

    pub fn nonzero_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    /// Number of leading all-zero columns.
    pub fn zero_column_prefix(&self) -> usize {
        (0..self.n)
            .take_while(|&j| (0..self.n).all(|i| self.get(i, j) == 0))
            .count()
    }

    /// Strictly upper triangular with every row suffix a variation.
    pub fn is_variation_matrix(&self) -> bool {
        (0..self.n).all(|i| {
            let row = self.row(i);
            row[..=i].iter().all(|&c| c == 0) && is_variation(&row[i + 1..])
        })
    }
}

/// Whether the matrix encodes a DOAG: with `b_j` the lowest row (1-based)
/// holding a non-zero entry in column `j` (0 for an empty column), `b` must be
/// weakly increasing and two adjacent columns sharing the same `b_j >= 1` must
/// carry increasing ranks in that row.
pub fn is_valid_transition_matrix(m: &TransitionMatrix) -> bool {
    if !m.is_variation_matrix() {
        return false;
    }
    let n = m.dim();
    let mut lowest = vec![0usize; n];
    for i in 0..n {
        for (j, &c) in m.row(i).iter().enumerate() {
            if c != 0 {
                lowest[j] = i + 1;
            }
        }
    }
    lowest.windows(2).enumerate().all(|(j, w)| {
        w[0] < w[1] || (w[0] == w[1] && (w[0] == 0 || m.get(w[0] - 1, j) < m.get(w[0] - 1, j + 1)))
    })
}

/// Labelled transition matrix of a DOAG.
pub fn encode(d: &Doag) -> TransitionMatrix {
    let n = d.vertex_count();
    let mut m = TransitionMatrix::zero(n);
    for v in 0..n {
        for (rank, &t) in d.out_edges(v).iter().enumerate() {
            m.set(v, t as usize, rank as u32 + 1);
        }
    }
    m
}

/// Inverse of [`encode`]; fails unless the matrix is a labelled transition
/// matrix.
pub fn decode(m: &TransitionMatrix) -> Result<Doag> {
    if !m.is_variation_matrix() {
        return Err(Error::InvalidMatrix("not a strictly upper triangular variation matrix".into()));
    }
    if !is_valid_transition_matrix(m) {
        return Err(Error::InvalidMatrix("column staircase condition violated".into()));
    }
    let out_edges: Vec<Vec<u32>> = (0..m.dim())
        .map(|i| {
            let mut targets: Vec<(u32, u32)> = m
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, &c)| (c, j as u32))
                .collect();
            targets.sort_unstable();
            targets.into_iter().map(|(_, j)| j).collect()
        })
        .collect();
    let doag = Doag::canonicalize(out_edges, None)?;
    if encode(&doag) != *m {
        return Err(Error::Internal("decoded graph does not re-encode to its matrix".into()));
    }
    Ok(doag)
}

impl fmt::Display for TransitionMatrix {
    /// `n` on the first line, then one whitespace-separated line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            if i + 1 < self.n {
                writeln!(f, "{}", row.join(" "))?;
            } else {
                write!(f, "{}", row.join(" "))?;
            }
        }
        Ok(())
    }
}

impl FromStr for TransitionMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse("first line must be the dimension".into()))?;
        let rows = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|x| x.parse::<u32>().map_err(|_| Error::Parse(format!("bad entry `{x}`"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        Self::from_rows(&rows)
    }
}
