//! Line-oriented text cache for counting tables.
//!
//! ```text
//! randdag-table v1 kind=doag policy=all maxN=4 maxM=6
//! 1 0 1 1
//! 2 0 2 1
//! ...
//! ```

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;

use super::policy::DegreePolicy;
use crate::error::{Error, Result};

const MAGIC: &str = "randdag-table";
const VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheKind {
    Doag,
    Dag,
    Gamma,
    Source,
}

impl CacheKind {
    fn as_str(self) -> &'static str {
        match self {
            CacheKind::Doag => "doag",
            CacheKind::Dag => "dag",
            CacheKind::Gamma => "gamma",
            CacheKind::Source => "source",
        }
    }

    /// Number of integer indices preceding the count on each entry line.
    pub fn arity(self) -> usize {
        match self {
            CacheKind::Doag | CacheKind::Dag => 3,
            CacheKind::Gamma | CacheKind::Source => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub kind: CacheKind,
    pub policy: DegreePolicy,
    pub max_n: usize,
    pub max_m: usize,
}

impl fmt::Display for CacheHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{MAGIC} {VERSION} kind={} policy={} maxN={} maxM={}",
            self.kind.as_str(),
            self.policy,
            self.max_n,
            self.max_m
        )
    }
}

impl FromStr for CacheHeader {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("cache header: {what} in `{line}`"));
        let mut fields = line.split_whitespace();
        if fields.next() != Some(MAGIC) {
            return Err(bad("missing magic"));
        }
        if fields.next() != Some(VERSION) {
            return Err(bad("unsupported version"));
        }
        let mut kind = None;
        let mut policy = None;
        let mut max_n = None;
        let mut max_m = None;
        for field in fields {
            let (key, value) = field.split_once('=').ok_or_else(|| bad("bad field"))?;
            match key {
                "kind" => {
                    kind = Some(match value {
                        "doag" => CacheKind::Doag,
                        "dag" => CacheKind::Dag,
                        "gamma" => CacheKind::Gamma,
                        "source" => CacheKind::Source,
                        _ => return Err(bad("unknown kind")),
                    })
                }
                "policy" => policy = Some(value.parse()?),
                "maxN" => max_n = Some(value.parse().map_err(|_| bad("bad maxN"))?),
                "maxM" => max_m = Some(value.parse().map_err(|_| bad("bad maxM"))?),
                _ => return Err(bad("unknown field")),
            }
        }
        Ok(CacheHeader {
            kind: kind.ok_or_else(|| bad("missing kind"))?,
            policy: policy.ok_or_else(|| bad("missing policy"))?,
            max_n: max_n.ok_or_else(|| bad("missing maxN"))?,
            max_m: max_m.ok_or_else(|| bad("missing maxM"))?,
        })
    }
}

/// Returns the table stored at `path` when its header equals `wanted`;
/// otherwise builds it and (re)writes the file. The flag tells whether the
/// cache was hit.
pub(crate) fn load_or_build<T>(
    path: &Path,
    wanted: &CacheHeader,
    read: impl FnOnce(BufReader<File>) -> Result<T>,
    build: impl FnOnce() -> Result<T>,
    write: impl FnOnce(&T, &mut BufWriter<File>) -> Result<()>,
) -> Result<(T, bool)> {
    if let Ok(file) = File::open(path) {
        let mut reader = BufReader::new(file);
        if read_header(&mut reader).ok().as_ref() == Some(wanted) {
            let file = File::open(path)?;
            return Ok((read(BufReader::new(file))?, true));
        }
    }
    let table = build()?;
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = BufWriter::new(File::create(path)?);
    write(&table, &mut out)?;
    out.flush()?;
    Ok((table, false))
}

pub(crate) fn write_table<W: Write>(
    out: &mut W,
    header: &CacheHeader,
    entries: impl IntoIterator<Item = (Vec<usize>, BigUint)>,
) -> Result<()> {
    writeln!(out, "{header}")?;
    for (index, value) in entries {
        for i in &index {
            write!(out, "{i} ")?;
        }
        writeln!(out, "{value}")?;
    }
    Ok(())
}

pub(crate) fn read_header<R: BufRead>(input: &mut R) -> Result<CacheHeader> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    line.trim_end().parse()
}

/// Reads the entry lines following the header; enforces strictly increasing
/// index order so that a shuffled or duplicated file is rejected.
pub(crate) fn read_entries<R: BufRead>(
    input: R,
    kind: CacheKind,
) -> Result<Vec<(Vec<usize>, BigUint)>> {
    let mut out: Vec<(Vec<usize>, BigUint)> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("cache line {}: `{line}`", lineno + 2));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != kind.arity() + 1 {
            return Err(bad());
        }
        let index = fields[..kind.arity()]
            .iter()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let value: BigUint = fields[kind.arity()].parse().map_err(|_| bad())?;
        if let Some((last, _)) = out.last() {
            if *last >= index {
                return Err(bad());
            }
        }
        out.push((index, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let header = CacheHeader {
            kind: CacheKind::Doag,
            policy: "set:0,1,2".parse().unwrap(),
            max_n: 8,
            max_m: 28,
        };
        let text = header.to_string();
        assert_eq!(text, "randdag-table v1 kind=doag policy=set:0,1,2 maxN=8 maxM=28");
        assert_eq!(text.parse::<CacheHeader>().unwrap(), header);
    }

    #[test]
    fn header_rejects_other_versions() {
        assert!("randdag-table v2 kind=doag policy=all maxN=1 maxM=0"
            .parse::<CacheHeader>()
            .is_err());
        assert!("something else".parse::<CacheHeader>().is_err());
    }

    #[test]
    fn entries_must_be_sorted() {
        let text = "1 0 1 1\n2 0 2 1\n";
        assert_eq!(read_entries(text.as_bytes(), CacheKind::Doag).unwrap().len(), 2);
        let unsorted = "2 0 2 1\n1 0 1 1\n";
        assert!(read_entries(unsorted.as_bytes(), CacheKind::Doag).is_err());
        let short = "2 0 1\n";
        assert!(read_entries(short.as_bytes(), CacheKind::Doag).is_err());
    }
}
