//! Text renderings of DOAGs.

use std::fmt::Write;

use super::doag::Doag;
use crate::error::{Error, Result};

/// `n` on the first line, then `src dst rank` per edge (1-based), in vertex
/// order and out-edge order.
pub fn to_edge_list(d: &Doag) -> String {
    let mut out = format!("{}\n", d.vertex_count());
    for v in 0..d.vertex_count() {
        for (rank, &t) in d.out_edges(v).iter().enumerate() {
            writeln!(out, "{} {} {}", v + 1, t + 1, rank + 1).unwrap();
        }
    }
    out
}

/// Parses [`to_edge_list`] output. Sources are ordered by label; the result
/// is re-canonicalized.
pub fn from_edge_list(text: &str) -> Result<Doag> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| Error::Parse("edge list must start with the vertex count".into()))?;
    let mut ranked: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for line in lines {
        let fields: Vec<u32> = line
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad edge line `{line}`"))))
            .collect::<Result<_>>()?;
        let &[src, dst, rank] = fields.as_slice() else {
            return Err(Error::Parse(format!("edge line needs `src dst rank`: `{line}`")));
        };
        if src == 0 || dst == 0 || src as usize > n || dst as usize > n {
            return Err(Error::Parse(format!("vertex out of range in `{line}`")));
        }
        ranked[src as usize - 1].push((rank, dst - 1));
    }
    let mut out_edges = Vec::with_capacity(n);
    for mut targets in ranked {
        targets.sort_unstable();
        if targets.iter().enumerate().any(|(i, &(r, _))| r as usize != i + 1) {
            return Err(Error::Parse("edge ranks of a vertex must be 1..=d".into()));
        }
        out_edges.push(targets.into_iter().map(|(_, t)| t).collect());
    }
    Doag::canonicalize(out_edges, None)
}

/// Graphviz rendering; edges carry their rank as label and appear in out-edge
/// order.
pub fn to_dot(d: &Doag) -> String {
    let mut out = String::from("digraph {\n");
    let k = d.source_count();
    writeln!(out, "  // sources: 1..{k}").unwrap();
    for v in 0..d.vertex_count() {
        writeln!(out, "  {};", v + 1).unwrap();
    }
    for v in 0..d.vertex_count() {
        for (rank, &t) in d.out_edges(v).iter().enumerate() {
            writeln!(out, "  {} -> {} [label=\"{}\"];", v + 1, t + 1, rank + 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let d = Doag::canonicalize(vec![vec![2, 1], vec![2], vec![]], None).unwrap();
        let text = to_edge_list(&d);
        assert_eq!(from_edge_list(&text).unwrap(), d);
        assert!(from_edge_list("2\n1 2 2\n").is_err());
        assert!(from_edge_list("2\n1 3 1\n").is_err());
    }

    #[test]
    fn dot_lists_edges_in_rank_order() {
        let d = Doag::from_out_edges(vec![vec![1, 2], vec![], vec![]]).unwrap();
        let dot = to_dot(&d);
        assert!(dot.starts_with("digraph {\n  // sources: 1..1\n"));
        let first = dot.find("1 -> 2 [label=\"1\"]").unwrap();
        let second = dot.find("1 -> 3 [label=\"2\"]").unwrap();
        assert!(first < second);
    }
}
