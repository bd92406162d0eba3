use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A directed ordered acyclic graph in canonical form.
///
/// Vertices are numbered `0..n` in decomposition order: repeatedly removing
/// the smallest source, with newly uncovered sources queued after the
/// existing ones in the order of the removed vertex's out-edges. Sources form
/// the prefix `0..k` and are ordered by index; `out_edges[v]` lists the
/// targets of `v` in out-edge order. Equality of two values is equality of
/// the DOAGs they represent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Doag {
    out_edges: Vec<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoagStats {
    pub vertices: usize,
    pub edges: usize,
    pub sources: usize,
    pub sinks: usize,
    pub max_out_degree: usize,
}

/// Decomposition order of an ordered DAG given as arbitrary-labelled out-edge
/// lists: `order[t]` is the vertex removed at step `t`. Fails on cycles,
/// duplicate edges and out-of-range targets.
pub(crate) fn decomposition_order(out_edges: &[Vec<u32>], source_order: Option<&[u32]>) -> Result<Vec<u32>> {
    let n = out_edges.len();
    let mut indegree = vec![0usize; n];
    for (v, targets) in out_edges.iter().enumerate() {
        let mut seen = std::collections::HashSet::with_capacity(targets.len());
        for &t in targets {
            if t as usize >= n {
                return Err(Error::Malformed(format!("edge {v} -> {t} leaves the vertex range")));
            }
            if t as usize == v {
                return Err(Error::Malformed(format!("self-loop on {v}")));
            }
            if !seen.insert(t) {
                return Err(Error::Malformed(format!("duplicate edge {v} -> {t}")));
            }
            indegree[t as usize] += 1;
        }
    }
    let natural: Vec<u32> = (0..n as u32).filter(|&v| indegree[v as usize] == 0).collect();
    let sources = match source_order {
        Some(order) => {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            if sorted != natural {
                return Err(Error::Malformed("source order does not list exactly the sources".into()));
            }
            order.to_vec()
        }
        None => natural,
    };
    let mut queue: VecDeque<u32> = sources.into();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &t in &out_edges[v as usize] {
            indegree[t as usize] -= 1;
            if indegree[t as usize] == 0 {
                queue.push_back(t);
            }
        }
    }
    if order.len() != n {
        return Err(Error::Malformed("graph has a cycle".into()));
    }
    Ok(order)
}

impl Doag {
    /// The one-vertex DOAG.
    pub fn single() -> Self {
        Doag {
            out_edges: vec![Vec::new()],
        }
    }

    pub fn edgeless(n: usize) -> Self {
        Doag {
            out_edges: vec![Vec::new(); n],
        }
    }

    /// Relabels an ordered DAG into canonical form. `source_order` lists the
    /// sources from smallest to largest; by default they are ordered by id.
    pub fn canonicalize(out_edges: Vec<Vec<u32>>, source_order: Option<&[u32]>) -> Result<Self> {
        let order = decomposition_order(&out_edges, source_order)?;
        let mut label = vec![0u32; order.len()];
        for (pos, &v) in order.iter().enumerate() {
            label[v as usize] = pos as u32;
        }
        let mut relabelled = vec![Vec::new(); order.len()];
        for (v, targets) in out_edges.into_iter().enumerate() {
            relabelled[label[v] as usize] = targets.into_iter().map(|t| label[t as usize]).collect();
        }
        Ok(Doag {
            out_edges: relabelled,
        })
    }

    /// Accepts out-edge lists that are already canonical and rejects anything
    /// else.
    pub fn from_out_edges(out_edges: Vec<Vec<u32>>) -> Result<Self> {
        for (v, targets) in out_edges.iter().enumerate() {
            if let Some(&t) = targets.iter().find(|&&t| t as usize <= v) {
                return Err(Error::Malformed(format!("edge {v} -> {t} goes backwards")));
            }
        }
        let order = decomposition_order(&out_edges, None)?;
        if order.iter().enumerate().any(|(pos, &v)| pos != v as usize) {
            return Err(Error::Malformed("labels are not in decomposition order".into()));
        }
        Ok(Doag { out_edges })
    }

    pub(crate) fn from_canonical_unchecked(out_edges: Vec<Vec<u32>>) -> Self {
        let doag = Doag { out_edges };
        debug_assert!(
            Doag::from_out_edges(doag.out_edges.clone()).is_ok(),
            "non-canonical DOAG built internally"
        );
        doag
    }

    pub fn vertex_count(&self) -> usize {
        self.out_edges.len()
    }

    pub fn out_edges(&self, v: usize) -> &[u32] {
        &self.out_edges[v]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.out_edges
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub(crate) fn in_degrees(&self) -> Vec<usize> {
        let mut indegree = vec![0usize; self.vertex_count()];
        for targets in &self.out_edges {
            for &t in targets {
                indegree[t as usize] += 1;
            }
        }
        indegree
    }

    pub fn source_count(&self) -> usize {
        self.in_degrees().iter().take_while(|&&d| d == 0).count()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_edges.iter().map(Vec::len).collect()
    }

    pub fn stats(&self) -> DoagStats {
        DoagStats {
            vertices: self.vertex_count(),
            edges: self.edge_count(),
            sources: self.source_count(),
            sinks: self.out_edges.iter().filter(|t| t.is_empty()).count(),
            max_out_degree: self.out_edges.iter().map(Vec::len).max().unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_small_graphs() {
        let edge = Doag::from_out_edges(vec![vec![1], vec![]]).unwrap();
        assert_eq!(
            edge.stats(),
            DoagStats {
                vertices: 2,
                edges: 1,
                sources: 1,
                sinks: 1,
                max_out_degree: 1
            }
        );
        let empty = Doag::edgeless(4);
        assert_eq!(
            empty.stats(),
            DoagStats {
                vertices: 4,
                edges: 0,
                sources: 4,
                sinks: 4,
                max_out_degree: 0
            }
        );
    }

    #[test]
    fn from_out_edges_rejects_non_canonical_labels() {
        // 0 -> {2, 1}: vertex 2 is uncovered first, so it should carry label 1
        assert!(Doag::from_out_edges(vec![vec![2, 1], vec![], vec![]]).is_err());
        assert!(Doag::from_out_edges(vec![vec![1, 2], vec![], vec![]]).is_ok());
        assert!(Doag::from_out_edges(vec![vec![1, 1], vec![]]).is_err());
        assert!(Doag::from_out_edges(vec![vec![], vec![0]]).is_err());
    }

    #[test]
    fn canonicalize_relabels_and_detects_cycles() {
        let d = Doag::canonicalize(vec![vec![], vec![2, 0], vec![]], None).unwrap();
        assert_eq!(d.adjacency(), &[vec![1, 2], vec![], vec![]]);
        assert!(Doag::canonicalize(vec![vec![1], vec![0]], None).is_err());
        // explicit source order swaps the two isolated-ish sources
        let d = Doag::canonicalize(vec![vec![2], vec![], vec![]], Some(&[1, 0])).unwrap();
        assert_eq!(d.adjacency(), &[vec![], vec![2], vec![]]);
    }
}
