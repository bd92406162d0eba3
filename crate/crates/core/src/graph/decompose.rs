use super::doag::Doag;
use crate::error::{Error, Result};

/// Information lost when removing the smallest source `v` of a DOAG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionStep {
    /// Number of sources of the remainder uncovered by the removal.
    pub new_sources: usize,
    /// `(vertex, position)` pairs, sorted by vertex: an internal vertex of the
    /// remainder that `v` pointed to, and the 1-based rank of that edge among
    /// the out-edges of `v`.
    pub internal_targets: Vec<(u32, u32)>,
}

impl DecompositionStep {
    pub fn out_degree(&self) -> usize {
        self.new_sources + self.internal_targets.len()
    }
}

/// Removes vertex 0 (the smallest source). The remainder keeps its canonical
/// order: the surviving sources come first, then the uncovered ones in the
/// order `v` pointed to them.
pub fn decompose_step(d: &Doag) -> Result<(Doag, DecompositionStep)> {
    let n = d.vertex_count();
    if n < 2 {
        return Err(Error::TooSmall { n });
    }
    let indegree = d.in_degrees();
    let mut new_sources = 0;
    let mut internal_targets = Vec::new();
    for (rank, &t) in d.out_edges(0).iter().enumerate() {
        if indegree[t as usize] == 1 {
            new_sources += 1;
        } else {
            internal_targets.push((t - 1, rank as u32 + 1));
        }
    }
    internal_targets.sort_unstable();
    let rest: Vec<Vec<u32>> = d.adjacency()[1..]
        .iter()
        .map(|targets| targets.iter().map(|&t| t - 1).collect())
        .collect();
    Ok((
        Doag::from_canonical_unchecked(rest),
        DecompositionStep {
            new_sources,
            internal_targets,
        },
    ))
}

/// Inverse of [`decompose_step`]: adds a new smallest source pointing to the
/// `new_sources` largest sources of `d` (in their order) and to the listed
/// internal vertices at the listed ranks.
pub fn recompose(d: &Doag, step: &DecompositionStep) -> Result<Doag> {
    let n = d.vertex_count();
    let k = d.source_count();
    let s = step.new_sources;
    if s > k {
        return Err(Error::InconsistentStep(format!("{s} new sources but only {k} sources")));
    }
    let degree = step.out_degree();
    let mut targets: Vec<Option<u32>> = vec![None; degree];
    for &(vertex, pos) in &step.internal_targets {
        if (vertex as usize) < k || vertex as usize >= n {
            return Err(Error::InconsistentStep(format!("{vertex} is not an internal vertex")));
        }
        let slot = (pos as usize)
            .checked_sub(1)
            .and_then(|p| targets.get_mut(p))
            .ok_or_else(|| Error::InconsistentStep(format!("position {pos} out of 1..={degree}")))?;
        if slot.is_some() {
            return Err(Error::InconsistentStep(format!("position {pos} used twice")));
        }
        *slot = Some(vertex);
    }
    if step.internal_targets.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InconsistentStep("internal vertex listed twice".into()));
    }
    let mut uncovered = (k - s) as u32..k as u32;
    let first: Vec<u32> = targets
        .into_iter()
        .map(|t| t.or_else(|| uncovered.next()).expect("free slots match new sources") + 1)
        .collect();
    let mut out_edges = Vec::with_capacity(n + 1);
    out_edges.push(first);
    out_edges.extend(d.adjacency().iter().map(|ts| ts.iter().map(|&t| t + 1).collect()));
    Ok(Doag::from_canonical_unchecked(out_edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_round_trip() {
        let d = Doag::from_out_edges(vec![vec![1], vec![]]).unwrap();
        let (rest, step) = decompose_step(&d).unwrap();
        assert_eq!(rest, Doag::single());
        assert_eq!(
            step,
            DecompositionStep {
                new_sources: 1,
                internal_targets: vec![]
            }
        );
        assert_eq!(recompose(&rest, &step).unwrap(), d);
    }

    #[test]
    fn too_small() {
        assert!(matches!(decompose_step(&Doag::single()), Err(Error::TooSmall { n: 1 })));
    }

    #[test]
    fn mixed_targets() {
        let d = Doag::from_out_edges(vec![vec![2, 1], vec![2], vec![]]).unwrap();
        assert!(Doag::from_out_edges(vec![vec![2, 1], vec![], vec![1]]).is_err());
        let (rest, step) = decompose_step(&d).unwrap();
        assert_eq!(step.new_sources, 1);
        assert_eq!(step.internal_targets.len(), 1);
        assert_eq!(rest.source_count(), d.source_count() - 1 + step.new_sources);
        assert_eq!(recompose(&rest, &step).unwrap(), d);
    }

    #[test]
    fn inconsistent_steps_are_rejected() {
        let rest = Doag::edgeless(2);
        let too_many = DecompositionStep {
            new_sources: 3,
            internal_targets: vec![],
        };
        assert!(recompose(&rest, &too_many).is_err());
        let chain = Doag::from_out_edges(vec![vec![1], vec![]]).unwrap();
        let bad_pos = DecompositionStep {
            new_sources: 0,
            internal_targets: vec![(1, 2)],
        };
        assert!(recompose(&chain, &bad_pos).is_err());
        let not_internal = DecompositionStep {
            new_sources: 0,
            internal_targets: vec![(0, 1)],
        };
        assert!(recompose(&chain, &not_internal).is_err());
    }
}
