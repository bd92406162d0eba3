use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use randdag::counting::{DegreePolicy, DoagCountTable, SourceCountTable};
use randdag::graph::{decode, decompose_step, encode, is_valid_transition_matrix, recompose, Doag};
use randdag::labelled::{dag_count_single_source_sink, DagCountTable};
use randdag::oracle::{
    doag_matrix_shape, enumerate_doags, enumerate_labelled_dags, enumerate_variation_matrices, enumerate_variations,
    labelled_dag_shapes,
};
use randdag::variations::{is_variation, variation_count, variation_count_by_zeros};

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn policies() -> Vec<DegreePolicy> {
    vec![
        DegreePolicy::All,
        DegreePolicy::Positive,
        DegreePolicy::AtMost(2),
        "set:0,2,3".parse().unwrap(),
    ]
}

fn oracle_doag_counts(n: usize, policy: &DegreePolicy) -> HashMap<(usize, usize), u64> {
    let mut out = HashMap::new();
    for a in enumerate_doags(n).unwrap() {
        let (m, k, degrees) = doag_matrix_shape(&a);
        if degrees[..n - 1].iter().all(|&d| policy.contains(d)) {
            *out.entry((m, k)).or_insert(0) += 1;
        }
    }
    out
}

#[test]
fn doag_table_matches_enumeration() {
    for policy in policies() {
        let table = DoagCountTable::build(5, choose2(5), policy.clone()).unwrap();
        for n in 1..=5 {
            let oracle = oracle_doag_counts(n, &policy);
            for m in 0..=choose2(n) {
                for k in 0..=n + 1 {
                    let want = BigUint::from(*oracle.get(&(m, k)).unwrap_or(&0));
                    assert_eq!(table.count(n, m, k).unwrap(), want, "policy {policy}, ({n}, {m}, {k})");
                }
            }
        }
    }
}

#[test]
fn labelled_table_matches_enumeration() {
    for policy in [DegreePolicy::All, DegreePolicy::Positive, DegreePolicy::AtMost(1)] {
        let table = DagCountTable::build(4, choose2(4), policy.clone()).unwrap();
        for n in 1..=4 {
            let dags: Vec<_> = enumerate_labelled_dags(n)
                .unwrap()
                .into_iter()
                .filter(|d| {
                    let degrees = d.out_degrees();
                    let sinks = degrees.iter().filter(|&&x| x == 0).count();
                    let non_sink_ok = degrees.iter().filter(|&&x| x > 0).all(|&x| policy.contains(x));
                    // One sink is the vertex left at the end of the decomposition; all
                    // other sinks are removed along the way with out-degree 0.
                    non_sink_ok && (sinks <= 1 || policy.contains(0))
                })
                .collect();
            let oracle = labelled_dag_shapes(&dags);
            for m in 0..=choose2(n) {
                for k in 0..=n + 1 {
                    let want = BigUint::from(*oracle.get(&(m, k)).unwrap_or(&0));
                    assert_eq!(table.count(n, m, k).unwrap(), want, "policy {policy}, ({n}, {m}, {k})");
                }
            }
        }
    }
}

#[test]
fn labelled_totals() {
    let table = DagCountTable::build(6, choose2(6), DegreePolicy::All).unwrap();
    let totals: Vec<u64> = (1..=6)
        .map(|n| table.count_by_vertices(n).unwrap().to_u64().unwrap())
        .collect();
    assert_eq!(totals, vec![1, 3, 25, 543, 29281, 3781503]);
    assert_eq!(table.count(3, 2, 1).unwrap(), BigUint::from(9u32));
}

#[test]
fn single_source_sink_matches_enumeration() {
    let table = DagCountTable::build(4, choose2(4), DegreePolicy::Positive).unwrap();
    for n in 1..=4 {
        let oracle = enumerate_labelled_dags(n)
            .unwrap()
            .iter()
            .filter(|d| d.source_count() == 1 && d.sink_count() == 1)
            .count();
        assert_eq!(
            dag_count_single_source_sink(&table, n).unwrap(),
            BigUint::from(oracle),
            "n = {n}"
        );
    }
    assert_eq!(dag_count_single_source_sink(&table, 3).unwrap(), BigUint::from(12u32));
}

#[test]
fn support_is_exact() {
    let table = DoagCountTable::build(8, choose2(8), DegreePolicy::All).unwrap();
    for n in 1..=8 {
        for k in 0..=n + 1 {
            for m in 0..=choose2(n) {
                let inside = k >= 1 && k <= n && m + k >= n && m + choose2(k) <= choose2(n);
                assert_eq!(!table.count(n, m, k).unwrap().is_zero(), inside, "({n}, {m}, {k})");
            }
        }
    }
}

#[test]
fn edge_profiles_agree_with_source_table() {
    let doag = DoagCountTable::build(12, choose2(12), DegreePolicy::All).unwrap();
    let sources = SourceCountTable::build(12).unwrap();
    for n in 1..=12 {
        for k in 1..=n {
            assert_eq!(doag.count_by_sources(n, k).unwrap(), sources.count(n, k).unwrap());
        }
    }
}

#[test]
fn entries_fit_the_bit_bound() {
    let table = DoagCountTable::build(12, choose2(12), DegreePolicy::All).unwrap();
    for n in 2..=12 {
        for m in 0..=choose2(n) {
            for k in 1..=n {
                let bits = table.count(n, m, k).unwrap().bits() as f64;
                let bound = 2.0 * m as f64 * (n as f64).log2();
                // an entry equal to one has one bit but a zero bound at m = 0
                assert!(bits <= bound.max(1.0), "({n}, {m}, {k}) has {bits} bits");
            }
        }
    }
}

#[test]
fn variation_counts() {
    for n in 0..=6 {
        let all = enumerate_variations(n).unwrap();
        assert_eq!(BigUint::from(all.len()), variation_count(n));
        for p in 0..=n + 1 {
            let with_p = all.iter().filter(|v| v.iter().filter(|&&x| x == 0).count() == p).count();
            assert_eq!(BigUint::from(with_p), variation_count_by_zeros(n, p));
        }
        assert!(all.iter().all(|v| is_variation(v)));
    }
    assert_eq!(variation_count(3), BigUint::from(16u32));
    assert_eq!(variation_count_by_zeros(3, 1), BigUint::from(6u32));
}

#[test]
fn staircase_check_agrees_with_decomposition_order() {
    for (n, want) in [(3, 8), (4, 95)] {
        let matrices = enumerate_variation_matrices(n).unwrap();
        let valid: HashSet<_> = enumerate_doags(n).unwrap().into_iter().collect();
        let passing: Vec<_> = matrices.iter().filter(|a| is_valid_transition_matrix(a)).collect();
        assert_eq!(passing.len(), want);
        for a in &matrices {
            assert_eq!(is_valid_transition_matrix(a), valid.contains(a));
            match decode(a) {
                Ok(d) => assert_eq!(&encode(&d), a),
                Err(_) => assert!(!valid.contains(a)),
            }
        }
    }
}

fn oracle_graphs(n: usize) -> Vec<Doag> {
    enumerate_doags(n).unwrap().iter().map(|a| decode(a).unwrap()).collect()
}

#[test]
fn encoding_is_injective() {
    let graphs = oracle_graphs(4);
    let encoded: HashSet<_> = graphs.iter().map(encode).collect();
    assert_eq!(encoded.len(), 95);
    for d in oracle_graphs(3) {
        assert_eq!(decode(&encode(&d)).unwrap(), d);
    }
}

#[test]
fn decomposition_round_trips() {
    for n in 2..=4 {
        for d in oracle_graphs(n) {
            let (rest, step) = decompose_step(&d).unwrap();
            assert_eq!(recompose(&rest, &step).unwrap(), d);
            assert_eq!(rest.source_count(), d.source_count() - 1 + step.new_sources);
            assert_eq!(step.out_degree(), d.out_edges(0).len());
        }
    }
}

#[test]
fn iterated_decomposition_follows_labels() {
    for d in oracle_graphs(5) {
        // vertex q of the remainder after t steps is vertex q + t of d
        let mut current = d.clone();
        for t in 0..d.vertex_count() - 1 {
            let shifted: Vec<u32> = d.out_edges(t).iter().map(|&x| x - t as u32).collect();
            assert_eq!(current.out_edges(0), shifted.as_slice());
            current = decompose_step(&current).unwrap().0;
        }
        assert_eq!(current, Doag::single());
    }
}

#[test]
fn stats_agree_with_matrices() {
    for n in 1..=4 {
        for a in enumerate_doags(n).unwrap() {
            let d = decode(&a).unwrap();
            let stats = d.stats();
            let (m, k, degrees) = doag_matrix_shape(&a);
            assert_eq!(stats.vertices, n);
            assert_eq!(stats.edges, m);
            assert_eq!(stats.sources, k);
            assert_eq!(stats.sources, a.zero_column_prefix());
            assert_eq!(stats.sinks, degrees.iter().filter(|&&x| x == 0).count());
            assert_eq!(stats.max_out_degree, degrees.iter().copied().max().unwrap_or(0));
        }
    }
}
