//! Brute-force cross checks run by `randdag selftest`.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use randdag::counting::{DegreePolicy, DoagCountTable, SourceCountTable};
use randdag::graph::{decode, encode};
use randdag::labelled::{sample_dag_marginal, DagCountTable};
use randdag::oracle::{
    chi_square_uniformity, doag_matrix_shape, enumerate_doags, enumerate_labelled_dags, labelled_dag_shapes,
};
use randdag::recursive::sample_doag_marginal;
use randdag::rejection::{sample_doag_fast, sample_doag_naive};
use randdag::rng::RngStream;
use randdag::Error;

/// Smallest p-value accepted by the sampler checks.
const ALPHA: f64 = 1e-4;

type Check = Result<(), String>;

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn fail(e: Error) -> String {
    e.to_string()
}

fn doag_counts(max: usize) -> Check {
    for policy in [DegreePolicy::All, DegreePolicy::Positive, DegreePolicy::AtMost(2)] {
        let table = DoagCountTable::build(max, choose2(max), policy.clone()).map_err(fail)?;
        for n in 1..=max {
            let mut oracle: HashMap<(usize, usize), u64> = HashMap::new();
            for a in enumerate_doags(n).map_err(fail)? {
                let (m, k, degrees) = doag_matrix_shape(&a);
                if degrees[..n - 1].iter().all(|&d| policy.contains(d)) {
                    *oracle.entry((m, k)).or_default() += 1;
                }
            }
            for m in 0..=choose2(n) {
                for k in 1..=n {
                    let want = BigUint::from(oracle.get(&(m, k)).copied().unwrap_or(0));
                    if table.count(n, m, k).map_err(fail)? != want {
                        return Err(format!("policy {policy}: D({n},{m},{k}) should be {want}"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn dag_counts(max: usize) -> Check {
    let table = DagCountTable::build(max, choose2(max), DegreePolicy::All).map_err(fail)?;
    for n in 1..=max {
        let oracle = labelled_dag_shapes(&enumerate_labelled_dags(n).map_err(fail)?);
        for m in 0..=choose2(n) {
            for k in 1..=n {
                let want = BigUint::from(oracle.get(&(m, k)).copied().unwrap_or(0));
                if table.count(n, m, k).map_err(fail)? != want {
                    return Err(format!("A({n},{m},{k}) should be {want}"));
                }
            }
        }
    }
    Ok(())
}

fn source_counts(max: usize) -> Check {
    let doags = DoagCountTable::build(max, choose2(max), DegreePolicy::All).map_err(fail)?;
    let sources = SourceCountTable::build(max).map_err(fail)?;
    for n in 1..=max {
        for k in 1..=n {
            if doags.count_by_sources(n, k).map_err(fail)? != sources.count(n, k).map_err(fail)? {
                return Err(format!("D({n},k={k}) differs between the two tables"));
            }
        }
    }
    Ok(())
}

fn uniform<T: Eq + std::hash::Hash>(what: &str, seen: &HashMap<T, u64>, classes: usize) -> Check {
    if seen.len() != classes {
        return Err(format!("{what}: saw {} of {classes} objects", seen.len()));
    }
    let p = chi_square_uniformity(seen, classes).map_err(fail)?;
    if p < ALPHA {
        return Err(format!("{what}: chi-square p-value {p:.2e}"));
    }
    Ok(())
}

fn recursive_sampler(n: usize, draws: usize) -> Check {
    let table = DoagCountTable::build(n, choose2(n), DegreePolicy::All).map_err(fail)?;
    let classes = enumerate_doags(n).map_err(fail)?.len();
    let mut rng = RngStream::from_seed(11);
    let mut seen = HashMap::new();
    for _ in 0..draws {
        let d = sample_doag_marginal(&mut rng, &table, n, None, None).map_err(fail)?;
        *seen.entry(encode(&d)).or_insert(0) += 1;
    }
    uniform("recursive", &seen, classes)
}

fn rejection_samplers(n: usize, draws: usize) -> Check {
    let classes = enumerate_doags(n).map_err(fail)?.len();
    let mut rng = RngStream::from_seed(12);
    let mut naive = HashMap::new();
    let mut fast = HashMap::new();
    for _ in 0..draws {
        let a = sample_doag_naive(&mut rng, n);
        decode(&a).map_err(fail)?;
        *naive.entry(a).or_insert(0) += 1;
        let b = sample_doag_fast(&mut rng, n);
        decode(&b).map_err(fail)?;
        *fast.entry(b).or_insert(0) += 1;
    }
    uniform("naive", &naive, classes)?;
    uniform("fast", &fast, classes)
}

fn labelled_sampler(n: usize, draws: usize) -> Check {
    let table = DagCountTable::build(n, choose2(n), DegreePolicy::All).map_err(fail)?;
    let classes = enumerate_labelled_dags(n).map_err(fail)?.len();
    let mut rng = RngStream::from_seed(13);
    let mut seen = HashMap::new();
    for _ in 0..draws {
        let d = sample_dag_marginal(&mut rng, &table, n, None, None).map_err(fail)?;
        *seen.entry(d).or_insert(0) += 1;
    }
    uniform("labelled", &seen, classes)
}

fn cache_file(path: &Path) -> Check {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = text.lines().next().unwrap_or("");
    if header.contains("kind=dag") {
        let table = DagCountTable::read_cache(text.as_bytes()).map_err(fail)?;
        table.verify()
    } else if header.contains("kind=source") {
        let table = SourceCountTable::read_cache(text.as_bytes()).map_err(fail)?;
        let fresh = SourceCountTable::build(table.max_n()).map_err(fail)?;
        if fresh != table {
            return Err("entries differ from a fresh build".into());
        }
        Ok(())
    } else {
        let table = DoagCountTable::read_cache(text.as_bytes()).map_err(fail)?;
        table.verify()
    }
}

/// Runs every check, printing one line each; returns whether all passed.
pub fn run(quick: bool, cache: Option<&Path>, out: &mut impl Write) -> Result<bool, Error> {
    let (doag_n, dag_n, draws) = if quick { (3, 3, 2_000) } else { (5, 4, 20_000) };
    let mut checks: Vec<(String, Box<dyn FnOnce() -> Check>)> = vec![
        (format!("doag counts n<={doag_n}"), Box::new(move || doag_counts(doag_n))),
        (format!("dag counts n<={dag_n}"), Box::new(move || dag_counts(dag_n))),
        ("source table n<=10".into(), Box::new(|| source_counts(10))),
        ("recursive sampler n=4".into(), Box::new(move || recursive_sampler(4, draws))),
        ("rejection samplers n=4".into(), Box::new(move || rejection_samplers(4, draws))),
        ("labelled sampler n=3".into(), Box::new(move || labelled_sampler(3, draws))),
    ];
    if let Some(path) = cache {
        let path = path.to_path_buf();
        checks.push((format!("cache {}", path.display()), Box::new(move || cache_file(&path))));
    }
    let mut all = true;
    for (name, check) in checks {
        match check() {
            Ok(()) => writeln!(out, "PASS {name}")?,
            Err(reason) => {
                all = false;
                writeln!(out, "FAIL {name}: {reason}")?;
            }
        }
    }
    Ok(all)
}
