mod selftest;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_core::{OsRng, RngCore};
use rayon::prelude::*;
use randdag::counting::{
    normalized_constant_sequence, BigCount, BuildOptions, DegreePolicy, DoagCountTable, SourceCountTable,
};
use randdag::graph::{encode, format, Doag};
use randdag::labelled::{sample_dag_marginal, DagCountTable, LabelledDag};
use randdag::recursive::sample_doag_marginal;
use randdag::rejection::{sample_doag_fast, sample_doag_fast_with_stats};
use randdag::rng::RngStream;
use randdag::{graph, Error};

const DEFAULT_BUDGET: usize = 1 << 30;

/// Exact counting and uniform sampling of DOAGs and labelled DAGs.
#[derive(Parser)]
#[command(name = "randdag", version)]
struct Cli {
    /// Approximate memory limit in bytes for tables and matrices.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    memory_budget: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print exact counts.
    Count {
        #[command(subcommand)]
        what: CountTarget,
    },
    /// Draw uniform random graphs.
    Sample {
        #[command(subcommand)]
        what: SampleTarget,
    },
    /// Print statistics as CSV.
    Stats {
        #[command(subcommand)]
        what: StatsTarget,
    },
    /// Check the tables and samplers against brute force.
    Selftest {
        /// Only run the checks on graphs with at most three vertices.
        #[arg(long)]
        quick: bool,
        /// Also verify this table cache file.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct ClassArgs {
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Number of edges; summed over when omitted.
    #[arg(long)]
    m: Option<usize>,
    /// Number of sources; summed over when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Allowed out-degrees: all | positive | max:<d> | set:<d1,d2,...>
    #[arg(long, default_value = "all")]
    policy: DegreePolicy,
    /// Table cache file; defaults to a file in $RANDDAG_CACHE_DIR when set.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CountTarget {
    /// DOAGs.
    Doag {
        #[command(flatten)]
        class: ClassArgs,
        /// Print the counts for every edge count m = 0..C(n,2).
        #[arg(long)]
        by_edges: bool,
    },
    /// Vertex-labelled DAGs.
    Dag {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        by_edges: bool,
    },
    /// DOAGs by vertices and sources only.
    Source {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SampleArgs {
    /// Seed; a random one is chosen and reported on stderr when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent samples.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Edgelist)]
    format: OutputFormat,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Dot,
    Matrix,
    Edgelist,
}

#[derive(Subcommand)]
enum SampleTarget {
    /// DOAGs by vertices, edges, sources and degree policy.
    Doag {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// DOAGs by vertices only, without counting tables.
    DoagFast {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Vertex-labelled DAGs.
    Dag {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        sample: SampleArgs,
    },
}

#[derive(Subcommand)]
enum StatsTarget {
    /// Normalized D_j and single-source D_j for j = 1..n.
    Constant {
        #[arg(long)]
        n: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Edge counts of uniform DOAGs with n vertices.
    Edges {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::OutOfRange { .. } | Error::ResourceLimit { .. } | Error::SizeLimit { .. } | Error::TooSmall { .. } => 3,
        Error::EmptyClass { .. } => 4,
        _ => 1,
    }
}

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn options(budget: usize) -> BuildOptions {
    BuildOptions {
        memory_budget: Some(budget),
        threads: Some(rayon::current_num_threads()),
    }
}

fn default_cache(kind: &str, policy: &DegreePolicy, n: usize, m: usize) -> Option<PathBuf> {
    let dir = std::env::var_os("RANDDAG_CACHE_DIR")?;
    let policy = policy.to_string().replace(':', "_").replace(',', "-");
    Some(Path::new(&dir).join(format!("{kind}-{policy}-{n}-{m}.txt")))
}

fn check_n(n: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::TooSmall { n });
    }
    Ok(())
}

fn doag_table(class: &ClassArgs, max_m: usize, budget: usize) -> Result<DoagCountTable, Error> {
    check_n(class.n)?;
    let path = class.cache.clone().or_else(|| default_cache("doag", &class.policy, class.n, max_m));
    match path {
        Some(path) => DoagCountTable::load_or_build(&path, class.n, max_m, class.policy.clone(), &options(budget))
            .map(|(t, _)| t),
        None => DoagCountTable::build_with(class.n, max_m, class.policy.clone(), &options(budget)),
    }
}

fn dag_table(class: &ClassArgs, max_m: usize, budget: usize) -> Result<DagCountTable, Error> {
    check_n(class.n)?;
    let path = class.cache.clone().or_else(|| default_cache("dag", &class.policy, class.n, max_m));
    match path {
        Some(path) => DagCountTable::load_or_build(&path, class.n, max_m, class.policy.clone(), &options(budget))
            .map(|(t, _)| t),
        None => DagCountTable::build_with(class.n, max_m, class.policy.clone(), &options(budget)),
    }
}

fn join(values: impl IntoIterator<Item = BigCount>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// The counts requested by `class` from a table exposing the four queries.
fn class_count(
    class: &ClassArgs,
    by_edges: bool,
    cell: impl Fn(usize, usize, usize) -> Result<BigCount, Error>,
    by_m: impl Fn(usize, usize) -> Result<BigCount, Error>,
    by_k: impl Fn(usize, usize) -> Result<BigCount, Error>,
    total: impl Fn(usize) -> Result<BigCount, Error>,
) -> Result<String, Error> {
    let n = class.n;
    if by_edges {
        let row: Vec<BigCount> = (0..=choose2(n))
            .map(|m| match class.k {
                Some(k) => cell(n, m, k),
                None => by_m(n, m),
            })
            .collect::<Result<_, _>>()?;
        return Ok(join(row));
    }
    Ok(match (class.m, class.k) {
        (Some(m), Some(k)) => cell(n, m, k)?,
        (Some(m), None) => by_m(n, m)?,
        (None, Some(k)) => by_k(n, k)?,
        (None, None) => total(n)?,
    }
    .to_string())
}

fn cmd_count(what: CountTarget, budget: usize) -> Result<String, Error> {
    match what {
        CountTarget::Doag { class, by_edges } => {
            let max_m = if by_edges { choose2(class.n) } else { class.m.unwrap_or(choose2(class.n)) };
            let t = doag_table(&class, max_m, budget)?;
            class_count(
                &class,
                by_edges,
                |n, m, k| t.count(n, m, k),
                |n, m| t.count_by_edges(n, m),
                |n, k| t.count_by_sources(n, k),
                |n| t.count_by_vertices(n),
            )
        }
        CountTarget::Dag { class, by_edges } => {
            let max_m = if by_edges { choose2(class.n) } else { class.m.unwrap_or(choose2(class.n)) };
            let t = dag_table(&class, max_m, budget)?;
            class_count(
                &class,
                by_edges,
                |n, m, k| t.count(n, m, k),
                |n, m| t.count_by_edges(n, m),
                |n, k| t.count_by_sources(n, k),
                |n| t.count_by_vertices(n),
            )
        }
        CountTarget::Source { n, k, cache } => {
            let t = source_table(n, cache, budget)?;
            Ok(match k {
                Some(k) => t.count(n, k)?,
                None => t.total(n)?,
            }
            .to_string())
        }
    }
}

/// Rough size of a source table: layer `j` holds `j` numbers of about
/// `log2(sf(j-1))` bits.
fn source_table_bytes(n: usize) -> usize {
    (1..=n)
        .map(|j| {
            let bits: f64 = (1..j).map(|i| (1..=i).map(|t| (t as f64).log2()).sum::<f64>()).sum();
            j * (bits as usize / 8 + 32)
        })
        .sum()
}

fn source_table(n: usize, cache: Option<PathBuf>, budget: usize) -> Result<SourceCountTable, Error> {
    check_n(n)?;
    let needed = source_table_bytes(n);
    if needed > budget {
        return Err(Error::ResourceLimit { needed, budget });
    }
    let path = cache.or_else(|| default_cache("source", &DegreePolicy::All, n, 0));
    if let Some(path) = &path {
        if let Ok(file) = File::open(path) {
            if let Ok(t) = SourceCountTable::read_cache(BufReader::new(file)) {
                if t.max_n() >= n {
                    return Ok(t);
                }
            }
        }
    }
    let t = SourceCountTable::build_with_threads(n, Some(rayon::current_num_threads()))?;
    if let Some(path) = path {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        t.write_cache(&mut out)?;
        out.flush()?;
    }
    Ok(t)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(|| OsRng.next_u64());
    eprintln!("seed: {seed}");
    seed
}

fn render_doag(d: &Doag, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Dot => format::to_dot(d),
        OutputFormat::Matrix => format!("{}\n", encode(d)),
        OutputFormat::Edgelist => format::to_edge_list(d),
    }
}

fn render_dag(d: &LabelledDag, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Dot => d.to_dot(),
        OutputFormat::Matrix => unreachable!("rejected before sampling"),
        OutputFormat::Edgelist => d.to_edge_list(),
    }
}

/// Runs `draw` on streams derived from one seed; results keep index order.
fn draw_many<T: Send>(
    args: &SampleArgs,
    draw: impl Fn(&mut RngStream) -> Result<T, Error> + Sync,
) -> Result<Vec<T>, Error> {
    let seed = resolve_seed(args.seed);
    (0..args.count as u64)
        .into_par_iter()
        .map(|i| draw(&mut RngStream::derived(seed, i)))
        .collect()
}

fn cmd_sample(what: SampleTarget, budget: usize) -> Result<(String, Option<PathBuf>), Error> {
    let (texts, output) = match what {
        SampleTarget::Doag { class, sample } => {
            check_n(class.n)?;
            let table = match class.m {
                Some(m) if class.cache.is_none() && std::env::var_os("RANDDAG_CACHE_DIR").is_none() => {
                    DoagCountTable::build_for_target(class.n, m, class.policy.clone(), &options(budget))?
                }
                _ => doag_table(&class, class.m.unwrap_or(choose2(class.n)), budget)?,
            };
            let graphs = draw_many(&sample, |rng| sample_doag_marginal(rng, &table, class.n, class.m, class.k))?;
            (graphs.iter().map(|d| render_doag(d, sample.format)).collect::<Vec<_>>(), sample.output)
        }
        SampleTarget::DoagFast { n, sample } => {
            check_fast_size(n, budget)?;
            let graphs = draw_many(&sample, |rng| graph::decode(&sample_doag_fast(rng, n)))?;
            (graphs.iter().map(|d| render_doag(d, sample.format)).collect(), sample.output)
        }
        SampleTarget::Dag { class, sample } => {
            if sample.format == OutputFormat::Matrix {
                return Err(Error::Parse("the matrix format only applies to DOAGs".into()));
            }
            let table = dag_table(&class, class.m.unwrap_or(choose2(class.n)), budget)?;
            let graphs = draw_many(&sample, |rng| sample_dag_marginal(rng, &table, class.n, class.m, class.k))?;
            (graphs.iter().map(|d| render_dag(d, sample.format)).collect(), sample.output)
        }
    };
    Ok((texts.join("\n"), output))
}

fn check_fast_size(n: usize, budget: usize) -> Result<(), Error> {
    check_n(n)?;
    let needed = n.saturating_mul(n).saturating_mul(4 + 8 * usize::from(cfg!(debug_assertions)));
    if needed > budget || n > u32::MAX as usize {
        return Err(Error::ResourceLimit { needed, budget });
    }
    Ok(())
}

fn cmd_stats(what: StatsTarget, budget: usize) -> Result<(String, Option<PathBuf>), Error> {
    match what {
        StatsTarget::Constant { n, output } => {
            let t = source_table(n, None, budget)?;
            let (all, single) = normalized_constant_sequence(&t, n)?;
            let mut out = String::from("j,doags_normalized,single_source_normalized\n");
            for (j, (a, s)) in all.iter().zip(&single).enumerate() {
                out.push_str(&format!("{},{a:.9},{s:.9}\n", j + 1));
            }
            Ok((out, output))
        }
        StatsTarget::Edges {
            n,
            samples,
            seed,
            output,
        } => {
            check_fast_size(n, budget)?;
            let seed = resolve_seed(seed);
            let runs: Vec<(usize, u64)> = (0..samples as u64)
                .into_par_iter()
                .map(|i| {
                    let (a, stats) = sample_doag_fast_with_stats(&mut RngStream::derived(seed, i), n);
                    (a.nonzero_count(), stats.attempts)
                })
                .collect();
            let edges: Vec<f64> = runs.iter().map(|&(e, _)| e as f64).collect();
            let count = edges.len().max(1) as f64;
            let mean = edges.iter().sum::<f64>() / count;
            let var = edges.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1.0).max(1.0);
            let min = runs.iter().map(|r| r.0).min().unwrap_or(0);
            let max = runs.iter().map(|r| r.0).max().unwrap_or(0);
            let attempts: u64 = runs.iter().map(|r| r.1).sum();
            let out = format!(
                "n,samples,mean_edges,sd_edges,min_edges,max_edges,complete_edges,acceptance_rate\n\
                 {n},{samples},{mean:.3},{:.3},{min},{max},{},{:.6}\n",
                var.sqrt(),
                choose2(n),
                samples as f64 / attempts.max(1) as f64
            );
            Ok((out, output))
        }
    }
}

fn emit(text: &str, output: Option<PathBuf>) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    sink.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        sink.write_all(b"\n")?;
    }
    sink.flush()
}

fn run(cli: Cli) -> Result<u8, Error> {
    let budget = cli.memory_budget;
    let (text, output) = match cli.command {
        Command::Count { what } => (cmd_count(what, budget)?, None),
        Command::Sample { what } => cmd_sample(what, budget)?,
        Command::Stats { what } => cmd_stats(what, budget)?,
        Command::Selftest { quick, cache } => {
            let passed = selftest::run(quick, cache.as_deref(), &mut io::stdout().lock())?;
            return Ok(if passed { 0 } else { 1 });
        }
    };
    emit(&text, output)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Parse(_) => 2,
                ref e => exit_code(e),
            })
        }
    }
}
