use std::collections::hash_map::DefaultHasher;
use std::fs::File;
use std::hash::{Hash, Hasher};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topchain_core::oracle::{random_temporal_graph, GenParams};
use topchain_core::tgraph::{parse_edge_line, parse_edge_list};
use topchain_core::update::UpdateError;
use topchain_core::{
    transform, CodeMode, Index, IndexConfig, Querier, QueryError, QueryKind, TemporalEdge, TemporalGraph, Time,
    TimeInterval, TopoMode, VertexId,
};

use crate::error::CliError;
use crate::index_file;

#[derive(Debug, Parser)]
#[command(name = "topchain", version, about = "Temporal reachability index over chain labels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from an edge list and write it to disk.
    Build(BuildArgs),
    /// Answer a batch of queries against a saved index.
    Query(QueryArgs),
    /// Insert a stream of edges into a saved index.
    Update(UpdateArgs),
    /// Build a variant and time a seeded random query batch.
    Bench(BenchArgs),
    /// Print `|V| |E| pi |T| |V_dag| |E_dag|` for an edge list.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Preset cover and ranking: topchain, tc1 or tc2.
    #[arg(long, default_value = "topchain")]
    pub variant: String,
    /// Chain cover strategy, overriding the variant.
    #[arg(long)]
    pub cover: Option<String>,
    /// Chain ranking strategy, overriding the variant.
    #[arg(long)]
    pub rank: Option<String>,
    /// Chain code mode; defaults to timestamp for temporal covers.
    #[arg(long)]
    pub codes: Option<CodeMode>,
    #[arg(long)]
    pub no_reduce: bool,
    /// Disable pruning with topological labels.
    #[arg(long)]
    pub no_topo: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// reach, ea or fastest.
    #[arg(long = "type", default_value = "reach")]
    pub kind: QueryKind,
    /// Lines of `a b t_alpha t_omega`; `inf` is allowed for t_omega.
    #[arg(long)]
    pub queries: PathBuf,
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Edge list of insertions, applied in order.
    #[arg(long)]
    pub stream: PathBuf,
    /// plain keeps topological labels stale, plus refreshes them per insert.
    #[arg(long, default_value = "plain")]
    pub mode: TopoMode,
    /// Where to write the updated index; defaults to `--index`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Edge list; a synthetic graph is generated when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "topchain")]
    pub variant: String,
    #[arg(long, default_value_t = 10_000)]
    pub vertices: usize,
    #[arg(long, default_value_t = 10.0)]
    pub degree: f64,
    #[arg(long, default_value_t = 100)]
    pub multiplicity: usize,
    #[arg(long, default_value_t = 1000)]
    pub horizon: Time,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Build(args) => build(args, out),
        Command::Query(args) => query(args, out),
        Command::Update(args) => update(args, out),
        Command::Bench(args) => bench(args, out),
        Command::Stats(args) => stats(args, out),
    }
}

fn read_graph(path: &Path) -> Result<TemporalGraph, CliError> {
    let file = File::open(path).map_err(|e| CliError::input(path.display(), e))?;
    parse_edge_list(BufReader::new(file)).map_err(|e| CliError::input(path.display(), e))
}

fn load_index(path: &Path) -> Result<Index, CliError> {
    index_file::load_from_path(path).map_err(|e| CliError::input(path.display(), e))
}

fn save_index(index: &Index, path: &Path) -> Result<(), CliError> {
    index_file::save_to_path(index, path).map_err(|e| CliError::input(path.display(), e))
}

fn build_config(args: &BuildArgs) -> Result<IndexConfig, CliError> {
    let mut config = IndexConfig::for_variant(&args.variant).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(cover) = &args.cover {
        config.cover = cover.clone();
        config.codes = if cover == "temporal" { CodeMode::Timestamp } else { CodeMode::Position };
    }
    if let Some(rank) = &args.rank {
        config.rank = rank.clone();
    }
    if let Some(codes) = args.codes {
        config.codes = codes;
    }
    config.k = args.k;
    config.reduce = !args.no_reduce;
    config.topo = !args.no_topo;
    config.seed = args.seed;
    Ok(config)
}

fn build(args: BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = build_config(&args)?;
    let g = read_graph(&args.input)?;
    let start = Instant::now();
    let index = Index::build(&g, config)?;
    let elapsed = start.elapsed();
    save_index(&index, &args.output)?;
    let sizes = index.label_sizes();
    writeln!(
        out,
        "vertices={} edges={} chains={}",
        index.graph().num_vertices(),
        index.graph().num_edges(),
        index.cover().len()
    )?;
    writeln!(out, "build_ms={:.3}", elapsed.as_secs_f64() * 1e3)?;
    writeln!(out, "labels_total={} labels_max={}", sizes.total, sizes.max_per_vertex)?;
    writeln!(out, "index_bytes={}", index.heap_bytes())?;
    Ok(())
}

/// One query line: `a b t_alpha t_omega`.
fn parse_query(text: &str, line: usize) -> Result<(VertexId, VertexId, Time, Time), CliError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let bad = |what: &str| CliError::Input(format!("query line {line}: {what}"));
    if toks.len() != 4 {
        return Err(bad(&format!("expected `a b t_alpha t_omega`, found {} fields", toks.len())));
    }
    let a = toks[0].parse().map_err(|_| bad(&format!("bad vertex `{}`", toks[0])))?;
    let b = toks[1].parse().map_err(|_| bad(&format!("bad vertex `{}`", toks[1])))?;
    let start = toks[2].parse().map_err(|_| bad(&format!("bad time `{}`", toks[2])))?;
    let end = match toks[3] {
        "inf" => Time::MAX,
        s => s.parse().map_err(|_| bad(&format!("bad time `{s}`")))?,
    };
    Ok((a, b, start, end))
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>, CliError> {
    let file = File::open(path).map_err(|e| CliError::input(path.display(), e))?;
    let mut lines = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::input(path.display(), e))?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push((i + 1, trimmed.to_string()));
        }
    }
    Ok(lines)
}

fn query(args: QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let index = load_index(&args.index)?;
    let mut batch = Vec::new();
    for (line, text) in data_lines(&args.queries)? {
        batch.push(parse_query(&text, line)?);
    }
    let mut q = Querier::new(&index);
    let mut answers = Vec::with_capacity(batch.len());
    let start = Instant::now();
    for &(a, b, s, e) in &batch {
        let answer = TimeInterval::new(s, e).and_then(|iv| q.answer(args.kind, a, b, iv));
        answers.push(answer);
    }
    let elapsed = start.elapsed();
    let mut failed = 0;
    for answer in &answers {
        match answer {
            Ok(a) => writeln!(out, "{a}")?,
            Err(QueryError::UnknownVertex(_) | QueryError::InvalidInterval { .. }) => {
                failed += 1;
                writeln!(out, "ERR")?;
            }
        }
    }
    writeln!(out, "total_ms={:.3}", elapsed.as_secs_f64() * 1e3)?;
    if failed > 0 {
        return Err(CliError::Input(format!("{failed} of {} queries failed", answers.len())));
    }
    Ok(())
}

fn update(args: UpdateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut index = load_index(&args.index)?;
    let mut edges: Vec<TemporalEdge> = Vec::new();
    for (line, text) in data_lines(&args.stream)? {
        edges.push(parse_edge_line(&text, line).map_err(|e| CliError::input(args.stream.display(), e))?);
    }
    let start = Instant::now();
    for &e in &edges {
        index.insert_edge(e, args.mode).map_err(|err| match err {
            UpdateError::Edge(_) | UpdateError::Unsupported => CliError::input(format!("inserting {e}"), err),
            UpdateError::Cycle(_) => CliError::Internal(err.to_string()),
        })?;
    }
    let elapsed = start.elapsed();
    index.reduce_labels();
    save_index(&index, args.output.as_deref().unwrap_or(&args.index))?;
    let avg = if edges.is_empty() { 0.0 } else { elapsed.as_secs_f64() * 1e6 / edges.len() as f64 };
    writeln!(out, "inserted={} mode={}", edges.len(), mode_name(args.mode))?;
    writeln!(out, "avg_us={avg:.3}")?;
    Ok(())
}

fn mode_name(mode: TopoMode) -> &'static str {
    match mode {
        TopoMode::Plain => "plain",
        TopoMode::Plus => "plus",
    }
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = match &args.input {
        Some(path) => read_graph(path)?,
        None => random_temporal_graph(&GenParams {
            vertices: args.vertices,
            avg_degree: args.degree,
            max_multiplicity: args.multiplicity,
            horizon: args.horizon,
            seed: args.seed,
            ..GenParams::default()
        }),
    };
    let mut config = IndexConfig::for_variant(&args.variant).map_err(|e| CliError::Usage(e.to_string()))?;
    config.k = args.k;
    config.seed = args.seed;

    let start = Instant::now();
    let index = Index::build(&g, config)?;
    let build_time = start.elapsed();

    let n = g.num_vertices() as VertexId;
    let last = g.edges().iter().map(TemporalEdge::arrival).max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0x9e37_79b9_7f4a_7c15);
    let batch: Vec<(VertexId, VertexId, TimeInterval)> = if n == 0 {
        Vec::new()
    } else {
        (0..args.queries)
            .map(|_| {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let iv = if rng.gen_bool(0.5) {
                    TimeInterval::all()
                } else {
                    let s = rng.gen_range(0..=last);
                    TimeInterval::new(s, rng.gen_range(s..=last)).expect("ordered bounds")
                };
                (a, b, iv)
            })
            .collect()
    };

    let c = index.config();
    writeln!(
        out,
        "variant={} cover={} rank={} codes={} k={} chains={}",
        args.variant,
        c.cover,
        c.rank,
        c.codes.as_str(),
        c.k,
        index.cover().len()
    )?;
    writeln!(
        out,
        "graph vertices={} edges={} dag_vertices={} dag_edges={}",
        g.num_vertices(),
        g.num_edges(),
        index.graph().num_vertices(),
        index.graph().num_edges()
    )?;
    writeln!(out, "build_ms={:.3}", build_time.as_secs_f64() * 1e3)?;
    writeln!(out, "index_bytes={}", index.heap_bytes())?;

    let mut q = Querier::new(&index);
    let mut hasher = DefaultHasher::new();
    let mut total = 0.0;
    for kind in [QueryKind::Reach, QueryKind::Earliest, QueryKind::Fastest] {
        let start = Instant::now();
        for &(a, b, iv) in &batch {
            let answer = q.answer(kind, a, b, iv).map_err(|e| CliError::Internal(e.to_string()))?;
            answer.to_string().hash(&mut hasher);
        }
        let ms = start.elapsed().as_secs_f64() * 1e3;
        total += ms;
        writeln!(out, "{}_ms={ms:.3}", kind.as_str())?;
    }
    writeln!(out, "queries={} total_ms={total:.3}", batch.len())?;
    writeln!(out, "checksum={:016x}", hasher.finish())?;
    Ok(())
}

fn stats(args: StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.input)?;
    let s = g.stats();
    let dag = transform(&g);
    writeln!(
        out,
        "{} {} {} {} {} {}",
        s.vertices,
        s.edges,
        s.max_multiplicity,
        s.time_instants,
        dag.num_vertices(),
        dag.num_edges()
    )?;
    Ok(())
}
