//! The `treepp` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors and unreadable input, 2 when
//! computation or evaluation fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::centrality::default_centrality;
use crate::error::{Error, Result};
use crate::eval::{cross_validate, CvConfig, DEFAULT_C_GRID};
use crate::graph::{graph_stats, Dataset, Graph};
use crate::io::{
    format_matrix, load_edgelist_dir, load_edgelist_graph, load_tu_dataset, read_class_labels, read_matrix,
    write_matrix, MatrixFormat,
};
use crate::kernel::{treepp_level_grams, TreeppParams, MAX_DEPTH};
use crate::tree::{enumerate_paths, ChildOrder};

#[derive(Debug, Parser)]
#[command(name = "treepp", version, about = "Tree++ graph kernel and kernel SVM evaluation")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a kernel matrix and write it with a metadata sidecar.
    Compute(ComputeArgs),
    /// Cross-validate a C-SVM on a kernel matrix.
    Classify(ClassifyArgs),
    /// Print the BFS tree, path patterns and signature of one vertex.
    Inspect(InspectArgs),
    /// Print dataset statistics.
    Stats(DatasetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Directory with <name>_A.txt, _graph_indicator.txt, _graph_labels.txt, _node_labels.txt
    Tud,
    /// One graph per file: vertex count, label line, then "u v" edges (0-based)
    Edgelist,
}

#[derive(Debug, Clone, Args)]
pub struct DatasetArgs {
    /// Dataset directory (or a single edge-list file)
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Tud)]
    pub format: InputFormat,
    /// File prefix of a tud dataset (default: the directory name)
    #[arg(long)]
    pub name: Option<String>,
}

fn depth_arg(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))?;
    if v > MAX_DEPTH {
        return Err(format!("must be at most {MAX_DEPTH}"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Depth of the path-generating BFS trees (0..=16)
    #[arg(long, default_value_t = 6, value_parser = depth_arg)]
    pub d: usize,
    /// Signature depth of the last super-path level (0..=16)
    #[arg(long, default_value_t = 0, value_parser = depth_arg)]
    pub k: usize,
    /// Cosine-normalize the matrix (default)
    #[arg(long, overrides_with = "no_normalize")]
    pub normalize: bool,
    /// Keep raw kernel values
    #[arg(long = "no-normalize", overrides_with = "normalize")]
    pub no_normalize: bool,
}

impl KernelArgs {
    fn params(&self) -> TreeppParams {
        TreeppParams::new(self.d, self.k, !self.no_normalize)
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Output file (default: standard output, no sidecar)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
    pub matrix_format: MatrixFormat,
    /// Accepted for symmetry with classify; kernel computation uses no randomness
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn sweep_arg(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let (a, b) = (depth_arg(a.trim())?, depth_arg(b.trim())?);
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Dataset to compute the kernel from (class labels are taken from it)
    #[arg(long, required_unless_present = "kernel")]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Tud)]
    pub format: InputFormat,
    #[arg(long)]
    pub name: Option<String>,
    /// Precomputed kernel matrix (CSV or JSON) instead of a dataset
    #[arg(long, conflicts_with = "dataset", requires = "labels")]
    pub kernel: Option<PathBuf>,
    /// Class labels for --kernel, one per line
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub params: KernelArgs,
    /// Evaluate every k in the inclusive range A..B, one result line each
    #[arg(long, value_parser = sweep_arg, conflicts_with = "kernel")]
    pub k_sweep: Option<(usize, usize)>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Candidate C values, comma-separated
    #[arg(long = "C-grid", value_delimiter = ',', default_values_t = DEFAULT_C_GRID.to_vec())]
    pub c_grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Edge-list file holding the graph
    #[arg(long, required_unless_present = "dataset")]
    pub graph: Option<PathBuf>,
    /// Dataset to pick the graph from, with --index
    #[arg(long, conflicts_with = "graph")]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Tud)]
    pub format: InputFormat,
    #[arg(long)]
    pub name: Option<String>,
    /// Graph index inside --dataset (0-based)
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Root vertex (0-based)
    #[arg(long)]
    pub vertex: usize,
    #[arg(long, default_value_t = 1, value_parser = depth_arg)]
    pub d: usize,
    #[arg(long, default_value_t = 1, value_parser = depth_arg)]
    pub k: usize,
}

/// Parses `std::env::args`, runs the command, and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return 2;
        }
    }
    let mut stdout = std::io::stdout().lock();
    match execute(&cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}

pub fn execute(command: &Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::Compute(args) => cmd_compute(args, out),
        Command::Classify(args) => cmd_classify(args, out),
        Command::Inspect(args) => cmd_inspect(args, out),
        Command::Stats(args) => cmd_stats(args, out),
    }
}

fn load_dataset(path: &Path, format: InputFormat, name: Option<&str>) -> Result<Dataset> {
    match format {
        InputFormat::Tud => {
            let default = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            let (ds, report) = load_tu_dataset(path, name.unwrap_or(default))?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.edges_deduplicated > 0 {
                eprintln!("warning: {} duplicate edges merged", report.edges_deduplicated);
            }
            Ok(ds)
        }
        InputFormat::Edgelist if path.is_dir() => load_edgelist_dir(path),
        InputFormat::Edgelist => {
            let g = load_edgelist_graph(path)?;
            let name = name.or_else(|| path.file_stem().and_then(|n| n.to_str()));
            Ok(Dataset::unlabeled(name.unwrap_or("graph"), vec![g]))
        }
    }
}

fn write_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn cmd_compute(args: &ComputeArgs, out: &mut impl Write) -> Result<()> {
    let start = Instant::now();
    let ds = load_dataset(&args.data.dataset, args.data.format, args.data.name.as_deref())?;
    let parse_ms = start.elapsed().as_secs_f64() * 1e3;
    let params = args.kernel.params();
    params.validate()?;
    let levels = treepp_level_grams(&ds, params.d, params.k)?;
    let t = Instant::now();
    let matrix = levels.matrix(params.k, params.normalize)?;
    let finish_ms = t.elapsed().as_secs_f64() * 1e3;
    let Some(path) = &args.out else {
        return out
            .write_all(format_matrix(&matrix, args.matrix_format).as_bytes())
            .map_err(write_err);
    };
    write_matrix(&matrix, path, args.matrix_format)?;
    let timings = &levels.timings;
    let meta = json!({
        "params": {
            "dataset": ds.name,
            "graphs": ds.len(),
            "d": params.d,
            "k": params.k,
            "normalize": params.normalize,
        },
        "phase_timings_ms": {
            "parse": parse_ms,
            "centrality": timings.centrality_ms,
            "paths": timings.paths_ms,
            "features_per_level": timings.features_ms,
            "gram": timings.gram_ms,
            "normalize": finish_ms,
            "total": start.elapsed().as_secs_f64() * 1e3,
        },
        "vocab_sizes": levels.vocab_sizes,
        "tool_version": env!("CARGO_PKG_VERSION"),
    });
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".meta.json");
    let sidecar = PathBuf::from(sidecar);
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    std::fs::write(&sidecar, text).map_err(|e| Error::io(&sidecar, e))
}

fn cmd_classify(args: &ClassifyArgs, out: &mut impl Write) -> Result<()> {
    let cfg = CvConfig {
        folds: args.folds,
        repeats: args.repeats,
        c_grid: args.c_grid.clone(),
        seed: args.seed,
        ..CvConfig::default()
    };
    let mut emit = |result: crate::eval::CvResult| -> Result<()> {
        for w in &result.warnings {
            eprintln!("warning: {w}");
        }
        let line = serde_json::to_string(&result).expect("result serializes");
        writeln!(out, "{line}").map_err(write_err)
    };

    if let Some(kernel) = &args.kernel {
        let labels = args.labels.as_ref().expect("clap enforces --labels");
        let k = read_matrix(kernel)?;
        let y = read_class_labels(labels)?;
        let name = kernel.file_stem().and_then(|n| n.to_str()).unwrap_or("kernel");
        return emit(cross_validate(&k, &y, &cfg)?.with_run(name, None, None));
    }

    let path = args.dataset.as_ref().expect("clap enforces --dataset");
    let ds = load_dataset(path, args.format, args.name.as_deref())?;
    ds.check_classifiable()?;
    let params = args.params.params();
    let (lo, hi) = args.k_sweep.unwrap_or((params.k, params.k));
    TreeppParams::new(params.d, hi, params.normalize).validate()?;
    let levels = treepp_level_grams(&ds, params.d, hi)?;
    for k in lo..=hi {
        let matrix = levels.matrix(k, params.normalize)?;
        let result = cross_validate(&matrix, &ds.class_labels, &cfg)?;
        emit(result.with_run(&ds.name, Some(params.d), Some(k)))?;
    }
    Ok(())
}

fn inspect_graph(args: &InspectArgs) -> Result<Graph> {
    if let Some(path) = &args.graph {
        return load_edgelist_graph(path);
    }
    let path = args.dataset.as_ref().expect("clap enforces --graph or --dataset");
    let ds = load_dataset(path, args.format, args.name.as_deref())?;
    let len = ds.len();
    ds.graphs.into_iter().nth(args.index).ok_or_else(|| {
        Error::InvalidParams(format!("graph index {} outside dataset of {len} graphs", args.index))
    })
}

fn tuple(labels: impl IntoIterator<Item = u32>) -> String {
    let parts: Vec<String> = labels.into_iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(","))
}

fn cmd_inspect(args: &InspectArgs, out: &mut impl Write) -> Result<()> {
    let g = inspect_graph(args)?;
    let c = default_centrality(&g);
    let order = ChildOrder::new(&g, &c);
    let tree = order.tree(args.vertex, args.d)?;
    let mut text = format!("tree d={} root={}\n", args.d, args.vertex);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((pos, indent)) = stack.pop() {
        let v = tree.order[pos];
        text.push_str(&format!("{}{} [vertex {v}]\n", "  ".repeat(indent + 1), g.label(v)));
        let children: Vec<usize> = tree.children(pos).collect();
        for &child in children.iter().rev() {
            stack.push((child, indent + 1));
        }
    }
    text.push_str("patterns\n");
    for path in enumerate_paths(&tree) {
        text.push_str(&format!("  {}\n", tuple(path.iter().map(|&v| g.label(v)))));
    }
    let sig = order.signature(args.vertex, args.k)?;
    text.push_str(&format!("signature k={}\n  {}\n  {sig}\n", args.k, tuple(sig.labels())));
    out.write_all(text.as_bytes()).map_err(write_err)
}

fn cmd_stats(args: &DatasetArgs, out: &mut impl Write) -> Result<()> {
    let ds = load_dataset(&args.dataset, args.format, args.name.as_deref())?;
    let s = graph_stats(&ds)?;
    let text = format!(
        "{:<16} {:>6} {:>8} {:>10} {:>10} {:>7}\n{:<16} {:>6} {:>8} {:>10.2} {:>10.2} {:>7}\n",
        "dataset", "size", "classes", "avg_nodes", "avg_edges", "labels",
        s.name, s.size, s.classes, s.avg_nodes, s.avg_edges, s.labels
    );
    out.write_all(text.as_bytes()).map_err(write_err)
}
