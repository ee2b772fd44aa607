//! Command-line front end for `stresslayout`.
//!
//! Graph arguments are file paths, or `gen:<family>` for a generated graph
//! such as `gen:grid_10x10` or `gen:cycle_100`.

pub mod svg;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stresslayout::bench::{
    initial_layout, relative_deviation, run_grid, run_hybrid_observed, write_report, write_traces,
    Algorithm, Cell, ExperimentConfig, GraphSource, Initializer, PreparedGraph, SgdSettings,
    StressTrace,
};
use stresslayout::graph::{
    all_pairs_shortest_paths, largest_connected_component, Family, Format, Graph,
};
use stresslayout::sgd::run_sgd_observed;
use stresslayout::smacof::run_smacof_observed;
use stresslayout::{Layout, SmacofConfig};

#[derive(Debug, Parser)]
#[command(name = "stresslayout", version, about = "Graph layout by stress minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lay out one graph; writes an SVG drawing and a stress trace CSV.
    Layout(LayoutArgs),
    /// Run an algorithm x initializer grid and write a deviation report CSV.
    Bench(BenchArgs),
    /// Compare k SGD iterations followed by majorization against the baseline.
    Hybrid(HybridArgs),
    /// Print vertex, edge and component counts and the diameter.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct InputOptions {
    /// Input format (mtx or edges); inferred from the extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Exit with code 2 on a disconnected graph instead of using its largest component.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SolverOptions {
    /// Number of SGD iterations in the step-size schedule.
    #[arg(long, default_value_t = 15)]
    pub iters: usize,
    /// Final step size as a fraction of the squared smallest distance.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Iteration cap for majorization.
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Majorization stops once the relative stress decrease falls below this.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Number of pivots for the pivot initializer.
    #[arg(long, default_value_t = 100)]
    pub pivots: usize,
}

impl SolverOptions {
    fn sgd(&self) -> SgdSettings {
        SgdSettings {
            iterations: self.iters,
            epsilon: self.eps,
            ..SgdSettings::default()
        }
    }

    fn smacof(&self) -> SmacofConfig {
        SmacofConfig {
            max_iterations: self.max_iters,
            rel_tolerance: self.tol,
            ..SmacofConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    /// Graph file, or gen:<family> (e.g. gen:grid_10x10).
    pub input: String,
    /// Algorithm: sgd, smacof or hybrid.
    #[arg(long, default_value = "sgd")]
    pub alg: Algorithm,
    /// Initializer: random, cmds or pivot (hybrid always starts from random).
    #[arg(long, default_value = "random", value_parser = parse_start)]
    pub init: Initializer,
    /// Seed for the initial layout and the SGD pair order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// SGD iterations before majorization when --alg hybrid.
    #[arg(long, default_value_t = 7)]
    pub sgd_steps: usize,
    /// Comma-separated iteration numbers to draw as extra SVGs (0 is the start).
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<usize>,
    /// SVG output path [default: <graph>.svg].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace CSV output path [default: <graph>_trace.csv].
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub input_options: InputOptions,
    #[command(flatten)]
    pub solver: SolverOptions,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Graph files or gen:<family> arguments.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    /// Comma-separated algorithms; the smacof x cmds baseline is always included.
    #[arg(long, value_delimiter = ',', default_value = "sgd,smacof")]
    pub alg: Vec<Algorithm>,
    /// Comma-separated initializers for sgd and smacof.
    #[arg(long, value_delimiter = ',', default_value = "random,cmds", value_parser = parse_start)]
    pub init: Vec<Initializer>,
    /// Comma-separated SGD step counts used when hybrid is among the algorithms.
    #[arg(long, value_delimiter = ',', default_value = "7")]
    pub sgd_steps: Vec<usize>,
    #[command(flatten)]
    pub experiment: ExperimentOptions,
}

#[derive(Debug, Args)]
pub struct HybridArgs {
    /// Graph files or gen:<family> arguments.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    /// Comma-separated numbers of SGD iterations run before majorization.
    #[arg(long, value_delimiter = ',', default_value = "1,3,7,15")]
    pub sgd_steps: Vec<usize>,
    #[command(flatten)]
    pub experiment: ExperimentOptions,
}

#[derive(Debug, Args)]
pub struct ExperimentOptions {
    /// Runs per cell.
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Seed of the first run; run r uses base-seed + r.
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    /// Report CSV output path [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every stress trace to this CSV file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub input_options: InputOptions,
    #[command(flatten)]
    pub solver: SolverOptions,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Graph file or gen:<family>.
    pub input: String,
    /// Input format (mtx or edges); inferred from the extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_start(s: &str) -> Result<Initializer, String> {
    match s.parse()? {
        Initializer::SgdSteps(_) => Err(format!("`{s}` is not an initializer")),
        init => Ok(init),
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input or arguments (exit code 1).
    #[error("{0}")]
    Input(String),
    /// Disconnected graph under `--strict` (exit code 2).
    #[error("{0}")]
    Disconnected(String),
    /// Reading or writing files failed (exit code 3).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Disconnected(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn from_core(context: &str, e: stresslayout::Error) -> CliError {
        use stresslayout::Error as E;
        match e {
            E::GraphLoad { name, source } => CliError::from_core(&name, *source),
            E::Io(err) => CliError::Io(format!("{context}: {err}")),
            E::Disconnected(..) => CliError::Disconnected(format!("{context}: {e}")),
            other => CliError::Input(format!("{context}: {other}")),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Layout(args) => cmd_layout(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Hybrid(args) => cmd_hybrid(&args),
        Command::Info(args) => cmd_info(&args),
    }
}

fn source(arg: &str, format: Option<Format>) -> CliResult<GraphSource> {
    match arg.strip_prefix("gen:") {
        Some(family) => family
            .parse::<Family>()
            .map(GraphSource::Generated)
            .map_err(CliError::Input),
        None => Ok(GraphSource::File {
            path: arg.into(),
            format,
        }),
    }
}

/// Loads a graph, reducing it to its largest component unless `strict`.
fn load(arg: &str, opts: &InputOptions) -> CliResult<(String, Graph)> {
    let src = source(arg, opts.format)?;
    let g = src.load().map_err(|e| CliError::from_core(arg, e))?;
    if g.is_connected() || g.vertex_count() == 0 {
        return Ok((src.name(), g));
    }
    let comps = g.components().len();
    if opts.strict {
        return Err(CliError::Disconnected(format!(
            "{arg}: graph has {comps} connected components"
        )));
    }
    let lcc = largest_connected_component(&g);
    log::warn!(
        "{arg}: graph has {comps} connected components; using the largest ({} of {} vertices)",
        lcc.vertex_count(),
        g.vertex_count()
    );
    Ok((src.name(), lcc))
}

/// Files collected in memory and written together at the end, so a failed
/// command leaves no partial outputs behind.
#[derive(Default)]
struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: Vec<u8>,
}

impl Outputs {
    fn file(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    fn commit(self) -> CliResult<()> {
        let mut written: Vec<&Path> = Vec::new();
        for (path, bytes) in &self.files {
            if let Err(e) = std::fs::write(path, bytes) {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(CliError::Io(format!("{}: {e}", path.display())));
            }
            written.push(path);
        }
        let mut out = std::io::stdout().lock();
        out.write_all(&self.stdout)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Io(format!("standard output: {e}")))
    }
}

fn trace_csv(traces: &[StressTrace]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_traces(traces, &mut buf).map_err(|e| CliError::from_core("trace", e))?;
    Ok(buf)
}

fn snapshot_path(out: &Path, t: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "layout".into());
    out.with_file_name(format!("{stem}_iter{t}.svg"))
}

pub fn cmd_layout(args: &LayoutArgs) -> CliResult<()> {
    let (name, g) = load(&args.input, &args.input_options)?;
    let core = |e| CliError::from_core(&args.input, e);
    let prepared = PreparedGraph::new(name.clone(), g, false).map_err(core)?;
    let d = &prepared.distances;
    let seed = args.seed;
    let sgd_cfg = args.solver.sgd().config(d, seed).map_err(core)?;
    let smacof_cfg = args.solver.smacof();

    let wanted: BTreeSet<usize> = args.snapshots.iter().copied().collect();
    let mut snapshots: Vec<(usize, Layout)> = Vec::new();
    let mut observe = |t: usize, x: &Layout| {
        if wanted.contains(&t) {
            snapshots.push((t, x.clone()));
        }
    };

    let (initializer, outcome) = match args.alg {
        Algorithm::Hybrid => {
            if args.init != Initializer::Random {
                return Err(CliError::Input(
                    "hybrid always starts from a random layout; drop --init".into(),
                ));
            }
            let x0 = initial_layout(&prepared, Initializer::Random, args.solver.pivots, seed)
                .map_err(core)?;
            observe(0, &x0);
            let h = run_hybrid_observed(d, args.sgd_steps, &sgd_cfg, &smacof_cfg, seed, observe)
                .map_err(core)?;
            (Initializer::SgdSteps(args.sgd_steps), h.outcome)
        }
        alg => {
            let x0 = initial_layout(&prepared, args.init, args.solver.pivots, seed).map_err(core)?;
            observe(0, &x0);
            let out = if alg == Algorithm::Sgd {
                run_sgd_observed(d, &x0, &sgd_cfg, sgd_cfg.schedule.t_max(), observe)
            } else {
                run_smacof_observed(d, &x0, &smacof_cfg, observe)
            };
            (args.init, out.map_err(core)?)
        }
    };
    let iterations = outcome.stresses.len() - 1;
    for t in &wanted {
        if *t > iterations {
            log::warn!("snapshot {t} skipped: the run ended after {iterations} iterations");
        }
    }

    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.svg")));
    let trace_path = args
        .trace
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}_trace.csv")));
    let mut outputs = Outputs::default();
    for (t, x) in &snapshots {
        let svg = svg::render_svg(x, &prepared.graph).map_err(core)?;
        outputs.file(snapshot_path(&out_path, *t), svg.into_bytes());
    }
    let svg = svg::render_svg(&outcome.layout, &prepared.graph).map_err(core)?;
    outputs.file(out_path, svg.into_bytes());
    let trace = StressTrace {
        graph: name.clone(),
        algorithm: args.alg,
        initializer,
        seed,
        values: outcome.stresses.clone(),
        phase_boundary: match initializer {
            Initializer::SgdSteps(k) => Some(k),
            _ => None,
        },
    };
    outputs.file(trace_path, trace_csv(&[trace])?);
    outputs.stdout = format!(
        "{name}: {} x {initializer}, {iterations} iterations, final stress {}\n",
        args.alg,
        outcome.final_stress()
    )
    .into_bytes();
    outputs.commit()
}

fn run_experiment(inputs: &[String], cells: Vec<Cell>, opts: &ExperimentOptions) -> CliResult<()> {
    let mut graphs = Vec::with_capacity(inputs.len());
    for arg in inputs {
        let (name, graph) = load(arg, &opts.input_options)?;
        graphs.push(GraphSource::Loaded { name, graph });
    }
    let cfg = ExperimentConfig {
        repetitions: opts.reps,
        cells,
        sgd: opts.solver.sgd(),
        smacof: opts.solver.smacof(),
        pivots: opts.solver.pivots,
        base_seed: opts.base_seed,
        ..ExperimentConfig::new(graphs)
    };
    let traces = run_grid(&cfg).map_err(|e| CliError::from_core("experiment", e))?;
    let report = relative_deviation(&traces).map_err(|e| CliError::from_core("report", e))?;
    let mut csv = Vec::new();
    write_report(&report, &mut csv).map_err(|e| CliError::from_core("report", e))?;

    let mut outputs = Outputs::default();
    match &opts.out {
        Some(path) => outputs.file(path.clone(), csv),
        None => outputs.stdout = csv,
    }
    if let Some(path) = &opts.trace {
        outputs.file(path.clone(), trace_csv(&traces)?);
    }
    outputs.commit()
}

fn push_unique(cells: &mut Vec<Cell>, cell: Cell) {
    if !cells.contains(&cell) {
        cells.push(cell);
    }
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let mut cells = Vec::new();
    for &alg in &args.alg {
        if alg == Algorithm::Hybrid {
            for &k in &args.sgd_steps {
                push_unique(&mut cells, Cell::hybrid(k));
            }
        } else {
            for &init in &args.init {
                let cell = Cell::new(alg, init).map_err(|e| CliError::Input(e.to_string()))?;
                push_unique(&mut cells, cell);
            }
        }
    }
    push_unique(&mut cells, Cell::BASELINE);
    run_experiment(&args.inputs, cells, &args.experiment)
}

pub fn cmd_hybrid(args: &HybridArgs) -> CliResult<()> {
    let mut cells = vec![
        Cell::BASELINE,
        Cell {
            algorithm: Algorithm::Smacof,
            initializer: Initializer::Random,
        },
    ];
    for &k in &args.sgd_steps {
        push_unique(&mut cells, Cell::hybrid(k));
    }
    run_experiment(&args.inputs, cells, &args.experiment)
}

pub fn cmd_info(args: &InfoArgs) -> CliResult<()> {
    let src = source(&args.input, args.format)?;
    let g = src.load().map_err(|e| CliError::from_core(&args.input, e))?;
    let comps = g.components();
    let lcc = largest_connected_component(&g);
    let mut text = format!(
        "graph: {}\nvertices: {}\nedges: {}\ncomponents: {}\nlargest component: {}\n",
        src.name(),
        g.vertex_count(),
        g.edge_count(),
        comps.len(),
        lcc.vertex_count()
    );
    if lcc.vertex_count() > 0 {
        let d = all_pairs_shortest_paths(&lcc).map_err(|e| CliError::from_core(&args.input, e))?;
        text.push_str(&format!("diameter: {}\n", d.max_distance()));
    }
    let outputs = Outputs {
        stdout: text.into_bytes(),
        ..Outputs::default()
    };
    outputs.commit()
}
