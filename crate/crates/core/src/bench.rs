//! Repeated layout experiments over solver x initializer grids.
//!
//! Every run records a stress trace. Finals are aggregated by mean per
//! (graph, cell) and compared with the SMACOF-after-CMDS baseline.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    all_pairs_shortest_paths, generate, largest_connected_component, read_graph, DistanceMatrix,
    Family, Format, Graph,
};
use crate::init::{classical_mds, pivot_mds, random_init, PivotConfig, DEFAULT_PIVOTS};
use crate::layout::Layout;
use crate::sgd::{
    run_sgd, run_sgd_observed, RunOutcome, Schedule, SgdConfig, DEFAULT_EPSILON,
    DEFAULT_ITERATIONS, DEFAULT_JITTER,
};
use crate::smacof::{run_smacof, run_smacof_observed, SmacofConfig};

/// Relative slack allowed per step before a majorization trace counts as
/// increasing.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

/// Absolute slack on top of [`MONOTONE_TOLERANCE`]. Layouts that realize
/// all distances exactly have stress at rounding level, where successive
/// values fluctuate freely.
pub const MONOTONE_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Sgd,
    Smacof,
    Hybrid,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Sgd => "sgd",
            Algorithm::Smacof => "smacof",
            Algorithm::Hybrid => "hybrid",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sgd" => Ok(Algorithm::Sgd),
            "smacof" => Ok(Algorithm::Smacof),
            "hybrid" => Ok(Algorithm::Hybrid),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Initializer {
    Random,
    Cmds,
    Pivot,
    /// Random start followed by this many SGD iterations (hybrid runs only).
    SgdSteps(usize),
}

impl fmt::Display for Initializer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Initializer::Random => f.write_str("random"),
            Initializer::Cmds => f.write_str("cmds"),
            Initializer::Pivot => f.write_str("pivot"),
            Initializer::SgdSteps(k) => write!(f, "sgd_{k}"),
        }
    }
}

impl FromStr for Initializer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(Initializer::Random),
            "cmds" => Ok(Initializer::Cmds),
            "pivot" => Ok(Initializer::Pivot),
            other => other
                .strip_prefix("sgd_")
                .and_then(|k| k.parse().ok())
                .map(Initializer::SgdSteps)
                .ok_or_else(|| format!("unknown initializer `{other}`")),
        }
    }
}

/// One algorithm/initializer combination of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub initializer: Initializer,
}

impl Cell {
    pub const BASELINE: Cell = Cell {
        algorithm: Algorithm::Smacof,
        initializer: Initializer::Cmds,
    };

    pub fn new(algorithm: Algorithm, initializer: Initializer) -> Result<Cell> {
        let hybrid_init = matches!(initializer, Initializer::SgdSteps(_));
        if hybrid_init != (algorithm == Algorithm::Hybrid) {
            return Err(Error::InvalidConfig(format!(
                "initializer {initializer} cannot be combined with algorithm {algorithm}"
            )));
        }
        Ok(Cell {
            algorithm,
            initializer,
        })
    }

    pub fn hybrid(sgd_steps: usize) -> Cell {
        Cell {
            algorithm: Algorithm::Hybrid,
            initializer: Initializer::SgdSteps(sgd_steps),
        }
    }

    /// {sgd, smacof} x {random, cmds}.
    pub fn standard_grid() -> Vec<Cell> {
        let mut cells = Vec::new();
        for algorithm in [Algorithm::Sgd, Algorithm::Smacof] {
            for initializer in [Initializer::Random, Initializer::Cmds] {
                cells.push(Cell {
                    algorithm,
                    initializer,
                });
            }
        }
        cells
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.algorithm, self.initializer)
    }
}

/// Stress per iteration of one run; `values[0]` is the initial stress.
#[derive(Debug, Clone, PartialEq)]
pub struct StressTrace {
    pub graph: String,
    pub algorithm: Algorithm,
    pub initializer: Initializer,
    pub seed: u64,
    pub values: Vec<f64>,
    /// For hybrid runs, the number of SGD iterations before majorization
    /// takes over; `values[..=k]` belong to the SGD phase.
    pub phase_boundary: Option<usize>,
}

impl StressTrace {
    pub fn cell(&self) -> Cell {
        Cell {
            algorithm: self.algorithm,
            initializer: self.initializer,
        }
    }

    pub fn final_stress(&self) -> f64 {
        *self.values.last().expect("traces are nonempty")
    }

    /// Index from which the trace must be non-increasing, if any.
    fn majorization_start(&self) -> Option<usize> {
        match self.algorithm {
            Algorithm::Sgd => None,
            Algorithm::Smacof => Some(0),
            Algorithm::Hybrid => self.phase_boundary,
        }
    }
}

/// Fails if any step of `values` increases by more than
/// [`MONOTONE_TOLERANCE`] relative plus [`MONOTONE_FLOOR`].
pub fn check_non_increasing(values: &[f64]) -> Result<()> {
    for (i, w) in values.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + MONOTONE_TOLERANCE) + MONOTONE_FLOOR {
            return Err(Error::NonMonotone {
                iteration: i + 1,
                before: w[0],
                after: w[1],
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File { path: PathBuf, format: Option<Format> },
    Generated(Family),
    Loaded { name: String, graph: Graph },
}

impl GraphSource {
    pub fn file(path: impl Into<PathBuf>) -> GraphSource {
        GraphSource::File {
            path: path.into(),
            format: None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GraphSource::File { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            GraphSource::Generated(f) => f.name(),
            GraphSource::Loaded { name, .. } => name.clone(),
        }
    }

    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::File { path, format } => read_graph(path, *format),
            GraphSource::Generated(f) => generate(*f),
            GraphSource::Loaded { graph, .. } => Ok(graph.clone()),
        }
    }
}

/// SGD parameters that do not depend on the graph; the schedule itself is
/// derived from each graph's distance range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdSettings {
    pub iterations: usize,
    pub epsilon: f64,
    pub jitter_epsilon: f64,
}

impl Default for SgdSettings {
    fn default() -> Self {
        SgdSettings {
            iterations: DEFAULT_ITERATIONS,
            epsilon: DEFAULT_EPSILON,
            jitter_epsilon: DEFAULT_JITTER,
        }
    }
}

impl SgdSettings {
    pub fn config(&self, d: &DistanceMatrix, seed: u64) -> Result<SgdConfig> {
        Ok(SgdConfig {
            schedule: Schedule::for_distances(d, self.iterations, self.epsilon)?,
            seed,
            jitter_epsilon: self.jitter_epsilon,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graphs: Vec<GraphSource>,
    pub repetitions: usize,
    pub cells: Vec<Cell>,
    pub sgd: SgdSettings,
    pub smacof: SmacofConfig,
    pub pivots: usize,
    /// Repetition `r` runs with seed `base_seed + r`.
    pub base_seed: u64,
}

impl ExperimentConfig {
    /// Ten repetitions of the standard grid with default solver settings.
    pub fn new(graphs: Vec<GraphSource>) -> ExperimentConfig {
        ExperimentConfig {
            graphs,
            repetitions: 10,
            cells: Cell::standard_grid(),
            sgd: SgdSettings::default(),
            smacof: SmacofConfig::default(),
            pivots: DEFAULT_PIVOTS,
            base_seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("at least one repetition is required".into()));
        }
        for cell in &self.cells {
            Cell::new(cell.algorithm, cell.initializer)?;
            if let Initializer::SgdSteps(k) = cell.initializer {
                if k > self.sgd.iterations {
                    return Err(Error::InvalidConfig(format!(
                        "hybrid with {k} SGD steps exceeds the {}-iteration schedule",
                        self.sgd.iterations
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repetitions as u64).map(move |r| self.base_seed.wrapping_add(r))
    }
}

/// A graph reduced to its largest component, with distances and the
/// (deterministic) classical MDS layout when needed.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub name: String,
    pub graph: Graph,
    pub distances: DistanceMatrix,
    pub cmds: Option<Layout>,
}

impl PreparedGraph {
    pub fn new(name: impl Into<String>, graph: Graph, with_cmds: bool) -> Result<PreparedGraph> {
        let name = name.into();
        let graph = if graph.is_connected() {
            graph
        } else {
            let lcc = largest_connected_component(&graph);
            log::warn!(
                "graph `{name}` is disconnected; using its largest component ({} of {} vertices)",
                lcc.vertex_count(),
                graph.vertex_count()
            );
            lcc
        };
        if graph.vertex_count() < 2 {
            return Err(Error::TooFewVertices {
                required: 2,
                found: graph.vertex_count(),
            });
        }
        let distances = all_pairs_shortest_paths(&graph)?;
        let cmds = if with_cmds {
            Some(classical_mds(&distances)?)
        } else {
            None
        };
        Ok(PreparedGraph {
            name,
            graph,
            distances,
            cmds,
        })
    }

    fn cmds(&self) -> Result<Layout> {
        match &self.cmds {
            Some(x) => Ok(x.clone()),
            None => classical_mds(&self.distances),
        }
    }
}

/// Result of SGD-then-majorization: `outcome.stresses[..=sgd_steps]` is the
/// SGD phase, the rest comes from majorization.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridOutcome {
    pub outcome: RunOutcome,
    pub sgd_steps: usize,
}

/// Random unit-square start, the first `k` iterations of the SGD schedule,
/// then majorization until convergence. `seed` drives both the start layout
/// and the SGD pair order.
pub fn run_hybrid(
    d: &DistanceMatrix,
    k: usize,
    sgd_cfg: &SgdConfig,
    smacof_cfg: &SmacofConfig,
    seed: u64,
) -> Result<HybridOutcome> {
    run_hybrid_observed(d, k, sgd_cfg, smacof_cfg, seed, |_, _| {})
}

/// [`run_hybrid`] reporting the layout after every iteration of both
/// phases, numbered consecutively from 1.
pub fn run_hybrid_observed<F>(
    d: &DistanceMatrix,
    k: usize,
    sgd_cfg: &SgdConfig,
    smacof_cfg: &SmacofConfig,
    seed: u64,
    mut observe: F,
) -> Result<HybridOutcome>
where
    F: FnMut(usize, &Layout),
{
    let init = random_init(d.len(), seed)?;
    let cfg = SgdConfig { seed, ..*sgd_cfg };
    let sgd = run_sgd_observed(d, &init, &cfg, k, &mut observe)?;
    let smacof = run_smacof_observed(d, &sgd.layout, smacof_cfg, |t, x| observe(k + t, x))?;
    let mut stresses = sgd.stresses;
    stresses.extend_from_slice(&smacof.stresses[1..]);
    Ok(HybridOutcome {
        outcome: RunOutcome {
            layout: smacof.layout,
            stresses,
        },
        sgd_steps: k,
    })
}

/// Initial layout for `initializer` (`SgdSteps` starts from random).
pub fn initial_layout(
    prepared: &PreparedGraph,
    initializer: Initializer,
    pivots: usize,
    seed: u64,
) -> Result<Layout> {
    match initializer {
        Initializer::Random | Initializer::SgdSteps(_) => {
            random_init(prepared.graph.vertex_count(), seed)
        }
        Initializer::Cmds => prepared.cmds(),
        Initializer::Pivot => pivot_mds(&prepared.graph, &PivotConfig::new(pivots, seed)),
    }
}

/// One run of `cell` on `prepared` with `seed`.
pub fn run_cell(
    prepared: &PreparedGraph,
    cell: Cell,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<StressTrace> {
    let d = &prepared.distances;
    let sgd_cfg = cfg.sgd.config(d, seed)?;
    let (values, phase_boundary) = match cell.initializer {
        Initializer::SgdSteps(k) => {
            let h = run_hybrid(d, k, &sgd_cfg, &cfg.smacof, seed)?;
            (h.outcome.stresses, Some(k))
        }
        init => {
            let x0 = initial_layout(prepared, init, cfg.pivots, seed)?;
            let out = match cell.algorithm {
                Algorithm::Sgd => run_sgd(d, &x0, &sgd_cfg)?,
                Algorithm::Smacof => run_smacof(d, &x0, &cfg.smacof)?,
                Algorithm::Hybrid => unreachable!("validated by Cell::new"),
            };
            (out.stresses, None)
        }
    };
    let trace = StressTrace {
        graph: prepared.name.clone(),
        algorithm: cell.algorithm,
        initializer: cell.initializer,
        seed,
        values,
        phase_boundary,
    };
    if let Some(start) = trace.majorization_start() {
        check_non_increasing(&trace.values[start..])?;
    }
    Ok(trace)
}

/// Runs every cell `repetitions` times on every graph. Runs execute in
/// parallel; the output order is graph, cell, repetition as configured.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<StressTrace>> {
    cfg.validate()?;
    let needs_cmds = cfg.cells.iter().any(|c| c.initializer == Initializer::Cmds);
    let mut out = Vec::new();
    for source in &cfg.graphs {
        let name = source.name();
        let prepared = source
            .load()
            .and_then(|g| PreparedGraph::new(name.clone(), g, needs_cmds))
            .map_err(|e| Error::GraphLoad {
                name: name.clone(),
                source: Box::new(e),
            })?;
        let jobs: Vec<(Cell, u64)> = cfg
            .cells
            .iter()
            .flat_map(|&cell| cfg.seeds().map(move |seed| (cell, seed)))
            .collect();
        let traces = jobs
            .par_iter()
            .map(|&(cell, seed)| run_cell(&prepared, cell, seed, cfg))
            .collect::<Result<Vec<_>>>()?;
        out.extend(traces);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub graph: String,
    pub cell: Cell,
    /// Final stresses ordered by seed.
    pub final_stresses: Vec<f64>,
    pub mean_final_stress: f64,
    /// `mean / baseline - 1`, exactly zero for the baseline cell.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeviationReport {
    pub rows: Vec<DeviationRow>,
}

impl DeviationReport {
    pub fn get(&self, graph: &str, cell: Cell) -> Option<&DeviationRow> {
        self.rows.iter().find(|r| r.graph == graph && r.cell == cell)
    }

    pub fn baseline(&self, graph: &str) -> Option<f64> {
        self.get(graph, Cell::BASELINE).map(|r| r.mean_final_stress)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Aggregates final stresses per (graph, cell) and relates each mean to the
/// SMACOF x CMDS mean of the same graph. Rows are sorted by graph, then cell.
pub fn relative_deviation(traces: &[StressTrace]) -> Result<DeviationReport> {
    let mut groups: BTreeMap<(String, Cell), Vec<(u64, f64)>> = BTreeMap::new();
    for t in traces {
        groups
            .entry((t.graph.clone(), t.cell()))
            .or_default()
            .push((t.seed, t.final_stress()));
    }
    let mut baselines = BTreeMap::new();
    for ((graph, cell), runs) in &groups {
        if *cell == Cell::BASELINE {
            let mut runs = runs.clone();
            runs.sort_by_key(|&(seed, _)| seed);
            let finals: Vec<f64> = runs.iter().map(|&(_, s)| s).collect();
            baselines.insert(graph.clone(), mean(&finals));
        }
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((graph, cell), mut runs) in groups {
        let baseline = *baselines
            .get(&graph)
            .ok_or_else(|| Error::MissingBaseline(graph.clone()))?;
        runs.sort_by_key(|&(seed, _)| seed);
        let final_stresses: Vec<f64> = runs.into_iter().map(|(_, s)| s).collect();
        let mean_final_stress = mean(&final_stresses);
        let deviation = if cell == Cell::BASELINE {
            0.0
        } else {
            mean_final_stress / baseline - 1.0
        };
        rows.push(DeviationRow {
            graph,
            cell,
            final_stresses,
            mean_final_stress,
            deviation,
        });
    }
    Ok(DeviationReport { rows })
}

const TRACE_HEADER: [&str; 6] = ["graph", "algorithm", "initializer", "seed", "iteration", "stress"];
const REPORT_HEADER: [&str; 5] = [
    "graph",
    "algorithm",
    "initializer",
    "mean_final_stress",
    "deviation",
];

/// Writes one row per trace entry. Floats use the shortest representation
/// that parses back to the same value.
pub fn write_traces<W: Write>(traces: &[StressTrace], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in traces {
        let (graph, alg, init, seed) = (
            t.graph.as_str(),
            t.algorithm.to_string(),
            t.initializer.to_string(),
            t.seed.to_string(),
        );
        for (i, v) in t.values.iter().enumerate() {
            w.write_record([graph, &alg, &init, &seed, &i.to_string(), &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn field(record: &csv::StringRecord, idx: usize) -> Result<&str> {
    record.get(idx).ok_or_else(|| {
        let line = record.position().map_or(0, |p| p.line() as usize);
        Error::Parse(crate::error::ParseError::new(line, format!("missing column {idx}")))
    })
}

fn parse_field<T: FromStr>(record: &csv::StringRecord, idx: usize) -> Result<T>
where
    T::Err: fmt::Display,
{
    let raw = field(record, idx)?;
    raw.parse().map_err(|e: T::Err| {
        let line = record.position().map_or(0, |p| p.line() as usize);
        Error::Parse(crate::error::ParseError::new(line, format!("`{raw}`: {e}")))
    })
}

/// Reads traces written by [`write_traces`]. Consecutive rows with the same
/// graph, cell and seed form one trace.
pub fn read_traces<R: Read>(input: R) -> Result<Vec<StressTrace>> {
    let mut r = csv::Reader::from_reader(input);
    let mut traces: Vec<StressTrace> = Vec::new();
    for record in r.records() {
        let record = record?;
        let graph = field(&record, 0)?.to_string();
        let algorithm: Algorithm = parse_field(&record, 1)?;
        let initializer: Initializer = parse_field(&record, 2)?;
        let seed: u64 = parse_field(&record, 3)?;
        let iteration: usize = parse_field(&record, 4)?;
        let stress: f64 = parse_field(&record, 5)?;
        match traces.last_mut() {
            Some(t)
                if iteration > 0
                    && t.graph == graph
                    && t.algorithm == algorithm
                    && t.initializer == initializer
                    && t.seed == seed =>
            {
                t.values.push(stress)
            }
            _ => traces.push(StressTrace {
                graph,
                algorithm,
                initializer,
                seed,
                values: vec![stress],
                phase_boundary: match (algorithm, initializer) {
                    (Algorithm::Hybrid, Initializer::SgdSteps(k)) => Some(k),
                    _ => None,
                },
            }),
        }
    }
    Ok(traces)
}

pub fn write_report<W: Write>(report: &DeviationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for row in &report.rows {
        w.write_record([
            row.graph.as_str(),
            &row.cell.algorithm.to_string(),
            &row.cell.initializer.to_string(),
            &row.mean_final_stress.to_string(),
            &row.deviation.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Summary row as stored in a report file (per-run finals are not kept).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRecord {
    pub graph: String,
    pub cell: Cell,
    pub mean_final_stress: f64,
    pub deviation: f64,
}

pub fn read_report<R: Read>(input: R) -> Result<Vec<ReportRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        rows.push(ReportRecord {
            graph: field(&record, 0)?.to_string(),
            cell: Cell {
                algorithm: parse_field(&record, 1)?,
                initializer: parse_field(&record, 2)?,
            },
            mean_final_stress: parse_field(&record, 3)?,
            deviation: parse_field(&record, 4)?,
        });
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn export_traces_csv(traces: &[StressTrace], path: &Path) -> Result<()> {
    write_traces(traces, create(path)?)
}

pub fn export_report_csv(report: &DeviationReport, path: &Path) -> Result<()> {
    write_report(report, create(path)?)
}
