//! Metrics and the end-to-end relationship-inference experiment.
//!
//! One run: simulate the team game on the signed ground truth, build the
//! team GGN against the unsigned skeleton using the resulting teams, filter
//! it to acquainted pairs, score skeleton edges with the exponential kernel
//! and compare the predicted signs with the ground truth.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{invalid, Error, Result};
use crate::ggn::{build_team_ggn, filter_edges, Aggregate, GgnGraph};
use crate::graph::{self, SampleMethod, SignedGraph};
use crate::inference::{exponential_kernel_with, predict_signs, Execution, PredictionSet};
use crate::team_game::{SimulationOutcome, TeamGame, TeamGameConfig, TieRule};

/// Which skeleton edges count towards accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccuracyScope {
    /// Only edges that received a nonzero score.
    #[default]
    Predicted,
    /// Every ground-truth edge; unpredicted edges count as wrong.
    All,
}

impl FromStr for AccuracyScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predicted" => Ok(Self::Predicted),
            "all" => Ok(Self::All),
            other => invalid(format!("unknown accuracy scope {other:?}")),
        }
    }
}

impl fmt::Display for AccuracyScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Predicted => "predicted",
            Self::All => "all",
        })
    }
}

/// Balanced accuracy: the mean of the accuracy on truly positive edges and
/// the accuracy on truly negative edges.
///
/// Returns `Ok(None)` when one of the two classes has no member in scope.
/// Zero-weight truth edges belong to neither class.
pub fn average_accuracy(
    pred: &PredictionSet,
    truth: &SignedGraph,
    scope: AccuracyScope,
) -> Result<Option<f64>> {
    // [positive, negative] x (correct, total)
    let mut tally = [(0usize, 0usize); 2];
    for p in &pred.predictions {
        let Some(w) = truth.weight(p.u, p.v) else {
            return invalid(format!("predicted edge ({}, {}) is not in the ground truth", p.u, p.v));
        };
        if w == 0.0 {
            continue;
        }
        let class = usize::from(w < 0.0);
        tally[class].1 += 1;
        if (w > 0.0) == (p.sign > 0) {
            tally[class].0 += 1;
        }
    }
    if scope == AccuracyScope::All {
        let mut predicted = pred.predictions.iter().map(|p| (p.u, p.v)).collect::<Vec<_>>();
        predicted.sort_unstable();
        for e in truth.edges() {
            if e.weight == 0.0 || predicted.binary_search(&(e.src, e.dst)).is_ok() {
                continue;
            }
            tally[usize::from(e.weight < 0.0)].1 += 1;
        }
    }
    if tally.iter().any(|&(_, total)| total == 0) {
        return Ok(None);
    }
    let per_class = tally.map(|(correct, total)| correct as f64 / total as f64);
    Ok(Some((per_class[0] + per_class[1]) / 2.0))
}

/// Share of skeleton edges that received a nonzero score.
pub fn predictive_percentage(pred: &PredictionSet, skeleton: &SignedGraph) -> Result<f64> {
    if skeleton.edge_count() == 0 {
        return invalid("predictive percentage is undefined on an empty skeleton");
    }
    Ok(pred.len() as f64 / skeleton.edge_count() as f64)
}

/// Where an experiment's ground-truth graph comes from.
///
/// String forms: a path to an edge-list file, `karate`,
/// `karate-planted[:node]`, `planted:n:avg_degree:noise:seed` (two equal
/// communities) and `random:n:m:negative_fraction:seed`.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    File(PathBuf),
    Karate,
    KaratePlanted(usize),
    Planted { n: usize, avg_degree: f64, noise: f64, seed: u64 },
    Random { n: usize, m: usize, negative_fraction: f64, seed: u64 },
}

/// Planted node used by `karate-planted` without an explicit node.
pub const DEFAULT_PLANTED_NODE: usize = 23;

fn field<T: FromStr>(parts: &[&str], idx: usize, what: &str, spec: &str) -> Result<T> {
    parts
        .get(idx)
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("dataset {spec:?}: bad or missing {what}")))
}

impl FromStr for DatasetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts[0] {
            "karate" if parts.len() == 1 => Ok(Self::Karate),
            "karate-planted" => match parts.len() {
                1 => Ok(Self::KaratePlanted(DEFAULT_PLANTED_NODE)),
                2 => Ok(Self::KaratePlanted(field(&parts, 1, "node", s)?)),
                _ => invalid(format!("dataset {s:?}: expected karate-planted[:node]")),
            },
            "planted" if parts.len() == 5 => Ok(Self::Planted {
                n: field(&parts, 1, "n", s)?,
                avg_degree: field(&parts, 2, "avg_degree", s)?,
                noise: field(&parts, 3, "noise", s)?,
                seed: field(&parts, 4, "seed", s)?,
            }),
            "random" if parts.len() == 5 => Ok(Self::Random {
                n: field(&parts, 1, "n", s)?,
                m: field(&parts, 2, "m", s)?,
                negative_fraction: field(&parts, 3, "negative_fraction", s)?,
                seed: field(&parts, 4, "seed", s)?,
            }),
            "planted" | "random" => invalid(format!("dataset {s:?}: expected {}:n:..:..:seed", parts[0])),
            "pd" => invalid("the pd dataset is only available to pd-demo"),
            _ => Ok(Self::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::File(path) => write!(f, "{}", path.display()),
            Self::Karate => f.write_str("karate"),
            Self::KaratePlanted(node) => write!(f, "karate-planted:{node}"),
            Self::Planted { n, avg_degree, noise, seed } => {
                write!(f, "planted:{n}:{avg_degree}:{noise}:{seed}")
            }
            Self::Random { n, m, negative_fraction, seed } => {
                write!(f, "random:{n}:{m}:{negative_fraction}:{seed}")
            }
        }
    }
}

impl DatasetSpec {
    /// Short name used in result tables (the file stem for files).
    pub fn id(&self) -> String {
        match self {
            Self::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            other => other.to_string(),
        }
    }

    /// Loads the graph as an undirected signed graph.
    pub fn load(&self) -> Result<SignedGraph> {
        match self {
            Self::File(path) => {
                let file = File::open(path).map_err(|e| {
                    Error::InvalidArgument(format!("cannot open dataset {}: {e}", path.display()))
                })?;
                Ok(graph::load_edge_list(BufReader::new(file))?.make_undirected())
            }
            Self::Karate => Ok(graph::karate()),
            Self::KaratePlanted(node) => graph::karate_with_planted_signs(*node),
            Self::Planted { n, avg_degree, noise, seed } => {
                graph::planted_communities(*n, 2, *avg_degree, *noise, *seed)
            }
            Self::Random { n, m, negative_fraction, seed } => {
                graph::random_signed(*n, *m, *negative_fraction, *seed)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub nodes: usize,
    pub method: SampleMethod,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub sample: Option<SampleSpec>,
    pub c_values: Vec<f64>,
    pub k_values: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    pub symmetrize: bool,
    pub accuracy_scope: AccuracyScope,
    pub tie_rule: TieRule,
    pub max_sweeps: usize,
    pub improvement_tolerance: f64,
    /// Concurrent runs; 1 runs everything on the calling thread.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let team = TeamGameConfig::default();
        Self {
            dataset: DatasetSpec::KaratePlanted(DEFAULT_PLANTED_NODE),
            sample: None,
            c_values: vec![0.2],
            k_values: vec![2],
            runs: 5,
            base_seed: 0,
            symmetrize: true,
            accuracy_scope: AccuracyScope::Predicted,
            tie_rule: TieRule::CurrentFirst,
            max_sweeps: team.max_sweeps,
            improvement_tolerance: team.improvement_tolerance,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return invalid("runs must be at least 1");
        }
        if self.c_values.is_empty() || self.k_values.is_empty() {
            return invalid("at least one c and one k value are required");
        }
        if let Some(c) = self.c_values.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return invalid(format!("c must be a non-negative real, got {c}"));
        }
        if let Some(k) = self.k_values.iter().find(|&&k| k > crate::inference::MAX_ORDER) {
            return invalid(format!("k = {k} exceeds the maximum order {}", crate::inference::MAX_ORDER));
        }
        if self.jobs == 0 {
            return invalid("jobs must be at least 1");
        }
        TeamGameConfig {
            c: self.c_values[0],
            seed: 0,
            max_sweeps: self.max_sweeps,
            improvement_tolerance: self.improvement_tolerance,
        }
        .validate()
    }

    /// Loads (and optionally samples) the ground truth.
    pub fn load_dataset(&self) -> Result<SignedGraph> {
        let g = self.dataset.load()?;
        match self.sample {
            None => Ok(g),
            Some(s) => g.sample_subgraph(s.nodes, s.method, s.seed),
        }
    }

    pub fn dataset_id(&self) -> String {
        match self.sample {
            None => self.dataset.id(),
            Some(s) => format!("{}@{}-{}", self.dataset.id(), s.method, s.nodes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub dataset: String,
    pub c: f64,
    pub k: usize,
    pub run: usize,
    pub seed: u64,
    /// `None` when undefined (a class without members) or the run failed.
    pub average_accuracy: Option<f64>,
    /// `None` only when the run failed.
    pub predictive_percentage: Option<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// Edges predicted at the previous (smaller) k of the same run that lost
    /// their prediction at this k through exact cancellation.
    pub cancellations: usize,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Runs left out because the metric was undefined or the run failed.
    pub excluded: usize,
}

impl MetricSummary {
    fn from_values(values: &[Option<f64>]) -> Self {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        let excluded = values.len() - defined.len();
        if defined.is_empty() {
            return Self { mean: None, std: None, excluded };
        }
        let count = defined.len() as f64;
        let mean = defined.iter().sum::<f64>() / count;
        let std = if defined.len() == 1 {
            0.0
        } else {
            (defined.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
        };
        Self { mean: Some(mean), std: Some(std), excluded }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub dataset: String,
    pub c: f64,
    pub k: usize,
    pub runs: usize,
    pub failed: usize,
    pub avg_accuracy: MetricSummary,
    pub predictive_pct: MetricSummary,
    pub cancellations: usize,
}

/// Per-(dataset, c, k) aggregates, in first-appearance order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: Vec<SummaryCell>,
}

impl Summary {
    pub fn cell(&self, dataset: &str, c: f64, k: usize) -> Option<&SummaryCell> {
        self.cells.iter().find(|cell| cell.dataset == dataset && cell.c == c && cell.k == k)
    }

    /// `{dataset: {c: {k: {...}}}}` with keys in first-appearance order.
    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        for cell in &self.cells {
            let by_c = root
                .entry(cell.dataset.clone())
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .expect("object");
            let by_k = by_c
                .entry(cell.c.to_string())
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .expect("object");
            by_k.insert(
                cell.k.to_string(),
                json!({
                    "runs": cell.runs,
                    "failed": cell.failed,
                    "avg_accuracy": cell.avg_accuracy,
                    "predictive_pct": cell.predictive_pct,
                    "cancellations": cell.cancellations,
                }),
            );
        }
        Value::Object(root)
    }
}

/// Groups results by `(dataset, c, k)`, each group ordered by seed, and
/// reports mean and sample standard deviation per metric.
pub fn aggregate(results: &[RunResult]) -> Result<Summary> {
    if results.is_empty() {
        return invalid("cannot aggregate an empty result list");
    }
    let mut order: Vec<(String, u64, usize)> = Vec::new();
    let mut groups: HashMap<(String, u64, usize), Vec<&RunResult>> = HashMap::new();
    for r in results {
        let key = (r.dataset.clone(), r.c.to_bits(), r.k);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    let cells = order
        .into_iter()
        .map(|key| {
            let mut group = groups.remove(&key).expect("group exists");
            group.sort_by_key(|r| (r.seed, r.run));
            let accuracy: Vec<Option<f64>> = group.iter().map(|r| r.average_accuracy).collect();
            let pct: Vec<Option<f64>> = group.iter().map(|r| r.predictive_percentage).collect();
            SummaryCell {
                dataset: key.0,
                c: f64::from_bits(key.1),
                k: key.2,
                runs: group.len(),
                failed: group.iter().filter(|r| !r.converged).count(),
                avg_accuracy: MetricSummary::from_values(&accuracy),
                predictive_pct: MetricSummary::from_values(&pct),
                cancellations: group.iter().map(|r| r.cancellations).sum(),
            }
        })
        .collect();
    Ok(Summary { cells })
}

pub const RESULTS_HEADER: &str = "dataset,c,k,run,seed,avg_accuracy,predictive_pct,sweeps,runtime_s";

/// Writes the per-run results table. Undefined metrics are empty fields.
/// Without `include_runtime` the runtime column is left empty so repeated
/// runs produce identical files.
pub fn write_results_csv<W: Write>(results: &[RunResult], include_runtime: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER.split(','))?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in results {
        w.write_record([
            r.dataset.clone(),
            r.c.to_string(),
            r.k.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            opt(r.average_accuracy),
            opt(r.predictive_percentage),
            r.sweeps.to_string(),
            if include_runtime { format!("{:.6}", r.runtime_s) } else { String::new() },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Artifacts of one team-game run on a ground truth.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub skeleton: SignedGraph,
    pub simulation: SimulationOutcome,
    /// Filtered GGN.
    pub ggn: GgnGraph,
}

/// Simulates the team game on `truth` and builds the filtered team GGN on
/// its skeleton.
pub fn simulate_and_build_ggn(
    truth: &SignedGraph,
    c: f64,
    seed: u64,
    tie_rule: TieRule,
    max_sweeps: usize,
    improvement_tolerance: f64,
) -> Result<PipelineRun> {
    let skeleton = truth.to_skeleton();
    let cfg = TeamGameConfig { c, seed, max_sweeps, improvement_tolerance };
    let simulation = TeamGame::new(truth, c)?.with_tie_rule(tie_rule).simulate(&cfg)?;
    let raw = build_team_ggn(&simulation.partition, &skeleton, c, tie_rule)?;
    let ggn = filter_edges(&raw, &skeleton, Aggregate::Sum)?;
    Ok(PipelineRun { skeleton, simulation, ggn })
}

/// Kernel + sign prediction on a filtered GGN.
pub fn infer(
    ggn: &GgnGraph,
    skeleton: &SignedGraph,
    k: usize,
    symmetrize: bool,
    execution: Execution,
) -> Result<PredictionSet> {
    let kernel = exponential_kernel_with(&ggn.to_matrix(), k, execution)?;
    predict_signs(&kernel, skeleton, symmetrize)
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub results: Vec<RunResult>,
    pub summary: Summary,
}

/// Runs the full pipeline for every `(c, run)` and every `k`, loading the
/// dataset from the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let truth = cfg.load_dataset()?;
    run_experiment_on(cfg, &cfg.dataset_id(), &truth)
}

/// Like [`run_experiment`] on an already loaded ground truth.
///
/// The simulation only depends on `(c, seed)`, so it is shared by all k
/// values of a run. Seeds are `base_seed + run`. Results are ordered by
/// c, then k, then run regardless of `jobs`.
pub fn run_experiment_on(cfg: &ExperimentConfig, dataset: &str, truth: &SignedGraph) -> Result<ExperimentReport> {
    cfg.validate()?;
    if truth.is_directed() {
        return invalid("the ground truth must be undirected");
    }
    let mut k_sorted = cfg.k_values.clone();
    k_sorted.sort_unstable();
    k_sorted.dedup();

    let tasks: Vec<(usize, usize)> =
        (0..cfg.c_values.len()).flat_map(|ci| (0..cfg.runs).map(move |run| (ci, run))).collect();
    let execute = |&(ci, run): &(usize, usize)| -> Result<Vec<RunResult>> {
        let execution = if cfg.jobs == 1 { Execution::Sequential } else { Execution::Parallel };
        run_one(cfg, dataset, truth, cfg.c_values[ci], run, &k_sorted, execution)
    };
    let per_task: Vec<Result<Vec<RunResult>>> = if cfg.jobs == 1 {
        tasks.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {} workers: {e}", cfg.jobs)))?;
        pool.install(|| tasks.par_iter().map(execute).collect())
    };

    let mut by_key: HashMap<(usize, usize, usize), RunResult> = HashMap::new();
    for ((ci, run), res) in tasks.iter().zip(per_task) {
        for r in res? {
            by_key.insert((*ci, r.k, *run), r);
        }
    }
    let mut results = Vec::with_capacity(by_key.len());
    for ci in 0..cfg.c_values.len() {
        for &k in &cfg.k_values {
            for run in 0..cfg.runs {
                if let Some(r) = by_key.get(&(ci, k, run)) {
                    results.push(r.clone());
                }
            }
        }
    }
    let summary = aggregate(&results)?;
    Ok(ExperimentReport { results, summary })
}

fn run_one(
    cfg: &ExperimentConfig,
    dataset: &str,
    truth: &SignedGraph,
    c: f64,
    run: usize,
    k_sorted: &[usize],
    execution: Execution,
) -> Result<Vec<RunResult>> {
    let seed = cfg.base_seed.wrapping_add(run as u64);
    let started = Instant::now();
    let pipeline =
        simulate_and_build_ggn(truth, c, seed, cfg.tie_rule, cfg.max_sweeps, cfg.improvement_tolerance)?;
    let shared_time = started.elapsed().as_secs_f64();
    let sweeps = pipeline.simulation.sweeps;

    if !pipeline.simulation.converged {
        return Ok(k_sorted
            .iter()
            .map(|&k| RunResult {
                dataset: dataset.to_owned(),
                c,
                k,
                run,
                seed,
                average_accuracy: None,
                predictive_percentage: None,
                sweeps,
                converged: false,
                cancellations: 0,
                runtime_s: shared_time,
            })
            .collect());
    }

    let mut out = Vec::with_capacity(k_sorted.len());
    let mut previous: Option<PredictionSet> = None;
    for &k in k_sorted {
        let t = Instant::now();
        let pred = infer(&pipeline.ggn, &pipeline.skeleton, k, cfg.symmetrize, execution)?;
        let cancellations = previous
            .as_ref()
            .map(|prev| prev.predictions.iter().filter(|p| pred.get(p.u, p.v).is_none()).count())
            .unwrap_or(0);
        out.push(RunResult {
            dataset: dataset.to_owned(),
            c,
            k,
            run,
            seed,
            average_accuracy: average_accuracy(&pred, truth, cfg.accuracy_scope)?,
            predictive_percentage: Some(predictive_percentage(&pred, &pipeline.skeleton)?),
            sweeps,
            converged: true,
            cancellations,
            runtime_s: shared_time + t.elapsed().as_secs_f64(),
        });
        previous = Some(pred);
    }
    Ok(out)
}
