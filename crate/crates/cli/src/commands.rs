use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use ggn_core::demo::{karate_demo, pd_demo, RelationOrder};
use ggn_core::eval::{
    self, run_experiment, write_results_csv, AccuracyScope, DatasetSpec, ExperimentConfig, SampleSpec,
};
use ggn_core::games::{prisoners_dilemma, NormalFormGame, StrategyProfile};
use ggn_core::ggn::{build_dynamic_ggn, build_general_ggn, build_team_ggn, filter_edges, Aggregate, GgnGraph, TraceStep};
use ggn_core::inference::Execution;
use ggn_core::team_game::{TeamGame, TeamGameConfig, TeamPartition};
use ggn_core::SignedGraph;
use serde::Serialize;

use crate::args::{
    Command, CommonArgs, DatasetArgs, EvaluateArgs, GgnArgs, InferArgs, KarateDemoArgs, PdDemoArgs, SimulateArgs,
    StatsArgs,
};

pub fn run(command: Command) -> Result<()> {
    let name = command.name();
    match command {
        Command::Simulate(a) => simulate(name, a),
        Command::Ggn(a) => ggn(name, a),
        Command::Infer(a) => infer(name, a),
        Command::Evaluate(a) => evaluate(name, a),
        Command::PdDemo(a) => demo_pd(name, a),
        Command::KarateDemo(a) => demo_karate(name, a),
        Command::Stats(a) => stats(name, a),
    }
}

/// Fills in the default output directory and creates it.
fn output_dir(common: &mut CommonArgs, name: &str) -> Result<PathBuf> {
    let dir = common.out.get_or_insert_with(|| {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        PathBuf::from("ggn-runs").join(format!("{name}-{now}"))
    });
    fs::create_dir_all(&*dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir.clone())
}

/// Prints the resolved configuration and, with an output directory, writes
/// it as `config.json`.
fn announce<T: Serialize>(name: &str, args: &T, dir: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(args)?;
    eprintln!("ggn {name}, resolved configuration:\n{text}");
    if let Some(dir) = dir {
        fs::write(dir.join("config.json"), text + "\n")?;
    }
    Ok(())
}

fn create(dir: &Path, file: &str) -> Result<BufWriter<File>> {
    let path = dir.join(file);
    let f = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn experiment_base(d: &DatasetArgs, seed: u64) -> Result<ExperimentConfig> {
    let dataset: DatasetSpec = d.dataset.parse()?;
    let sample = d.sample_nodes.map(|nodes| SampleSpec { nodes, method: d.sample_method, seed });
    Ok(ExperimentConfig { dataset, sample, base_seed: seed, ..ExperimentConfig::default() })
}

fn load(d: &DatasetArgs, seed: u64) -> Result<(String, SignedGraph)> {
    let cfg = experiment_base(d, seed)?;
    let g = cfg.load_dataset().with_context(|| format!("loading dataset {}", d.dataset))?;
    Ok((cfg.dataset_id(), g))
}

fn execution(jobs: usize) -> Execution {
    if jobs > 1 { Execution::Parallel } else { Execution::Sequential }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(f))
}

fn simulate(name: &str, mut a: SimulateArgs) -> Result<()> {
    let dir = output_dir(&mut a.common, name)?;
    announce(name, &a, Some(&dir))?;
    let (id, g) = load(&a.dataset, a.common.seed)?;
    let game = TeamGame::new(&g, a.c)?.with_tie_rule(a.team.tie_rule);
    let cfg = TeamGameConfig { c: a.c, seed: a.common.seed, max_sweeps: a.team.max_sweeps, ..TeamGameConfig::default() };
    let out = game.simulate(&cfg)?;
    out.partition.write_csv(&g, create(&dir, "partition.csv")?)?;
    println!(
        "{id}: {} after {} sweeps ({} moves), {} teams, potential {}",
        if out.converged { "converged" } else { "not converged" },
        out.sweeps,
        out.moves,
        out.partition.team_count(),
        game.potential(&out.partition)
    );
    println!("wrote {}", dir.join("partition.csv").display());
    out.ensure_converged()?;
    Ok(())
}

fn load_game(path: Option<&Path>) -> Result<NormalFormGame> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read game {}", p.display()))?;
            Ok(NormalFormGame::from_json(&text)?)
        }
        None => Ok(prisoners_dilemma()),
    }
}

fn write_ggn(dir: &Path, file: &str, ggn: &GgnGraph, labels: &[String]) -> Result<()> {
    let mut w = create(dir, file)?;
    ggn.write_edge_list(labels, &mut w)?;
    w.flush()?;
    println!("wrote {} ({} edges)", dir.join(file).display(), ggn.edge_count());
    Ok(())
}

fn ggn(name: &str, mut a: GgnArgs) -> Result<()> {
    let dir = output_dir(&mut a.common, name)?;
    announce(name, &a, Some(&dir))?;

    if a.game.is_some() || a.dataset.dataset == "pd" {
        let game = load_game(a.game.as_deref())?;
        let labels: Vec<String> = (0..game.num_players()).map(|p| game.player_name(p).to_owned()).collect();
        let Some(outcome) = a.outcome.as_deref() else {
            bail!("--outcome is required for game GGNs");
        };
        let outcome = game.parse_profile(outcome)?;
        if let Some(trace) = &a.trace {
            let text = fs::read_to_string(trace).with_context(|| format!("cannot read trace {}", trace.display()))?;
            let steps: Vec<TraceStep> = serde_json::from_str(&text).context("trace must be a JSON list of {time, player, strategy}")?;
            let ggn = build_dynamic_ggn(&game, &steps, &outcome)?;
            return write_ggn(&dir, "ggn.txt", &ggn, &labels);
        }
        let nets = build_general_ggn(&game, &outcome, a.deviation_model)?;
        if nets.len() == 1 {
            return write_ggn(&dir, "ggn.txt", &nets[0], &labels);
        }
        for (i, net) in nets.iter().enumerate() {
            write_ggn(&dir, &format!("ggn-{i}.txt"), net, &labels)?;
        }
        return Ok(());
    }
    if a.trace.is_some() || a.outcome.is_some() {
        bail!("--trace and --outcome need --game or --dataset pd");
    }

    let (_, truth) = load(&a.dataset, a.common.seed)?;
    let skeleton = truth.to_skeleton();
    let partition = match &a.partition {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot read partition {}", p.display()))?;
            TeamPartition::read_csv(&truth, f)?
        }
        None => {
            let cfg = TeamGameConfig { c: a.c, seed: a.common.seed, max_sweeps: a.team.max_sweeps, ..TeamGameConfig::default() };
            let out = TeamGame::new(&truth, a.c)?.with_tie_rule(a.team.tie_rule).simulate(&cfg)?.ensure_converged()?;
            out.partition.write_csv(&truth, create(&dir, "partition.csv")?)?;
            out.partition
        }
    };
    let raw = build_team_ggn(&partition, &skeleton, a.c, a.team.tie_rule)?;
    let ggn = if a.raw { raw } else { filter_edges(&raw, &skeleton, Aggregate::Sum)? };
    write_ggn(&dir, "ggn.txt", &ggn, truth.labels())
}

fn infer(name: &str, mut a: InferArgs) -> Result<()> {
    let dir = output_dir(&mut a.common, name)?;
    announce(name, &a, Some(&dir))?;
    let (id, truth) = load(&a.dataset, a.common.seed)?;
    let skeleton = truth.to_skeleton();
    let ggn = match &a.ggn {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot read GGN {}", p.display()))?;
            GgnGraph::read_edge_list(&skeleton, BufReader::new(f))?
        }
        None => {
            let run = eval::simulate_and_build_ggn(&truth, a.c, a.common.seed, a.team.tie_rule, a.team.max_sweeps, 1e-9)?;
            run.simulation.ensure_converged()?;
            run.ggn
        }
    };
    let (k, symmetrize, exec) = (a.k, a.symmetrize, execution(a.jobs));
    let pred = with_pool(a.jobs, || eval::infer(&ggn, &skeleton, k, symmetrize, exec))??;
    pred.write_csv(skeleton.labels(), create(&dir, "predictions.csv")?)?;
    let pct = eval::predictive_percentage(&pred, &skeleton)?;
    let acc = eval::average_accuracy(&pred, &truth, AccuracyScope::Predicted)?;
    println!(
        "{id}: {} of {} edges predicted ({:.4}), average accuracy {}",
        pred.len(),
        skeleton.edge_count(),
        pct,
        acc.map_or("undefined".into(), |v| format!("{v:.4}"))
    );
    println!("wrote {}", dir.join("predictions.csv").display());
    Ok(())
}

fn fmt_metric(m: &eval::MetricSummary) -> String {
    match (m.mean, m.std) {
        (Some(mean), Some(std)) => format!("{mean:.4} ± {std:.4}"),
        _ => "undefined".into(),
    }
}

fn evaluate(name: &str, mut a: EvaluateArgs) -> Result<()> {
    let dir = output_dir(&mut a.common, name)?;
    announce(name, &a, Some(&dir))?;
    let cfg = ExperimentConfig {
        c_values: a.c.clone(),
        k_values: a.k.clone(),
        runs: a.runs,
        symmetrize: a.symmetrize,
        accuracy_scope: a.accuracy_scope,
        tie_rule: a.team.tie_rule,
        max_sweeps: a.team.max_sweeps,
        jobs: a.jobs,
        ..experiment_base(&a.dataset, a.common.seed)?
    };
    let started = Instant::now();
    let report = run_experiment(&cfg)?;
    eprintln!("finished in {:.2} s", started.elapsed().as_secs_f64());

    let mut w = create(&dir, "results.csv")?;
    write_results_csv(&report.results, a.timings, &mut w)?;
    w.flush()?;
    let mut w = create(&dir, "summary.json")?;
    serde_json::to_writer_pretty(&mut w, &report.summary.to_json())?;
    writeln!(w)?;
    w.flush()?;

    for r in report.results.iter().filter(|r| !r.converged) {
        eprintln!(
            "warning: c = {} run {} (seed {}) did not converge within {} sweeps; metrics left empty",
            r.c, r.run, r.seed, r.sweeps
        );
    }
    println!("{:<24} {:>6} {:>3} {:>5}  {:<18} {:<18} excluded", "dataset", "c", "k", "runs", "avg accuracy", "predictive pct");
    for cell in &report.summary.cells {
        println!(
            "{:<24} {:>6} {:>3} {:>5}  {:<18} {:<18} {}",
            cell.dataset,
            cell.c,
            cell.k,
            cell.runs,
            fmt_metric(&cell.avg_accuracy),
            fmt_metric(&cell.predictive_pct),
            cell.avg_accuracy.excluded
        );
    }
    println!("wrote {} and {}", dir.join("results.csv").display(), dir.join("summary.json").display());
    Ok(())
}

fn optional_dir(common: &CommonArgs) -> Result<Option<PathBuf>> {
    match &common.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn demo_pd(name: &str, a: PdDemoArgs) -> Result<()> {
    let dir = optional_dir(&a.common)?;
    announce(name, &a, dir.as_deref())?;
    let game = a.game.as_deref().map(|p| load_game(Some(p))).transpose()?;
    let reference = match &game {
        Some(g) => g.clone(),
        None => ggn_core::games::prisoners_dilemma_with(a.mutual_quiet)?,
    };
    let outcomes: Vec<StrategyProfile> =
        a.outcome.iter().map(|o| reference.parse_profile(o)).collect::<Result<_, _>>()?;
    let text = pd_demo(game, a.mutual_quiet, &outcomes)?.render();
    print!("{text}");
    if let Some(dir) = dir {
        fs::write(dir.join("pd-demo.txt"), &text)?;
    }
    Ok(())
}

fn demo_karate(name: &str, a: KarateDemoArgs) -> Result<()> {
    let dir = optional_dir(&a.common)?;
    announce(name, &a, dir.as_deref())?;
    if a.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let mut text = String::new();
    let (mut alone, mut first_negative, mut second_correct) = (0, 0, 0);
    for run in 0..a.runs {
        let demo = karate_demo(a.node, a.c, a.k, a.common.seed.wrapping_add(run as u64), a.tie_rule)?;
        alone += usize::from(demo.singleton);
        first_negative += usize::from(
            demo.relations.iter().filter(|r| r.order == RelationOrder::First).all(|r| r.score < 0.0),
        );
        second_correct += usize::from(
            demo.relations.iter().any(|r| r.order == RelationOrder::Second && r.score < 0.0 && r.is_correct()),
        );
        text.push_str(&demo.render());
    }
    text.push_str(&format!(
        "node {} alone in {alone}/{runs} runs; all first-order relations negative in {first_negative}/{runs}; \
         correct second-order negative relation in {second_correct}/{runs}\n",
        a.node,
        runs = a.runs
    ));
    print!("{text}");
    if let Some(dir) = dir {
        fs::write(dir.join("karate-demo.txt"), &text)?;
    }
    Ok(())
}

fn stats(name: &str, a: StatsArgs) -> Result<()> {
    let dir = optional_dir(&a.common)?;
    announce(name, &a, dir.as_deref())?;
    let (id, g) = load(&a.dataset, a.common.seed)?;
    let label = a.name.clone().unwrap_or(id);
    let s = g.stats();
    println!("dataset & nodes & edges & + edges & - edges");
    println!("{}", s.table_row(&label));
    if let Some(dir) = dir {
        let mut doc = serde_json::to_value(s)?;
        doc["name"] = label.into();
        fs::write(dir.join("stats.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    }
    Ok(())
}
