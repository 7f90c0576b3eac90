use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use ggn_core::eval::AccuracyScope;
use ggn_core::ggn::DeviationModel;
use ggn_core::graph::SampleMethod;
use ggn_core::team_game::TieRule;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ggn", version, about = "Game generative networks: team-game simulation, GGN construction and sign inference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run better-response dynamics of the team game and write the partition.
    Simulate(SimulateArgs),
    /// Build a GGN from a team partition, a game outcome or a dynamic trace.
    Ggn(GgnArgs),
    /// Score skeleton edges with the exponential kernel of a GGN.
    Infer(InferArgs),
    /// Full pipeline over c, k and repeated runs; writes results and summary.
    Evaluate(EvaluateArgs),
    /// Prisoners' dilemma payoff table, Nash profile and GGNs.
    PdDemo(PdDemoArgs),
    /// Karate club with one planted antagonist, end to end.
    KarateDemo(KarateDemoArgs),
    /// Node and signed edge counts of a dataset.
    Stats(StatsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Ggn(_) => "ggn",
            Command::Infer(_) => "infer",
            Command::Evaluate(_) => "evaluate",
            Command::PdDemo(_) => "pd-demo",
            Command::KarateDemo(_) => "karate-demo",
            Command::Stats(_) => "stats",
        }
    }
}

/// Flags every subcommand accepts.
#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CommonArgs {
    /// JSON file of flag values; explicit flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory [default: ggn-runs/<command>-<unix time>].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DatasetArgs {
    /// Edge-list path or builtin: karate, karate-planted[:node],
    /// planted:n:avg_degree:noise:seed, random:n:m:neg_fraction:seed.
    #[arg(long, default_value = "karate-planted")]
    pub dataset: String,
    /// Restrict the dataset to this many nodes.
    #[arg(long, value_name = "N")]
    pub sample_nodes: Option<usize>,
    /// Sampling method: top-degree or bfs-ball.
    #[arg(long, default_value = "top-degree")]
    pub sample_method: SampleMethod,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TeamArgs {
    /// Tie rule for best moves: current-first or lowest-id.
    #[arg(long, default_value = "current-first")]
    pub tie_rule: TieRule,
    /// Sweep budget for better-response dynamics.
    #[arg(long, default_value_t = 200)]
    pub max_sweeps: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub team: TeamArgs,
    /// Team size cost c.
    #[arg(long, default_value_t = 0.2)]
    pub c: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GgnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub team: TeamArgs,
    /// Team size cost c.
    #[arg(long, default_value_t = 0.2)]
    pub c: f64,
    /// Observed partition (node,team CSV); simulated with --seed when absent.
    #[arg(long, value_name = "FILE")]
    pub partition: Option<PathBuf>,
    /// Normal-form game JSON; builds a game GGN instead of a team GGN.
    /// `--dataset pd` selects the builtin prisoners' dilemma.
    #[arg(long, value_name = "FILE")]
    pub game: Option<PathBuf>,
    /// Observed outcome of the game, e.g. Q,S (initial profile with --trace).
    #[arg(long)]
    pub outcome: Option<String>,
    /// Deviation model for game GGNs: best-response or nash-profile.
    #[arg(long, default_value = "best-response", value_parser = parse_deviation_model)]
    pub deviation_model: DeviationModel,
    /// Dynamic-game trace CSV (time,player,strategy); emits timestamped edges.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
    /// Keep zero-weight and non-acquainted edges of team GGNs.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct InferArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub team: TeamArgs,
    /// Team size cost c (used when no --ggn is given).
    #[arg(long, default_value_t = 0.2)]
    pub c: f64,
    /// Kernel order k.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// GGN edge list; built from a simulation with --seed when absent.
    #[arg(long, value_name = "FILE")]
    pub ggn: Option<PathBuf>,
    /// Score (u, v) as K[u,v] + K[v,u].
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub symmetrize: bool,
    /// Worker threads for the kernel (1 = sequential).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvaluateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub team: TeamArgs,
    /// Team size costs, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    pub c: Vec<f64>,
    /// Kernel orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub k: Vec<usize>,
    /// Repetitions per c; run r uses seed + r.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    /// Concurrent runs (1 = sequential and reproducible).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Score (u, v) as K[u,v] + K[v,u].
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub symmetrize: bool,
    /// Edges counted by the accuracy: predicted or all.
    #[arg(long, default_value = "predicted")]
    pub accuracy_scope: AccuracyScope,
    /// Fill the runtime_s column of results.csv.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PdDemoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Observed outcome, repeatable [default: Q,S and Q,Q].
    #[arg(long)]
    pub outcome: Vec<String>,
    /// Payoff of mutual quiet.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub mutual_quiet: f64,
    /// Normal-form game JSON replacing the prisoners' dilemma.
    #[arg(long, value_name = "FILE")]
    pub game: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct KarateDemoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Planted antagonist (0-based karate label).
    #[arg(long, default_value_t = 23)]
    pub node: usize,
    /// Team size cost c.
    #[arg(long, default_value_t = 0.2)]
    pub c: f64,
    /// Kernel order k.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Repetitions; run r uses seed + r.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Tie rule for best moves: current-first or lowest-id.
    #[arg(long, default_value = "current-first")]
    pub tie_rule: TieRule,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub dataset: DatasetArgs,
    /// Row label [default: dataset id].
    #[arg(long)]
    pub name: Option<String>,
}

fn parse_deviation_model(s: &str) -> Result<DeviationModel, String> {
    match s {
        "best-response" => Ok(DeviationModel::BestResponse),
        "nash-profile" => Ok(DeviationModel::NashProfile),
        other => Err(format!("unknown deviation model {other:?} (best-response or nash-profile)")),
    }
}
