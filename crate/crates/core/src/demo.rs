//! The two worked examples: GGNs of the prisoners' dilemma and the karate
//! club with one planted antagonist.

use std::fmt::Write as _;

use crate::error::Result;
use crate::eval::simulate_and_build_ggn;
use crate::games::{prisoners_dilemma_with, NormalFormGame, StrategyProfile};
use crate::ggn::{build_general_ggn, DeviationModel, GgnGraph};
use crate::graph::{karate_with_planted_signs, Adjacency, NodeId, SignedGraph};
use crate::inference::{exponential_kernel_with, Execution};
use crate::team_game::TieRule;

#[derive(Debug, Clone)]
pub struct PdDemo {
    pub game: NormalFormGame,
    pub equilibria: Vec<StrategyProfile>,
    /// `(observed outcome, best-response GGN)` pairs.
    pub networks: Vec<(StrategyProfile, GgnGraph)>,
}

/// Builds the demo for the given outcomes, or for `(Q,S)` and `(Q,Q)` when
/// `outcomes` is empty.
pub fn pd_demo(game: Option<NormalFormGame>, mutual_quiet: f64, outcomes: &[StrategyProfile]) -> Result<PdDemo> {
    let game = match game {
        Some(g) => g,
        None => prisoners_dilemma_with(mutual_quiet)?,
    };
    let defaults;
    let outcomes = if outcomes.is_empty() {
        defaults = vec![game.parse_profile("0,1")?, game.parse_profile("0,0")?];
        &defaults[..]
    } else {
        outcomes
    };
    let equilibria = game.find_pure_nash()?;
    let mut networks = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let ggn = build_general_ggn(&game, outcome, DeviationModel::BestResponse)?
            .into_iter()
            .next()
            .expect("best-response mode yields one network");
        networks.push((outcome.clone(), ggn));
    }
    Ok(PdDemo { game, equilibria, networks })
}

impl PdDemo {
    pub fn render(&self) -> String {
        let g = &self.game;
        let mut out = String::new();
        let _ = writeln!(out, "payoff table (row player {}, column player {}):", g.player_name(0), g.player_name(1));
        let _ = write!(out, "{g}");
        let eq: Vec<String> = self.equilibria.iter().map(|p| g.display_profile(p)).collect();
        let _ = writeln!(out, "pure Nash equilibria: {}", if eq.is_empty() { "none".into() } else { eq.join(" ") });
        for (outcome, ggn) in &self.networks {
            let _ = writeln!(out, "GGN for observed outcome {}:", g.display_profile(outcome));
            for e in ggn.edges() {
                let _ = writeln!(out, "  {} -> {}: {}", g.player_name(e.src), g.player_name(e.dst), e.weight);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationOrder {
    /// The filtered GGN links the pair directly.
    First,
    /// Scored only through longer walks in the kernel.
    Second,
    Unpredicted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub other: NodeId,
    /// Whether the skeleton links `other` to the planted node.
    pub acquainted: bool,
    pub order: RelationOrder,
    /// Symmetrized kernel score, 0 when unpredicted.
    pub score: f64,
    /// Edge weight for acquaintances; otherwise the sign implied by the
    /// two-hop paths of the signed graph, `None` when there are none or
    /// they disagree.
    pub truth: Option<f64>,
}

impl Relation {
    pub fn is_correct(&self) -> bool {
        self.score != 0.0 && self.truth.is_some_and(|t| t != 0.0 && (t > 0.0) == (self.score > 0.0))
    }
}

fn implied_sign(truth: &SignedGraph, adj: &Adjacency, a: NodeId, b: NodeId) -> Option<f64> {
    let mut signs = adj
        .neighbors(a)
        .filter_map(|(m, w)| truth.weight(m, b).map(|w2| (w * w2).signum()))
        .filter(|s| *s != 0.0);
    let first = signs.next()?;
    signs.all(|s| s == first).then_some(first)
}

#[derive(Debug, Clone)]
pub struct KarateDemo {
    pub node: NodeId,
    pub seed: u64,
    pub singleton: bool,
    pub teams: usize,
    pub sweeps: usize,
    pub ggn: GgnGraph,
    pub relations: Vec<Relation>,
}

/// Runs the karate case study with `node` as the planted antagonist.
pub fn karate_demo(node: NodeId, c: f64, k: usize, seed: u64, tie_rule: TieRule) -> Result<KarateDemo> {
    let truth = karate_with_planted_signs(node)?;
    let run = simulate_and_build_ggn(&truth, c, seed, tie_rule, 200, 1e-9)?;
    let partition = &run.simulation.partition;
    let kernel = exponential_kernel_with(&run.ggn.to_matrix(), k, Execution::Sequential)?;
    let adj = Adjacency::new(&truth);

    let relations = (0..truth.node_count())
        .filter(|&v| v != node)
        .filter_map(|v| {
            let acquainted = run.skeleton.has_edge(node, v);
            let score = kernel.get(node, v) + kernel.get(v, node);
            if !acquainted && score == 0.0 {
                return None;
            }
            let direct = run.ggn.weight(v, node).is_some() || run.ggn.weight(node, v).is_some();
            let order = if direct {
                RelationOrder::First
            } else if score != 0.0 {
                RelationOrder::Second
            } else {
                RelationOrder::Unpredicted
            };
            let truth_sign =
                if acquainted { truth.weight(node, v) } else { implied_sign(&truth, &adj, node, v) };
            Some(Relation { other: v, acquainted, order, score, truth: truth_sign })
        })
        .collect();

    Ok(KarateDemo {
        node,
        seed,
        singleton: partition.team_size(partition.team_of(node)) == 1,
        teams: partition.team_count(),
        sweeps: run.simulation.sweeps,
        ggn: run.ggn,
        relations,
    })
}

impl KarateDemo {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "seed {}: converged after {} sweeps into {} teams; node {} is {}",
            self.seed,
            self.sweeps,
            self.teams,
            self.node,
            if self.singleton { "alone" } else { "in a team" }
        );
        let _ = writeln!(out, "GGN edges touching node {}:", self.node);
        for e in self.ggn.edges().iter().filter(|e| e.src == self.node || e.dst == self.node) {
            let _ = writeln!(out, "  {} -> {}: {}", e.src, e.dst, e.weight);
        }
        let _ = writeln!(out, "relations to node {}:", self.node);
        for r in &self.relations {
            let order = match r.order {
                RelationOrder::First => "first-order",
                RelationOrder::Second => "second-order",
                RelationOrder::Unpredicted => "unpredicted",
            };
            let sign = if r.score > 0.0 { "+" } else if r.score < 0.0 { "-" } else { "0" };
            let truth = match r.truth {
                Some(t) if r.acquainted => format!("edge {t}"),
                Some(t) => format!("implied {}", if t > 0.0 { "+" } else { "-" }),
                None => "unknown".into(),
            };
            let verdict = if r.score == 0.0 { "" } else if r.is_correct() { " correct" } else { " wrong" };
            let _ = writeln!(
                out,
                "  {:>2}: {order:<12} sign {sign} score {:.4} (truth {truth}){verdict}",
                r.other, r.score
            );
        }
        out
    }
}
