//! Game generative networks.
//!
//! A GGN has one node per agent. An edge `i -> j` weighs how much agent `j`
//! gained or lost because agent `i` did what she actually did instead of
//! what a selfish model predicts:
//!
//! ```text
//! w(i -> j) = u_j(real profile) - u_j(real profile with i's choice replaced)
//! ```
//!
//! The dynamic variant instead records, for each observed strategy change
//! at time `t`, the utility change it caused to everybody else.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::games::{NormalFormGame, StrategyProfile};
use crate::graph::{NodeId, SignedGraph};
use crate::inference::SparseMatrix;
use crate::team_game::{TeamGame, TeamPartition, TieRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GgnEdge {
    /// The deviating agent.
    pub src: NodeId,
    /// The affected agent.
    pub dst: NodeId,
    pub weight: f64,
    pub time: Option<u64>,
}

/// Directed signed (multi)graph of deviation-induced edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GgnGraph {
    n: usize,
    edges: Vec<GgnEdge>,
}

impl GgnGraph {
    pub fn new(n: usize, edges: Vec<GgnEdge>) -> Result<Self> {
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return invalid(format!("edge {} -> {} out of range for {n} nodes", e.src, e.dst));
            }
            if !e.weight.is_finite() {
                return invalid(format!("edge {} -> {} has non-finite weight", e.src, e.dst));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[GgnEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Weight of the (first) edge `src -> dst`, if present.
    pub fn weight(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        self.edges.iter().find(|e| e.src == src && e.dst == dst).map(|e| e.weight)
    }

    pub fn out_edges(&self, src: NodeId) -> impl Iterator<Item = &GgnEdge> + '_ {
        self.edges.iter().filter(move |e| e.src == src)
    }

    /// Weighted adjacency matrix, parallel edges summed.
    pub fn to_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.n, self.edges.iter().map(|e| (e.src, e.dst, e.weight)))
            .expect("edges validated on construction")
    }

    /// Edge list `src dst weight [time]` using `labels` for node names.
    pub fn write_edge_list<W: Write>(&self, labels: &[String], mut out: W) -> Result<()> {
        if labels.len() != self.n {
            return invalid("label table does not match the GGN node count");
        }
        writeln!(out, "# directed GGN: {} nodes, {} edges", self.n, self.edges.len())?;
        for e in &self.edges {
            match e.time {
                Some(t) => writeln!(out, "{} {} {} {t}", labels[e.src], labels[e.dst], e.weight)?,
                None => writeln!(out, "{} {} {}", labels[e.src], labels[e.dst], e.weight)?,
            }
        }
        Ok(())
    }

    /// Reads the format written by [`Self::write_edge_list`], resolving names
    /// through `graph`'s label table.
    pub fn read_edge_list<R: BufRead>(graph: &SignedGraph, input: R) -> Result<Self> {
        let mut edges = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            if tokens.len() < 3 || tokens.len() > 4 {
                return Err(parse_err(format!("expected `src dst weight [time]`, got {trimmed:?}")));
            }
            let node = |tok: &str| {
                graph.node_id(tok).ok_or_else(|| parse_err(format!("unknown node {tok:?}")))
            };
            let weight: f64 = tokens[2]
                .parse()
                .ok()
                .filter(|w: &f64| w.is_finite())
                .ok_or_else(|| parse_err(format!("invalid weight {:?}", tokens[2])))?;
            let time = match tokens.get(3) {
                None => None,
                Some(t) => Some(t.parse().map_err(|_| parse_err(format!("invalid time {t:?}")))?),
            };
            edges.push(GgnEdge { src: node(tokens[0])?, dst: node(tokens[1])?, weight, time });
        }
        Self::new(graph.node_count(), edges)
    }
}

/// How the selfish-model strategy `s_i*` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationModel {
    /// `s_i*` is i's best response to everyone else's real strategies. Among
    /// ties the real strategy wins, then the lowest index.
    #[default]
    BestResponse,
    /// `s_i*` is i's strategy in a pure Nash equilibrium; one network per
    /// equilibrium.
    NashProfile,
}

/// How parallel edges are combined by [`filter_edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregate {
    #[default]
    Sum,
}

fn deviation_edges(
    game: &NormalFormGame,
    real: &StrategyProfile,
    ideal: impl Fn(usize) -> Result<usize>,
) -> Result<GgnGraph> {
    let n = game.num_players();
    let mut edges = Vec::new();
    for i in 0..n {
        let deviated = real.with(i, ideal(i)?);
        for j in (0..n).filter(|&j| j != i) {
            let weight = game.utility(real, j)? - game.utility(&deviated, j)?;
            edges.push(GgnEdge { src: i, dst: j, weight, time: None });
        }
    }
    GgnGraph::new(n, edges)
}

/// GGNs for a normal-form game and its observed outcome.
///
/// Every ordered pair of distinct players gets an edge, including zero
/// weights; [`filter_edges`] removes those.
pub fn build_general_ggn(
    game: &NormalFormGame,
    real: &StrategyProfile,
    model: DeviationModel,
) -> Result<Vec<GgnGraph>> {
    game.validate_profile(real)?;
    match model {
        DeviationModel::BestResponse => {
            let ggn = deviation_edges(game, real, |i| {
                let best = game.best_response(real, i)?;
                let own = real.choices()[i];
                Ok(if best.contains(&own) { own } else { best[0] })
            })?;
            Ok(vec![ggn])
        }
        DeviationModel::NashProfile => {
            let equilibria = game.find_pure_nash()?;
            if equilibria.is_empty() {
                return Err(Error::Model("the game has no pure Nash equilibrium".into()));
            }
            equilibria
                .iter()
                .map(|eq| deviation_edges(game, real, |i| Ok(eq.choices()[i])))
                .collect()
        }
    }
}

/// One observed strategy change in a dynamic game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub time: u64,
    pub player: usize,
    pub strategy: usize,
}

/// Timestamped GGN of a dynamic game: each step converting `s` into `s'`
/// emits `i -> j` with weight `u_j(s') - u_j(s)` for every other player `j`.
pub fn build_dynamic_ggn(
    game: &NormalFormGame,
    trace: &[TraceStep],
    initial: &StrategyProfile,
) -> Result<GgnGraph> {
    game.validate_profile(initial)?;
    let n = game.num_players();
    let mut state = initial.clone();
    let mut last_time: Option<u64> = None;
    let mut edges = Vec::new();
    for step in trace {
        if last_time.is_some_and(|t| step.time <= t) {
            return invalid(format!("trace times must be strictly increasing (at t = {})", step.time));
        }
        last_time = Some(step.time);
        if step.player >= n {
            return invalid(format!("trace step at t = {} names player {}", step.time, step.player));
        }
        if step.strategy >= game.strategy_counts()[step.player] {
            return invalid(format!(
                "trace step at t = {}: player {} has no strategy {}",
                step.time, step.player, step.strategy
            ));
        }
        if state.choices()[step.player] == step.strategy {
            return invalid(format!("trace step at t = {} does not change any strategy", step.time));
        }
        let next = state.with(step.player, step.strategy);
        for j in (0..n).filter(|&j| j != step.player) {
            let weight = game.utility(&next, j)? - game.utility(&state, j)?;
            edges.push(GgnEdge { src: step.player, dst: j, weight, time: Some(step.time) });
        }
        state = next;
    }
    GgnGraph::new(n, edges)
}

/// Team-game GGN.
///
/// `observed` is the real teaming outcome; the selfish model is the team
/// game with balance `c` on `model_graph` (normally the unit-weight
/// skeleton). For each agent whose model-optimal team differs from her
/// observed one, edges go to the members of her old and new teams, the only
/// agents whose utility her move changes. Zero weights are kept.
pub fn build_team_ggn(
    observed: &TeamPartition,
    model_graph: &SignedGraph,
    c: f64,
    tie_rule: TieRule,
) -> Result<GgnGraph> {
    let n = model_graph.node_count();
    if observed.node_count() != n {
        return invalid(format!(
            "partition covers {} nodes but the skeleton has {n}",
            observed.node_count()
        ));
    }
    let game = TeamGame::new(model_graph, c)?.with_tie_rule(tie_rule);
    let members = observed.members();

    let per_agent: Vec<Vec<GgnEdge>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let old = observed.team_of(i);
            let best = game.best_team_move(i, observed);
            if best.team == old {
                return Vec::new();
            }
            let weight_to = |j: NodeId| model_graph.weight(i, j).unwrap_or(0.0);
            let mut out: Vec<GgnEdge> = members[old]
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| GgnEdge { src: i, dst: j, weight: weight_to(j) - c, time: None })
                .chain(members.get(best.team).into_iter().flatten().map(|&j| GgnEdge {
                    src: i,
                    dst: j,
                    weight: c - weight_to(j),
                    time: None,
                }))
                .collect();
            out.sort_by_key(|e| e.dst);
            out
        })
        .collect();

    GgnGraph::new(n, per_agent.into_iter().flatten().collect())
}

/// Keeps only edges between acquainted agents.
///
/// Drops self-loops and pairs missing from `skeleton` (either orientation
/// when the skeleton is undirected), sums parallel edges per ordered pair
/// (timestamps are discarded) and drops exact zeros. Output is sorted by
/// `(src, dst)`.
pub fn filter_edges(ggn: &GgnGraph, skeleton: &SignedGraph, aggregate: Aggregate) -> Result<GgnGraph> {
    if skeleton.node_count() < ggn.node_count() {
        return invalid("skeleton has fewer nodes than the GGN");
    }
    let Aggregate::Sum = aggregate;
    let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for e in &ggn.edges {
        if e.src == e.dst || !skeleton.has_edge(e.src, e.dst) {
            continue;
        }
        *merged.entry((e.src, e.dst)).or_insert(0.0) += e.weight;
    }
    let edges = merged
        .into_iter()
        .filter(|&(_, w)| w != 0.0)
        .map(|((src, dst), weight)| GgnEdge { src, dst, weight, time: None })
        .collect();
    GgnGraph::new(ggn.node_count(), edges)
}
