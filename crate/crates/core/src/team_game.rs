//! The team-formation game.
//!
//! Every agent belongs to exactly one team. Agent `i` gains the summed
//! signed weight to her teammates and pays `c` times the size of her own
//! team (the size counts `i` herself):
//!
//! ```text
//! u_i = sum_{j != i, team(j) = team(i)} A_ij  -  c * |team(i)|
//! ```
//!
//! The game is an exact potential game with `Phi = sum_i (u_i) / 2`, so
//! sequential better-response moves terminate in a pure Nash equilibrium.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::games::TIE_EPSILON;
use crate::graph::{Adjacency, NodeId, SignedGraph};

pub type TeamId = usize;

/// How `best_team_move` chooses among equally good teams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// Keep the current team if it is among the best, else the lowest id.
    #[default]
    CurrentFirst,
    /// Always the lowest team id among the best.
    LowestId,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "current-first" => Ok(Self::CurrentFirst),
            "lowest-id" => Ok(Self::LowestId),
            other => invalid(format!("unknown tie rule {other:?}")),
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CurrentFirst => "current-first",
            Self::LowestId => "lowest-id",
        })
    }
}

/// Assignment of nodes to teams with maintained team sizes.
///
/// Team ids live in `0..capacity` where `capacity >= n`, so there is always
/// an id available for a fresh team whenever some team has two or more
/// members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamPartition {
    assignment: Vec<TeamId>,
    sizes: Vec<usize>,
    empty: BTreeSet<TeamId>,
}

impl TeamPartition {
    /// Node `i` alone in team `i`.
    pub fn singletons(n: usize) -> Self {
        Self { assignment: (0..n).collect(), sizes: vec![1; n], empty: BTreeSet::new() }
    }

    pub fn from_assignment(assignment: Vec<TeamId>) -> Self {
        let capacity = assignment.iter().map(|&t| t + 1).max().unwrap_or(0).max(assignment.len());
        let mut sizes = vec![0; capacity];
        for &t in &assignment {
            sizes[t] += 1;
        }
        let empty = (0..capacity).filter(|&t| sizes[t] == 0).collect();
        Self { assignment, sizes, empty }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn team_of(&self, node: NodeId) -> TeamId {
        self.assignment[node]
    }

    pub fn team_size(&self, team: TeamId) -> usize {
        self.sizes.get(team).copied().unwrap_or(0)
    }

    pub fn assignment(&self) -> &[TeamId] {
        &self.assignment
    }

    pub fn same_team(&self, a: NodeId, b: NodeId) -> bool {
        self.assignment[a] == self.assignment[b]
    }

    /// Number of nonempty teams.
    pub fn team_count(&self) -> usize {
        self.sizes.len() - self.empty.len()
    }

    /// Nonempty team ids in ascending order.
    pub fn teams(&self) -> impl Iterator<Item = TeamId> + '_ {
        (0..self.sizes.len()).filter(|&t| self.sizes[t] > 0)
    }

    /// Lowest currently empty team id.
    pub fn fresh_team(&self) -> Option<TeamId> {
        self.empty.first().copied()
    }

    /// Members per team id (empty vectors for unused ids).
    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut members = vec![Vec::new(); self.sizes.len()];
        for (node, &t) in self.assignment.iter().enumerate() {
            members[t].push(node);
        }
        members
    }

    /// Moves `node` into `team`, which may be any id below the capacity.
    pub fn move_node(&mut self, node: NodeId, team: TeamId) {
        assert!(team < self.sizes.len(), "team id {team} out of range");
        let old = self.assignment[node];
        if old == team {
            return;
        }
        self.sizes[old] -= 1;
        if self.sizes[old] == 0 {
            self.empty.insert(old);
        }
        if self.sizes[team] == 0 {
            self.empty.remove(&team);
        }
        self.sizes[team] += 1;
        self.assignment[node] = team;
    }

    /// `node,team` CSV, nodes in id order, node column holding labels.
    pub fn write_csv<W: Write>(&self, graph: &SignedGraph, out: W) -> Result<()> {
        if graph.node_count() != self.node_count() {
            return invalid("partition and graph have different node counts");
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "team"])?;
        for (node, team) in self.assignment.iter().enumerate() {
            w.write_record([graph.label(node), &team.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `node,team` CSV whose node column uses `graph`'s labels.
    /// Every node of the graph must appear exactly once.
    pub fn read_csv<R: Read>(graph: &SignedGraph, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "node" || &headers[1] != "team" {
            return invalid("partition CSV must start with header node,team");
        }
        let mut assignment = vec![None; graph.node_count()];
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let label = &record[0];
            let node = graph
                .node_id(label)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown node {label:?}")))?;
            let team: TeamId = record[1].trim().parse().map_err(|_| Error::Parse {
                line: row + 2,
                message: format!("invalid team id {:?}", &record[1]),
            })?;
            if assignment[node].replace(team).is_some() {
                return invalid(format!("node {label:?} listed twice"));
            }
        }
        let assignment: Option<Vec<TeamId>> = assignment.into_iter().collect();
        match assignment {
            Some(a) => Ok(Self::from_assignment(a)),
            None => invalid("partition does not cover every node"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamGameConfig {
    pub c: f64,
    pub seed: u64,
    pub max_sweeps: usize,
    pub improvement_tolerance: f64,
}

impl Default for TeamGameConfig {
    fn default() -> Self {
        Self { c: 0.2, seed: 0, max_sweeps: 200, improvement_tolerance: 1e-9 }
    }
}

impl TeamGameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return invalid(format!("c must be a non-negative real, got {}", self.c));
        }
        if self.max_sweeps == 0 {
            return invalid("max_sweeps must be at least 1");
        }
        if self.improvement_tolerance.is_nan() || self.improvement_tolerance <= 0.0 {
            return invalid("improvement_tolerance must be positive");
        }
        Ok(())
    }
}

/// Outcome of a candidate move evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeamMove {
    pub team: TeamId,
    /// Utility of the agent after moving to `team`.
    pub utility: f64,
}

/// An accepted move during simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveEvent {
    pub sweep: usize,
    pub node: NodeId,
    pub from: TeamId,
    pub to: TeamId,
    pub utility_before: f64,
    pub utility_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub partition: TeamPartition,
    /// Sweeps performed, including the final quiet one when converged.
    pub sweeps: usize,
    pub moves: usize,
    pub converged: bool,
    /// Moves made during the last sweep (zero when converged).
    pub last_sweep_moves: usize,
}

impl SimulationOutcome {
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { sweeps: self.sweeps, moves: self.last_sweep_moves })
        }
    }
}

/// Team game over an undirected signed graph with balance parameter `c`.
#[derive(Debug, Clone)]
pub struct TeamGame {
    adjacency: Adjacency,
    c: f64,
    tie_rule: TieRule,
}

impl TeamGame {
    pub fn new(graph: &SignedGraph, c: f64) -> Result<Self> {
        if graph.is_directed() {
            return invalid("the team game needs an undirected graph");
        }
        if !(c >= 0.0 && c.is_finite()) {
            return invalid(format!("c must be a non-negative real, got {c}"));
        }
        Ok(Self { adjacency: Adjacency::new(graph), c, tie_rule: TieRule::default() })
    }

    pub fn with_tie_rule(mut self, tie_rule: TieRule) -> Self {
        self.tie_rule = tie_rule;
        self
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.node_count()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    fn check(&self, p: &TeamPartition) {
        assert_eq!(p.node_count(), self.node_count(), "partition size does not match the graph");
    }

    pub fn gain(&self, i: NodeId, p: &TeamPartition) -> f64 {
        self.check(p);
        self.adjacency
            .neighbors(i)
            .filter(|&(j, _)| p.same_team(i, j))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn loss(&self, i: NodeId, p: &TeamPartition) -> f64 {
        self.c * p.team_size(p.team_of(i)) as f64
    }

    pub fn utility(&self, i: NodeId, p: &TeamPartition) -> f64 {
        self.gain(i, p) - self.loss(i, p)
    }

    /// `sum_i (gain_i - loss_i) / 2`.
    pub fn potential(&self, p: &TeamPartition) -> f64 {
        (0..self.node_count()).map(|i| 0.5 * self.utility(i, p)).sum()
    }

    /// Summed edge weight from `i` into each adjacent team, sorted by team id.
    /// Weights for one team are added in neighbor-id order.
    fn team_weights(&self, i: NodeId, p: &TeamPartition) -> Vec<(TeamId, f64)> {
        let mut pairs: Vec<(TeamId, f64)> =
            self.adjacency.neighbors(i).map(|(j, w)| (p.team_of(j), w)).collect();
        pairs.sort_by_key(|&(t, _)| t);
        let mut grouped: Vec<(TeamId, f64)> = Vec::with_capacity(pairs.len());
        for (t, w) in pairs {
            match grouped.last_mut() {
                Some((last, acc)) if *last == t => *acc += w,
                _ => grouped.push((t, w)),
            }
        }
        grouped
    }

    /// Best team for `i` with everyone else fixed.
    ///
    /// Candidates are every nonempty team plus a fresh empty team (offered
    /// only when `i` is not already alone, where it would change nothing).
    /// Ties within [`TIE_EPSILON`] follow the game's [`TieRule`].
    pub fn best_team_move(&self, i: NodeId, p: &TeamPartition) -> TeamMove {
        self.check(p);
        let c = self.c;
        let current = p.team_of(i);
        let grouped = self.team_weights(i, p);

        let mut candidates: Vec<TeamMove> = Vec::with_capacity(grouped.len() + 3);
        let mut current_seen = false;
        for &(team, w) in &grouped {
            let size_after = p.team_size(team) + usize::from(team != current);
            current_seen |= team == current;
            candidates.push(TeamMove { team, utility: w - c * size_after as f64 });
        }
        if !current_seen {
            candidates.push(TeamMove { team: current, utility: -c * p.team_size(current) as f64 });
        }
        if p.team_size(current) > 1 {
            if let Some(fresh) = p.fresh_team() {
                candidates.push(TeamMove { team: fresh, utility: -c });
            }
        }
        if c == 0.0 {
            // Non-adjacent teams tie with a fresh team at utility 0; only the
            // lowest such id can win a lowest-id tie-break.
            if let Some(team) = p
                .teams()
                .find(|&t| t != current && grouped.binary_search_by_key(&t, |g| g.0).is_err())
            {
                candidates.push(TeamMove { team, utility: 0.0 });
            }
        }

        let best = candidates.iter().map(|m| m.utility).fold(f64::NEG_INFINITY, f64::max);
        let tied = |m: &&TeamMove| m.utility >= best - TIE_EPSILON;
        if self.tie_rule == TieRule::CurrentFirst {
            if let Some(m) = candidates.iter().filter(tied).find(|m| m.team == current) {
                return *m;
            }
        }
        *candidates
            .iter()
            .filter(tied)
            .min_by_key(|m| m.team)
            .expect("the current team is always a candidate")
    }

    /// Utility `i` would have after moving to `team` (which may be her own
    /// team or an empty one), from grouped neighbor weights and the
    /// maintained team sizes.
    pub fn utility_if_moved(&self, i: NodeId, p: &TeamPartition, team: TeamId) -> f64 {
        self.check(p);
        let gain = self
            .team_weights(i, p)
            .iter()
            .find(|&&(t, _)| t == team)
            .map_or(0.0, |&(_, w)| w);
        let size_after = p.team_size(team) + usize::from(team != p.team_of(i));
        gain - self.c * size_after as f64
    }

    /// Utility of `i` computed from the grouped team weights; same value as
    /// [`Self::utility`] up to summation order.
    fn current_utility(&self, i: NodeId, p: &TeamPartition) -> f64 {
        let current = p.team_of(i);
        let gain = self
            .adjacency
            .neighbors(i)
            .filter(|&(j, _)| p.team_of(j) == current)
            .map(|(_, w)| w)
            .sum::<f64>();
        gain - self.c * p.team_size(current) as f64
    }

    /// Better-response dynamics from all-singleton teams.
    pub fn simulate(&self, cfg: &TeamGameConfig) -> Result<SimulationOutcome> {
        self.simulate_with(cfg, |_, _| {})
    }

    /// Like [`Self::simulate`], calling `observer` after every accepted move
    /// with the updated partition.
    ///
    /// Each sweep visits the nodes in a freshly shuffled order; a node moves
    /// only when its best team beats its current utility by more than
    /// `cfg.improvement_tolerance`. A sweep without moves ends the run.
    pub fn simulate_with<F>(&self, cfg: &TeamGameConfig, mut observer: F) -> Result<SimulationOutcome>
    where
        F: FnMut(&MoveEvent, &TeamPartition),
    {
        cfg.validate()?;
        if cfg.c != self.c {
            return invalid(format!("config c = {} but the game uses c = {}", cfg.c, self.c));
        }
        let n = self.node_count();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut partition = TeamPartition::singletons(n);
        let mut order: Vec<NodeId> = (0..n).collect();
        let mut moves = 0;
        let mut last_sweep_moves = 0;

        for sweep in 1..=cfg.max_sweeps {
            order.shuffle(&mut rng);
            let mut sweep_moves = 0;
            for &i in &order {
                let before = self.current_utility(i, &partition);
                let best = self.best_team_move(i, &partition);
                if best.team != partition.team_of(i)
                    && best.utility > before + cfg.improvement_tolerance
                {
                    let from = partition.team_of(i);
                    partition.move_node(i, best.team);
                    sweep_moves += 1;
                    let event = MoveEvent {
                        sweep,
                        node: i,
                        from,
                        to: best.team,
                        utility_before: before,
                        utility_after: best.utility,
                    };
                    observer(&event, &partition);
                }
            }
            moves += sweep_moves;
            last_sweep_moves = sweep_moves;
            if sweep_moves == 0 {
                return Ok(SimulationOutcome {
                    partition,
                    sweeps: sweep,
                    moves,
                    converged: true,
                    last_sweep_moves: 0,
                });
            }
        }
        Ok(SimulationOutcome {
            partition,
            sweeps: cfg.max_sweeps,
            moves,
            converged: false,
            last_sweep_moves,
        })
    }

    /// Largest utility gain any single agent could still obtain.
    pub fn max_improvement(&self, p: &TeamPartition) -> f64 {
        (0..self.node_count())
            .map(|i| self.best_team_move(i, p).utility - self.current_utility(i, p))
            .fold(0.0, f64::max)
    }
}
