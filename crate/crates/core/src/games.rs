//! Finite normal-form games with pure strategies.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};

/// Utilities closer than this are treated as tied.
pub const TIE_EPSILON: f64 = 1e-12;

/// Upper bound on the number of profiles `find_pure_nash` will enumerate.
pub const MAX_ENUMERATED_PROFILES: usize = 1_000_000;

/// One strategy index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    pub fn new(choices: Vec<usize>) -> Self {
        Self(choices)
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    /// Copy of `self` with player `player` switched to `strategy`.
    pub fn with(&self, player: usize, strategy: usize) -> Self {
        let mut next = self.0.clone();
        next[player] = strategy;
        Self(next)
    }
}

/// A game with `n` players, finite strategy sets and a payoff for every
/// player at every profile.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame {
    player_names: Vec<String>,
    strategy_names: Vec<Vec<String>>,
    // row-major over profiles (last player varies fastest), then player
    payoffs: Vec<f64>,
}

impl NormalFormGame {
    /// Builds a game from a payoff function evaluated at every profile.
    pub fn from_fn<F>(strategy_counts: &[usize], mut payoff: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let strategy_names: Vec<Vec<String>> = strategy_counts
            .iter()
            .map(|&k| (0..k).map(|s| s.to_string()).collect())
            .collect();
        let player_names = (1..=strategy_counts.len()).map(|i| format!("p{i}")).collect();
        let mut game = Self::named(player_names, strategy_names, Vec::new())?;
        let n = game.num_players();
        let mut payoffs = Vec::with_capacity(game.profile_count() * n);
        for profile in game.profiles() {
            let row = payoff(&profile.0);
            if row.len() != n {
                return invalid(format!("payoff row has {} entries, expected {n}", row.len()));
            }
            payoffs.extend(row);
        }
        game.set_payoffs(payoffs)?;
        Ok(game)
    }

    fn named(
        player_names: Vec<String>,
        strategy_names: Vec<Vec<String>>,
        payoffs: Vec<f64>,
    ) -> Result<Self> {
        if player_names.is_empty() {
            return invalid("a game needs at least one player");
        }
        if player_names.len() != strategy_names.len() {
            return invalid("one strategy list per player is required");
        }
        if strategy_names.iter().any(Vec::is_empty) {
            return invalid("every player needs at least one strategy");
        }
        let mut game = Self { player_names, strategy_names, payoffs: Vec::new() };
        if !payoffs.is_empty() {
            game.set_payoffs(payoffs)?;
        }
        Ok(game)
    }

    fn set_payoffs(&mut self, payoffs: Vec<f64>) -> Result<()> {
        let expected = self.profile_count() * self.num_players();
        if payoffs.len() != expected {
            return invalid(format!("expected {expected} payoff entries, got {}", payoffs.len()));
        }
        if payoffs.iter().any(|p| !p.is_finite()) {
            return invalid("payoffs must be finite");
        }
        self.payoffs = payoffs;
        Ok(())
    }

    pub fn num_players(&self) -> usize {
        self.strategy_names.len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategy_names.iter().map(Vec::len).collect()
    }

    pub fn player_name(&self, player: usize) -> &str {
        &self.player_names[player]
    }

    pub fn strategy_name(&self, player: usize, strategy: usize) -> &str {
        &self.strategy_names[player][strategy]
    }

    /// Looks up a strategy by name for `player`.
    pub fn strategy_index(&self, player: usize, name: &str) -> Option<usize> {
        self.strategy_names.get(player)?.iter().position(|s| s == name)
    }

    /// Size of the full profile space (saturating).
    pub fn profile_count(&self) -> usize {
        self.strategy_names.iter().fold(1usize, |acc, s| acc.saturating_mul(s.len()))
    }

    /// All profiles in lexicographic order.
    pub fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        let counts = self.strategy_counts();
        let total = self.profile_count();
        (0..total).map(move |mut index| {
            let mut choices = vec![0; counts.len()];
            for p in (0..counts.len()).rev() {
                choices[p] = index % counts[p];
                index /= counts[p];
            }
            StrategyProfile(choices)
        })
    }

    pub fn validate_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.0.len() != self.num_players() {
            return invalid(format!(
                "profile has {} entries, game has {} players",
                profile.0.len(),
                self.num_players()
            ));
        }
        for (p, (&s, names)) in profile.0.iter().zip(&self.strategy_names).enumerate() {
            if s >= names.len() {
                return invalid(format!("player {p} has no strategy {s}"));
            }
        }
        Ok(())
    }

    fn profile_index(&self, profile: &StrategyProfile) -> usize {
        profile
            .0
            .iter()
            .zip(&self.strategy_names)
            .fold(0, |acc, (&s, names)| acc * names.len() + s)
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return invalid(format!("player {player} out of range"));
        }
        Ok(())
    }

    pub fn utility(&self, profile: &StrategyProfile, player: usize) -> Result<f64> {
        self.validate_profile(profile)?;
        self.check_player(player)?;
        Ok(self.payoff_unchecked(profile, player))
    }

    fn payoff_unchecked(&self, profile: &StrategyProfile, player: usize) -> f64 {
        self.payoffs[self.profile_index(profile) * self.num_players() + player]
    }

    /// Every strategy of `player` that maximizes her utility with the other
    /// players fixed, in ascending index order. Never empty.
    pub fn best_response(&self, profile: &StrategyProfile, player: usize) -> Result<Vec<usize>> {
        self.validate_profile(profile)?;
        self.check_player(player)?;
        let values: Vec<f64> = (0..self.strategy_names[player].len())
            .map(|s| self.payoff_unchecked(&profile.with(player, s), player))
            .collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= best - TIE_EPSILON)
            .map(|(s, _)| s)
            .collect())
    }

    /// All pure Nash equilibria in lexicographic order.
    pub fn find_pure_nash(&self) -> Result<Vec<StrategyProfile>> {
        let total = self.profile_count();
        if total > MAX_ENUMERATED_PROFILES {
            return Err(Error::Capacity(format!(
                "{total} profiles exceeds the enumeration limit of {MAX_ENUMERATED_PROFILES}"
            )));
        }
        let mut equilibria = Vec::new();
        for profile in self.profiles() {
            let mut stable = true;
            for player in 0..self.num_players() {
                if !self.best_response(&profile, player)?.contains(&profile.0[player]) {
                    stable = false;
                    break;
                }
            }
            if stable {
                equilibria.push(profile);
            }
        }
        Ok(equilibria)
    }

    /// Parses the JSON game description:
    ///
    /// ```json
    /// { "players": ["p1", "p2"],
    ///   "strategies": [["Q", "S"], ["Q", "S"]],
    ///   "payoffs": [[[-1, -1], [-5, 0]], [[0, -5], [-4, -4]]] }
    /// ```
    ///
    /// `payoffs` is nested once per player, indexed by strategy index, and each
    /// leaf holds one payoff per player. `players` may also be a bare count.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GameDocument = serde_json::from_str(text)?;
        let player_names = match doc.players {
            Players::Count(n) => (1..=n).map(|i| format!("p{i}")).collect(),
            Players::Names(names) => names,
        };
        let n = player_names.len();
        let mut game = Self::named(player_names, doc.strategies, Vec::new())?;
        let counts = game.strategy_counts();
        let mut flat = Vec::with_capacity(game.profile_count() * n);
        flatten_payoffs(&doc.payoffs, &counts, n, &mut flat)?;
        game.set_payoffs(flat)?;
        Ok(game)
    }

    pub fn to_json(&self) -> Result<String> {
        let counts = self.strategy_counts();
        let payoffs = nest_payoffs(&self.payoffs, &counts);
        let doc = serde_json::json!({
            "players": self.player_names,
            "strategies": self.strategy_names,
            "payoffs": payoffs,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Formats a profile with strategy names, e.g. `(Q,S)`.
    pub fn display_profile(&self, profile: &StrategyProfile) -> String {
        let names: Vec<&str> = profile
            .0
            .iter()
            .enumerate()
            .map(|(p, &s)| self.strategy_name(p, s))
            .collect();
        format!("({})", names.join(","))
    }

    /// Parses `"Q,S"` style profiles (names or indices).
    pub fn parse_profile(&self, text: &str) -> Result<StrategyProfile> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != self.num_players() {
            return invalid(format!(
                "profile {text:?} has {} entries, game has {} players",
                parts.len(),
                self.num_players()
            ));
        }
        let mut choices = Vec::with_capacity(parts.len());
        for (p, part) in parts.iter().enumerate() {
            let idx = match self.strategy_index(p, part) {
                Some(i) => i,
                None => match part.parse::<usize>() {
                    Ok(i) => i,
                    Err(_) => return invalid(format!("player {p} has no strategy {part:?}")),
                },
            };
            choices.push(idx);
        }
        let profile = StrategyProfile(choices);
        self.validate_profile(&profile)?;
        Ok(profile)
    }
}

impl fmt::Display for NormalFormGame {
    /// Payoff table; for two players a bimatrix, otherwise one line per
    /// profile.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num_players() == 2 {
            let cols = &self.strategy_names[1];
            write!(f, "{:>8}", format!("{}\\{}", self.player_names[0], self.player_names[1]))?;
            for c in cols {
                write!(f, " {c:>14}")?;
            }
            writeln!(f)?;
            for (r, row_name) in self.strategy_names[0].iter().enumerate() {
                write!(f, "{row_name:>8}")?;
                for c in 0..cols.len() {
                    let profile = StrategyProfile(vec![r, c]);
                    let cell = format!(
                        "({}, {})",
                        self.payoff_unchecked(&profile, 0),
                        self.payoff_unchecked(&profile, 1)
                    );
                    write!(f, " {cell:>14}")?;
                }
                writeln!(f)?;
            }
            Ok(())
        } else {
            for profile in self.profiles() {
                let values: Vec<String> = (0..self.num_players())
                    .map(|p| self.payoff_unchecked(&profile, p).to_string())
                    .collect();
                writeln!(f, "{} -> ({})", self.display_profile(&profile), values.join(", "))?;
            }
            Ok(())
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Players {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Deserialize)]
struct GameDocument {
    players: Players,
    strategies: Vec<Vec<String>>,
    payoffs: Value,
}

fn flatten_payoffs(value: &Value, counts: &[usize], n: usize, out: &mut Vec<f64>) -> Result<()> {
    match counts.split_first() {
        None => {
            let leaf = value
                .as_array()
                .filter(|a| a.len() == n)
                .ok_or_else(|| Error::InvalidArgument(format!("payoff leaf must hold {n} numbers")))?;
            for v in leaf {
                out.push(v.as_f64().ok_or_else(|| {
                    Error::InvalidArgument(format!("payoff {v} is not a number"))
                })?);
            }
            Ok(())
        }
        Some((&k, rest)) => {
            let arr = value.as_array().filter(|a| a.len() == k).ok_or_else(|| {
                Error::InvalidArgument(format!("payoff level must have {k} entries"))
            })?;
            arr.iter().try_for_each(|v| flatten_payoffs(v, rest, n, out))
        }
    }
}

fn nest_payoffs(flat: &[f64], counts: &[usize]) -> Value {
    match counts.split_first() {
        None => Value::from(flat.to_vec()),
        Some((&k, rest)) => {
            let stride = flat.len() / k;
            Value::Array(
                (0..k)
                    .map(|i| nest_payoffs(&flat[i * stride..(i + 1) * stride], rest))
                    .collect(),
            )
        }
    }
}

/// Mutual-quiet payoff used by [`prisoners_dilemma`].
pub const DEFAULT_MUTUAL_QUIET: f64 = -1.0;

/// Two prisoners, strategies `Q` (keep quiet, index 0) and `S` (squeal,
/// index 1). Payoffs are negated prison years: `(S,S) = (-4,-4)`,
/// `(S,Q) = (0,-5)`, `(Q,S) = (-5,0)`, `(Q,Q) = (-1,-1)`.
pub fn prisoners_dilemma() -> NormalFormGame {
    prisoners_dilemma_with(DEFAULT_MUTUAL_QUIET).expect("default payoffs are valid")
}

/// Prisoners' dilemma with a custom payoff for the `(Q,Q)` cell.
pub fn prisoners_dilemma_with(mutual_quiet: f64) -> Result<NormalFormGame> {
    let qs = || vec!["Q".to_owned(), "S".to_owned()];
    NormalFormGame::named(
        vec!["p1".into(), "p2".into()],
        vec![qs(), qs()],
        vec![
            mutual_quiet, mutual_quiet, // (Q,Q)
            -5.0, 0.0, // (Q,S)
            0.0, -5.0, // (S,Q)
            -4.0, -4.0, // (S,S)
        ],
    )
}
