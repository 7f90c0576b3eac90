mod common;

use ggn_core::games::{prisoners_dilemma, NormalFormGame, StrategyProfile};
use rand::Rng;

fn random_game(rng: &mut rand_chacha::ChaCha8Rng) -> NormalFormGame {
    let players = rng.random_range(1..=3);
    let counts: Vec<usize> = (0..players).map(|_| rng.random_range(1..=4)).collect();
    // small integer payoffs so ties actually happen
    NormalFormGame::from_fn(&counts, |_| (0..players).map(|_| rng.random_range(-3..=3) as f64).collect())
        .unwrap()
}

fn all_profiles(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in counts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect();
    }
    out
}

#[test]
fn best_response_weakly_dominates() {
    let mut rng = common::rng(1);
    for _ in 0..200 {
        let g = random_game(&mut rng);
        let counts = g.strategy_counts();
        for profile in all_profiles(&counts) {
            let profile = StrategyProfile::new(profile);
            for player in 0..g.num_players() {
                let br = g.best_response(&profile, player).unwrap();
                assert!(!br.is_empty());
                for &b in &br {
                    let ub = g.utility(&profile.with(player, b), player).unwrap();
                    for s in 0..counts[player] {
                        assert!(ub >= g.utility(&profile.with(player, s), player).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn pure_nash_matches_brute_force() {
    let mut rng = common::rng(2);
    for _ in 0..200 {
        let g = random_game(&mut rng);
        let counts = g.strategy_counts();
        let mut expected = Vec::new();
        for profile in all_profiles(&counts) {
            let stable = (0..g.num_players()).all(|p| {
                let here = g.utility(&StrategyProfile::new(profile.clone()), p).unwrap();
                (0..counts[p]).all(|s| {
                    let mut dev = profile.clone();
                    dev[p] = s;
                    g.utility(&StrategyProfile::new(dev), p).unwrap() <= here
                })
            });
            if stable {
                expected.push(StrategyProfile::new(profile));
            }
        }
        assert_eq!(g.find_pure_nash().unwrap(), expected);
    }
}

#[test]
fn best_response_ignores_payoff_shifts() {
    let mut rng = common::rng(3);
    for _ in 0..200 {
        let g = random_game(&mut rng);
        let counts = g.strategy_counts();
        let shifted_player = rng.random_range(0..g.num_players());
        let shift = rng.random_range(-10.0..10.0);
        let text = g.to_json().unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        shift_leaves(&mut doc["payoffs"], counts.len(), shifted_player, shift);
        let shifted = NormalFormGame::from_json(&doc.to_string()).unwrap();
        for profile in all_profiles(&counts) {
            let profile = StrategyProfile::new(profile);
            for p in 0..g.num_players() {
                assert_eq!(g.best_response(&profile, p).unwrap(), shifted.best_response(&profile, p).unwrap());
            }
        }
    }
}

fn shift_leaves(v: &mut serde_json::Value, depth: usize, player: usize, shift: f64) {
    if depth == 0 {
        let x = v[player].as_f64().unwrap();
        v[player] = serde_json::json!(x + shift);
    } else {
        for child in v.as_array_mut().unwrap() {
            shift_leaves(child, depth - 1, player, shift);
        }
    }
}

#[test]
fn prisoners_dilemma_single_equilibrium() {
    let g = prisoners_dilemma();
    assert_eq!(g.find_pure_nash().unwrap(), [StrategyProfile::new(vec![1, 1])]);
}
