mod common;

use approx::assert_abs_diff_eq;
use ggn_core::graph::{karate, karate_with_planted_signs, SignedGraph};
use ggn_core::team_game::{TeamGame, TeamGameConfig, TeamPartition, TieRule};
use rand::Rng;

fn random_partition(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> TeamPartition {
    let teams = rng.random_range(1..=n);
    TeamPartition::from_assignment((0..n).map(|_| rng.random_range(0..teams)).collect())
}

fn config(c: f64, seed: u64) -> TeamGameConfig {
    TeamGameConfig { c, seed, ..TeamGameConfig::default() }
}

#[test]
fn unilateral_moves_change_potential_by_own_gain() {
    let mut rng = common::rng(10);
    for _ in 0..1000 {
        let n = rng.random_range(2..25);
        let g = common::random_graph(&mut rng, n, 0.3);
        let c = rng.random_range(0.0..1.5);
        let game = TeamGame::new(&g, c).unwrap();
        let p = random_partition(&mut rng, n);
        let i = rng.random_range(0..n);
        let mut target = rng.random_range(0..n);
        if rng.random_bool(0.2) {
            if let Some(f) = p.fresh_team() {
                target = f;
            }
        }
        let mut q = p.clone();
        q.move_node(i, target);
        let du = game.utility(i, &q) - game.utility(i, &p);
        let dphi = game.potential(&q) - game.potential(&p);
        assert!((du - dphi).abs() < 1e-9, "du {du} dphi {dphi}");
    }
}

#[test]
fn potential_strictly_increases_along_simulation() {
    let mut rng = common::rng(11);
    for seed in 0..40 {
        let n = rng.random_range(5..60);
        let g = common::random_graph(&mut rng, n, 0.15);
        let c = rng.random_range(0.0..1.0);
        let game = TeamGame::new(&g, c).unwrap();
        let mut phi = game.potential(&TeamPartition::singletons(n));
        let out = game
            .simulate_with(&config(c, seed), |event, p| {
                let next = game.potential(p);
                assert!(next > phi, "potential fell from {phi} to {next}");
                assert_abs_diff_eq!(next - phi, event.utility_after - event.utility_before, epsilon = 1e-9);
                phi = next;
            })
            .unwrap();
        assert!(out.converged);
    }
}

#[test]
fn converged_partitions_are_nash() {
    let mut rng = common::rng(12);
    for seed in 0..60 {
        let n = rng.random_range(2..80);
        let density = rng.random_range(0.02..0.4);
        let g = common::random_graph(&mut rng, n, density);
        let c = [0.0, 0.2, 0.5, 1.0][seed as usize % 4];
        let game = TeamGame::new(&g, c).unwrap();
        let out = game.simulate(&config(c, seed)).unwrap().ensure_converged().unwrap();
        let a = common::dense_adjacency(&g);
        let p = &out.partition;
        for i in 0..n {
            let here = common::utility_from_scratch(&a, p.assignment(), c, i);
            // every existing team plus a fresh one
            let mut targets: Vec<usize> = p.teams().collect();
            targets.extend(p.fresh_team());
            for t in targets {
                let mut moved = p.assignment().to_vec();
                moved[i] = t;
                assert!(common::utility_from_scratch(&a, &moved, c, i) <= here + 1e-9);
            }
        }
        assert!(game.max_improvement(p) <= 1e-9);
    }
}

#[test]
fn incremental_utilities_track_definition() {
    let mut rng = common::rng(13);
    let n = 40;
    let g = common::random_graph(&mut rng, n, 0.2);
    let a = common::dense_adjacency(&g);
    let c = 0.3;
    let game = TeamGame::new(&g, c).unwrap();
    let mut p = TeamPartition::singletons(n);
    for _ in 0..10_000 {
        let i = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        let mut moved = p.assignment().to_vec();
        moved[i] = t;
        let predicted = game.utility_if_moved(i, &p, t);
        assert_abs_diff_eq!(predicted, common::utility_from_scratch(&a, &moved, c, i), epsilon = 1e-9);
        p.move_node(i, t);
        let j = rng.random_range(0..n);
        assert_abs_diff_eq!(game.utility(j, &p), common::utility_from_scratch(&a, p.assignment(), c, j), epsilon = 1e-9);
    }
}

#[test]
fn simulation_is_deterministic_per_seed() {
    let mut rng = common::rng(14);
    let g = common::random_graph(&mut rng, 120, 0.05);
    let game = TeamGame::new(&g, 0.2).unwrap();
    let a = game.simulate(&config(0.2, 5)).unwrap();
    let b = game.simulate(&config(0.2, 5)).unwrap();
    assert_eq!(a, b);
    let lowest = game.clone().with_tie_rule(TieRule::LowestId);
    assert_eq!(lowest.simulate(&config(0.2, 5)).unwrap(), lowest.simulate(&config(0.2, 5)).unwrap());
}

#[test]
fn planted_karate_node_ends_alone() {
    for node in [23, 0, 33] {
        let g = karate_with_planted_signs(node).unwrap();
        let game = TeamGame::new(&g, 0.2).unwrap();
        for seed in 0..20 {
            let out = game.simulate(&config(0.2, seed)).unwrap().ensure_converged().unwrap();
            let p = &out.partition;
            assert_eq!(p.team_size(p.team_of(node)), 1, "node {node} seed {seed}");
        }
    }
    // unsigned karate at small c forms real teams
    let game = TeamGame::new(&karate(), 0.2).unwrap();
    let out = game.simulate(&config(0.2, 0)).unwrap();
    assert!(out.partition.team_count() < 34);
}

#[test]
fn friends_merge_and_enemies_part() {
    let friends = SignedGraph::with_nodes(2, false, [(0, 1, 1.0)]).unwrap();
    let enemies = SignedGraph::with_nodes(2, false, [(0, 1, -1.0)]).unwrap();
    for seed in 0..10 {
        let out = TeamGame::new(&friends, 0.2).unwrap().simulate(&config(0.2, seed)).unwrap();
        assert!(out.partition.same_team(0, 1));
        let out = TeamGame::new(&enemies, 0.2).unwrap().simulate(&config(0.2, seed)).unwrap();
        assert!(!out.partition.same_team(0, 1));
    }
}

/// Two agents: check every reachable state against a hand enumeration of
/// the two configurations (together, apart).
#[test]
fn two_node_exhaustive() {
    for w in [-2.0, -0.5, 0.0, 0.1, 0.5, 2.0] {
        for c in [0.0, 0.2, 1.0] {
            let g = SignedGraph::with_nodes(2, false, [(0, 1, w)]).unwrap();
            let game = TeamGame::new(&g, c).unwrap();
            let out = game.simulate(&config(c, 3)).unwrap();
            let together = w - 2.0 * c;
            let apart = -c;
            // a move happens only for a strict gain
            assert_eq!(out.partition.same_team(0, 1), together > apart + 1e-9, "w {w} c {c}");
        }
    }
}
