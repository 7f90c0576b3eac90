mod common;

use ggn_core::graph::{load_edge_list, SampleMethod, SignedGraph};
use proptest::prelude::*;

fn edge_lines() -> impl Strategy<Value = Vec<(u8, u8, i8)>> {
    prop::collection::vec((0u8..30, 0u8..30, -3i8..=3), 0..120)
}

fn render(lines: &[(u8, u8, i8)]) -> String {
    lines.iter().map(|(u, v, w)| format!("{u}\t{v} {w}\n")).collect()
}

/// Canonical form for isomorphism by label: sorted (label, label, weight).
fn by_label(g: &SignedGraph) -> Vec<(String, String, u64)> {
    let mut out: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (g.label(e.src).to_owned(), g.label(e.dst).to_owned(), e.weight.to_bits()))
        .collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn stats_partition_edges(lines in edge_lines()) {
        let g = load_edge_list(render(&lines).as_bytes()).unwrap().make_undirected();
        let s = g.stats();
        prop_assert_eq!(s.positive_edges + s.negative_edges + s.zero_weight_edges, s.edges);
        prop_assert_eq!(s.edges, g.edge_count());
        let raw = load_edge_list(render(&lines).as_bytes()).unwrap().stats();
        prop_assert_eq!(raw.positive_edges + raw.negative_edges + raw.zero_weight_edges, raw.edges);
    }

    #[test]
    fn make_undirected_is_idempotent(lines in edge_lines()) {
        let once = load_edge_list(render(&lines).as_bytes()).unwrap().make_undirected();
        prop_assert_eq!(once.make_undirected(), once.clone());
        for e in once.edges() {
            prop_assert!(e.src < e.dst);
            prop_assert!(e.weight != 0.0);
        }
    }

    #[test]
    fn skeleton_is_idempotent(lines in edge_lines()) {
        let g = load_edge_list(render(&lines).as_bytes()).unwrap();
        let s = g.to_skeleton();
        prop_assert_eq!(s.to_skeleton(), s.clone());
        prop_assert!(s.edges().iter().all(|e| e.weight == 1.0));
        prop_assert_eq!(s.edge_count(), g.edge_count());
    }

    #[test]
    fn export_reload_round_trip(lines in edge_lines(), undirected in any::<bool>()) {
        let mut g = load_edge_list(render(&lines).as_bytes()).unwrap();
        if undirected {
            g = g.make_undirected();
        }
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let mut back = load_edge_list(buf.as_slice()).unwrap();
        if undirected {
            back = back.make_undirected();
        }
        prop_assert_eq!(by_label(&back), by_label(&g));
        prop_assert_eq!(back.stats().edges, g.stats().edges);
        prop_assert_eq!(back.stats().positive_edges, g.stats().positive_edges);
        prop_assert_eq!(back.stats().negative_edges, g.stats().negative_edges);
        // isolated nodes are not representable in an edge list
        let touched = g.degrees().iter().filter(|&&d| d > 0).count();
        prop_assert_eq!(back.node_count(), touched);
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), target in 1usize..=60) {
        let g = ggn_core::graph::random_signed(60, 150, 0.2, 9).unwrap();
        for method in [SampleMethod::TopDegree, SampleMethod::BfsBall] {
            let a = g.sample_subgraph(target, method, seed).unwrap();
            let b = g.sample_subgraph(target, method, seed).unwrap();
            prop_assert_eq!(a.node_count(), target);
            prop_assert_eq!(by_label(&a), by_label(&b));
            prop_assert_eq!(a.labels(), b.labels());
        }
    }
}

/// Independent degree ranking: count endpoint occurrences per label straight
/// from the edge text, sort by (-degree, numeric label).
#[test]
fn top_degree_matches_independent_ranking() {
    let big = ggn_core::graph::random_signed(3000, 20_000, 0.15, 77).unwrap();
    let mut text = Vec::new();
    big.write_edge_list(&mut text).unwrap();
    let text = String::from_utf8(text).unwrap();

    let mut degree = std::collections::HashMap::<u64, usize>::new();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let mut it = line.split_whitespace();
        for _ in 0..2 {
            *degree.entry(it.next().unwrap().parse().unwrap()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(u64, usize)> = degree.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut expected: Vec<u64> = ranked[..1000].iter().map(|r| r.0).collect();
    expected.sort_unstable();

    let g = load_edge_list(text.as_bytes()).unwrap().make_undirected();
    let sample = g.sample_subgraph(1000, SampleMethod::TopDegree, 0).unwrap();
    let got: Vec<u64> = sample.labels().iter().map(|l| l.parse().unwrap()).collect();
    assert_eq!(got, expected);
}
