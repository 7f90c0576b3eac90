//! Signed graph data model, edge-list ingestion and export, skeleton
//! extraction, subgraph sampling and dataset statistics.
//!
//! Node ids are dense indices in `0..n`. External labels (whatever the edge
//! list used) are kept in a label table so results can be reported with the
//! original names.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type NodeId = usize;

const KARATE_EDGE_LIST: &str = include_str!("../data/karate.txt");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
}

/// Sparse signed graph.
///
/// Edges are kept sorted by `(src, dst)`. Undirected graphs store each pair
/// once as `(min, max)`. Self-loops are never stored and duplicate pairs are
/// merged by summing their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    directed: bool,
    edges: Vec<Edge>,
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
}

impl SignedGraph {
    /// Builds a graph over the given node labels.
    ///
    /// Self-loops are dropped and repeated pairs are summed (for undirected
    /// graphs `(u, v)` and `(v, u)` are the same pair).
    pub fn new<I>(labels: Vec<String>, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let n = labels.len();
        let mut label_index = HashMap::with_capacity(n);
        for (id, label) in labels.iter().enumerate() {
            if label_index.insert(label.clone(), id).is_some() {
                return invalid(format!("duplicate node label {label:?}"));
            }
        }

        let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        for (src, dst, weight) in edges {
            if src >= n || dst >= n {
                return invalid(format!("edge ({src}, {dst}) out of range for {n} nodes"));
            }
            if !weight.is_finite() {
                return invalid(format!("edge ({src}, {dst}) has non-finite weight {weight}"));
            }
            if src == dst {
                continue;
            }
            let key = if directed { (src, dst) } else { (src.min(dst), src.max(dst)) };
            *merged.entry(key).or_insert(0.0) += weight;
        }

        let edges = merged
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        Ok(Self { directed, edges, labels, label_index })
    }

    /// Graph with labels `"0"`, `"1"`, ... `"n-1"`.
    pub fn with_nodes<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        Self::new((0..n).map(|i| i.to_string()).collect(), directed, edges)
    }

    pub fn empty(directed: bool) -> Self {
        Self { directed, edges: Vec::new(), labels: Vec::new(), label_index: HashMap::new() }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Whether the (unordered, for undirected graphs) pair is an edge.
    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.weight(src, dst).is_some()
    }

    pub fn weight(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        let key = if self.directed { (src, dst) } else { (src.min(dst), src.max(dst)) };
        self.edges
            .binary_search_by(|e| (e.src, e.dst).cmp(&key))
            .ok()
            .map(|idx| self.edges[idx].weight)
    }

    /// Collapses edge directions. The weight of an unordered pair is the sum
    /// of both directed weights; pairs summing to exactly zero are dropped.
    pub fn make_undirected(&self) -> SignedGraph {
        let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        for e in &self.edges {
            *merged.entry((e.src.min(e.dst), e.src.max(e.dst))).or_insert(0.0) += e.weight;
        }
        let edges = merged
            .into_iter()
            .filter(|&(_, w)| w != 0.0)
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        SignedGraph {
            directed: false,
            edges,
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
        }
    }

    /// Same nodes and edges, every weight replaced by `+1`.
    pub fn to_skeleton(&self) -> SignedGraph {
        SignedGraph {
            directed: self.directed,
            edges: self.edges.iter().map(|e| Edge { weight: 1.0, ..*e }).collect(),
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
        }
    }

    /// Number of incident edges per node (in + out for directed graphs).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for e in &self.edges {
            deg[e.src] += 1;
            deg[e.dst] += 1;
        }
        deg
    }

    /// Subgraph induced by `nodes`, relabelled densely in ascending id order.
    pub fn induced(&self, nodes: &[NodeId]) -> Result<SignedGraph> {
        let mut keep: Vec<NodeId> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.node_count() {
                return invalid(format!("node {old} out of range"));
            }
            remap[old] = new;
        }
        let labels = keep.iter().map(|&old| self.labels[old].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| remap[e.src] != usize::MAX && remap[e.dst] != usize::MAX)
            .map(|e| (remap[e.src], remap[e.dst], e.weight));
        SignedGraph::new(labels, self.directed, edges)
    }

    /// Samples an induced subgraph with `target_nodes` nodes.
    ///
    /// The result only depends on `(method, seed)`; `TopDegree` ignores the
    /// seed entirely.
    pub fn sample_subgraph(
        &self,
        target_nodes: usize,
        method: SampleMethod,
        seed: u64,
    ) -> Result<SignedGraph> {
        let n = self.node_count();
        if target_nodes == 0 || target_nodes > n {
            return invalid(format!("target_nodes must be in 1..={n}, got {target_nodes}"));
        }
        let selected = match method {
            SampleMethod::TopDegree => {
                let deg = self.degrees();
                let mut order: Vec<NodeId> = (0..n).collect();
                order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
                order.truncate(target_nodes);
                order
            }
            SampleMethod::BfsBall => self.bfs_ball(target_nodes, seed),
        };
        self.induced(&selected)
    }

    fn bfs_ball(&self, target: usize, seed: u64) -> Vec<NodeId> {
        let n = self.node_count();
        let adj = Adjacency::symmetrized(self);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut visited = vec![false; n];
        let mut picked = Vec::with_capacity(target);
        let mut queue = VecDeque::new();

        while picked.len() < target {
            if queue.is_empty() {
                let unvisited: Vec<NodeId> = (0..n).filter(|&i| !visited[i]).collect();
                let start = *unvisited.choose(&mut rng).expect("target <= n");
                visited[start] = true;
                queue.push_back(start);
            }
            let Some(u) = queue.pop_front() else { break };
            picked.push(u);
            for (v, _) in adj.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        picked
    }

    pub fn stats(&self) -> GraphStats {
        let mut stats = GraphStats {
            nodes: self.node_count(),
            edges: self.edge_count(),
            ..GraphStats::default()
        };
        for e in &self.edges {
            if e.weight > 0.0 {
                stats.positive_edges += 1;
            } else if e.weight < 0.0 {
                stats.negative_edges += 1;
            } else {
                stats.zero_weight_edges += 1;
            }
        }
        stats
    }

    /// Writes the graph in the same whitespace edge-list dialect that
    /// [`load_edge_list`] reads, with round-trip float formatting.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let kind = if self.directed { "directed" } else { "undirected" };
        writeln!(out, "# {kind} signed graph: {} nodes, {} edges", self.node_count(), self.edge_count())?;
        for e in &self.edges {
            writeln!(out, "{} {} {}", self.labels[e.src], self.labels[e.dst], e.weight)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub positive_edges: usize,
    pub negative_edges: usize,
    pub zero_weight_edges: usize,
}

impl GraphStats {
    /// One LaTeX-style table row: `name & nodes & edges & + edges & - edges`.
    pub fn table_row(&self, name: &str) -> String {
        format!(
            "{name} & {} & {} & {} & {}",
            thousands(self.nodes),
            thousands(self.edges),
            thousands(self.positive_edges),
            thousands(self.negative_edges)
        )
    }
}

fn thousands(value: usize) -> String {
    let digits = value.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    /// The `target` highest-degree nodes, ties broken by lower id.
    TopDegree,
    /// Breadth-first ball around a seeded random start node; restarts from
    /// another random node when a component runs out.
    BfsBall,
}

impl FromStr for SampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "top-degree" | "top-degree-induced" => Ok(Self::TopDegree),
            "bfs" | "bfs-ball" => Ok(Self::BfsBall),
            other => invalid(format!("unknown sample method {other:?}")),
        }
    }
}

impl fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TopDegree => "top-degree",
            Self::BfsBall => "bfs-ball",
        })
    }
}

/// Compressed adjacency rows, neighbors sorted by id.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
}

impl Adjacency {
    /// Out-neighbors for directed graphs, both directions for undirected ones.
    pub fn new(g: &SignedGraph) -> Self {
        let mut pairs = Vec::with_capacity(g.edge_count() * 2);
        for e in g.edges() {
            pairs.push((e.src, e.dst, e.weight));
            if !g.is_directed() {
                pairs.push((e.dst, e.src, e.weight));
            }
        }
        Self::from_pairs(g.node_count(), pairs)
    }

    /// Both directions regardless of orientation; reciprocal directed edges
    /// appear twice.
    pub fn symmetrized(g: &SignedGraph) -> Self {
        let mut pairs = Vec::with_capacity(g.edge_count() * 2);
        for e in g.edges() {
            pairs.push((e.src, e.dst, e.weight));
            pairs.push((e.dst, e.src, e.weight));
        }
        Self::from_pairs(g.node_count(), pairs)
    }

    fn from_pairs(n: usize, mut pairs: Vec<(NodeId, NodeId, f64)>) -> Self {
        pairs.sort_by_key(|a| (a.0, a.1));
        let mut offsets = vec![0; n + 1];
        for &(src, _, _) in &pairs {
            offsets[src + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|p| p.1).collect();
        let weights = pairs.iter().map(|p| p.2).collect();
        Self { offsets, targets, weights }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.targets[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }
}

/// Parses a whitespace-separated signed edge list (SNAP / KONECT style).
///
/// Each data line is `src dst [weight ...]`; tokens past the weight (KONECT
/// timestamps, for instance) are ignored. Lines starting with `#` or `%` are
/// comments. A missing weight is `+1`. Labels are mapped to dense ids in
/// ascending order: numerically when every label is an integer, otherwise
/// lexicographically. Self-loops are dropped and repeated `(src, dst)` lines
/// are summed. The result is always directed.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<SignedGraph> {
    let mut raw: Vec<(String, String, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(src), Some(dst)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected at least two tokens, got {trimmed:?}"),
            });
        };
        let weight = match tokens.next() {
            None => 1.0,
            Some(tok) => match tok.parse::<f64>() {
                Ok(w) if w.is_finite() => w,
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("invalid weight {tok:?}"),
                    })
                }
            },
        };
        raw.push((src.to_owned(), dst.to_owned(), weight));
    }

    let mut labels: Vec<&str> = raw
        .iter()
        .flat_map(|(s, d, _)| [s.as_str(), d.as_str()])
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let numeric: Option<Vec<u64>> = labels.iter().map(|l| l.parse::<u64>().ok()).collect();
    if numeric.is_some() {
        labels.sort_by(|a, b| {
            let (x, y) = (a.parse::<u64>().unwrap(), b.parse::<u64>().unwrap());
            x.cmp(&y).then_with(|| a.cmp(b))
        });
    } else {
        labels.sort_unstable();
    }
    let index: HashMap<&str, NodeId> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let edges: Vec<(NodeId, NodeId, f64)> = raw
        .iter()
        .map(|(s, d, w)| (index[s.as_str()], index[d.as_str()], *w))
        .collect();
    let labels = labels.into_iter().map(str::to_owned).collect();
    SignedGraph::new(labels, true, edges)
}

/// The bundled Zachary karate club (34 nodes, 78 edges, labels `"0"`..`"33"`),
/// undirected with unit weights.
pub fn karate() -> SignedGraph {
    load_edge_list(KARATE_EDGE_LIST.as_bytes())
        .expect("bundled karate edge list parses")
        .make_undirected()
}

/// Karate club where every edge touching `negative_node` is `-1` and every
/// other edge is `+1`.
pub fn karate_with_planted_signs(negative_node: NodeId) -> Result<SignedGraph> {
    let base = karate();
    if negative_node >= base.node_count() {
        return invalid(format!(
            "node {negative_node} is not in the karate graph (0..{})",
            base.node_count()
        ));
    }
    let edges = base.edges().iter().map(|e| {
        let w = if e.src == negative_node || e.dst == negative_node { -1.0 } else { 1.0 };
        (e.src, e.dst, w)
    });
    SignedGraph::new(base.labels().to_vec(), false, edges)
}

/// Samples `m` distinct unordered pairs uniformly (G(n, m)).
fn random_pairs(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(NodeId, NodeId)>> {
    let max_pairs = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_pairs {
        return invalid(format!("{m} edges requested but only {max_pairs} pairs exist"));
    }
    let mut seen = HashSet::with_capacity(m);
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            pairs.push(key);
        }
    }
    Ok(pairs)
}

/// Undirected graph with `communities` equal contiguous blocks: edges inside
/// a block are `+1`, across blocks `-1`, and each sign is flipped with
/// probability `noise`. Edge count is `round(n * avg_degree / 2)`, drawn
/// uniformly over all pairs.
pub fn planted_communities(
    n: usize,
    communities: usize,
    avg_degree: f64,
    noise: f64,
    seed: u64,
) -> Result<SignedGraph> {
    if communities == 0 || communities > n {
        return invalid(format!("communities must be in 1..={n}"));
    }
    if !(0.0..=1.0).contains(&noise) {
        return invalid(format!("noise must be a probability, got {noise}"));
    }
    if !(avg_degree >= 0.0 && avg_degree.is_finite()) {
        return invalid(format!("avg_degree must be non-negative, got {avg_degree}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (n as f64 * avg_degree / 2.0).round() as usize;
    let pairs = random_pairs(n, m, &mut rng)?;
    let block = |i: NodeId| i * communities / n;
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| {
            let mut w = if block(u) == block(v) { 1.0 } else { -1.0 };
            if rng.random_bool(noise) {
                w = -w;
            }
            (u, v, w)
        })
        .collect();
    SignedGraph::with_nodes(n, false, edges)
}

/// Undirected G(n, m) graph whose edges are independently `-1` with
/// probability `negative_fraction`, else `+1`.
pub fn random_signed(n: usize, m: usize, negative_fraction: f64, seed: u64) -> Result<SignedGraph> {
    if !(0.0..=1.0).contains(&negative_fraction) {
        return invalid(format!("negative_fraction must be a probability, got {negative_fraction}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_pairs(n, m, &mut rng)?;
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, if rng.random_bool(negative_fraction) { -1.0 } else { 1.0 }))
        .collect();
    SignedGraph::with_nodes(n, false, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> SignedGraph {
        load_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn parses_signed_lines() {
        let g = parse("1 2 1\n2 3 -1\n");
        assert_eq!(g.node_count(), 3);
        assert!(g.is_directed());
        let a = |l: &str| g.node_id(l).unwrap();
        assert_eq!(g.weight(a("1"), a("2")), Some(1.0));
        assert_eq!(g.weight(a("2"), a("3")), Some(-1.0));
        assert_eq!(g.weight(a("2"), a("1")), None);
    }

    #[test]
    fn empty_input_is_empty_graph() {
        let g = parse("");
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        let g = parse("# only a comment\n% and another\n\n");
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
    }

    #[test]
    fn comments_tabs_defaults_and_extra_tokens() {
        let g = parse("% konect header\n# snap header\n10\t20\n20\t30\t-1\t1234567\n");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.labels(), ["10", "20", "30"]);
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.weight(1, 2), Some(-1.0));
    }

    #[test]
    fn self_loops_dropped_and_duplicates_summed() {
        let g = parse("1 1 5\n1 2 1\n1 2 2.5\n");
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.weight(0, 1), Some(3.5));
    }

    #[test]
    fn malformed_lines_report_line_number() {
        match load_edge_list("1 2\n3\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load_edge_list("# c\n1 2 x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_edge_list("1 2 nan\n".as_bytes()).is_err());
    }

    #[test]
    fn non_numeric_labels_sort_lexicographically() {
        let g = parse("bob alice\ncarol bob -1\n");
        assert_eq!(g.labels(), ["alice", "bob", "carol"]);
    }

    #[test]
    fn make_undirected_rules() {
        let g = SignedGraph::with_nodes(2, true, [(0, 1, 1.0)]).unwrap().make_undirected();
        assert_eq!(g.edges(), [Edge { src: 0, dst: 1, weight: 1.0 }]);
        assert!(!g.is_directed());

        let g = SignedGraph::with_nodes(2, true, [(0, 1, 2.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(g.make_undirected().weight(1, 0), Some(3.0));

        let g = SignedGraph::with_nodes(2, true, [(0, 1, 1.0), (1, 0, -1.0)]).unwrap();
        assert_eq!(g.make_undirected().edge_count(), 0);
    }

    #[test]
    fn skeleton_replaces_weights() {
        let g = SignedGraph::with_nodes(3, false, [(0, 1, 3.0), (1, 2, -1.0)]).unwrap();
        let s = g.to_skeleton();
        assert_eq!(s.edge_count(), 2);
        assert!(s.edges().iter().all(|e| e.weight == 1.0));
        assert_eq!(SignedGraph::empty(false).to_skeleton(), SignedGraph::empty(false));
    }

    #[test]
    fn stats_counts_by_sign() {
        let g = SignedGraph::with_nodes(3, false, [(0, 1, 1.0), (1, 2, -1.0)]).unwrap();
        let s = g.stats();
        assert_eq!(
            s,
            GraphStats { nodes: 3, edges: 2, positive_edges: 1, negative_edges: 1, zero_weight_edges: 0 }
        );
    }

    #[test]
    fn table_row_layout() {
        let s = GraphStats {
            nodes: 3869,
            edges: 93498,
            positive_edges: 77052,
            negative_edges: 16446,
            zero_weight_edges: 0,
        };
        assert_eq!(s.table_row("Slashdot1"), "Slashdot1 & 3,869 & 93,498 & 77,052 & 16,446");
        assert_eq!(thousands(0), "0");
        assert_eq!(thousands(999), "999");
        assert_eq!(thousands(1000), "1,000");
        assert_eq!(thousands(182674), "182,674");
    }

    #[test]
    fn karate_shape() {
        let g = karate();
        assert_eq!((g.node_count(), g.edge_count()), (34, 78));
        assert!(!g.is_directed());
        let nbrs: Vec<NodeId> = Adjacency::new(&g).neighbors(23).map(|(v, _)| v).collect();
        assert_eq!(nbrs, [25, 27, 29, 32, 33]);
    }

    #[test]
    fn planted_karate() {
        let g = karate_with_planted_signs(23).unwrap();
        let s = g.stats();
        assert_eq!(s.positive_edges + s.negative_edges, 78);
        assert_eq!(s.negative_edges, 5);
        for e in g.edges() {
            let touches = e.src == 23 || e.dst == 23;
            assert_eq!(e.weight, if touches { -1.0 } else { 1.0 });
        }
        assert_eq!(g.to_skeleton(), karate());
        assert!(matches!(karate_with_planted_signs(999), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sample_edge_cases() {
        let g = karate();
        let all = g.sample_subgraph(34, SampleMethod::TopDegree, 0).unwrap();
        assert_eq!(all, g);
        let all = g.sample_subgraph(34, SampleMethod::BfsBall, 3).unwrap();
        assert_eq!(all, g);
        for method in [SampleMethod::TopDegree, SampleMethod::BfsBall] {
            let one = g.sample_subgraph(1, method, 9).unwrap();
            assert_eq!((one.node_count(), one.edge_count()), (1, 0));
            assert!(g.sample_subgraph(0, method, 0).is_err());
            assert!(g.sample_subgraph(35, method, 0).is_err());
        }
    }

    #[test]
    fn top_degree_keeps_hubs() {
        let g = karate();
        let s = g.sample_subgraph(2, SampleMethod::TopDegree, 0).unwrap();
        // node 33 has degree 17, node 0 has 16
        assert_eq!(s.labels(), ["0", "33"]);
    }

    #[test]
    fn bfs_ball_is_seeded() {
        let g = random_signed(300, 900, 0.2, 4).unwrap();
        let a = g.sample_subgraph(50, SampleMethod::BfsBall, 11).unwrap();
        let b = g.sample_subgraph(50, SampleMethod::BfsBall, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.node_count(), 50);
    }

    #[test]
    fn generators() {
        let g = planted_communities(200, 2, 10.0, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 1000);
        for e in g.edges() {
            let same = (e.src < 100) == (e.dst < 100);
            assert_eq!(e.weight, if same { 1.0 } else { -1.0 });
        }
        let r = random_signed(100, 300, 0.0, 2).unwrap();
        assert_eq!(r.stats().positive_edges, 300);
        assert!(random_signed(3, 4, 0.5, 0).is_err());
    }

    #[test]
    fn constructor_validates() {
        assert!(SignedGraph::with_nodes(2, false, [(0, 2, 1.0)]).is_err());
        assert!(SignedGraph::with_nodes(2, false, [(0, 1, f64::INFINITY)]).is_err());
        assert!(SignedGraph::new(vec!["a".into(), "a".into()], false, []).is_err());
        let g = SignedGraph::with_nodes(3, false, [(2, 0, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(g.edges(), [Edge { src: 0, dst: 2, weight: 2.0 }]);
    }
}
