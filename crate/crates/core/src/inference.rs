//! Relationship inference with the truncated exponential kernel
//!
//! ```text
//! exp_k(A) = sum_{p=0}^{k} A^p / p!
//! ```
//!
//! Entry `(i, j)` aggregates every signed walk of length at most `k` from
//! `i` to `j`; a walk's contribution is the product of its edge weights, so
//! two negative hops make a positive relation.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::graph::{NodeId, SignedGraph};

/// Largest supported kernel order.
pub const MAX_ORDER: usize = 12;

/// Largest matrix accepted by [`dense_kernel_oracle`].
pub const MAX_DENSE_ORACLE: usize = 500;

/// Rows of an intermediate power switch to dense storage above this fill.
pub const DENSIFY_FRACTION: f64 = 0.25;

/// Square CSR matrix without explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Duplicate coordinates are summed; entries that end up exactly zero
    /// are dropped.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= n || c >= n {
                return invalid(format!("entry ({r}, {c}) out of range for {n}x{n}"));
            }
            if !v.is_finite() {
                return invalid(format!("entry ({r}, {c}) is not finite"));
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, c, v) in entries {
            match rows[r].last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => rows[r].push((c, v)),
            }
        }
        Ok(Self::from_rows(n, rows))
    }

    fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            offsets.push(cols.len());
        }
        Self { n, offsets, cols, vals }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_rows(n, vec![Vec::new(); n])
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("dense matrix must be square");
        }
        Self::from_triplets(
            n,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }
}

/// Kernel scores together with the order that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub matrix: SparseMatrix,
    pub order: usize,
}

impl ScoreMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rows computed on the rayon pool. Each row uses the same arithmetic
    /// order as in sequential mode, so results are bit-identical.
    #[default]
    Parallel,
}

/// One row of an intermediate power `e_i^T A^p`.
enum PowerRow {
    Sparse(Vec<(usize, f64)>),
    Dense(Vec<f64>),
}

impl PowerRow {
    fn for_each_nonzero(&self, mut f: impl FnMut(usize, f64)) {
        match self {
            PowerRow::Sparse(entries) => entries.iter().for_each(|&(j, v)| f(j, v)),
            PowerRow::Dense(values) => values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .for_each(|(j, &v)| f(j, v)),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            PowerRow::Sparse(entries) => entries.is_empty(),
            PowerRow::Dense(values) => values.iter().all(|&v| v == 0.0),
        }
    }
}

/// Dense accumulator with a touched list, reused across rows.
struct Accumulator {
    values: Vec<f64>,
    touched: Vec<usize>,
    marked: Vec<bool>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self { values: vec![0.0; n], touched: Vec::new(), marked: vec![false; n] }
    }

    fn add(&mut self, j: usize, v: f64) {
        if !self.marked[j] {
            self.marked[j] = true;
            self.touched.push(j);
        }
        self.values[j] += v;
    }

    /// Drains the accumulator into a sparse or dense row.
    fn take(&mut self, densify_above: usize) -> PowerRow {
        if self.touched.len() > densify_above {
            let mut dense = vec![0.0; self.values.len()];
            for &j in &self.touched {
                dense[j] = self.values[j];
                self.values[j] = 0.0;
                self.marked[j] = false;
            }
            self.touched.clear();
            PowerRow::Dense(dense)
        } else {
            PowerRow::Sparse(self.take_sparse())
        }
    }

    fn take_sparse(&mut self) -> Vec<(usize, f64)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &j in &self.touched {
            let v = self.values[j];
            if v != 0.0 {
                out.push((j, v));
            }
            self.values[j] = 0.0;
            self.marked[j] = false;
        }
        self.touched.clear();
        out
    }
}

struct Scratch {
    power: Accumulator,
    sum: Accumulator,
}

fn factorials(k: usize) -> Vec<f64> {
    let mut out = vec![1.0; k + 1];
    for p in 1..=k {
        out[p] = out[p - 1] * p as f64;
    }
    out
}

fn kernel_row(a: &SparseMatrix, i: usize, fact: &[f64], scratch: &mut Scratch) -> Vec<(usize, f64)> {
    let densify_above = (DENSIFY_FRACTION * a.n as f64) as usize;
    let mut power = PowerRow::Sparse(vec![(i, 1.0)]);
    scratch.sum.add(i, 1.0);
    for &f in &fact[1..] {
        if power.is_empty() {
            break;
        }
        power.for_each_nonzero(|mid, pv| {
            for (j, av) in a.row(mid) {
                scratch.power.add(j, pv * av);
            }
        });
        power = scratch.power.take(densify_above);
        power.for_each_nonzero(|j, v| scratch.sum.add(j, v / f));
    }
    scratch.sum.take_sparse()
}

/// `exp_k(adjacency)` computed row by row with sparse vector-matrix products.
pub fn exponential_kernel(adjacency: &SparseMatrix, k: usize) -> Result<ScoreMatrix> {
    exponential_kernel_with(adjacency, k, Execution::default())
}

pub fn exponential_kernel_with(
    adjacency: &SparseMatrix,
    k: usize,
    execution: Execution,
) -> Result<ScoreMatrix> {
    if k > MAX_ORDER {
        return invalid(format!("kernel order must be in 0..={MAX_ORDER}, got {k}"));
    }
    let n = adjacency.dim();
    let fact = factorials(k);
    let new_scratch = || Scratch { power: Accumulator::new(n), sum: Accumulator::new(n) };
    let rows: Vec<Vec<(usize, f64)>> = match execution {
        Execution::Sequential => {
            let mut scratch = new_scratch();
            (0..n).map(|i| kernel_row(adjacency, i, &fact, &mut scratch)).collect()
        }
        Execution::Parallel => (0..n)
            .into_par_iter()
            .map_init(new_scratch, |scratch, i| kernel_row(adjacency, i, &fact, scratch))
            .collect(),
    };
    Ok(ScoreMatrix { matrix: SparseMatrix::from_rows(n, rows), order: k })
}

/// Naive dense evaluation of `exp_k(A)` by repeated multiplication; used as
/// an independent check on [`exponential_kernel`].
pub fn dense_kernel_oracle(adjacency: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>> {
    let n = adjacency.len();
    if n > MAX_DENSE_ORACLE {
        return Err(Error::Capacity(format!(
            "dense oracle supports n <= {MAX_DENSE_ORACLE}, got {n}"
        )));
    }
    if adjacency.iter().any(|r| r.len() != n) {
        return invalid("matrix must be square");
    }
    if k > MAX_ORDER {
        return invalid(format!("kernel order must be in 0..={MAX_ORDER}, got {k}"));
    }
    let identity: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut power = identity.clone();
    let mut total = identity;
    let mut factorial = 1.0;
    for p in 1..=k {
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += power[i][m] * adjacency[m][j];
                }
                next[i][j] = acc;
            }
        }
        power = next;
        factorial *= p as f64;
        for i in 0..n {
            for j in 0..n {
                total[i][j] += power[i][j] / factorial;
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub u: NodeId,
    pub v: NodeId,
    /// `+1` or `-1`.
    pub sign: i8,
    /// Absolute score, always positive.
    pub strength: f64,
}

/// Sign predictions over the edges of a skeleton graph. Edges whose score is
/// exactly zero are left unpredicted.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub predictions: Vec<Prediction>,
    pub universe: Vec<(NodeId, NodeId)>,
}

impl PredictionSet {
    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> Option<&Prediction> {
        self.predictions
            .binary_search_by(|p| (p.u, p.v).cmp(&(u, v)))
            .ok()
            .map(|idx| &self.predictions[idx])
    }

    /// Looks up `(u, v)` or `(v, u)`.
    pub fn get_unordered(&self, u: NodeId, v: NodeId) -> Option<&Prediction> {
        self.get(u, v).or_else(|| self.get(v, u))
    }

    /// `u,v,predicted_sign,strength` CSV sorted by `(u, v)`, nodes written
    /// with `labels`.
    pub fn write_csv<W: Write>(&self, labels: &[String], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v", "predicted_sign", "strength"])?;
        for p in &self.predictions {
            w.write_record([
                labels[p.u].as_str(),
                labels[p.v].as_str(),
                &p.sign.to_string(),
                &p.strength.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scores every skeleton edge from the kernel.
///
/// With `symmetrize` the score of `(u, v)` is `K[u,v] + K[v,u]`, otherwise
/// `K[u,v]`. Diagonal entries are never read.
pub fn predict_signs(kernel: &ScoreMatrix, skeleton: &SignedGraph, symmetrize: bool) -> Result<PredictionSet> {
    if kernel.dim() != skeleton.node_count() {
        return invalid(format!(
            "kernel is {0}x{0} but the skeleton has {1} nodes",
            kernel.dim(),
            skeleton.node_count()
        ));
    }
    let mut predictions = Vec::new();
    let mut universe = Vec::with_capacity(skeleton.edge_count());
    for e in skeleton.edges() {
        universe.push((e.src, e.dst));
        let mut score = kernel.get(e.src, e.dst);
        if symmetrize {
            score += kernel.get(e.dst, e.src);
        }
        if score != 0.0 {
            predictions.push(Prediction {
                u: e.src,
                v: e.dst,
                sign: if score > 0.0 { 1 } else { -1 },
                strength: score.abs(),
            });
        }
    }
    Ok(PredictionSet { predictions, universe })
}
