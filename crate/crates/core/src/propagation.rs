//! Transition matrices, feature propagation and the influence matrix.
//!
//! Propagation follows the decoupled recurrence
//!
//! ```text
//! X(t+1) = alpha * T * X(t) + (1 - alpha) * X(0)
//! ```
//!
//! which is linear, so `X(k) = M_k X(0)` with `M_0 = I` and
//! `M_t = alpha T M_{t-1} + (1 - alpha) I`. The Jacobian of node `j`'s
//! propagated feature with respect to node `i`'s initial feature is
//! `M_k[j, i]` times the `d x d` identity; its L1 norm is `d * M_k[j, i]` and
//! the factor `d` cancels in the row normalization, so the normalized
//! influence of `i` on `j` is `M_k[j, i] / sum_l M_k[j, l]`.
//!
//! `M_k` is never formed. Candidate columns are obtained by running the
//! recurrence on sparse basis vectors and the row sums by one dense pass on
//! the all-ones vector.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::features::FeatureMatrix;
use crate::hypergraph::{Hypergraph, NodeId};

/// Which construction produced a [`TransitionMatrix`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Common-neighbor weights over shared hyperedges, symmetrically
    /// normalized.
    #[default]
    Hoi,
    /// `Dv^-1/2 H W De^-1 H^T Dv^-1/2`.
    Hgnn,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Hoi => "hoi",
            Backend::Hgnn => "hgnn",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hoi" => Ok(Backend::Hoi),
            "hgnn" => Ok(Backend::Hgnn),
            other => Err(format!("unknown backend `{other}` (expected hoi or hgnn)")),
        }
    }
}

/// Sparse symmetric `n x n` transition matrix in compressed row form.
///
/// Both constructions are symmetric, so row `j` doubles as column `j`; the
/// sparse column recurrence relies on this.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    offsets: Vec<usize>,
    indices: Vec<NodeId>,
    values: Vec<f64>,
    backend: Backend,
}

impl TransitionMatrix {
    pub fn build(g: &Hypergraph, backend: Backend) -> TransitionMatrix {
        match backend {
            Backend::Hoi => build_hoi_transition(g),
            Backend::Hgnn => {
                build_hgnn_transition(g, &vec![1.0; g.num_edges()]).expect("unit weights are valid")
            }
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`, indices ascending.
    pub fn row(&self, i: usize) -> (&[NodeId], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.binary_search(&j).map_or(0.0, |p| val[p])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            let (idx, val) = self.row(i);
            for (&j, &w) in idx.iter().zip(val) {
                row[j] = w;
            }
        }
        out
    }

    /// `out = T x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let (idx, val) = self.row(i);
            *o = idx.iter().zip(val).map(|(&j, &w)| w * x[j]).sum();
        });
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|w| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn from_rows(n: usize, rows: Vec<(Vec<NodeId>, Vec<f64>)>, backend: Backend) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let nnz = rows.iter().map(|r| r.0.len()).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for (idx, val) in rows {
            indices.extend(idx);
            values.extend(val);
            offsets.push(indices.len());
        }
        TransitionMatrix {
            n,
            offsets,
            indices,
            values,
            backend,
        }
    }
}

/// Dense scatter accumulator reused across rows / columns.
struct Accumulator {
    values: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            values: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, i: usize, x: f64) {
        if !self.seen[i] {
            self.seen[i] = true;
            self.touched.push(i);
        }
        self.values[i] += x;
    }

    /// Drains the touched entries in ascending index order.
    fn drain(&mut self, mut keep: impl FnMut(usize, f64)) {
        self.touched.sort_unstable();
        for &i in &self.touched {
            keep(i, self.values[i]);
            self.values[i] = 0.0;
            self.seen[i] = false;
        }
        self.touched.clear();
    }
}

/// Common-neighbor transition: `l_ij = sum over shared hyperedges of
/// (|e| - 1)` for `i != j`, zero diagonal, then `D^-1/2 L D^-1/2` with `D`
/// the row sums of `L`. Rows of isolated nodes (or nodes only in singleton
/// hyperedges) are empty.
pub fn build_hoi_transition(g: &Hypergraph) -> TransitionMatrix {
    let n = g.num_nodes();
    let mut acc = Accumulator::new(n);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        for &e in g.edges_of(i) {
            let weight = (g.edge_degree(e) - 1) as f64;
            if weight == 0.0 {
                continue;
            }
            for &j in g.nodes_of(e) {
                if j != i {
                    acc.add(j, weight);
                }
            }
        }
        let mut idx = Vec::new();
        let mut val = Vec::new();
        acc.drain(|j, w| {
            idx.push(j);
            val.push(w);
        });
        rows.push((idx, val));
    }

    let scale: Vec<f64> = rows
        .iter()
        .map(|(_, val)| {
            let s: f64 = val.iter().sum();
            if s > 0.0 {
                1.0 / s.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    for (i, (idx, val)) in rows.iter_mut().enumerate() {
        for (j, w) in idx.iter().zip(val.iter_mut()) {
            *w *= scale[i] * scale[*j];
        }
    }
    TransitionMatrix::from_rows(n, rows, Backend::Hoi)
}

/// Clique-style transition `Dv^-1/2 H W De^-1 H^T Dv^-1/2` with per-edge
/// weights. Isolated nodes get empty rows.
pub fn build_hgnn_transition(g: &Hypergraph, edge_weights: &[f64]) -> Result<TransitionMatrix> {
    if edge_weights.len() != g.num_edges() {
        return Err(Error::Shape(format!(
            "{} edge weights for {} hyperedges",
            edge_weights.len(),
            g.num_edges()
        )));
    }
    if let Some(&w) = edge_weights.iter().find(|w| w.is_nan() || **w < 0.0) {
        return Err(Error::InvalidParameter {
            name: "edge weight",
            value: w,
            reason: "must be non-negative",
        });
    }
    let n = g.num_nodes();
    let inv_sqrt_degree: Vec<f64> = (0..n)
        .map(|v| match g.node_degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut acc = Accumulator::new(n);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        for &e in g.edges_of(i) {
            let w = edge_weights[e] / g.edge_degree(e) as f64;
            for &j in g.nodes_of(e) {
                acc.add(j, w);
            }
        }
        let mut idx = Vec::new();
        let mut val = Vec::new();
        acc.drain(|j, w| {
            idx.push(j);
            val.push(w * (inv_sqrt_degree[i] * inv_sqrt_degree[j]));
        });
        rows.push((idx, val));
    }
    Ok(TransitionMatrix::from_rows(n, rows, Backend::Hgnn))
}

/// Initial and propagated features after `k` steps.
#[derive(Clone, Debug)]
pub struct PropagationState {
    pub initial: FeatureMatrix,
    pub propagated: FeatureMatrix,
    pub k: usize,
    pub alpha: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    check_unit_interval("alpha", alpha)
}

/// Runs the propagation recurrence `k` times starting from `x0`.
pub fn propagate(
    t: &TransitionMatrix,
    x0: &FeatureMatrix,
    k: usize,
    alpha: f64,
) -> Result<PropagationState> {
    check_alpha(alpha)?;
    if x0.rows() != t.size() {
        return Err(Error::Shape(format!(
            "feature matrix has {} rows, transition is {}x{}",
            x0.rows(),
            t.size(),
            t.size()
        )));
    }
    let d = x0.cols();
    let mut current = x0.clone();
    let mut next = FeatureMatrix::zeros(x0.rows(), d);
    for _ in 0..k {
        if d > 0 {
            next.as_mut_slice()
                .par_chunks_mut(d)
                .enumerate()
                .for_each(|(i, out)| {
                    out.fill(0.0);
                    let (idx, val) = t.row(i);
                    for (&j, &w) in idx.iter().zip(val) {
                        for (o, x) in out.iter_mut().zip(current.row(j)) {
                            *o += w * x;
                        }
                    }
                    for (o, x) in out.iter_mut().zip(x0.row(i)) {
                        *o = alpha * *o + (1.0 - alpha) * x;
                    }
                });
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(PropagationState {
        initial: x0.clone(),
        propagated: current,
        k,
        alpha,
    })
}

/// One column of `M_k`, stored sparsely with ascending row indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseColumn {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseColumn {
    pub fn get(&self, j: usize) -> f64 {
        self.indices
            .binary_search(&(j as u32))
            .map_or(0.0, |p| self.values[p])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&j, &x)| (j as usize, x))
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Influence columns `M_k[., u]` for a set of candidates plus the full
/// row-sum vector `M_k 1`.
#[derive(Debug)]
pub struct InfluenceColumns {
    candidates: Vec<NodeId>,
    position: Vec<Option<u32>>,
    columns: Vec<SparseColumn>,
    row_sums: Vec<f64>,
    warned_zero_row: AtomicBool,
}

impl InfluenceColumns {
    /// Candidate node ids, ascending.
    pub fn candidates(&self) -> &[NodeId] {
        &self.candidates
    }

    pub fn num_nodes(&self) -> usize {
        self.row_sums.len()
    }

    pub fn column(&self, u: NodeId) -> Option<&SparseColumn> {
        let p = (*self.position.get(u)?)?;
        Some(&self.columns[p as usize])
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    /// `(candidate, column)` pairs in ascending candidate order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &SparseColumn)> {
        self.candidates.iter().copied().zip(&self.columns)
    }

    /// Normalized influence of candidate `u` on node `j`. Rows whose total
    /// influence is zero (only possible with `alpha = 1`) yield 0.
    pub fn normalized_influence(&self, j: NodeId, u: NodeId) -> Result<f64> {
        let column = self.column(u).ok_or(Error::NotACandidate { node: u })?;
        let s = *self.row_sums.get(j).ok_or(Error::NodeOutOfRange {
            node: j,
            num_nodes: self.num_nodes(),
        })?;
        Ok(self.normalize(j, column.get(j), s))
    }

    pub(crate) fn normalize(&self, j: NodeId, raw: f64, s: f64) -> f64 {
        if s > 0.0 {
            raw / s
        } else {
            if raw != 0.0 || !self.warned_zero_row.swap(true, Ordering::Relaxed) {
                log::warn!("node {j} receives zero total influence; treating its influence as 0");
            }
            0.0
        }
    }

    /// Normalized influence entries of a stored column, skipping exact zeros.
    pub fn normalized_column(&self, u: NodeId) -> Option<Vec<(NodeId, f64)>> {
        let column = self.column(u)?;
        Some(
            column
                .iter()
                .map(|(j, x)| (j, self.normalize(j, x, self.row_sums[j])))
                .filter(|&(_, x)| x != 0.0)
                .collect(),
        )
    }
}

/// Computes `M_k[., u]` for every candidate and the row sums of `M_k`.
///
/// Candidates are deduplicated and sorted. Columns are computed
/// independently, so the result does not depend on the rayon pool size.
pub fn influence_columns(
    t: &TransitionMatrix,
    candidates: &[NodeId],
    k: usize,
    alpha: f64,
) -> Result<InfluenceColumns> {
    check_alpha(alpha)?;
    let n = t.size();
    let mut candidates = candidates.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    if let Some(&bad) = candidates.iter().find(|&&u| u >= n) {
        return Err(Error::NodeOutOfRange {
            node: bad,
            num_nodes: n,
        });
    }

    let columns: Vec<SparseColumn> = candidates
        .par_iter()
        .map_init(
            || Accumulator::new(n),
            |acc, &u| influence_column(t, acc, u, k, alpha),
        )
        .collect();

    let mut row_sums = vec![1.0; n];
    let mut scratch = vec![0.0; n];
    for _ in 0..k {
        t.matvec(&row_sums, &mut scratch);
        for s in scratch.iter_mut() {
            *s = alpha * *s + (1.0 - alpha);
        }
        std::mem::swap(&mut row_sums, &mut scratch);
    }

    let mut position = vec![None; n];
    for (p, &u) in candidates.iter().enumerate() {
        position[u] = Some(p as u32);
    }
    Ok(InfluenceColumns {
        candidates,
        position,
        columns,
        row_sums,
        warned_zero_row: AtomicBool::new(false),
    })
}

fn influence_column(
    t: &TransitionMatrix,
    acc: &mut Accumulator,
    u: NodeId,
    k: usize,
    alpha: f64,
) -> SparseColumn {
    let mut column = SparseColumn {
        indices: vec![u as u32],
        values: vec![1.0],
    };
    for _ in 0..k {
        for (j, x) in column.iter() {
            let (idx, val) = t.row(j);
            for (&i, &w) in idx.iter().zip(val) {
                acc.add(i, w * x);
            }
        }
        // make sure u is present before the identity term is added
        acc.add(u, 0.0);
        let mut next = SparseColumn::default();
        acc.drain(|i, tx| {
            let mut x = alpha * tx;
            if i == u {
                x += 1.0 - alpha;
            }
            if x != 0.0 {
                next.indices.push(i as u32);
                next.values.push(x);
            }
        });
        column = next;
    }
    column
}
