//! Greedy seed selection.
//!
//! Each round adds the candidate with the largest marginal gain of `F`,
//! breaking exact ties toward the smallest node id. [`greedy_naive`] rescans
//! every remaining candidate per round. [`greedy_lazy`] keeps each
//! candidate's most recent gain in a max-heap; by submodularity a stale gain
//! is an upper bound on the current one, so only the heap top needs
//! re-scoring until a fresh entry surfaces. Both paths score candidates with
//! the same routine, so they return identical seed sequences.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::features::FeatureMatrix;
use crate::hypergraph::{Hypergraph, NodeId};
use crate::objective::{
    build_activation_sets, build_feature_balls, normalizers, ActivationSets, FeatureBalls,
    Objective,
};
use crate::propagation::{
    influence_columns, propagate, Backend, PropagationState, TransitionMatrix,
};

/// A scalar that is either given or resolved from data by a quantile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Fixed(f64),
    Auto,
}

impl std::str::FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Param::Auto);
        }
        s.parse::<f64>()
            .map(Param::Fixed)
            .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionConfig {
    pub budget: usize,
    /// Propagation steps.
    pub k: usize,
    pub alpha: f64,
    pub theta: Param,
    /// Quantile of nonzero candidate influences used when `theta` is auto.
    pub theta_quantile: f64,
    pub radius: Param,
    /// Quantile of sampled pairwise feature distances used when `radius` is
    /// auto.
    pub radius_quantile: f64,
    pub beta: f64,
    pub gamma: f64,
    pub backend: Backend,
    /// Nodes eligible for selection; all nodes when `None`.
    pub candidate_pool: Option<Vec<NodeId>>,
    /// Seed for the pairwise-distance sampler.
    pub seed: u64,
    /// Pair samples drawn when resolving the radius on large inputs.
    pub distance_samples: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            budget: 10,
            k: 2,
            alpha: 0.5,
            theta: Param::Auto,
            theta_quantile: 0.95,
            radius: Param::Auto,
            radius_quantile: 0.05,
            beta: 0.5,
            gamma: 0.5,
            backend: Backend::Hoi,
            candidate_pool: None,
            seed: 0,
            distance_samples: 100_000,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::ZeroBudget);
        }
        check_unit_interval("alpha", self.alpha)?;
        check_unit_interval("gamma", self.gamma)?;
        check_unit_interval("theta quantile", self.theta_quantile)?;
        check_unit_interval("radius quantile", self.radius_quantile)?;
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: self.beta,
                reason: "must lie in (0, 1)",
            });
        }
        for (name, p) in [("theta", self.theta), ("radius", self.radius)] {
            if let Param::Fixed(v) = p {
                if v.is_nan() || v < 0.0 {
                    return Err(Error::InvalidParameter {
                        name,
                        value: v,
                        reason: "must be non-negative",
                    });
                }
            }
        }
        Ok(())
    }
}

/// `(MoI, EDV, F)` after one selection round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub moi: usize,
    pub edv: f64,
    pub objective: f64,
}

/// Concrete values behind the run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub theta: f64,
    pub radius: f64,
    pub moi_hat: f64,
    pub edv_hat: f64,
}

/// Outcome of a greedy run over an [`Objective`].
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Seeds in the order they were picked.
    pub seeds: Vec<NodeId>,
    /// Marginal gain of `F` at each step.
    pub gains: Vec<f64>,
    pub trace: Vec<TraceStep>,
    /// Number of marginal-gain evaluations performed.
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub seeds: Vec<NodeId>,
    pub gains: Vec<f64>,
    pub trace: Vec<TraceStep>,
    pub resolved: ResolvedParams,
    pub evaluations: usize,
}

fn normalize_pool(pool: &[NodeId], num_nodes: usize) -> Result<Vec<NodeId>> {
    let mut pool = pool.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if let Some(&bad) = pool.iter().find(|&&v| v >= num_nodes) {
        return Err(Error::NodeOutOfRange {
            node: bad,
            num_nodes,
        });
    }
    Ok(pool)
}

fn check_budget(budget: usize, pool: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if budget > pool {
        return Err(Error::BudgetExceedsPool { budget, pool });
    }
    Ok(())
}

fn prepare_pool(pool: &[NodeId], budget: usize, num_nodes: usize) -> Result<Vec<NodeId>> {
    let pool = normalize_pool(pool, num_nodes)?;
    check_budget(budget, pool.len())?;
    Ok(pool)
}

fn better(a: (f64, NodeId), b: (f64, NodeId)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Reference greedy: every round scores all remaining candidates.
pub fn greedy_naive(obj: &Objective, pool: &[NodeId], budget: usize) -> Result<Selection> {
    let mut remaining = prepare_pool(pool, budget, obj.num_nodes())?;
    let mut state = obj.empty_state();
    let mut out = Selection {
        seeds: Vec::with_capacity(budget),
        gains: Vec::with_capacity(budget),
        trace: Vec::with_capacity(budget),
        evaluations: 0,
    };
    for _ in 0..budget {
        let scores: Vec<f64> = remaining
            .par_iter()
            .map_init(
                || obj.scratch(),
                |scratch, &v| obj.gain(&state, v, scratch).map(|g| obj.objective_gain(g)),
            )
            .collect::<Result<_>>()?;
        out.evaluations += scores.len();
        let mut best = 0;
        for p in 1..remaining.len() {
            if better((scores[p], remaining[p]), (scores[best], remaining[best])) {
                best = p;
            }
        }
        let v = remaining.remove(best);
        let gain = obj.add(&mut state, v)?;
        record(obj, &state, &mut out, v, gain);
    }
    Ok(out)
}

fn record(
    obj: &Objective,
    state: &crate::objective::CoverageState,
    out: &mut Selection,
    v: NodeId,
    gain: crate::objective::Gain,
) {
    out.seeds.push(v);
    out.gains.push(obj.objective_gain(gain));
    out.trace.push(TraceStep {
        moi: state.moi(),
        edv: state.edv(),
        objective: obj.value(state),
    });
}

#[derive(Debug)]
struct Entry {
    gain: f64,
    node: NodeId,
    round: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

/// Lazy greedy over a stale-bound max-heap.
///
/// The heap orders by gain, then by smaller node id. A popped entry whose
/// round stamp is current is selected; otherwise it is re-scored, stamped
/// and pushed back. Any entry sharing the top's bound but with a smaller id
/// would surface first, which reproduces the naive tie rule.
pub fn greedy_lazy(obj: &Objective, pool: &[NodeId], budget: usize) -> Result<Selection> {
    let pool = prepare_pool(pool, budget, obj.num_nodes())?;
    let mut state = obj.empty_state();
    let mut out = Selection {
        seeds: Vec::with_capacity(budget),
        gains: Vec::with_capacity(budget),
        trace: Vec::with_capacity(budget),
        evaluations: 0,
    };
    let initial: Vec<Entry> = pool
        .par_iter()
        .map_init(
            || obj.scratch(),
            |scratch, &v| {
                obj.gain(&state, v, scratch).map(|g| Entry {
                    gain: obj.objective_gain(g),
                    node: v,
                    round: 0,
                })
            },
        )
        .collect::<Result<_>>()?;
    out.evaluations += initial.len();
    let mut heap = BinaryHeap::from(initial);
    let mut scratch = obj.scratch();

    for round in 0..budget {
        loop {
            let top = heap.pop().expect("budget never exceeds the pool");
            if top.round == round {
                let gain = obj.add(&mut state, top.node)?;
                record(obj, &state, &mut out, top.node, gain);
                break;
            }
            let g = obj.gain(&state, top.node, &mut scratch)?;
            out.evaluations += 1;
            heap.push(Entry {
                gain: obj.objective_gain(g),
                node: top.node,
                round,
            });
        }
    }
    Ok(out)
}

/// Linear-interpolation quantile of `values` (which is reordered).
pub fn quantile(values: &mut [f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(values[lo] + (values[hi] - values[lo]) * frac)
}

/// Propagated features, activation sets and feature balls for one
/// hypergraph under one configuration.
#[derive(Debug)]
pub struct InfluenceModel {
    pub graph: Hypergraph,
    pub transition: TransitionMatrix,
    pub propagation: PropagationState,
    pub activations: ActivationSets,
    pub balls: FeatureBalls,
    pub pool: Vec<NodeId>,
    pub config: SelectionConfig,
}

impl InfluenceModel {
    pub fn build(
        graph: Hypergraph,
        features: &FeatureMatrix,
        config: &SelectionConfig,
    ) -> Result<Self> {
        config.validate()?;
        let n = graph.num_nodes();
        let pool = match &config.candidate_pool {
            Some(p) => normalize_pool(p, n)?,
            None => (0..n).collect(),
        };
        check_budget(config.budget, pool.len())?;
        let transition = TransitionMatrix::build(&graph, config.backend);
        let propagation = propagate(&transition, features, config.k, config.alpha)?;
        let all: Vec<NodeId> = (0..n).collect();
        let columns = influence_columns(&transition, &all, config.k, config.alpha)?;

        let theta = match config.theta {
            Param::Fixed(t) => t,
            Param::Auto => {
                let mut entries: Vec<f64> = pool
                    .iter()
                    .flat_map(|&u| columns.normalized_column(u).expect("all columns stored"))
                    .map(|(_, x)| x)
                    .collect();
                quantile(&mut entries, config.theta_quantile).unwrap_or(0.0)
            }
        };
        let activations = build_activation_sets(&columns, theta)?;
        drop(columns);

        let radius = match config.radius {
            Param::Fixed(r) => r,
            Param::Auto => {
                let mut d = sample_distances(
                    &propagation.propagated,
                    config.distance_samples,
                    config.seed,
                );
                quantile(&mut d, config.radius_quantile).unwrap_or(0.0)
            }
        };
        let balls = build_feature_balls(&propagation, radius)?;
        log::info!("resolved theta = {theta}, radius = {radius}");

        Ok(InfluenceModel {
            graph,
            transition,
            propagation,
            activations,
            balls,
            pool,
            config: config.clone(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.activations.theta()
    }

    pub fn radius(&self) -> f64 {
        self.balls.radius()
    }

    /// `(MoI(V), EDV(V))`.
    pub fn normalizers(&self) -> Result<(usize, f64)> {
        normalizers(
            &self.graph,
            &self.activations,
            &self.balls,
            self.config.beta,
        )
    }

    pub fn objective(&self) -> Result<Objective<'_>> {
        let (moi_hat, edv_hat) = self.normalizers()?;
        Objective::new(
            &self.graph,
            &self.activations,
            &self.balls,
            self.config.beta,
            self.config.gamma,
            moi_hat as f64,
            edv_hat,
        )
    }

    fn finish(&self, obj: &Objective, sel: Selection) -> SelectionResult {
        let (moi_hat, edv_hat) = obj.normalizers();
        SelectionResult {
            seeds: sel.seeds,
            gains: sel.gains,
            trace: sel.trace,
            resolved: ResolvedParams {
                theta: self.theta(),
                radius: self.radius(),
                moi_hat,
                edv_hat,
            },
            evaluations: sel.evaluations,
        }
    }

    pub fn select_naive(&self) -> Result<SelectionResult> {
        let obj = self.objective()?;
        let sel = greedy_naive(&obj, &self.pool, self.config.budget)?;
        Ok(self.finish(&obj, sel))
    }

    pub fn select_lazy(&self) -> Result<SelectionResult> {
        let obj = self.objective()?;
        let sel = greedy_lazy(&obj, &self.pool, self.config.budget)?;
        Ok(self.finish(&obj, sel))
    }
}

/// Pairwise Euclidean distances: every pair when there are at most
/// `samples` of them, otherwise `samples` uniformly drawn pairs of distinct
/// nodes.
pub fn sample_distances(features: &FeatureMatrix, samples: usize, seed: u64) -> Vec<f64> {
    let n = features.rows();
    let dist = |i: usize, j: usize| crate::objective::euclidean(features.row(i), features.row(j));
    let pairs = n.saturating_sub(1) * n / 2;
    if pairs <= samples {
        let mut out = Vec::with_capacity(pairs);
        for i in 0..n {
            for j in i + 1..n {
                out.push(dist(i, j));
            }
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            dist(i, j)
        })
        .collect()
}
