//! Set functions scored by the selector.
//!
//! * `σ(S)`: nodes whose normalized influence from some seed exceeds `θ`.
//!   Because the set-to-node influence is a max over seeds, `σ(S)` is the
//!   union of the per-seed activation sets `A_u`, so it is a coverage
//!   function.
//! * `MoI(S)`: number of nodes inside the union of feature-space balls `G_u`
//!   around the activated nodes.
//! * `EDV(S)`: `|S|` plus, for every non-seed neighbor `v` of `S`, the
//!   probability that some adjacent seed `u` activates it, where `u` fails
//!   with probability `1 - β n_{u,v} / n_u`.
//! * `F(S) = γ MoI(S)/MoI(V) + (1-γ) EDV(S)/EDV(V)`.
//!
//! All four are monotone and submodular. [`CoverageState`] keeps the
//! covered / activated bitsets and per-node evasion products so that marginal
//! gains cost time proportional to the touched balls and neighbors only.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{check_unit_interval, Error, Result};
use crate::features::FeatureMatrix;
use crate::hypergraph::{Hypergraph, NodeId};
use crate::propagation::{InfluenceColumns, PropagationState};

/// Per-candidate activation sets `A_u = {j : I_j(u, k) > θ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationSets {
    theta: f64,
    num_nodes: usize,
    candidates: Vec<NodeId>,
    position: Vec<Option<u32>>,
    sets: Vec<Vec<NodeId>>,
}

impl ActivationSets {
    /// Assembles activation sets from explicit `(candidate, members)` pairs.
    pub fn from_sets(
        num_nodes: usize,
        theta: f64,
        sets: impl IntoIterator<Item = (NodeId, Vec<NodeId>)>,
    ) -> Result<Self> {
        let mut pairs: Vec<(NodeId, Vec<NodeId>)> = sets.into_iter().collect();
        pairs.sort_by_key(|p| p.0);
        let mut position = vec![None; num_nodes];
        let mut candidates = Vec::with_capacity(pairs.len());
        let mut out = Vec::with_capacity(pairs.len());
        for (u, mut members) in pairs {
            for &x in members.iter().chain(std::iter::once(&u)) {
                if x >= num_nodes {
                    return Err(Error::NodeOutOfRange { node: x, num_nodes });
                }
            }
            if position[u].is_some() {
                continue;
            }
            members.sort_unstable();
            members.dedup();
            position[u] = Some(out.len() as u32);
            candidates.push(u);
            out.push(members);
        }
        Ok(ActivationSets {
            theta,
            num_nodes,
            candidates,
            position,
            sets: out,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn candidates(&self) -> &[NodeId] {
        &self.candidates
    }

    pub fn get(&self, u: NodeId) -> Option<&[NodeId]> {
        let p = (*self.position.get(u)?)?;
        Some(&self.sets[p as usize])
    }

    pub fn covers_all_nodes(&self) -> bool {
        self.candidates.len() == self.num_nodes
    }

    /// `σ(S)` as the union of the seeds' activation sets, sorted.
    pub fn activated_by(&self, seeds: &[NodeId]) -> Result<Vec<NodeId>> {
        let mut hit = FixedBitSet::with_capacity(self.num_nodes);
        for &u in seeds {
            for &j in self.get(u).ok_or(Error::NotACandidate { node: u })? {
                hit.insert(j);
            }
        }
        Ok(hit.ones().collect())
    }
}

/// Thresholds every stored influence column. The comparison is strict.
pub fn build_activation_sets(ic: &InfluenceColumns, theta: f64) -> Result<ActivationSets> {
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "must be non-negative",
        });
    }
    let sets: Vec<(NodeId, Vec<NodeId>)> = ic
        .candidates()
        .par_iter()
        .map(|&u| {
            let members = ic
                .normalized_column(u)
                .expect("candidate column")
                .into_iter()
                .filter(|&(_, x)| x > theta)
                .map(|(j, _)| j)
                .collect();
            (u, members)
        })
        .collect();
    ActivationSets::from_sets(ic.num_nodes(), theta, sets)
}

/// Feature-space balls `G_u = {v : dist(x_u, x_v) <= r}` over propagated
/// features, one per node. Members are sorted; `u ∈ G_u` always.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureBalls {
    radius: f64,
    members: Vec<Vec<u32>>,
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl FeatureBalls {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn num_nodes(&self) -> usize {
        self.members.len()
    }

    pub fn ball(&self, u: NodeId) -> &[u32] {
        &self.members[u]
    }

    /// Total number of stored memberships.
    pub fn total_size(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// Balls under an arbitrary symmetric metric. Each unordered pair is
    /// measured once, so membership is symmetric even if the metric is not
    /// bit-for-bit symmetric.
    pub fn with_metric<M>(features: &FeatureMatrix, radius: f64, metric: M) -> Result<Self>
    where
        M: Fn(&[f64], &[f64]) -> f64 + Sync,
    {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: radius,
                reason: "must be non-negative",
            });
        }
        let n = features.rows();
        let upper: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = features.row(i);
                ((i + 1)..n)
                    .filter(|&j| metric(xi, features.row(j)) <= radius)
                    .map(|j| j as u32)
                    .collect()
            })
            .collect();
        let mut sizes: Vec<usize> = upper.iter().map(|up| up.len() + 1).collect();
        for up in &upper {
            for &j in up {
                sizes[j as usize] += 1;
            }
        }
        let mut members: Vec<Vec<u32>> = sizes.into_iter().map(Vec::with_capacity).collect();
        // Rows are visited in ascending order, so every ball stays sorted.
        for (i, up) in upper.into_iter().enumerate() {
            for &j in &up {
                members[j as usize].push(i as u32);
            }
            members[i].push(i as u32);
            members[i].extend_from_slice(&up);
        }
        Ok(FeatureBalls { radius, members })
    }
}

/// Euclidean balls around the propagated features.
pub fn build_feature_balls(ps: &PropagationState, radius: f64) -> Result<FeatureBalls> {
    FeatureBalls::with_metric(&ps.propagated, radius, euclidean)
}

/// `EDV(S)` evaluated directly from its definition.
pub fn edv(g: &Hypergraph, seeds: &[NodeId], beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    let neighbors = g.neighborhood_of_set(&seeds)?;
    let mut total = seeds.len() as f64;
    for v in neighbors {
        let mut evade = 1.0;
        for u in g.neighbors_unchecked(v) {
            if seeds.binary_search(&u).is_ok() {
                let share = g.shared_unchecked(u, v) as f64 / g.node_degree(u) as f64;
                evade *= 1.0 - beta * share;
            }
        }
        total += 1.0 - evade;
    }
    Ok(total)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must lie in (0, 1)",
        });
    }
    Ok(())
}

/// `γ moi/moi_hat + (1-γ) edv/edv_hat`.
pub fn unified_objective(
    moi: usize,
    edv: f64,
    moi_hat: f64,
    edv_hat: f64,
    gamma: f64,
) -> Result<f64> {
    check_unit_interval("gamma", gamma)?;
    check_normalizers(moi_hat, edv_hat)?;
    Ok(gamma * moi as f64 / moi_hat + (1.0 - gamma) * edv / edv_hat)
}

fn check_normalizers(moi_hat: f64, edv_hat: f64) -> Result<()> {
    if moi_hat.is_nan() || moi_hat <= 0.0 {
        return Err(Error::ZeroNormalizer {
            which: "MoI",
            hint: "theta leaves every activation set empty",
        });
    }
    if edv_hat.is_nan() || edv_hat <= 0.0 {
        return Err(Error::ZeroNormalizer {
            which: "EDV",
            hint: "hypergraph has no nodes",
        });
    }
    Ok(())
}

/// `(MoI(V), EDV(V))`. Requires activation sets for every node.
pub fn normalizers(
    g: &Hypergraph,
    acts: &ActivationSets,
    balls: &FeatureBalls,
    beta: f64,
) -> Result<(usize, f64)> {
    check_beta(beta)?;
    if !acts.covers_all_nodes() {
        return Err(Error::MissingData(format!(
            "normalizers need activation sets for all {} nodes, have {}",
            acts.num_nodes(),
            acts.candidates().len()
        )));
    }
    let n = g.num_nodes();
    let activated = acts.activated_by(acts.candidates())?;
    let mut covered = FixedBitSet::with_capacity(n);
    for j in activated {
        for &x in balls.ball(j) {
            covered.insert(x as usize);
        }
    }
    let moi_hat = covered.count_ones(..);
    if moi_hat == 0 {
        return Err(Error::ZeroNormalizer {
            which: "MoI",
            hint: "theta leaves every activation set empty",
        });
    }
    let all: Vec<NodeId> = (0..n).collect();
    Ok((moi_hat, edv(g, &all, beta)?))
}

/// Change in `MoI` and `EDV` caused by adding one seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gain {
    pub moi: usize,
    pub edv: f64,
}

/// `(MoI, EDV, F)` at some seed set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub moi: usize,
    pub edv: f64,
    pub objective: f64,
}

/// Incremental state for a growing seed set.
#[derive(Clone, Debug)]
pub struct CoverageState {
    seeds: Vec<NodeId>,
    is_seed: FixedBitSet,
    activated: FixedBitSet,
    covered: FixedBitSet,
    evasion: Vec<f64>,
    moi: usize,
    edv: f64,
}

impl CoverageState {
    pub fn new(num_nodes: usize) -> Self {
        CoverageState {
            seeds: Vec::new(),
            is_seed: FixedBitSet::with_capacity(num_nodes),
            activated: FixedBitSet::with_capacity(num_nodes),
            covered: FixedBitSet::with_capacity(num_nodes),
            evasion: vec![1.0; num_nodes],
            moi: 0,
            edv: 0.0,
        }
    }

    /// Seeds in insertion order.
    pub fn seeds(&self) -> &[NodeId] {
        &self.seeds
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.is_seed.contains(v)
    }

    pub fn moi(&self) -> usize {
        self.moi
    }

    pub fn edv(&self) -> f64 {
        self.edv
    }

    pub fn activated(&self) -> &FixedBitSet {
        &self.activated
    }

    pub fn covered(&self) -> &FixedBitSet {
        &self.covered
    }

    /// Probability that `v` evades every adjacent seed.
    pub fn evasion(&self, v: NodeId) -> f64 {
        self.evasion[v]
    }
}

/// Reusable marker buffer for dry-run gain evaluation.
#[derive(Clone, Debug)]
pub struct GainScratch {
    stamp: Vec<u32>,
    epoch: u32,
}

impl GainScratch {
    pub fn new(num_nodes: usize) -> Self {
        GainScratch {
            stamp: vec![0; num_nodes],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }
}

/// The selection objective bound to its structures and parameters.
#[derive(Debug)]
pub struct Objective<'a> {
    graph: &'a Hypergraph,
    activations: &'a ActivationSets,
    balls: &'a FeatureBalls,
    beta: f64,
    gamma: f64,
    moi_hat: f64,
    edv_hat: f64,
    // neighbor lists with (β n_{v,w} / n_v) precomputed
    nb_offsets: Vec<usize>,
    nb_nodes: Vec<NodeId>,
    nb_prob: Vec<f64>,
}

impl<'a> Objective<'a> {
    pub fn new(
        graph: &'a Hypergraph,
        activations: &'a ActivationSets,
        balls: &'a FeatureBalls,
        beta: f64,
        gamma: f64,
        moi_hat: f64,
        edv_hat: f64,
    ) -> Result<Self> {
        check_beta(beta)?;
        check_unit_interval("gamma", gamma)?;
        check_normalizers(moi_hat, edv_hat)?;
        let n = graph.num_nodes();
        if activations.num_nodes() != n || balls.num_nodes() != n {
            return Err(Error::Shape(format!(
                "hypergraph has {n} nodes, activation sets {}, balls {}",
                activations.num_nodes(),
                balls.num_nodes()
            )));
        }

        let mut nb_offsets = Vec::with_capacity(n + 1);
        nb_offsets.push(0);
        let mut nb_nodes = Vec::new();
        let mut nb_prob = Vec::new();
        let mut shared = vec![0usize; n];
        let mut touched = Vec::new();
        for v in 0..n {
            for &e in graph.edges_of(v) {
                for &w in graph.nodes_of(e) {
                    if w != v {
                        if shared[w] == 0 {
                            touched.push(w);
                        }
                        shared[w] += 1;
                    }
                }
            }
            touched.sort_unstable();
            let degree = graph.node_degree(v) as f64;
            for &w in &touched {
                nb_nodes.push(w);
                nb_prob.push(beta * shared[w] as f64 / degree);
                shared[w] = 0;
            }
            touched.clear();
            nb_offsets.push(nb_nodes.len());
        }

        Ok(Objective {
            graph,
            activations,
            balls,
            beta,
            gamma,
            moi_hat,
            edv_hat,
            nb_offsets,
            nb_nodes,
            nb_prob,
        })
    }

    pub fn graph(&self) -> &Hypergraph {
        self.graph
    }

    pub fn activations(&self) -> &ActivationSets {
        self.activations
    }

    pub fn balls(&self) -> &FeatureBalls {
        self.balls
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn normalizers(&self) -> (f64, f64) {
        (self.moi_hat, self.edv_hat)
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn empty_state(&self) -> CoverageState {
        CoverageState::new(self.num_nodes())
    }

    pub fn scratch(&self) -> GainScratch {
        GainScratch::new(self.num_nodes())
    }

    /// `F` at given component values.
    pub fn combine(&self, moi: usize, edv: f64) -> f64 {
        self.gamma * moi as f64 / self.moi_hat + (1.0 - self.gamma) * edv / self.edv_hat
    }

    /// `F(S ∪ {v}) - F(S)` for a component gain.
    pub fn objective_gain(&self, gain: Gain) -> f64 {
        self.combine(gain.moi, gain.edv)
    }

    pub fn value(&self, state: &CoverageState) -> f64 {
        self.combine(state.moi, state.edv)
    }

    fn neighbors(&self, v: NodeId) -> (&[NodeId], &[f64]) {
        let r = self.nb_offsets[v]..self.nb_offsets[v + 1];
        (&self.nb_nodes[r.clone()], &self.nb_prob[r])
    }

    fn check_addable(&self, state: &CoverageState, v: NodeId) -> Result<&[NodeId]> {
        if v >= self.num_nodes() {
            return Err(Error::NodeOutOfRange {
                node: v,
                num_nodes: self.num_nodes(),
            });
        }
        if state.contains(v) {
            return Err(Error::AlreadySeeded { node: v });
        }
        self.activations
            .get(v)
            .ok_or(Error::NotACandidate { node: v })
    }

    // Shared by `gain` and `add`; the two must agree bit for bit.
    fn edv_gain(&self, state: &CoverageState, v: NodeId) -> f64 {
        let (nodes, prob) = self.neighbors(v);
        let mut delta = state.evasion[v];
        for (&w, &p) in nodes.iter().zip(prob) {
            if !state.is_seed.contains(w) {
                delta += state.evasion[w] * p;
            }
        }
        delta
    }

    /// Component gains of adding `v`, without touching `state`.
    pub fn gain(
        &self,
        state: &CoverageState,
        v: NodeId,
        scratch: &mut GainScratch,
    ) -> Result<Gain> {
        let act = self.check_addable(state, v)?;
        let epoch = scratch.next_epoch();
        let mut moi = 0;
        for &j in act {
            if state.activated.contains(j) {
                continue;
            }
            for &x in self.balls.ball(j) {
                let x = x as usize;
                if !state.covered.contains(x) && scratch.stamp[x] != epoch {
                    scratch.stamp[x] = epoch;
                    moi += 1;
                }
            }
        }
        Ok(Gain {
            moi,
            edv: self.edv_gain(state, v),
        })
    }

    /// Adds `v` to the seed set and returns the realized gain.
    pub fn add(&self, state: &mut CoverageState, v: NodeId) -> Result<Gain> {
        let act = self.check_addable(state, v)?;
        let mut moi = 0;
        for &j in act {
            if state.activated.put(j) {
                continue;
            }
            for &x in self.balls.ball(j) {
                if !state.covered.put(x as usize) {
                    moi += 1;
                }
            }
        }
        let edv = self.edv_gain(state, v);
        let (nodes, prob) = self.neighbors(v);
        for (&w, &p) in nodes.iter().zip(prob) {
            if !state.is_seed.contains(w) {
                state.evasion[w] *= 1.0 - p;
            }
        }
        state.is_seed.insert(v);
        state.seeds.push(v);
        state.moi += moi;
        state.edv += edv;
        Ok(Gain { moi, edv })
    }

    /// Builds the state for `seeds` by successive additions.
    pub fn state_for(&self, seeds: &[NodeId]) -> Result<CoverageState> {
        let mut state = self.empty_state();
        for &v in seeds {
            self.add(&mut state, v)?;
        }
        Ok(state)
    }

    pub fn evaluate(&self, seeds: &[NodeId]) -> Result<Evaluation> {
        let state = self.state_for(seeds)?;
        Ok(Evaluation {
            moi: state.moi,
            edv: state.edv,
            objective: self.value(&state),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{build_hoi_transition, influence_columns, propagate};
    use hyperseed_oracle as oracle;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        graph: Hypergraph,
        acts: ActivationSets,
        balls: FeatureBalls,
        inst: oracle::Instance,
    }

    fn fixture(rng: &mut ChaCha8Rng, max_n: usize, radius: Option<f64>) -> Fixture {
        let n = rng.random_range(3..=max_n);
        let m = rng.random_range(2..=2 * n);
        let edges: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let size = rng.random_range(1..=4);
                (0..size).map(|_| rng.random_range(0..n)).collect()
            })
            .collect();
        let graph = Hypergraph::build(n, &edges).unwrap();
        let x: Vec<f64> = (0..n * 3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x0 = FeatureMatrix::new(n, 3, x).unwrap();
        let t = build_hoi_transition(&graph);
        let k = rng.random_range(1..=3);
        let alpha = rng.random_range(0.1..0.9);
        let ps = propagate(&t, &x0, k, alpha).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let ic = influence_columns(&t, &all, k, alpha).unwrap();
        let theta = rng.random_range(0.02..0.4);
        let acts = build_activation_sets(&ic, theta).unwrap();
        let radius = radius.unwrap_or_else(|| rng.random_range(0.0..0.8));
        let balls = build_feature_balls(&ps, radius).unwrap();
        let m_dense = oracle::dense_influence_matrix(&t.to_dense(), k, alpha).unwrap();
        let inst = oracle::Instance {
            n,
            edges: graph.edge_lists(),
            influence: oracle::normalized_influence(&m_dense),
            features: ps.propagated.to_rows(),
            theta,
            radius,
            beta: rng.random_range(0.05..0.95),
            gamma: rng.random_range(0.0..=1.0),
            moi_hat: 1.0,
            edv_hat: 1.0,
        };
        Fixture {
            graph,
            acts,
            balls,
            inst,
        }
    }

    fn objective(f: &Fixture) -> Objective<'_> {
        let (mh, eh) = normalizers(&f.graph, &f.acts, &f.balls, f.inst.beta)
            .unwrap_or((1, f.graph.num_nodes() as f64));
        Objective::new(
            &f.graph,
            &f.acts,
            &f.balls,
            f.inst.beta,
            f.inst.gamma,
            mh as f64,
            eh,
        )
        .unwrap()
    }

    #[test]
    fn edv_worked_examples() {
        let g = Hypergraph::build(2, &[vec![0, 1]]).unwrap();
        assert!((edv(&g, &[0], 0.1).unwrap() - 1.1).abs() < 1e-12);
        assert_eq!(edv(&g, &[], 0.1).unwrap(), 0.0);
        let g = Hypergraph::build(3, &[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        assert!((edv(&g, &[0, 1], 0.5).unwrap() - 2.4375).abs() < 1e-12);
        assert!(edv(&g, &[0], 1.0).is_err());
        assert!(edv(&g, &[0], 0.0).is_err());
    }

    #[test]
    fn isolated_seed_counts_once() {
        let g = Hypergraph::build(3, &[vec![0, 1]]).unwrap();
        assert_eq!(edv(&g, &[2], 0.3).unwrap(), 1.0);
    }

    #[test]
    fn unified_objective_arithmetic() {
        assert_eq!(unified_objective(5, 2.0, 10.0, 4.0, 0.5).unwrap(), 0.5);
        assert_eq!(unified_objective(5, 2.0, 10.0, 4.0, 1.0).unwrap(), 0.5);
        assert_eq!(unified_objective(5, 3.0, 10.0, 4.0, 0.0).unwrap(), 0.75);
        assert!(matches!(
            unified_objective(5, 2.0, 0.0, 4.0, 0.5),
            Err(Error::ZeroNormalizer { .. })
        ));
        assert!(unified_objective(5, 2.0, 1.0, 4.0, 1.5).is_err());
    }

    #[test]
    fn activation_threshold_extremes() {
        let g = Hypergraph::build(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap();
        let t = build_hoi_transition(&g);
        let ic = influence_columns(&t, &[0, 1, 2, 3], 2, 0.5).unwrap();
        let acts = build_activation_sets(&ic, 1.0).unwrap();
        assert!((0..4).all(|u| acts.get(u).unwrap().is_empty()));
        let acts = build_activation_sets(&ic, 0.0).unwrap();
        for u in 0..4 {
            let support: Vec<usize> = ic
                .column(u)
                .unwrap()
                .iter()
                .filter(|p| p.1 > 0.0)
                .map(|p| p.0)
                .collect();
            assert_eq!(acts.get(u).unwrap(), support.as_slice());
        }
        assert!(build_activation_sets(&ic, -0.1).is_err());
    }

    #[test]
    fn activation_sets_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let f = fixture(&mut rng, 8, None);
            for u in 0..f.inst.n {
                let expect: Vec<usize> = f.inst.sigma(&[u]).into_iter().collect();
                assert_eq!(f.acts.get(u).unwrap(), expect.as_slice());
            }
            // union identity on random seed sets
            let mut nodes: Vec<usize> = (0..f.inst.n).collect();
            nodes.shuffle(&mut rng);
            let s = &nodes[..rng.random_range(0..=f.inst.n)];
            let expect: Vec<usize> = f.inst.sigma(s).into_iter().collect();
            assert_eq!(f.acts.activated_by(s).unwrap(), expect);
        }
    }

    #[test]
    fn balls_edge_cases() {
        let x = FeatureMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]).unwrap();
        let b = FeatureBalls::with_metric(&x, 0.0, euclidean).unwrap();
        for u in 0..3 {
            assert_eq!(b.ball(u), &[u as u32]);
        }
        let b = FeatureBalls::with_metric(&x, f64::INFINITY, euclidean).unwrap();
        for u in 0..3 {
            assert_eq!(b.ball(u), &[0, 1, 2]);
        }
        // inclusive threshold
        let b = FeatureBalls::with_metric(&x, 1.0, euclidean).unwrap();
        assert_eq!(b.ball(0), &[0, 1]);
        assert!(FeatureBalls::with_metric(&x, -1.0, euclidean).is_err());
        assert!(FeatureBalls::with_metric(&x, f64::NAN, euclidean).is_err());
    }

    #[test]
    fn balls_match_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let f = fixture(&mut rng, 8, None);
            for u in 0..f.inst.n {
                let expect: Vec<u32> = f.inst.ball(u).into_iter().map(|v| v as u32).collect();
                assert_eq!(f.balls.ball(u), expect.as_slice());
                for &v in f.balls.ball(u) {
                    assert!(f.balls.ball(v as usize).contains(&(u as u32)));
                }
            }
        }
    }

    #[test]
    fn incremental_matches_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let f = fixture(&mut rng, 12, None);
            let obj = objective(&f);
            let mut inst = f.inst.clone();
            (inst.moi_hat, inst.edv_hat) = obj.normalizers();
            let mut order: Vec<usize> = (0..inst.n).collect();
            order.shuffle(&mut rng);
            let mut state = obj.empty_state();
            let mut scratch = obj.scratch();
            for (step, &v) in order.iter().take(5).enumerate() {
                let before = obj.value(&state);
                let dry = obj.gain(&state, v, &mut scratch).unwrap();
                let real = obj.add(&mut state, v).unwrap();
                assert_eq!(dry, real);
                let (moi, edv_val, fval) = inst.objective(&order[..=step]);
                assert_eq!(state.moi(), moi);
                assert!((state.edv() - edv_val).abs() <= 1e-9);
                assert!((obj.value(&state) - fval).abs() <= 1e-9);
                assert!((obj.objective_gain(real) - (fval - before)).abs() <= 1e-9);
                assert!(matches!(
                    obj.add(&mut state, v),
                    Err(Error::AlreadySeeded { .. })
                ));
            }
        }
    }

    #[test]
    fn first_addition_and_saturation() {
        let g = Hypergraph::build(4, &[vec![0, 1], vec![1, 2], vec![3]]).unwrap();
        let acts = ActivationSets::from_sets(4, 0.1, (0..4).map(|u| (u, vec![0, 1]))).unwrap();
        let x = FeatureMatrix::from_rows(&[[0.0], [0.5], [3.0], [9.0]]).unwrap();
        let balls = FeatureBalls::with_metric(&x, 0.6, euclidean).unwrap();
        let obj = Objective::new(&g, &acts, &balls, 0.4, 0.5, 2.0, 4.0).unwrap();
        let mut state = obj.empty_state();
        obj.add(&mut state, 1).unwrap();
        assert_eq!(state.moi(), 2);
        assert!((state.edv() - edv(&g, &[1], 0.4).unwrap()).abs() < 1e-12);
        // node 3 activates nothing new and has no neighbors
        let mut scratch = obj.scratch();
        let gain = obj.gain(&state, 3, &mut scratch).unwrap();
        assert_eq!(gain.moi, 0);
        assert_eq!(gain.edv, 1.0);
        for v in 0..4 {
            assert!(state.evasion(v) > 0.0 && state.evasion(v) <= 1.0);
        }
        assert_eq!(state.evasion(3), 1.0);
        assert!(state.evasion(0) < 1.0);
    }

    #[test]
    fn edv_bounds_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let f = fixture(&mut rng, 15, None);
            let mut nodes: Vec<usize> = (0..f.inst.n).collect();
            nodes.shuffle(&mut rng);
            let s = &nodes[..rng.random_range(0..=f.inst.n)];
            let value = edv(&f.graph, s, f.inst.beta).unwrap();
            let frontier = f.graph.neighborhood_of_set(s).unwrap().len();
            assert!(value >= s.len() as f64 - 1e-12);
            assert!(value <= (s.len() + frontier) as f64 + 1e-12);
        }
    }

    #[test]
    fn zero_radius_reduces_to_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..50 {
            let f = fixture(&mut rng, 10, Some(0.0));
            let obj = objective(&f);
            let s: Vec<usize> = (0..f.inst.n).filter(|_| rng.random_bool(0.3)).collect();
            let state = obj.state_for(&s).unwrap();
            assert_eq!(state.moi(), f.inst.sigma(&s).len());
        }
    }
}
