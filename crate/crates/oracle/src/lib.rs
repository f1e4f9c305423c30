//! Brute-force reference evaluations for the `hyperseed` test suites.
//!
//! Everything here works on plain edge lists and dense `Vec<Vec<f64>>`
//! matrices and shares no code with the production crate: the
//! incidence matrix is materialized explicitly, matrix products are triple
//! loops, set functions are evaluated straight from their definitions.
//! Size guards keep these routines out of anything larger than a unit test.

use std::collections::BTreeSet;

/// Dense row-major matrix.
pub type Dense = Vec<Vec<f64>>;

/// Largest node count accepted by the dense routines.
pub const DENSE_LIMIT: usize = 2000;

/// Largest number of subsets `exhaustive_best_subset` will enumerate.
pub const SUBSET_LIMIT: u128 = 1_000_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("dense oracle limited to {limit} nodes, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("enumeration of C({pool}, {budget}) subsets exceeds the guard")]
    TooManySubsets { pool: usize, budget: usize },
    #[error("budget {budget} exceeds pool size {pool}")]
    BudgetTooLarge { pool: usize, budget: usize },
}

fn guard(n: usize) -> Result<(), OracleError> {
    if n > DENSE_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

pub fn zeros(rows: usize, cols: usize) -> Dense {
    vec![vec![0.0; cols]; rows]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn transpose(a: &Dense) -> Dense {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut t = zeros(cols, rows);
    for i in 0..rows {
        for j in 0..cols {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut c = zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = 0.0;
            for l in 0..inner {
                acc += a[i][l] * b[l][j];
            }
            c[i][j] = acc;
        }
    }
    c
}

fn axpby(alpha: f64, a: &Dense, beta: f64, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| alpha * x + beta * y)
                .collect()
        })
        .collect()
}

/// Binary incidence matrix `H` (n x m) with duplicate members collapsed.
pub fn incidence(n: usize, edges: &[Vec<usize>]) -> Dense {
    let mut h = zeros(n, edges.len());
    for (e, members) in edges.iter().enumerate() {
        for &v in members {
            h[v][e] = 1.0;
        }
    }
    h
}

/// Common-neighbor weights `l_ij = sum_e h_ie h_je (|e| - 1)` for `i != j`,
/// zero diagonal, by a double loop over node pairs and hyperedges.
pub fn common_neighbor_matrix(n: usize, edges: &[Vec<usize>]) -> Dense {
    let h = incidence(n, edges);
    let sizes: Vec<f64> = (0..edges.len())
        .map(|e| (0..n).map(|v| h[v][e] * h[v][e]).sum())
        .collect();
    let mut l = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for e in 0..edges.len() {
                l[i][j] += h[i][e] * h[j][e] * (sizes[e] - 1.0);
            }
        }
    }
    l
}

/// `D^{-1/2} A D^{-1/2}` with `D = diag(A 1)`; zero-degree rows stay zero.
pub fn symmetric_normalize(a: &Dense) -> Dense {
    let n = a.len();
    let scale: Vec<f64> = a
        .iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                1.0 / s.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = scale[i] * a[i][j] * scale[j];
        }
    }
    out
}

/// Normalized common-neighbor transition.
pub fn hoi_transition(n: usize, edges: &[Vec<usize>]) -> Dense {
    symmetric_normalize(&common_neighbor_matrix(n, edges))
}

/// `Dv^{-1/2} H W De^{-1} H^T Dv^{-1/2}` as explicit dense products.
pub fn hgnn_transition(n: usize, edges: &[Vec<usize>], weights: &[f64]) -> Dense {
    let h = incidence(n, edges);
    let m = edges.len();
    let mut dv = zeros(n, n);
    for v in 0..n {
        let d: f64 = h[v].iter().sum();
        dv[v][v] = if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 };
    }
    let mut w_de = zeros(m, m);
    for e in 0..m {
        let delta: f64 = (0..n).map(|v| h[v][e]).sum();
        w_de[e][e] = if delta > 0.0 { weights[e] / delta } else { 0.0 };
    }
    let left = matmul(&matmul(&dv, &h), &w_de);
    matmul(&matmul(&left, &transpose(&h)), &dv)
}

/// `M_k` from `M_0 = I`, `M_t = alpha T M_{t-1} + (1 - alpha) I`.
pub fn dense_influence_matrix(t: &Dense, k: usize, alpha: f64) -> Result<Dense, OracleError> {
    let n = t.len();
    guard(n)?;
    let id = identity(n);
    let mut m = id.clone();
    for _ in 0..k {
        m = axpby(alpha, &matmul(t, &m), 1.0 - alpha, &id);
    }
    Ok(m)
}

/// `X_{t+1} = alpha T X_t + (1 - alpha) X_0`, evaluated `k` times.
pub fn dense_propagate(t: &Dense, x0: &Dense, k: usize, alpha: f64) -> Dense {
    let mut x = x0.clone();
    for _ in 0..k {
        x = axpby(alpha, &matmul(t, &x), 1.0 - alpha, x0);
    }
    x
}

/// Row-normalized influence `I[j][u] = M[j][u] / sum_l M[j][l]`; rows with
/// zero sum stay zero.
pub fn normalized_influence(m: &Dense) -> Dense {
    m.iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter()
                .map(|&x| if s > 0.0 { x / s } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Forward-difference estimate of `d X_j[channel] / d X_i[channel]` for a
/// propagation map `f`.
pub fn finite_difference<F>(f: F, x0: &Dense, j: usize, i: usize, channel: usize, eps: f64) -> f64
where
    F: Fn(&Dense) -> Dense,
{
    let base = f(x0);
    let mut bumped = x0.clone();
    bumped[i][channel] += eps;
    let moved = f(&bumped);
    (moved[j][channel] - base[j][channel]) / eps
}

/// Largest absolute eigenvalue of a symmetric matrix by power iteration.
pub fn spectral_radius(a: &Dense, iterations: usize) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    // A^2 is positive semidefinite, so iterating on it avoids the
    // oscillation between +lambda and -lambda.
    let a2 = matmul(a, a);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.37 % 1.0).collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let y: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a2[i][j] * x[j]).sum())
            .collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        lambda = norm / xnorm;
        x = y.into_iter().map(|v| v / norm).collect();
    }
    lambda.sqrt()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// True maximizer of `objective` over all `budget`-subsets of `pool`.
/// Subsets are enumerated in lexicographic order of sorted pool positions and
/// only a strictly better value replaces the incumbent, so ties resolve to
/// the lexicographically smallest set.
pub fn exhaustive_best_subset<F>(
    objective: F,
    pool: &[usize],
    budget: usize,
) -> Result<(Vec<usize>, f64), OracleError>
where
    F: Fn(&[usize]) -> f64,
{
    if budget > pool.len() {
        return Err(OracleError::BudgetTooLarge {
            pool: pool.len(),
            budget,
        });
    }
    if binomial(pool.len(), budget) > SUBSET_LIMIT {
        return Err(OracleError::TooManySubsets {
            pool: pool.len(),
            budget,
        });
    }
    let mut sorted = pool.to_vec();
    sorted.sort_unstable();
    let mut idx: Vec<usize> = (0..budget).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let set: Vec<usize> = idx.iter().map(|&p| sorted[p]).collect();
        let value = objective(&set);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((set, value));
        }
        // next combination
        let mut pos = budget;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one subset"));
            }
            pos -= 1;
            if idx[pos] < sorted.len() - budget + pos {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..budget {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Everything needed to evaluate the selection objective from its
/// definitions on a small instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
    /// `influence[j][u]`: normalized influence of `u` on `j`.
    pub influence: Dense,
    /// Propagated features, one row per node.
    pub features: Dense,
    pub theta: f64,
    pub radius: f64,
    pub beta: f64,
    pub gamma: f64,
    pub moi_hat: f64,
    pub edv_hat: f64,
}

impl Instance {
    fn shares_edge(&self, u: usize, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.contains(&u) && e.contains(&v))
            .count()
    }

    fn hyperdegree(&self, u: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&u)).count()
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|&w| w != v && self.shares_edge(v, w) > 0)
            .collect()
    }

    /// `{j : max_{u in S} I[j][u] > theta}`.
    pub fn sigma(&self, seeds: &[usize]) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|&j| {
                seeds
                    .iter()
                    .map(|&u| self.influence[j][u])
                    .fold(f64::NEG_INFINITY, f64::max)
                    > self.theta
            })
            .collect()
    }

    fn distance(&self, a: usize, b: usize) -> f64 {
        self.features[a]
            .iter()
            .zip(&self.features[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub fn ball(&self, u: usize) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|&v| self.distance(u, v) <= self.radius)
            .collect()
    }

    pub fn moi(&self, seeds: &[usize]) -> usize {
        let mut covered = BTreeSet::new();
        for u in self.sigma(seeds) {
            covered.extend(self.ball(u));
        }
        covered.len()
    }

    pub fn edv(&self, seeds: &[usize]) -> f64 {
        let seed_set: BTreeSet<usize> = seeds.iter().copied().collect();
        let mut frontier = BTreeSet::new();
        for &u in &seed_set {
            frontier.extend(self.neighbors(u));
        }
        let mut total = seed_set.len() as f64;
        for v in frontier.difference(&seed_set) {
            let nv = self.neighbors(*v);
            let mut evade = 1.0;
            for &u in seed_set.intersection(&nv) {
                evade *=
                    1.0 - self.beta * self.shares_edge(u, *v) as f64 / self.hyperdegree(u) as f64;
            }
            total += 1.0 - evade;
        }
        total
    }

    /// `(MoI(S), EDV(S), F(S))`.
    pub fn objective(&self, seeds: &[usize]) -> (usize, f64, f64) {
        let moi = self.moi(seeds);
        let edv = self.edv(seeds);
        let f = self.gamma * moi as f64 / self.moi_hat + (1.0 - self.gamma) * edv / self.edv_hat;
        (moi, edv, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_neighbors_by_hand() {
        let l = common_neighbor_matrix(3, &[vec![0, 1, 2], vec![1, 2]]);
        assert_eq!(l[1][2], 3.0);
        assert_eq!(l[0][1], 2.0);
        assert_eq!(l[0][0], 0.0);
    }

    #[test]
    fn hgnn_single_pair() {
        let t = hgnn_transition(2, &[vec![0, 1]], &[1.0]);
        for row in &t {
            for &x in row {
                assert!((x - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn influence_identity_at_k0() {
        let t = hoi_transition(3, &[vec![0, 1, 2]]);
        assert_eq!(dense_influence_matrix(&t, 0, 0.7).unwrap(), identity(3));
    }

    #[test]
    fn alpha_one_single_step_is_transition() {
        let t = hoi_transition(4, &[vec![0, 1, 2], vec![2, 3]]);
        assert_eq!(
            dense_influence_matrix(&t, 1, 1.0).unwrap(),
            matmul(&t, &identity(4))
        );
    }

    #[test]
    fn dense_guard() {
        let big = zeros(DENSE_LIMIT + 1, 1);
        assert!(matches!(
            dense_influence_matrix(&big, 1, 0.5),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn exhaustive_small() {
        let (set, value) =
            exhaustive_best_subset(|s| s.iter().sum::<usize>() as f64, &[3, 1, 2], 2).unwrap();
        assert_eq!(set, vec![2, 3]);
        assert_eq!(value, 5.0);
        let (set, _) = exhaustive_best_subset(|_| 1.0, &[5, 4, 6], 3).unwrap();
        assert_eq!(set, vec![4, 5, 6]);
        // ties go to the lexicographically smallest set
        let (set, _) = exhaustive_best_subset(|_| 1.0, &[5, 4, 6], 1).unwrap();
        assert_eq!(set, vec![4]);
    }

    #[test]
    fn exhaustive_guard() {
        let pool: Vec<usize> = (0..100).collect();
        assert!(exhaustive_best_subset(|_| 0.0, &pool, 10).is_err());
    }

    #[test]
    fn spectral_radius_of_diagonal() {
        let a = vec![vec![0.5, 0.0], vec![0.0, -0.9]];
        assert!((spectral_radius(&a, 500) - 0.9).abs() < 1e-9);
    }

    #[test]
    fn edv_worked_examples() {
        let single = Instance {
            n: 2,
            edges: vec![vec![0, 1]],
            influence: identity(2),
            features: zeros(2, 1),
            theta: 0.5,
            radius: 0.0,
            beta: 0.1,
            gamma: 0.5,
            moi_hat: 1.0,
            edv_hat: 1.0,
        };
        assert!((single.edv(&[0]) - 1.1).abs() < 1e-12);
        let triangle = Instance {
            n: 3,
            edges: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
            beta: 0.5,
            influence: identity(3),
            features: zeros(3, 1),
            ..single
        };
        assert!((triangle.edv(&[0, 1]) - 2.4375).abs() < 1e-12);
        assert_eq!(triangle.edv(&[]), 0.0);
    }
}
