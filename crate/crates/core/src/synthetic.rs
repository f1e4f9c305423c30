//! Seeded random instances for tests, benchmarks and demos.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureMatrix;
use crate::hypergraph::{Hypergraph, NodeId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` hyperedges over `n` nodes, each with a uniform size in
/// `min_size..=max_size` (capped at `n`) and uniformly chosen members.
pub fn random_edges<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    min_size: usize,
    max_size: usize,
) -> Vec<Vec<NodeId>> {
    assert!(n > 0 && min_size >= 1 && min_size <= max_size);
    (0..m)
        .map(|_| {
            let size = rng.random_range(min_size..=max_size).min(n);
            sample(rng, n, size).into_vec()
        })
        .collect()
}

pub fn random_hypergraph<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    min_size: usize,
    max_size: usize,
) -> Hypergraph {
    Hypergraph::build(n, &random_edges(rng, n, m, min_size, max_size))
        .expect("valid by construction")
}

/// Entries uniform in `[-1, 1)`.
pub fn random_features<R: Rng>(rng: &mut R, n: usize, d: usize) -> FeatureMatrix {
    let data = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    FeatureMatrix::new(n, d, data).expect("shape matches")
}

/// Labelled instance with planted classes.
#[derive(Clone, Debug)]
pub struct Planted {
    pub graph: Hypergraph,
    pub features: FeatureMatrix,
    pub labels: Vec<usize>,
}

/// Classes laid out as contiguous arcs of a ring of `n` nodes, all with
/// `n / classes` members. Every hyperedge covers a window of consecutive
/// nodes of size `edge_size`; with probability `noise` one member is
/// replaced by a uniformly random node. Features are a noisy position on
/// the ring, so nearby nodes look alike.
pub fn ring_communities(
    seed: u64,
    n: usize,
    classes: usize,
    edge_size: usize,
    noise: f64,
) -> Planted {
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(n);
    for start in 0..n {
        let mut e: Vec<NodeId> = (0..edge_size).map(|i| (start + i) % n).collect();
        if rng.random_bool(noise) {
            let slot = rng.random_range(0..edge_size);
            e[slot] = rng.random_range(0..n);
        }
        edges.push(e);
    }
    let block = n.div_ceil(classes);
    let labels = (0..n).map(|v| v / block).collect();
    let data = (0..n)
        .flat_map(|v| {
            let angle = std::f64::consts::TAU * v as f64 / n as f64;
            let jitter = 0.05 * rng.random_range(-1.0..1.0);
            [angle.cos() + jitter, angle.sin() - jitter]
        })
        .collect();
    Planted {
        graph: Hypergraph::build(n, &edges).expect("valid by construction"),
        features: FeatureMatrix::new(n, 2, data).expect("shape matches"),
        labels,
    }
}

/// Large sparse instance: edge sizes uniform in `2..=8` (mean 5).
pub fn scale_instance(seed: u64, n: usize, m: usize, dims: usize) -> (Hypergraph, FeatureMatrix) {
    let mut rng = rng(seed);
    let g = random_hypergraph(&mut rng, n, m, 2, 8);
    let x = random_features(&mut rng, n, dims);
    (g, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = random_edges(&mut rng(3), 20, 10, 1, 4);
        let b = random_edges(&mut rng(3), 20, 10, 1, 4);
        assert_eq!(a, b);
        assert!(a.iter().all(|e| (1..=4).contains(&e.len())));
    }

    #[test]
    fn ring_labels_balanced() {
        let p = ring_communities(1, 40, 2, 3, 0.1);
        assert_eq!(p.labels.iter().filter(|&&c| c == 0).count(), 20);
        assert_eq!(p.graph.num_edges(), 40);
    }
}
