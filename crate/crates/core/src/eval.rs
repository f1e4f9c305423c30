//! Seed-set quality proxy: label propagation from the labelled seeds.
//!
//! Seed labels are one-hot encoded and spread with the same recurrence used
//! for features. Each node takes the class with the largest score; nodes the
//! labels never reach take the most common seed class.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::hypergraph::NodeId;
use crate::propagation::{propagate, TransitionMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// Predicted class per node.
    pub predictions: Vec<usize>,
    /// Accuracy on the evaluation nodes.
    pub accuracy: f64,
    /// Accuracy on the seeds themselves.
    pub train_fit: f64,
    /// Nodes reached by at least one seed label.
    pub reached: usize,
}

fn accuracy(pred: &[usize], labels: &[usize], nodes: &[NodeId]) -> f64 {
    if nodes.is_empty() {
        return f64::NAN;
    }
    let hits = nodes.iter().filter(|&&v| pred[v] == labels[v]).count();
    hits as f64 / nodes.len() as f64
}

/// Labels every node from the labels of `seeds` and scores the result on
/// `eval_nodes`.
pub fn label_propagation(
    t: &TransitionMatrix,
    labels: &[usize],
    num_classes: usize,
    seeds: &[NodeId],
    eval_nodes: &[NodeId],
    steps: usize,
    alpha: f64,
) -> Result<EvalReport> {
    let n = t.size();
    if labels.len() != n {
        return Err(Error::Shape(format!(
            "{} labels for {n} nodes",
            labels.len()
        )));
    }
    if seeds.is_empty() {
        return Err(Error::MissingData("seed set is empty".into()));
    }
    for &v in seeds.iter().chain(eval_nodes) {
        if v >= n {
            return Err(Error::NodeOutOfRange {
                node: v,
                num_nodes: n,
            });
        }
    }
    if let Some(&c) = labels.iter().find(|&&c| c >= num_classes) {
        return Err(Error::Shape(format!(
            "class {c} out of range for {num_classes} classes"
        )));
    }

    let mut y0 = FeatureMatrix::zeros(n, num_classes);
    let mut votes = vec![0usize; num_classes];
    for &s in seeds {
        y0.row_mut(s)[labels[s]] = 1.0;
        votes[labels[s]] += 1;
    }
    let fallback = argmax(votes.iter().map(|&c| c as f64));
    let scores = propagate(t, &y0, steps, alpha)?.propagated;

    let mut reached = 0;
    let predictions: Vec<usize> = (0..n)
        .map(|v| {
            let row = scores.row(v);
            if row.iter().all(|&x| x == 0.0) {
                fallback
            } else {
                reached += 1;
                argmax(row.iter().copied())
            }
        })
        .collect();

    let mut seed_list = seeds.to_vec();
    seed_list.sort_unstable();
    seed_list.dedup();
    Ok(EvalReport {
        accuracy: accuracy(&predictions, labels, eval_nodes),
        train_fit: accuracy(&predictions, labels, &seed_list),
        predictions,
        reached,
    })
}

/// First index of the maximum.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, x) in values.enumerate() {
        if x > best.1 {
            best = (i, x);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;
    use crate::propagation::Backend;

    fn two_blocks() -> (TransitionMatrix, Vec<usize>) {
        let g = Hypergraph::build(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        (
            TransitionMatrix::build(&g, Backend::Hoi),
            vec![0, 0, 0, 1, 1, 1],
        )
    }

    #[test]
    fn one_seed_per_block_is_perfect() {
        let (t, labels) = two_blocks();
        let all: Vec<_> = (0..6).collect();
        let r = label_propagation(&t, &labels, 2, &[0, 3], &all, 2, 0.5).unwrap();
        assert_eq!(r.predictions, labels);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.reached, 6);
    }

    #[test]
    fn unreached_nodes_take_majority_seed_class() {
        let (t, labels) = two_blocks();
        let r = label_propagation(&t, &labels, 2, &[0], &[3, 4, 5], 2, 0.5).unwrap();
        assert_eq!(r.reached, 3);
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.train_fit, 1.0);
    }

    #[test]
    fn all_seeded_accuracy_equals_fit() {
        let (t, labels) = two_blocks();
        let all: Vec<_> = (0..6).collect();
        let r = label_propagation(&t, &labels, 2, &all, &all, 3, 0.5).unwrap();
        assert_eq!(r.accuracy, r.train_fit);
    }

    #[test]
    fn empty_seed_set_rejected() {
        let (t, labels) = two_blocks();
        assert!(matches!(
            label_propagation(&t, &labels, 2, &[], &[0], 2, 0.5),
            Err(Error::MissingData(_))
        ));
    }
}
