//! Immutable sparse hypergraph.
//!
//! The binary incidence relation is stored twice, once per direction, as
//! compressed adjacency arrays: `edges_of(v)` lists the hyperedges containing
//! `v` and `nodes_of(e)` lists the members of `e`, both sorted ascending.
//! Everything downstream (transition construction, one-hop neighborhoods,
//! shared-edge counts) is answered from these two indices.

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    num_nodes: usize,
    node_offsets: Vec<usize>,
    node_edges: Vec<EdgeId>,
    edge_offsets: Vec<usize>,
    edge_nodes: Vec<NodeId>,
}

impl Hypergraph {
    /// Builds a hypergraph over nodes `0..num_nodes` from one member list per
    /// hyperedge. Repeated members inside a list are collapsed; a list that is
    /// empty is rejected.
    pub fn build<E: AsRef<[NodeId]>>(num_nodes: usize, edges: &[E]) -> Result<Self> {
        let mut edge_offsets = Vec::with_capacity(edges.len() + 1);
        edge_offsets.push(0);
        let mut edge_nodes = Vec::new();
        let mut node_degree = vec![0usize; num_nodes];
        for (e, members) in edges.iter().enumerate() {
            let start = edge_nodes.len();
            for &v in members.as_ref() {
                if v >= num_nodes {
                    return Err(Error::NodeOutOfRange { node: v, num_nodes });
                }
                edge_nodes.push(v);
            }
            edge_nodes[start..].sort_unstable();
            let mut write = start;
            for read in start..edge_nodes.len() {
                if write == start || edge_nodes[read] != edge_nodes[write - 1] {
                    edge_nodes[write] = edge_nodes[read];
                    write += 1;
                }
            }
            edge_nodes.truncate(write);
            if write == start {
                return Err(Error::EmptyHyperedge { edge: e });
            }
            for &v in &edge_nodes[start..] {
                node_degree[v] += 1;
            }
            edge_offsets.push(edge_nodes.len());
        }

        let mut node_offsets = Vec::with_capacity(num_nodes + 1);
        node_offsets.push(0);
        for d in &node_degree {
            node_offsets.push(node_offsets.last().unwrap() + d);
        }
        // Filling by ascending edge id leaves every node's list sorted.
        let mut cursor = node_offsets[..num_nodes].to_vec();
        let mut node_edges = vec![0; edge_nodes.len()];
        for e in 0..edges.len() {
            for &v in &edge_nodes[edge_offsets[e]..edge_offsets[e + 1]] {
                node_edges[cursor[v]] = e;
                cursor[v] += 1;
            }
        }

        Ok(Hypergraph {
            num_nodes,
            node_offsets,
            node_edges,
            edge_offsets,
            edge_nodes,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edge_offsets.len() - 1
    }

    /// Number of (node, hyperedge) incidence pairs.
    pub fn num_incidences(&self) -> usize {
        self.edge_nodes.len()
    }

    pub fn edges_of(&self, v: NodeId) -> &[EdgeId] {
        &self.node_edges[self.node_offsets[v]..self.node_offsets[v + 1]]
    }

    pub fn nodes_of(&self, e: EdgeId) -> &[NodeId] {
        &self.edge_nodes[self.edge_offsets[e]..self.edge_offsets[e + 1]]
    }

    /// `d(v)`, the number of hyperedges containing `v`.
    pub fn node_degree(&self, v: NodeId) -> usize {
        self.node_offsets[v + 1] - self.node_offsets[v]
    }

    /// `δ(e)`, the number of members of `e`.
    pub fn edge_degree(&self, e: EdgeId) -> usize {
        self.edge_offsets[e + 1] - self.edge_offsets[e]
    }

    pub fn node_degrees(&self) -> Vec<usize> {
        (0..self.num_nodes).map(|v| self.node_degree(v)).collect()
    }

    pub fn edge_degrees(&self) -> Vec<usize> {
        (0..self.num_edges()).map(|e| self.edge_degree(e)).collect()
    }

    /// Member lists, one per hyperedge.
    pub fn edge_lists(&self) -> Vec<Vec<NodeId>> {
        (0..self.num_edges())
            .map(|e| self.nodes_of(e).to_vec())
            .collect()
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v >= self.num_nodes {
            return Err(Error::NodeOutOfRange {
                node: v,
                num_nodes: self.num_nodes,
            });
        }
        Ok(())
    }

    /// Number of hyperedges containing both `u` and `v`.
    pub fn shared_edge_count(&self, u: NodeId, v: NodeId) -> Result<usize> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SameNode { node: u });
        }
        Ok(self.shared_unchecked(u, v))
    }

    pub(crate) fn shared_unchecked(&self, u: NodeId, v: NodeId) -> usize {
        let (a, b) = (self.edges_of(u), self.edges_of(v));
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Nodes other than `v` that share at least one hyperedge with it, sorted.
    pub fn one_hop_neighbors(&self, v: NodeId) -> Result<Vec<NodeId>> {
        self.check(v)?;
        Ok(self.neighbors_unchecked(v))
    }

    pub(crate) fn neighbors_unchecked(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges_of(v)
            .iter()
            .flat_map(|&e| self.nodes_of(e).iter().copied())
            .filter(|&w| w != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Union of the one-hop neighborhoods of `seeds`, minus the seeds
    /// themselves. Sorted.
    pub fn neighborhood_of_set(&self, seeds: &[NodeId]) -> Result<Vec<NodeId>> {
        let mut is_seed = vec![false; self.num_nodes];
        for &u in seeds {
            self.check(u)?;
            is_seed[u] = true;
        }
        let mut seen = vec![false; self.num_nodes];
        let mut out = Vec::new();
        for &u in seeds {
            for &e in self.edges_of(u) {
                for &w in self.nodes_of(e) {
                    if !is_seed[w] && !seen[w] {
                        seen[w] = true;
                        out.push(w);
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}
