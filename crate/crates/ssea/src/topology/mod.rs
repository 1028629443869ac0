//! Interaction graphs used as substrates: generation, persistence, and
//! structural characterization.

mod edge_list;
mod generators;
mod stats;

pub use edge_list::{
    load_edge_list, load_edge_list_weighted, read_edge_list, save_edge_list,
    save_edge_list_weighted, write_edge_list, write_edge_list_weighted, EdgeListError,
};
pub use generators::{configuration_model, gen_complete, gen_er, gen_er_with_links,
    gen_scale_free, gen_scale_free_capped, gen_small_world};
pub use stats::{bfs_distances, stats, GraphStats};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count must be at least 2, got {0}")]
    InvalidSize(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-loop at node {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: u32, n: usize },
    #[error("graph construction failed after {0} attempts")]
    ConstructionFailure(usize),
    #[error("source set must not be empty")]
    EmptySources,
}

/// Undirected interaction graph stored as per-node adjacency lists.
///
/// The panmictic (complete) topology is implicit: adjacency lists are
/// omitted and neighbors are computed on demand, since materializing
/// n(n-1)/2 edges is pointless at the population sizes used here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<u32>>,
    complete: bool,
}

impl Graph {
    /// Build a graph from an undirected edge list. Rejects self-loops,
    /// duplicate edges and out-of-range indices.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::InvalidSize(n));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for e in [u, v] {
                if e as usize >= n {
                    return Err(GraphError::NodeOutOfRange { index: e, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u as u32, w[0]));
            }
        }
        Ok(Graph {
            n,
            adjacency,
            complete: false,
        })
    }

    pub(crate) fn new_complete(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::InvalidSize(n));
        }
        Ok(Graph {
            n,
            adjacency: Vec::new(),
            complete: true,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True for the implicit panmictic topology.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn degree(&self, node: u32) -> usize {
        if self.complete {
            self.n - 1
        } else {
            self.adjacency[node as usize].len()
        }
    }

    /// Sorted neighbor list. Panics on the implicit complete graph, whose
    /// neighborhoods are never materialized; check `is_complete` first.
    pub fn neighbors(&self, node: u32) -> &[u32] {
        assert!(
            !self.complete,
            "neighbors of an implicit complete graph are not materialized"
        );
        &self.adjacency[node as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        if self.complete {
            return (u as usize) < self.n && (v as usize) < self.n;
        }
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Number of undirected edges.
    pub fn n_links(&self) -> u64 {
        if self.complete {
            (self.n as u64) * (self.n as u64 - 1) / 2
        } else {
            self.adjacency.iter().map(|a| a.len() as u64).sum::<u64>() / 2
        }
    }

    /// All undirected edges as (u, v) pairs with u < v, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let n = self.n as u32;
        let complete_range = if self.complete { n } else { 0 };
        (0..complete_range)
            .flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
            .chain(self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
                let u = u as u32;
                nbrs.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
            }))
    }

    pub fn is_connected(&self) -> bool {
        if self.complete {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop() {
            for &v in &self.adjacency[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push(v);
                }
            }
        }
        count == self.n
    }

    /// Component label per node plus the size of each component.
    pub fn components(&self) -> (Vec<u32>, Vec<usize>) {
        if self.complete {
            return (vec![0; self.n], vec![self.n]);
        }
        let mut label = vec![u32::MAX; self.n];
        let mut sizes = Vec::new();
        let mut queue = Vec::new();
        for start in 0..self.n as u32 {
            if label[start as usize] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            let mut size = 1usize;
            label[start as usize] = id;
            queue.push(start);
            while let Some(u) = queue.pop() {
                for &v in &self.adjacency[u as usize] {
                    if label[v as usize] == u32::MAX {
                        label[v as usize] = id;
                        size += 1;
                        queue.push(v);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }
}
