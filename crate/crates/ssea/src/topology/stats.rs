//! Structural characterization: shortest-path metrics (APL, diameter) via
//! BFS from every node, clustering coefficients, and degree statistics.

use rayon::prelude::*;
use serde::Serialize;

use super::{Graph, GraphError};

const UNREACHED: u32 = u32::MAX;

/// Summary statistics of a graph. For a disconnected graph the path and
/// clustering metrics describe the largest connected component and
/// `connected` is false; link counts and the degree histogram stay global.
#[derive(Debug, Clone, Serialize)]
pub struct GraphStats {
    pub n_nodes: usize,
    pub n_links: u64,
    /// Mean shortest-path distance over ordered pairs i != j, in links.
    pub apl: f64,
    /// Maximum shortest-path distance.
    pub diameter: u32,
    /// Mean local clustering coefficient; nodes of degree < 2 count as 0.
    pub mean_cc: f64,
    pub cc_std: f64,
    pub degree_histogram: Vec<u64>,
    pub mean_degree: f64,
    pub connected: bool,
    pub largest_component: usize,
}

/// Minimum link count from any source to every node; `None` marks nodes
/// unreachable from the source set.
pub fn bfs_distances(g: &Graph, sources: &[u32]) -> Result<Vec<Option<u32>>, GraphError> {
    if sources.is_empty() {
        return Err(GraphError::EmptySources);
    }
    for &s in sources {
        if s as usize >= g.n() {
            return Err(GraphError::NodeOutOfRange {
                index: s,
                n: g.n(),
            });
        }
    }
    if g.is_complete() {
        let mut dist = vec![Some(1u32); g.n()];
        for &s in sources {
            dist[s as usize] = Some(0);
        }
        return Ok(dist);
    }
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = Vec::with_capacity(g.n());
    bfs_fill(g, sources, &mut dist, &mut queue);
    Ok(dist
        .into_iter()
        .map(|d| (d != UNREACHED).then_some(d))
        .collect())
}

/// Multi-source BFS into a preallocated distance buffer (UNREACHED-filled).
fn bfs_fill(g: &Graph, sources: &[u32], dist: &mut [u32], queue: &mut Vec<u32>) {
    queue.clear();
    for &s in sources {
        if dist[s as usize] == UNREACHED {
            dist[s as usize] = 0;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let next = dist[u as usize] + 1;
        for &v in g.neighbors(u) {
            if dist[v as usize] == UNREACHED {
                dist[v as usize] = next;
                queue.push(v);
            }
        }
    }
}

pub fn stats(g: &Graph) -> GraphStats {
    let n = g.n();
    if g.is_complete() {
        let mut degree_histogram = vec![0u64; n];
        degree_histogram[n - 1] = n as u64;
        let cc = if n >= 3 { 1.0 } else { 0.0 };
        return GraphStats {
            n_nodes: n,
            n_links: g.n_links(),
            apl: 1.0,
            diameter: 1,
            mean_cc: cc,
            cc_std: 0.0,
            degree_histogram,
            mean_degree: (n - 1) as f64,
            connected: true,
            largest_component: n,
        };
    }

    let (labels, sizes) = g.components();
    let (lcc_label, &largest) = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(_, &s)| s)
        .map(|(i, s)| (i as u32, s))
        .unwrap();
    let connected = largest == n;
    let members: Vec<u32> = (0..n as u32)
        .filter(|&v| labels[v as usize] == lcc_label)
        .collect();

    // All-pairs shortest paths restricted to the largest component, one BFS
    // per source, parallelized over sources.
    let (dist_sum, diameter) = members
        .par_chunks(32)
        .map(|chunk| {
            let mut dist = vec![UNREACHED; n];
            let mut queue = Vec::with_capacity(members.len());
            let mut sum = 0u64;
            let mut max = 0u32;
            for &s in chunk {
                dist.fill(UNREACHED);
                bfs_fill(g, &[s], &mut dist, &mut queue);
                for &v in &members {
                    let d = dist[v as usize];
                    sum += u64::from(d);
                    max = max.max(d);
                }
            }
            (sum, max)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    let m = members.len() as f64;
    let apl = if members.len() >= 2 {
        dist_sum as f64 / (m * (m - 1.0))
    } else {
        0.0
    };

    let ccs = clustering_coefficients(g, &members);
    let mean_cc = ccs.iter().sum::<f64>() / ccs.len() as f64;
    let cc_var = ccs.iter().map(|c| (c - mean_cc).powi(2)).sum::<f64>() / ccs.len() as f64;

    let max_degree = (0..n as u32).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut degree_histogram = vec![0u64; max_degree + 1];
    for v in 0..n as u32 {
        degree_histogram[g.degree(v)] += 1;
    }

    GraphStats {
        n_nodes: n,
        n_links: g.n_links(),
        apl,
        diameter,
        mean_cc,
        cc_std: cc_var.sqrt(),
        degree_histogram,
        mean_degree: 2.0 * g.n_links() as f64 / n as f64,
        connected,
        largest_component: largest,
    }
}

/// Local clustering coefficient of each listed node: existing links among
/// its neighbors over k(k-1)/2, with 0 for degree < 2.
fn clustering_coefficients(g: &Graph, nodes: &[u32]) -> Vec<f64> {
    let mut marked = vec![false; g.n()];
    nodes
        .iter()
        .map(|&u| {
            let nbrs = g.neighbors(u);
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            for &v in nbrs {
                marked[v as usize] = true;
            }
            let mut links = 0u64;
            for &a in nbrs {
                for &w in g.neighbors(a) {
                    if w > a && marked[w as usize] {
                        links += 1;
                    }
                }
            }
            for &v in nbrs {
                marked[v as usize] = false;
            }
            links as f64 / (k as f64 * (k as f64 - 1.0) / 2.0)
        })
        .collect()
}
