//! Network model generators: complete, Erdos-Renyi, configuration-model
//! scale-free, and Watts-Strogatz small-world.
//!
//! All generators are deterministic in (parameters, seed).

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

/// Full restarts of the stub-pairing phase before giving up.
const PAIRING_RESTARTS: usize = 100;
/// Pairing restarts granted to any single drawn degree sequence before a
/// fresh sequence is drawn.
const PAIRING_RESTARTS_PER_SEQUENCE: usize = 10;
/// Random pair draws before declaring the remaining stubs deadlocked.
const PAIRING_TRIALS: usize = 500;
/// Rejection draws before falling back to scanning for a rewire target.
const REWIRE_TRIALS: usize = 64;

fn norm(u: u32, v: u32) -> (u32, u32) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// The implicit panmictic topology: every node adjacent to every other.
pub fn gen_complete(n: usize) -> Result<Graph, GraphError> {
    Graph::new_complete(n)
}

/// Erdos-Renyi G(n, p): each unordered pair connected independently with
/// probability p. Uses geometric pair skipping, so the cost is proportional
/// to the number of edges rather than n^2.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidSize(n));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!(
            "connection probability must be in [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Graph::from_edges(n, &[]);
    }
    if p == 1.0 {
        let edges: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        return Graph::from_edges(n, &edges);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let log_q = (1.0 - p).ln();
    let mut v: u64 = 1;
    let mut w: i64 = -1;
    while (v as usize) < n {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q) as i64; // saturating cast
        w = w.saturating_add(1).saturating_add(skip);
        while w >= v as i64 && (v as usize) < n {
            w -= v as i64;
            v += 1;
        }
        if (v as usize) < n {
            edges.push((w as u32, v as u32));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Erdos-Renyi parameterized by a target link count K, converted through
/// K = n(n-1)p/2.
pub fn gen_er_with_links(n: usize, links: u64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidSize(n));
    }
    let max_links = (n as u64) * (n as u64 - 1) / 2;
    if links > max_links {
        return Err(GraphError::InvalidParameter(format!(
            "target of {links} links exceeds the {max_links} possible"
        )));
    }
    let p = 2.0 * links as f64 / (n as f64 * (n as f64 - 1.0));
    gen_er(n, p, seed)
}

/// Scale-free graph via the configuration model: target degrees drawn from
/// P(k) ~ k^(-gamma) truncated to [k_min, n-1], then stubs paired uniformly
/// at random avoiding self-loops and multiple links.
pub fn gen_scale_free(
    n: usize,
    gamma: f64,
    k_min: usize,
    seed: u64,
) -> Result<Graph, GraphError> {
    gen_scale_free_capped(n, gamma, k_min, None, seed)
}

/// Scale-free generator with an explicit degree cutoff: degrees are drawn
/// from [k_min, k_max]. The structural cutoff sqrt(n) is the usual choice
/// when an uncorrelated network is wanted; `None` keeps the full n-1 range.
pub fn gen_scale_free_capped(
    n: usize,
    gamma: f64,
    k_min: usize,
    k_max: Option<usize>,
    seed: u64,
) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidSize(n));
    }
    if gamma <= 1.0 {
        return Err(GraphError::InvalidParameter(format!(
            "power-law exponent must exceed 1, got {gamma}"
        )));
    }
    if k_min < 1 || k_min > n - 1 {
        return Err(GraphError::InvalidParameter(format!(
            "k_min must be in [1, n-1], got {k_min}"
        )));
    }
    let k_max = k_max.unwrap_or(n - 1);
    if k_max < k_min || k_max > n - 1 {
        return Err(GraphError::InvalidParameter(format!(
            "k_max must be in [k_min, n-1], got {k_max}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Cumulative weights of the truncated discrete power law.
    let mut cumulative = Vec::with_capacity(k_max + 1 - k_min);
    let mut total = 0.0;
    for k in k_min..=k_max {
        total += (k as f64).powf(-gamma);
        cumulative.push(total);
    }
    let draw_degree = |rng: &mut ChaCha8Rng| -> usize {
        let x: f64 = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c < x);
        k_min + idx.min(cumulative.len() - 1)
    };

    // A drawn sequence can be unusable: odd stub total, or not realizable
    // as a simple graph at all (a hub can outweigh every other stub). Each
    // attempt therefore redraws the degrees before pairing.
    let mut degrees = Vec::with_capacity(n);
    for _ in 0..PAIRING_RESTARTS {
        degrees.clear();
        degrees.extend((0..n).map(|_| draw_degree(&mut rng)));
        if degrees.iter().sum::<usize>() % 2 != 0 {
            continue;
        }
        match pair_stubs(&degrees, &mut rng, PAIRING_RESTARTS_PER_SEQUENCE) {
            Ok(g) => return Ok(g),
            Err(GraphError::ConstructionFailure(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::ConstructionFailure(PAIRING_RESTARTS))
}

/// Pair the stubs of a prescribed degree sequence uniformly at random into a
/// simple graph. Candidate stub pairs that would create a self-loop or a
/// duplicate edge are rejected and redrawn; if only invalid pairings remain
/// the whole pairing restarts, up to a bounded number of attempts.
pub fn configuration_model<R: Rng>(
    degrees: &[usize],
    rng: &mut R,
) -> Result<Graph, GraphError> {
    pair_stubs(degrees, rng, PAIRING_RESTARTS)
}

fn pair_stubs<R: Rng>(
    degrees: &[usize],
    rng: &mut R,
    restarts: usize,
) -> Result<Graph, GraphError> {
    let n = degrees.len();
    if n < 2 {
        return Err(GraphError::InvalidSize(n));
    }
    if degrees.iter().sum::<usize>() % 2 != 0 {
        return Err(GraphError::InvalidParameter(
            "degree sequence sum must be even".into(),
        ));
    }
    if let Some((i, &d)) = degrees.iter().enumerate().find(|&(_, &d)| d >= n) {
        return Err(GraphError::InvalidParameter(format!(
            "degree {d} of node {i} exceeds n-1"
        )));
    }

    let full: Vec<u32> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i as u32, d))
        .collect();

    'restart: for _ in 0..restarts {
        let mut stubs = full.clone();
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(full.len() / 2);
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(full.len() / 2);
        while stubs.len() >= 2 {
            let mut paired = false;
            for _ in 0..PAIRING_TRIALS {
                let a = rng.gen_range(0..stubs.len());
                let mut b = rng.gen_range(0..stubs.len() - 1);
                if b >= a {
                    b += 1;
                }
                let (u, v) = (stubs[a], stubs[b]);
                if u != v && seen.insert(norm(u, v)) {
                    edges.push(norm(u, v));
                    // Remove the higher index first so the lower stays valid.
                    stubs.swap_remove(a.max(b));
                    stubs.swap_remove(a.min(b));
                    paired = true;
                    break;
                }
            }
            if !paired {
                continue 'restart;
            }
        }
        return Graph::from_edges(n, &edges);
    }
    Err(GraphError::ConstructionFailure(restarts))
}

/// Watts-Strogatz small world: a ring lattice where node i connects to its k
/// nearest neighbors on each side, then each link independently has its far
/// end rewired with probability r to a uniformly random node, avoiding
/// self-loops and duplicate edges. Edge count is preserved at n*k; a link
/// with no valid rewire target is kept in place.
pub fn gen_small_world(n: usize, k: usize, r: f64, seed: u64) -> Result<Graph, GraphError> {
    if k < 1 {
        return Err(GraphError::InvalidParameter("k must be >= 1".into()));
    }
    if n < 2 * k + 1 {
        return Err(GraphError::InvalidSize(n));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(GraphError::InvalidParameter(format!(
            "rewiring probability must be in [0, 1], got {r}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * k);
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(n * k);
    for i in 0..n as u32 {
        for offset in 1..=k as u32 {
            let j = (i + offset) % n as u32;
            let e = norm(i, j);
            edges.push(e);
            seen.insert(e);
        }
    }

    if r > 0.0 {
        for idx in 0..edges.len() {
            if rng.gen::<f64>() >= r {
                continue;
            }
            // Anchor i keeps the link; the far end j is redirected.
            let i = (idx / k) as u32;
            let old = edges[idx];
            let mut target = None;
            for _ in 0..REWIRE_TRIALS {
                let v = rng.gen_range(0..n as u32);
                if v != i && !seen.contains(&norm(i, v)) {
                    target = Some(v);
                    break;
                }
            }
            if target.is_none() {
                // Dense neighborhood: enumerate what is actually available.
                let candidates: Vec<u32> = (0..n as u32)
                    .filter(|&v| v != i && !seen.contains(&norm(i, v)))
                    .collect();
                if candidates.is_empty() {
                    continue; // exhausted: keep the original link
                }
                target = Some(candidates[rng.gen_range(0..candidates.len())]);
            }
            let v = target.unwrap();
            seen.remove(&old);
            let new = norm(i, v);
            seen.insert(new);
            edges[idx] = new;
        }
    }

    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn edge_set(g: &Graph) -> BTreeSet<(u32, u32)> {
        g.edges().collect()
    }

    #[test]
    fn complete_rejects_small_n() {
        assert_eq!(gen_complete(1).unwrap_err(), GraphError::InvalidSize(1));
        assert_eq!(gen_complete(2).unwrap().n_links(), 1);
    }

    #[test]
    fn complete_panmictic_scale() {
        let g = gen_complete(10_000).unwrap();
        assert_eq!(g.degree(0), 9999);
        assert_eq!(g.n_links(), 49_995_000);
    }

    #[test]
    fn er_table_scale_realized_count_within_3_sigma() {
        // n = 10^4 with p chosen for an expected 50128 links.
        let n = 10_000usize;
        let g = gen_er_with_links(n, 50_128, 12).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = 50_128.0 / pairs;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        assert!((g.n_links() as f64 - 50_128.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn er_edge_cases() {
        assert_eq!(gen_er(10, 0.0, 1).unwrap().n_links(), 0);
        let full = gen_er(10, 1.0, 1).unwrap();
        assert_eq!(full.n_links(), 45);
        assert_eq!(edge_set(&full), edge_set(&gen_complete(10).unwrap()));
        assert!(gen_er(10, 1.5, 1).is_err());
        assert!(gen_er(10, -0.1, 1).is_err());
    }

    #[test]
    fn er_realized_count_within_3_sigma() {
        // K = n(n-1)p/2; binomial over all pairs.
        let (n, p) = (2000usize, 0.004);
        let pairs = (n * (n - 1) / 2) as f64;
        let g = gen_er(n, p, 42).unwrap();
        let mean = pairs * p;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        let realized = g.n_links() as f64;
        assert!(
            (realized - mean).abs() < 3.0 * sigma,
            "realized {realized} outside {mean} +- 3*{sigma}"
        );
    }

    #[test]
    fn er_with_links_hits_target() {
        let n = 1000usize;
        let target = 5000u64;
        let g = gen_er_with_links(n, target, 7).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = target as f64 / pairs;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        assert!((g.n_links() as f64 - target as f64).abs() < 3.0 * sigma);
        assert!(gen_er_with_links(10, 46, 1).is_err());
    }

    #[test]
    fn configuration_model_two_regular_is_cycle() {
        // Brute-force enumeration of simple graphs on degree sequence
        // [2,2,2,2] shows the 4-cycle is the only shape, so pairing must
        // produce it whenever it succeeds.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = configuration_model(&[2, 2, 2, 2], &mut rng).unwrap();
            assert_eq!(g.n_links(), 4);
            assert!((0..4).all(|i| g.degree(i) == 2));
            assert!(g.is_connected());
        }
    }

    #[test]
    fn configuration_model_rejects_odd_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            configuration_model(&[2, 2, 1], &mut rng),
            Err(GraphError::InvalidParameter(_))
        ));
    }

    #[test]
    fn configuration_model_reports_deadlock() {
        // [3,3,1,1] has an even sum and per-node degrees below n, but no
        // simple graph realizes it: pairing always ends in a deadlock.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            configuration_model(&[3, 3, 1, 1], &mut rng),
            Err(GraphError::ConstructionFailure(_))
        ));
        // Degrees above n-1 are rejected before pairing.
        assert!(matches!(
            configuration_model(&[2, 2], &mut rng),
            Err(GraphError::InvalidParameter(_))
        ));
    }

    #[test]
    fn scale_free_realizes_drawn_degrees() {
        let g = gen_scale_free(500, 2.62, 2, 11).unwrap();
        assert!((0..500).all(|i| g.degree(i) >= 2));
        let degree_sum: usize = (0..500).map(|i| g.degree(i)).sum();
        assert_eq!(degree_sum as u64, 2 * g.n_links());
    }

    #[test]
    fn scale_free_large_gamma_collapses_to_k_min() {
        let g = gen_scale_free(200, 50.0, 2, 5).unwrap();
        let at_k_min = (0..200).filter(|&i| g.degree(i) == 2).count();
        assert!(at_k_min >= 198, "only {at_k_min} nodes at k_min");
    }

    #[test]
    fn scale_free_rejects_bad_parameters() {
        assert!(gen_scale_free(100, 1.0, 2, 1).is_err());
        assert!(gen_scale_free(100, 2.5, 0, 1).is_err());
        assert!(gen_scale_free(100, 2.5, 100, 1).is_err());
    }

    #[test]
    fn small_world_ring_structure() {
        let g = gen_small_world(10, 2, 0.0, 1).unwrap();
        assert_eq!(g.n_links(), 20);
        assert_eq!(g.neighbors(0), &[1, 2, 8, 9]);
        assert_eq!(g.neighbors(5), &[3, 4, 6, 7]);
    }

    #[test]
    fn small_world_preserves_edge_count() {
        for r in [0.0, 0.001, 0.1, 0.5, 1.0] {
            let g = gen_small_world(200, 2, r, 9).unwrap();
            assert_eq!(g.n_links(), 400, "edge count changed at r={r}");
        }
    }

    #[test]
    fn small_world_keeps_links_when_no_rewire_target_exists() {
        // n = 2k+1 makes the ring complete: every rewire is exhausted and
        // the original links stay.
        let g = gen_small_world(5, 2, 1.0, 3).unwrap();
        assert_eq!(edge_set(&g), edge_set(&gen_complete(5).unwrap()));
    }

    #[test]
    fn small_world_rejects_bad_parameters() {
        assert!(gen_small_world(4, 2, 0.0, 1).is_err());
        assert!(gen_small_world(10, 0, 0.0, 1).is_err());
        assert!(gen_small_world(10, 2, 1.01, 1).is_err());
    }

    /// Simple-graph shape shared by every generator output: sorted
    /// duplicate-free adjacency, no self-loops, symmetry, degree sum twice
    /// the edge count.
    fn assert_simple(g: &Graph) {
        let mut degree_sum = 0u64;
        for u in 0..g.n() as u32 {
            let nbrs = g.neighbors(u);
            degree_sum += nbrs.len() as u64;
            for w in nbrs.windows(2) {
                assert!(w[0] < w[1], "node {u}: duplicate or unsorted neighbor");
            }
            for &v in nbrs {
                assert_ne!(v, u, "self-loop at {u}");
                assert!(
                    g.neighbors(v).binary_search(&u).is_ok(),
                    "asymmetric edge ({u}, {v})"
                );
            }
        }
        assert_eq!(degree_sum, 2 * g.n_links());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn er_outputs_are_simple_graphs(
                n in 5usize..150,
                p in 0.0f64..=1.0,
                seed in any::<u64>(),
            ) {
                assert_simple(&gen_er(n, p, seed).unwrap());
            }

            #[test]
            fn small_world_preserves_shape_and_edge_count(
                n in 7usize..150,
                k in 1usize..=3,
                r in 0.0f64..=1.0,
                seed in any::<u64>(),
            ) {
                prop_assume!(n > 2 * k);
                let g = gen_small_world(n, k, r, seed).unwrap();
                assert_simple(&g);
                prop_assert_eq!(g.n_links(), (n * k) as u64);
            }

            #[test]
            fn scale_free_outputs_are_simple_graphs(
                n in 10usize..150,
                seed in any::<u64>(),
            ) {
                match gen_scale_free_capped(n, 2.5, 2, Some(n / 2), seed) {
                    Ok(g) => assert_simple(&g),
                    Err(GraphError::ConstructionFailure(_)) => {}
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            edge_set(&gen_er(300, 0.02, 77).unwrap()),
            edge_set(&gen_er(300, 0.02, 77).unwrap())
        );
        assert_eq!(
            edge_set(&gen_scale_free(300, 2.62, 2, 77).unwrap()),
            edge_set(&gen_scale_free(300, 2.62, 2, 77).unwrap())
        );
        assert_eq!(
            edge_set(&gen_small_world(300, 2, 0.05, 77).unwrap()),
            edge_set(&gen_small_world(300, 2, 0.05, 77).unwrap())
        );
        assert_ne!(
            edge_set(&gen_er(300, 0.02, 77).unwrap()),
            edge_set(&gen_er(300, 0.02, 78).unwrap())
        );
    }
}
