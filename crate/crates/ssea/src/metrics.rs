//! Run observers: hitting/convergence times, population entropies, distinct
//! optima counts, relative hitting times, and the spreading analysis of how
//! the first optimum propagates outward through the graph.

use std::collections::HashSet;
use std::io::{self, Write};

use thiserror::Error;

use crate::engine::{GenerationEvent, Population};
use crate::problems::{Genotype, ProblemSpec};
use crate::topology::{bfs_distances, Graph};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("out-of-order event: expected generation {expected}, got {got}")]
    OutOfOrder { expected: u64, got: u64 },
    #[error("run never reached an optimum; spreading analysis undefined")]
    NoHittingTime,
    #[error("population is empty")]
    EmptyPopulation,
}

/// Per-generation observables.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: u64,
    /// Individuals with optimal fitness.
    pub n_optimal: usize,
    /// Distinct genotypes among the optimal individuals this generation.
    pub distinct_optima: usize,
    /// Distinct optimal genotypes ever seen up to this generation.
    pub cumulative_distinct_optima: usize,
    pub genotypic_entropy: f64,
    pub phenotypic_entropy: f64,
    pub mean_fitness: f64,
    pub best_fitness: u32,
}

/// Everything measured over one run.
#[derive(Debug, Clone, Default)]
pub struct RunMetrics {
    pub fht: Option<u64>,
    pub fct: Option<u64>,
    pub series: Vec<GenerationRecord>,
    /// Max over generations of the per-generation distinct-optima count;
    /// the headline diversity number.
    pub max_distinct_optima: usize,
    /// Distinct-optima count at the last observed generation.
    pub final_distinct_optima: usize,
    pub cumulative_distinct_optima: usize,
    /// Nodes holding an optimum at the hitting generation.
    pub n0_nodes: Vec<u32>,
    /// Per node, the first generation its fitness reached the optimum.
    pub first_optimal_generation: Vec<Option<u64>>,
}

/// Streaming observer fed one event per generation, in order.
pub struct MetricsCollector {
    problem: ProblemSpec,
    record_series: bool,
    metrics: RunMetrics,
    seen_optima: HashSet<Genotype>,
    last_generation: Option<u64>,
}

impl MetricsCollector {
    pub fn new(problem: ProblemSpec, record_series: bool) -> Self {
        MetricsCollector {
            problem,
            record_series,
            metrics: RunMetrics::default(),
            seen_optima: HashSet::new(),
            last_generation: None,
        }
    }

    pub fn observe(
        &mut self,
        event: &GenerationEvent,
        pop: &Population,
    ) -> Result<(), MetricsError> {
        if pop.is_empty() {
            return Err(MetricsError::EmptyPopulation);
        }
        if let Some(last) = self.last_generation {
            if event.generation != last + 1 {
                return Err(MetricsError::OutOfOrder {
                    expected: last + 1,
                    got: event.generation,
                });
            }
        }
        self.last_generation = Some(event.generation);

        let m = &mut self.metrics;
        if m.first_optimal_generation.is_empty() {
            m.first_optimal_generation = vec![None; pop.len()];
        }
        for &node in &event.newly_optimal {
            m.first_optimal_generation[node as usize]
                .get_or_insert(event.generation);
        }

        let max_fit = self.problem.max_fitness();
        let n_optimal = pop.fitness.iter().filter(|&&f| f == max_fit).count();

        let mut distinct: HashSet<&Genotype> = HashSet::new();
        for (g, &f) in pop.individuals.iter().zip(&pop.fitness) {
            if f == max_fit {
                distinct.insert(g);
                if !self.seen_optima.contains(g) {
                    self.seen_optima.insert(g.clone());
                }
            }
        }
        let distinct_optima = distinct.len();

        if m.fht.is_none() && n_optimal > 0 {
            m.fht = Some(event.generation);
            m.n0_nodes = pop
                .fitness
                .iter()
                .enumerate()
                .filter(|&(_, &f)| f == max_fit)
                .map(|(i, _)| i as u32)
                .collect();
        }
        if m.fct.is_none() && n_optimal == pop.len() {
            m.fct = Some(event.generation);
        }
        m.max_distinct_optima = m.max_distinct_optima.max(distinct_optima);
        m.final_distinct_optima = distinct_optima;
        m.cumulative_distinct_optima = self.seen_optima.len();

        if self.record_series {
            m.series.push(GenerationRecord {
                generation: event.generation,
                n_optimal,
                distinct_optima,
                cumulative_distinct_optima: self.seen_optima.len(),
                genotypic_entropy: genotypic_entropy(pop),
                phenotypic_entropy: phenotypic_entropy(pop),
                mean_fitness: pop.fitness.iter().map(|&f| f64::from(f)).sum::<f64>()
                    / pop.len() as f64,
                best_fitness: pop.fitness.iter().copied().max().unwrap_or(0),
            });
        }
        Ok(())
    }

    pub fn finish(self) -> RunMetrics {
        self.metrics
    }
}

fn entropy_from_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let total = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let f = c as f64 / total;
            -f * f.ln()
        })
        .sum()
}

/// Entropy (nats) of the population over Hamming-distance-from-origin
/// classes, i.e. over ones-counts.
pub fn genotypic_entropy(pop: &Population) -> f64 {
    let len = pop.individuals.first().map_or(0, Genotype::len);
    let mut counts = vec![0usize; len + 1];
    for g in &pop.individuals {
        counts[g.count_ones() as usize] += 1;
    }
    entropy_from_counts(counts, pop.len())
}

/// Entropy (nats) of the population over fitness-value classes.
pub fn phenotypic_entropy(pop: &Population) -> f64 {
    let max = pop.fitness.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0usize; max + 1];
    for &f in &pop.fitness {
        counts[f as usize] += 1;
    }
    entropy_from_counts(counts, pop.len())
}

/// Each run's hitting time divided by the group-wide minimum. Runs that
/// never hit (None) are excluded and stay None in the output.
pub fn relative_fht(fhts: &[Option<u64>]) -> Vec<Option<f64>> {
    let min = fhts.iter().flatten().min().copied();
    match min {
        // A hitting time of zero makes every ratio degenerate; treat the
        // minimum run as the unit reference.
        Some(0) => fhts
            .iter()
            .map(|f| f.map(|v| if v == 0 { 1.0 } else { f64::INFINITY }))
            .collect(),
        Some(min) => fhts
            .iter()
            .map(|f| f.map(|v| v as f64 / min as f64))
            .collect(),
        None => vec![None; fhts.len()],
    }
}

/// Per-node view of how the first optimum spread: the generation each node
/// first held an optimum and its BFS distance from the set of nodes where
/// the optimum appeared.
#[derive(Debug, Clone)]
pub struct SpreadRecord {
    pub fht: u64,
    pub first_optimal_generation: Vec<Option<u64>>,
    pub distance: Vec<Option<u32>>,
}

impl SpreadRecord {
    /// Ties at the hitting generation make all first-optimal nodes sources
    /// of a multi-source BFS.
    pub fn from_run(metrics: &RunMetrics, g: &Graph) -> Result<Self, MetricsError> {
        let fht = metrics.fht.ok_or(MetricsError::NoHittingTime)?;
        let distance =
            bfs_distances(g, &metrics.n0_nodes).expect("n0 nodes are valid and non-empty");
        Ok(SpreadRecord {
            fht,
            first_optimal_generation: metrics.first_optimal_generation.clone(),
            distance,
        })
    }
}

/// Distribution summary of (first-optimal generation - FHT) over the nodes
/// at one BFS distance from the origin set.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBucket {
    pub distance: u32,
    /// Nodes at this distance that reached an optimum.
    pub count: usize,
    /// Nodes at this distance that never did.
    pub never_count: usize,
    pub median_delay: f64,
    pub q1_delay: f64,
    pub q3_delay: f64,
}

/// Aggregate a spread record by distance. Nodes unreachable from the origin
/// set are skipped; nodes that never became optimal are counted per bucket
/// but excluded from the delay quartiles.
pub fn spreading_analysis(record: &SpreadRecord) -> Vec<DistanceBucket> {
    let max_d = record
        .distance
        .iter()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0) as usize;
    let mut delays: Vec<Vec<f64>> = vec![Vec::new(); max_d + 1];
    let mut never: Vec<usize> = vec![0; max_d + 1];
    for (node, d) in record.distance.iter().enumerate() {
        let Some(d) = *d else { continue };
        match record.first_optimal_generation[node] {
            Some(gen) => delays[d as usize].push((gen - record.fht) as f64),
            None => never[d as usize] += 1,
        }
    }
    delays
        .into_iter()
        .zip(never)
        .enumerate()
        .map(|(d, (mut delay, never_count))| {
            delay.sort_by(f64::total_cmp);
            DistanceBucket {
                distance: d as u32,
                count: delay.len(),
                never_count,
                median_delay: quantile(&delay, 0.5),
                q1_delay: quantile(&delay, 0.25),
                q3_delay: quantile(&delay, 0.75),
            }
        })
        .collect()
}

/// Linear-interpolation quantile of a sorted slice; NaN when empty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Per-generation series CSV, one row per observed generation.
pub fn write_series_csv<W: Write>(metrics: &RunMetrics, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "gen,n_optimal,distinct_optima,cum_optima,H_g,H_p,mean_fitness,best_fitness"
    )?;
    for r in &metrics.series {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.generation,
            r.n_optimal,
            r.distinct_optima,
            r.cumulative_distinct_optima,
            r.genotypic_entropy,
            r.phenotypic_entropy,
            r.mean_fitness,
            r.best_fitness
        )?;
    }
    Ok(())
}

/// Per-node spread CSV; empty fields mark never-optimal or unreachable.
pub fn write_spread_csv<W: Write>(record: &SpreadRecord, out: &mut W) -> io::Result<()> {
    writeln!(out, "node,first_opt_gen,distance")?;
    for (node, (gen, dist)) in record
        .first_optimal_generation
        .iter()
        .zip(&record.distance)
        .enumerate()
    {
        let gen = gen.map_or(String::new(), |g| g.to_string());
        let dist = dist.map_or(String::new(), |d| d.to_string());
        writeln!(out, "{node},{gen},{dist}")?;
    }
    Ok(())
}
