//! The synchronous spatially-structured EA: every node selects a random (or
//! weight-biased) neighbor, mutates a copy of it bitwise, and replaces its
//! own individual when the candidate's fitness is at least as good. All
//! nodes read generation-t state and the staged writes become generation
//! t+1 atomically.

use std::mem;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use thiserror::Error;

use crate::problems::{Genotype, ProblemSpec};
use crate::topology::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("interaction graph must be connected")]
    DisconnectedGraph,
    #[error("edge weights require a materialized topology, not the implicit complete graph")]
    WeightedComplete,
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("population mismatch: {0}")]
    PopulationMismatch(String),
}

/// All per-run parameters. The interaction graph is passed alongside.
#[derive(Debug, Clone, Serialize)]
pub struct EngineConfig {
    pub problem: ProblemSpec,
    /// Per-bit flip probability; defaults to 1/genotype-length.
    pub mutation_rate: Option<f64>,
    /// Weight-update coefficient; 0 disables edge weighting entirely.
    pub alpha: f64,
    pub max_generations: u64,
    /// Disable mutation from the first generation at which an optimal
    /// individual exists, so convergence proceeds by cloning alone.
    pub freeze_mutation_after_fht: bool,
    pub early_stop_on_fct: bool,
    pub seed: u64,
}

impl EngineConfig {
    pub fn new(problem: ProblemSpec, seed: u64) -> Self {
        EngineConfig {
            problem,
            mutation_rate: None,
            alpha: 0.0,
            max_generations: 5000,
            freeze_mutation_after_fht: false,
            early_stop_on_fct: true,
            seed,
        }
    }

    pub fn effective_mutation_rate(&self) -> f64 {
        self.mutation_rate
            .unwrap_or(1.0 / self.problem.genotype_len() as f64)
    }
}

/// One individual per graph node plus a fitness cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub individuals: Vec<Genotype>,
    pub fitness: Vec<u32>,
    pub generation: u64,
}

impl Population {
    /// Every bit of every genotype drawn independently uniform from {0, 1}.
    pub fn random<R: Rng>(problem: &ProblemSpec, n: usize, rng: &mut R) -> Self {
        let len = problem.genotype_len();
        let individuals: Vec<Genotype> = (0..n).map(|_| Genotype::random(len, rng)).collect();
        let fitness = individuals
            .iter()
            .map(|g| problem.fitness(g).expect("freshly drawn genotype"))
            .collect();
        Population {
            individuals,
            fitness,
            generation: 0,
        }
    }

    pub fn from_individuals(
        problem: &ProblemSpec,
        individuals: Vec<Genotype>,
    ) -> Result<Self, EngineError> {
        let fitness = individuals
            .iter()
            .map(|g| {
                problem.fitness(g).map_err(|e| {
                    EngineError::PopulationMismatch(e.to_string())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Population {
            individuals,
            fitness,
            generation: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }
}

/// Per-directed-edge selection weights in [0, 1], aligned with the
/// adjacency lists; w(i->j) and w(j->i) evolve independently. All weights
/// start at 1, which reproduces uniform selection.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    per_node: Vec<Vec<f64>>,
}

impl EdgeWeights {
    pub fn ones(g: &Graph) -> Result<Self, EngineError> {
        if g.is_complete() {
            return Err(EngineError::WeightedComplete);
        }
        Ok(EdgeWeights {
            per_node: (0..g.n() as u32)
                .map(|i| vec![1.0; g.degree(i)])
                .collect(),
        })
    }

    /// Weight of the directed edge i -> j, if present.
    pub fn get(&self, g: &Graph, i: u32, j: u32) -> Option<f64> {
        let idx = g.neighbors(i).binary_search(&j).ok()?;
        Some(self.per_node[i as usize][idx])
    }

    pub fn set(&mut self, g: &Graph, i: u32, j: u32, w: f64) {
        let idx = g
            .neighbors(i)
            .binary_search(&j)
            .expect("edge must exist");
        self.per_node[i as usize][idx] = w;
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_node.iter().flatten().copied()
    }
}

/// What happened in one generation, for observers.
#[derive(Debug, Clone, Default)]
pub struct GenerationEvent {
    pub generation: u64,
    /// Per node: was the incumbent replaced by the candidate this step.
    pub replaced: Vec<bool>,
    /// Nodes whose fitness reached the optimum this step (or held it in the
    /// initial population for the generation-0 event).
    pub newly_optimal: Vec<u32>,
}

/// Uniform selection over the neighborhood: probability 1/k_i each, never
/// the node itself.
pub fn select_uniform<R: Rng>(node: u32, g: &Graph, rng: &mut R) -> u32 {
    if g.is_complete() {
        let j = rng.gen_range(0..g.n() as u32 - 1);
        return if j >= node { j + 1 } else { j };
    }
    let nbrs = g.neighbors(node);
    assert!(!nbrs.is_empty(), "node {node} is isolated");
    nbrs[rng.gen_range(0..nbrs.len())]
}

/// Selection with probability w_ij / sum_k w_ik; an all-zero neighborhood
/// falls back to uniform selection (the alpha = 0 limit).
pub fn select_weighted<R: Rng>(
    node: u32,
    g: &Graph,
    weights: &EdgeWeights,
    rng: &mut R,
) -> u32 {
    let nbrs = g.neighbors(node);
    assert!(!nbrs.is_empty(), "node {node} is isolated");
    let w = &weights.per_node[node as usize];
    let total: f64 = w.iter().sum();
    debug_assert!(w.iter().all(|&x| x >= 0.0), "negative edge weight");
    if total <= 0.0 {
        return nbrs[rng.gen_range(0..nbrs.len())];
    }
    let mut x = rng.gen::<f64>() * total;
    for (idx, &wi) in w.iter().enumerate() {
        x -= wi;
        if x < 0.0 {
            return nbrs[idx];
        }
    }
    nbrs[nbrs.len() - 1]
}

/// Independent per-bit flips with the given probability; the input is left
/// unmodified. Sampled as a binomial flip count followed by a uniform
/// choice of distinct positions, which is distributionally identical.
pub fn mutate<R: Rng>(g: &Genotype, rate: f64, rng: &mut R) -> Genotype {
    assert!(rate > 0.0 && rate <= 1.0, "rate must be in (0, 1]");
    let binomial = Binomial::new(g.len() as u64, rate).expect("valid rate");
    let mut out = g.clone();
    let k = binomial.sample(rng) as usize;
    flip_random_bits(&mut out, k, rng, &mut Vec::new());
    out
}

/// Flip k distinct uniformly chosen bit positions.
fn flip_random_bits<R: Rng>(g: &mut Genotype, k: usize, rng: &mut R, scratch: &mut Vec<u32>) {
    let len = g.len();
    if k == 0 {
        return;
    }
    if k == len {
        for i in 0..len {
            g.flip(i);
        }
        return;
    }
    if k > len / 2 {
        // Dense flip set: partial Fisher-Yates over the full index range.
        scratch.clear();
        scratch.extend(0..len as u32);
        for t in 0..k {
            let j = rng.gen_range(t..len);
            scratch.swap(t, j);
            g.flip(scratch[t] as usize);
        }
        return;
    }
    scratch.clear();
    for _ in 0..k {
        loop {
            let pos = rng.gen_range(0..len as u32);
            if !scratch.contains(&pos) {
                scratch.push(pos);
                g.flip(pos as usize);
                break;
            }
        }
    }
}

/// Clamped weight update, applied to every directed edge:
/// w' = clamp(w + alpha * (f_i - f_j), 0, 1).
pub fn update_weights(weights: &mut EdgeWeights, fitness: &[u32], alpha: f64, g: &Graph) {
    for i in 0..g.n() {
        let f_i = f64::from(fitness[i]);
        let row = &mut weights.per_node[i];
        for (idx, &j) in g.neighbors(i as u32).iter().enumerate() {
            let f_j = f64::from(fitness[j as usize]);
            row[idx] = (row[idx] + alpha * (f_i - f_j)).clamp(0.0, 1.0);
        }
    }
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// First generation with at least one optimal individual.
    pub fht: Option<u64>,
    /// First generation where every individual has optimal fitness.
    pub fct: Option<u64>,
    pub population: Population,
}

/// Driver for one run: owns the population double buffer, the RNG stream,
/// the optional edge weights, and the freeze state.
pub struct Engine<'g> {
    config: EngineConfig,
    graph: &'g Graph,
    pop: Population,
    staged: Vec<Genotype>,
    staged_fitness: Vec<u32>,
    weights: Option<EdgeWeights>,
    rng: ChaCha8Rng,
    binomial: Binomial,
    scratch: Vec<u32>,
    event: GenerationEvent,
    frozen: bool,
    n_optimal: usize,
    fht: Option<u64>,
    fct: Option<u64>,
}

impl<'g> Engine<'g> {
    pub fn new(config: EngineConfig, graph: &'g Graph) -> Result<Self, EngineError> {
        let mut rng = Self::validate(&config, graph)?;
        let pop = Population::random(&config.problem, graph.n(), &mut rng);
        Self::build(config, graph, pop, rng)
    }

    /// Start from a caller-supplied population instead of a random one. The
    /// RNG is seeded identically but the initialization draws are skipped.
    pub fn with_population(
        config: EngineConfig,
        graph: &'g Graph,
        pop: Population,
    ) -> Result<Self, EngineError> {
        let rng = Self::validate(&config, graph)?;
        if pop.len() != graph.n() {
            return Err(EngineError::PopulationMismatch(format!(
                "{} individuals for {} nodes",
                pop.len(),
                graph.n()
            )));
        }
        let len = config.problem.genotype_len();
        if let Some(bad) = pop.individuals.iter().find(|g| g.len() != len) {
            return Err(EngineError::PopulationMismatch(format!(
                "genotype length {} does not match problem length {len}",
                bad.len()
            )));
        }
        Self::build(config, graph, pop, rng)
    }

    fn validate(config: &EngineConfig, graph: &Graph) -> Result<ChaCha8Rng, EngineError> {
        if !graph.is_connected() {
            return Err(EngineError::DisconnectedGraph);
        }
        if config.alpha != 0.0 && graph.is_complete() {
            return Err(EngineError::WeightedComplete);
        }
        let rate = config.effective_mutation_rate();
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(EngineError::InvalidConfig(format!(
                "mutation rate must be in (0, 1], got {rate}"
            )));
        }
        if config.max_generations < 1 {
            return Err(EngineError::InvalidConfig(
                "max_generations must be >= 1".into(),
            ));
        }
        Ok(ChaCha8Rng::seed_from_u64(config.seed))
    }

    fn build(
        config: EngineConfig,
        graph: &'g Graph,
        pop: Population,
        rng: ChaCha8Rng,
    ) -> Result<Self, EngineError> {
        let max_fit = config.problem.max_fitness();
        let initial_optima: Vec<u32> = pop
            .fitness
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == max_fit)
            .map(|(i, _)| i as u32)
            .collect();
        let n_optimal = initial_optima.len();
        let weights = if config.alpha != 0.0 {
            Some(EdgeWeights::ones(graph)?)
        } else {
            None
        };
        let binomial = Binomial::new(
            config.problem.genotype_len() as u64,
            config.effective_mutation_rate(),
        )
        .expect("validated rate");
        let n = pop.len();
        let staged = pop.individuals.clone();
        let staged_fitness = pop.fitness.clone();
        let mut engine = Engine {
            frozen: config.freeze_mutation_after_fht && n_optimal > 0,
            fht: (n_optimal > 0).then_some(pop.generation),
            fct: (n_optimal == n).then_some(pop.generation),
            config,
            graph,
            pop,
            staged,
            staged_fitness,
            weights,
            rng,
            binomial,
            scratch: Vec::new(),
            event: GenerationEvent {
                generation: 0,
                replaced: vec![false; n],
                newly_optimal: initial_optima,
            },
            n_optimal,
        };
        engine.event.generation = engine.pop.generation;
        Ok(engine)
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn weights(&self) -> Option<&EdgeWeights> {
        self.weights.as_ref()
    }

    /// Event describing the most recent generation (the initial population
    /// right after construction).
    pub fn last_event(&self) -> &GenerationEvent {
        &self.event
    }

    pub fn fht(&self) -> Option<u64> {
        self.fht
    }

    pub fn fct(&self) -> Option<u64> {
        self.fct
    }

    pub fn mutation_frozen(&self) -> bool {
        self.frozen
    }

    /// Advance one synchronous generation. Nodes are processed in index
    /// order for RNG determinism, but every candidate is evaluated against
    /// generation-t state only.
    pub fn step(&mut self) -> &GenerationEvent {
        let n = self.pop.len();
        let max_fit = self.config.problem.max_fitness();
        let mutation_active = !self.frozen;
        let t_next = self.pop.generation + 1;

        self.event.generation = t_next;
        self.event.replaced.fill(false);
        self.event.newly_optimal.clear();

        for i in 0..n as u32 {
            let sel = match &self.weights {
                Some(w) => select_weighted(i, self.graph, w, &mut self.rng),
                None => select_uniform(i, self.graph, &mut self.rng),
            };
            let candidate = &mut self.staged[i as usize];
            candidate.copy_from(&self.pop.individuals[sel as usize]);
            let mut fit = self.pop.fitness[sel as usize];
            if mutation_active {
                let k = self.binomial.sample(&mut self.rng) as usize;
                if k > 0 {
                    flip_random_bits(candidate, k, &mut self.rng, &mut self.scratch);
                    fit = self
                        .config
                        .problem
                        .fitness(candidate)
                        .expect("lengths fixed per run");
                }
            }
            let incumbent = self.pop.fitness[i as usize];
            if fit >= incumbent {
                self.staged_fitness[i as usize] = fit;
                self.event.replaced[i as usize] = true;
                if fit == max_fit && incumbent < max_fit {
                    self.event.newly_optimal.push(i);
                }
            } else {
                self.staged[i as usize].copy_from(&self.pop.individuals[i as usize]);
                self.staged_fitness[i as usize] = incumbent;
            }
        }

        mem::swap(&mut self.pop.individuals, &mut self.staged);
        mem::swap(&mut self.pop.fitness, &mut self.staged_fitness);
        self.pop.generation = t_next;

        self.n_optimal += self.event.newly_optimal.len();
        if self.fht.is_none() && self.n_optimal > 0 {
            self.fht = Some(t_next);
        }
        if self.fct.is_none() && self.n_optimal == n {
            self.fct = Some(t_next);
        }
        if self.config.freeze_mutation_after_fht && self.n_optimal > 0 {
            self.frozen = true;
        }

        if let Some(weights) = &mut self.weights {
            update_weights(weights, &self.pop.fitness, self.config.alpha, self.graph);
        }

        &self.event
    }

    /// Run to the generation budget (or FCT under early stop), feeding every
    /// generation event to the observer, the initial population included.
    pub fn run_with<F>(mut self, mut observer: F) -> RunOutcome
    where
        F: FnMut(&GenerationEvent, &Population),
    {
        observer(&self.event, &self.pop);
        while self.pop.generation < self.config.max_generations {
            if self.config.early_stop_on_fct && self.fct.is_some() {
                break;
            }
            self.step();
            observer(&self.event, &self.pop);
        }
        RunOutcome {
            fht: self.fht,
            fct: self.fct,
            population: self.pop,
        }
    }
}

/// Convenience wrapper: build an engine with a fresh random population and
/// run it to completion.
pub fn run<F>(
    config: EngineConfig,
    graph: &Graph,
    observer: F,
) -> Result<RunOutcome, EngineError>
where
    F: FnMut(&GenerationEvent, &Population),
{
    Ok(Engine::new(config, graph)?.run_with(observer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemKind;
    use crate::topology::{gen_complete, gen_small_world, Graph};

    fn onemax(b: usize) -> ProblemSpec {
        ProblemSpec::onemax(b).unwrap()
    }

    fn geno(s: &str) -> Genotype {
        s.parse().unwrap()
    }

    #[test]
    fn init_population_mean_fitness_near_half() {
        let problem = onemax(640);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pop = Population::random(&problem, 2000, &mut rng);
        let mean: f64 =
            pop.fitness.iter().map(|&f| f64::from(f)).sum::<f64>() / pop.len() as f64;
        // Mean of 2000 binomial(640, 1/2) samples: sigma of the mean.
        let sigma = (640.0f64 * 0.25 / 2000.0).sqrt();
        assert!((mean - 320.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn init_population_is_deterministic() {
        let problem = onemax(64);
        let a = Population::random(&problem, 50, &mut ChaCha8Rng::seed_from_u64(9));
        let b = Population::random(&problem, 50, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn select_uniform_degree_one_and_frequencies() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // Degree-1 node always picks its sole neighbor.
        assert!((0..100).all(|_| select_uniform(1, &g, &mut rng) == 0));
        // Degree-4 node: each neighbor 1/4 within 3 sigma over 1e5 draws.
        let trials = 100_000;
        let mut counts = [0u32; 5];
        for _ in 0..trials {
            counts[select_uniform(0, &g, &mut rng) as usize] += 1;
        }
        let sigma = (trials as f64 * 0.25 * 0.75).sqrt();
        for &c in &counts[1..] {
            assert!((f64::from(c) - trials as f64 * 0.25).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn select_uniform_panmictic_chi_square() {
        let n = 1000u32;
        let g = gen_complete(n as usize).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 1_000_000usize;
        let mut counts = vec![0u64; n as usize];
        for _ in 0..draws {
            let j = select_uniform(7, &g, &mut rng);
            assert_ne!(j, 7);
            counts[j as usize] += 1;
        }
        assert_eq!(counts[7], 0);
        let expected = draws as f64 / (n as f64 - 1.0);
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != 7)
            .map(|(_, &c)| (c as f64 - expected).powi(2) / expected)
            .sum();
        // df = 998; normal approximation bound at five sigma.
        let df = 998.0f64;
        assert!(chi2 < df + 5.0 * (2.0 * df).sqrt(), "chi2 = {chi2}");
    }

    #[test]
    fn select_weighted_follows_weights() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut w = EdgeWeights::ones(&g).unwrap();
        w.set(&g, 0, 1, 0.5);
        w.set(&g, 0, 2, 0.5);
        w.set(&g, 0, 3, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000;
        let mut counts = [0u32; 4];
        for _ in 0..trials {
            counts[select_weighted(0, &g, &w, &mut rng) as usize] += 1;
        }
        for (node, p) in [(1usize, 0.25), (2, 0.25), (3, 0.5)] {
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (f64::from(counts[node]) - trials as f64 * p).abs() < 3.0 * sigma,
                "node {node}: {}",
                counts[node]
            );
        }
    }

    #[test]
    fn select_weighted_equal_weights_is_uniform() {
        // Chi-square over 1e5 draws with all weights at 1.
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let w = EdgeWeights::ones(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000usize;
        let mut counts = [0u64; 6];
        for _ in 0..draws {
            counts[select_weighted(0, &g, &w, &mut rng) as usize] += 1;
        }
        let expected = draws as f64 / 5.0;
        let chi2: f64 = counts[1..]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let df = 4.0f64;
        assert!(chi2 < df + 5.0 * (2.0 * df).sqrt(), "chi2 = {chi2}");
    }

    #[test]
    fn select_weighted_all_zero_falls_back_to_uniform() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut w = EdgeWeights::ones(&g).unwrap();
        for j in 1..4 {
            w.set(&g, 0, j, 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trials = 30_000;
        let mut counts = [0u32; 4];
        for _ in 0..trials {
            counts[select_weighted(0, &g, &w, &mut rng) as usize] += 1;
        }
        let p = 1.0 / 3.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((f64::from(c) - trials as f64 * p).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn mutate_rate_one_is_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Genotype::random(130, &mut rng);
        assert_eq!(mutate(&g, 1.0, &mut rng), g.complement());
    }

    #[test]
    fn mutate_flip_counts_follow_poisson_limit() {
        // With rate 1/N the flip count tends to Poisson(1):
        // P(0) = e^-1, P(2) = e^-1 / 2.
        let n = 640usize;
        let g = Genotype::zeros(n);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let trials = 100_000;
        let mut zero = 0u32;
        let mut two = 0u32;
        for _ in 0..trials {
            match mutate(&g, 1.0 / n as f64, &mut rng).count_ones() {
                0 => zero += 1,
                2 => two += 1,
                _ => {}
            }
        }
        let e1 = (-1.0f64).exp();
        for (count, p) in [(zero, e1), (two, e1 / 2.0)] {
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (f64::from(count) - trials as f64 * p).abs() < 3.0 * sigma,
                "{count} vs {}",
                trials as f64 * p
            );
        }
    }

    #[test]
    fn mutate_leaves_input_unmodified() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Genotype::random(64, &mut rng);
        let copy = g.clone();
        let _ = mutate(&g, 0.5, &mut rng);
        assert_eq!(g, copy);
    }

    #[test]
    fn step_is_a_fixed_point_on_identical_optima() {
        let problem = onemax(8);
        let g = gen_complete(6).unwrap();
        let pop = Population::from_individuals(
            &problem,
            vec![Genotype::ones(8); 6],
        )
        .unwrap();
        let mut engine =
            Engine::with_population(EngineConfig::new(problem, 1), &g, pop).unwrap();
        assert_eq!(engine.fht(), Some(0));
        assert_eq!(engine.fct(), Some(0));
        engine.step();
        assert!(engine.population().individuals.iter().all(|x| *x == Genotype::ones(8)));
        assert_eq!(engine.population().fitness, vec![8; 6]);
    }

    #[test]
    fn step_enumerates_two_node_masks() {
        // Nodes {"11", "00"} on a single edge, rate 1/2. Node 1's candidate
        // is a mutated copy of "11"; all four masks are equiprobable and all
        // are accepted against fitness 0. Node 0 accepts only "11" (1/4).
        let problem = onemax(2);
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut replaced0 = 0u32;
        let mut node1_counts = [0u32; 4];
        let trials: u64 = 40_000;
        for seed in 0..trials {
            let pop = Population::from_individuals(
                &problem,
                vec![geno("11"), geno("00")],
            )
            .unwrap();
            let mut engine = Engine::with_population(
                EngineConfig::new(problem, seed),
                &g,
                pop,
            )
            .unwrap();
            let event = engine.step();
            if event.replaced[0] {
                replaced0 += 1;
            }
            let got = &engine.population().individuals[1];
            let idx = (got.get(0) as usize) | ((got.get(1) as usize) << 1);
            node1_counts[idx] += 1;
        }
        let sigma = (trials as f64 * 0.25 * 0.75).sqrt();
        assert!((f64::from(replaced0) - trials as f64 * 0.25).abs() < 3.0 * sigma);
        for &c in &node1_counts {
            assert!((f64::from(c) - trials as f64 * 0.25).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn step_reads_generation_t_state_only() {
        // Path 0-1-2. Node 2's only neighbor is 1; even when node 1 adopts
        // node 0's genotype in the same step, node 2 must receive node 1's
        // old genotype. Mutation is frozen via an already-optimal node 0.
        let problem = onemax(4);
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        for seed in 0..50 {
            let pop = Population::from_individuals(
                &problem,
                vec![geno("1111"), geno("1100"), geno("0000")],
            )
            .unwrap();
            let mut config = EngineConfig::new(problem, seed);
            config.freeze_mutation_after_fht = true;
            let mut engine = Engine::with_population(config, &g, pop).unwrap();
            assert!(engine.mutation_frozen());
            engine.step();
            let pop = engine.population();
            // Node 1 adopted "1111" or kept "1100" (its other neighbor
            // lost); node 2 always clones the generation-t value of node 1.
            assert!(pop.individuals[1] == geno("1111") || pop.individuals[1] == geno("1100"));
            assert_eq!(pop.individuals[2], geno("1100"));
        }
    }

    #[test]
    fn fitness_never_decreases() {
        let problem = ProblemSpec::nmax(4, 2).unwrap();
        let g = gen_small_world(20, 2, 0.1, 3).unwrap();
        let mut engine = Engine::new(EngineConfig::new(problem, 11), &g).unwrap();
        let mut previous = engine.population().fitness.clone();
        for _ in 0..200 {
            engine.step();
            let current = &engine.population().fitness;
            assert!(previous.iter().zip(current).all(|(a, b)| b >= a));
            previous = current.clone();
        }
    }

    #[test]
    fn optimal_count_is_monotone() {
        let problem = onemax(16);
        let g = gen_small_world(30, 2, 0.0, 5).unwrap();
        let mut engine = Engine::new(EngineConfig::new(problem, 3), &g).unwrap();
        let max_fit = problem.max_fitness();
        let mut previous = 0;
        for _ in 0..400 {
            engine.step();
            let n_opt = engine
                .population()
                .fitness
                .iter()
                .filter(|&&f| f == max_fit)
                .count();
            assert!(n_opt >= previous);
            previous = n_opt;
        }
    }

    #[test]
    fn update_weights_examples() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut w = EdgeWeights::ones(&g).unwrap();
        // w=1, alpha=1, f_i=3, f_j=5 -> clamped to 0.
        update_weights(&mut w, &[3, 5], 1.0, &g);
        assert_eq!(w.get(&g, 0, 1), Some(0.0));
        assert_eq!(w.get(&g, 1, 0), Some(1.0));

        // w=0.3, alpha=0.5, f_i=4, f_j=3 -> 0.8.
        let mut w = EdgeWeights::ones(&g).unwrap();
        w.set(&g, 0, 1, 0.3);
        update_weights(&mut w, &[4, 3], 0.5, &g);
        assert!((w.get(&g, 0, 1).unwrap() - 0.8).abs() < 1e-12);

        // alpha = 0 leaves weights untouched.
        let mut w = EdgeWeights::ones(&g).unwrap();
        update_weights(&mut w, &[9, 1], 0.0, &g);
        assert!(w.iter().all(|x| x == 1.0));
    }

    #[test]
    fn weights_stay_in_unit_interval() {
        let problem = ProblemSpec::nmax(4, 2).unwrap();
        let g = gen_small_world(24, 2, 0.0, 2).unwrap();
        let mut config = EngineConfig::new(problem, 8);
        config.alpha = 2.0;
        let mut engine = Engine::new(config, &g).unwrap();
        for _ in 0..100 {
            engine.step();
            assert!(engine
                .weights()
                .unwrap()
                .iter()
                .all(|w| (0.0..=1.0).contains(&w)));
        }
    }

    #[test]
    fn alpha_zero_matches_unweighted_run() {
        let problem = onemax(16);
        let g = gen_small_world(20, 2, 0.0, 4).unwrap();
        let unweighted = run(EngineConfig::new(problem, 21), &g, |_, _| {}).unwrap();
        let mut config = EngineConfig::new(problem, 21);
        config.alpha = 0.0;
        let again = run(config, &g, |_, _| {}).unwrap();
        assert_eq!(unweighted.fht, again.fht);
        assert_eq!(unweighted.fct, again.fct);
        assert_eq!(unweighted.population, again.population);
    }

    #[test]
    fn run_stops_immediately_on_all_optimal_population() {
        let problem = onemax(8);
        let g = gen_complete(4).unwrap();
        let pop =
            Population::from_individuals(&problem, vec![Genotype::ones(8); 4]).unwrap();
        let engine =
            Engine::with_population(EngineConfig::new(problem, 1), &g, pop).unwrap();
        let outcome = engine.run_with(|_, _| {});
        assert_eq!(outcome.fht, Some(0));
        assert_eq!(outcome.fct, Some(0));
        assert_eq!(outcome.population.generation, 0);
    }

    #[test]
    fn runs_are_deterministic() {
        let problem = ProblemSpec::nmax(4, 3).unwrap();
        let g = gen_small_world(30, 2, 0.2, 6).unwrap();
        let mut config = EngineConfig::new(problem, 99);
        config.alpha = 1.0;
        let mut trace_a = Vec::new();
        let a = run(config.clone(), &g, |e, p| {
            trace_a.push((e.generation, e.newly_optimal.clone(), p.fitness.clone()));
        })
        .unwrap();
        let mut trace_b = Vec::new();
        let b = run(config, &g, |e, p| {
            trace_b.push((e.generation, e.newly_optimal.clone(), p.fitness.clone()));
        })
        .unwrap();
        assert_eq!(trace_a, trace_b);
        assert_eq!(a.population, b.population);
    }

    #[test]
    fn run_rejects_disconnected_graph() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let problem = onemax(4);
        assert_eq!(
            run(EngineConfig::new(problem, 1), &g, |_, _| {}).unwrap_err(),
            EngineError::DisconnectedGraph
        );
    }

    #[test]
    fn weighted_panmictic_is_rejected() {
        let g = gen_complete(10).unwrap();
        let mut config = EngineConfig::new(onemax(4), 1);
        config.alpha = 1.0;
        let err = match Engine::new(config, &g) {
            Err(e) => e,
            Ok(_) => panic!("weighted panmictic engine must not build"),
        };
        assert_eq!(err, EngineError::WeightedComplete);
    }

    #[test]
    fn frozen_runs_only_clone_existing_genotypes() {
        use std::collections::HashSet;
        let problem = onemax(10);
        let g = gen_small_world(16, 2, 0.0, 7).unwrap();
        let mut config = EngineConfig::new(problem, 17);
        config.freeze_mutation_after_fht = true;
        config.max_generations = 400;
        let mut engine = Engine::new(config, &g).unwrap();
        let mut was_frozen = false;
        for _ in 0..400 {
            let before: HashSet<Genotype> =
                engine.population().individuals.iter().cloned().collect();
            was_frozen = engine.mutation_frozen();
            engine.step();
            if was_frozen {
                assert!(engine
                    .population()
                    .individuals
                    .iter()
                    .all(|g| before.contains(g)));
            }
            if engine.fct().is_some() {
                break;
            }
        }
        assert!(was_frozen, "run never reached the freeze point");
    }

    #[test]
    fn problem_kind_is_exposed() {
        assert_eq!(onemax(4).kind(), ProblemKind::OneMax);
    }
}
