//! Experiment configuration: a strict TOML schema (unknown keys are
//! errors), topology construction from config, and deterministic per-run
//! seed derivation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::EngineConfig;
use crate::problems::{ProblemKind, ProblemSpec};
use crate::topology::{
    gen_complete, gen_er, gen_er_with_links, gen_scale_free_capped, gen_small_world,
    load_edge_list, Graph,
};

use super::HarnessError;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "SSEA_OUTPUT_DIR";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    pub topology: TopologySection,
    #[serde(default)]
    pub engine: EngineSection,
    pub campaign: CampaignSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: ProblemKind,
    pub b: usize,
    #[serde(default = "default_l")]
    pub l: usize,
}

fn default_l() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TopologyModel {
    Complete,
    Er,
    Sf,
    Sw,
    Edgelist,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub model: TopologyModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Connection probability (er).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Target link count, alternative to p (er).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub links: Option<u64>,
    /// Power-law exponent (sf).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Minimum degree (sf).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<usize>,
    /// Optional degree cutoff (sf); defaults to n-1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Ring neighbors per side (sw).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Rewiring probability (sw).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Edge-list file (edgelist).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Resample the network for every run; a fixed shared instance when
    /// false.
    #[serde(default = "default_true")]
    pub regenerate_per_run: bool,
    /// Regeneration attempts (fresh seeds) until the graph is connected.
    #[serde(default = "default_connect_retries")]
    pub connect_retries: usize,
}

fn default_true() -> bool {
    true
}

fn default_connect_retries() -> usize {
    20
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    pub mutation_rate: Option<f64>,
    pub alpha: f64,
    pub max_generations: u64,
    pub freeze_mutation_after_fht: bool,
    pub early_stop_on_fct: bool,
}

impl Default for EngineSection {
    fn default() -> Self {
        EngineSection {
            mutation_rate: None,
            alpha: 0.0,
            max_generations: 5000,
            freeze_mutation_after_fht: false,
            early_stop_on_fct: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub runs: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub write_series: bool,
    #[serde(default)]
    pub write_spread: bool,
    #[serde(default)]
    pub write_events: bool,
}

/// Lists of values to sweep; the grid is the cartesian product of the
/// non-empty lists, each cell overriding the base config.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub b: Vec<usize>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self.r.is_empty() && self.alpha.is_empty() && self.b.is_empty()
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.problem_spec()?;
        self.topology.validate()?;
        if self.campaign.runs < 1 {
            return Err(HarnessError::Config("campaign.runs must be >= 1".into()));
        }
        let rate_ref = self.problem_spec()?.genotype_len();
        if let Some(rate) = self.engine.mutation_rate {
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(HarnessError::Config(format!(
                    "engine.mutation_rate must be in (0, 1], got {rate} (default is 1/{rate_ref})"
                )));
            }
        }
        if self.engine.max_generations < 1 {
            return Err(HarnessError::Config(
                "engine.max_generations must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, HarnessError> {
        let p = &self.problem;
        let spec = match p.kind {
            ProblemKind::OneMax => {
                if p.l != 1 {
                    return Err(HarnessError::Config(format!(
                        "problem.l must be 1 for onemax, got {}",
                        p.l
                    )));
                }
                ProblemSpec::onemax(p.b)
            }
            ProblemKind::NMax => ProblemSpec::nmax(p.b, p.l),
        };
        spec.map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn engine_config(&self, seed: u64) -> Result<EngineConfig, HarnessError> {
        let mut cfg = EngineConfig::new(self.problem_spec()?, seed);
        cfg.mutation_rate = self.engine.mutation_rate;
        cfg.alpha = self.engine.alpha;
        cfg.max_generations = self.engine.max_generations;
        cfg.freeze_mutation_after_fht = self.engine.freeze_mutation_after_fht;
        cfg.early_stop_on_fct = self.engine.early_stop_on_fct;
        Ok(cfg)
    }

    /// Output directory after applying the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.campaign.output_dir.clone(),
        }
    }
}

impl TopologySection {
    fn require_n(&self) -> Result<usize, HarnessError> {
        self.n
            .ok_or_else(|| HarnessError::Config("topology.n is required".into()))
    }

    fn reject<T>(&self, field: Option<T>, name: &str, model: &str) -> Result<(), HarnessError> {
        if field.is_some() {
            return Err(HarnessError::Config(format!(
                "topology.{name} does not apply to model {model}"
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        match self.model {
            TopologyModel::Complete => {
                self.require_n()?;
                self.reject(self.p, "p", "complete")?;
                self.reject(self.links, "links", "complete")?;
                self.reject(self.gamma, "gamma", "complete")?;
                self.reject(self.k_min, "k_min", "complete")?;
                self.reject(self.k_max, "k_max", "complete")?;
                self.reject(self.k, "k", "complete")?;
                self.reject(self.r, "r", "complete")?;
                self.reject(self.path.as_ref(), "path", "complete")?;
            }
            TopologyModel::Er => {
                self.require_n()?;
                if self.p.is_none() == self.links.is_none() {
                    return Err(HarnessError::Config(
                        "er topology needs exactly one of topology.p or topology.links".into(),
                    ));
                }
                self.reject(self.gamma, "gamma", "er")?;
                self.reject(self.k_min, "k_min", "er")?;
                self.reject(self.k_max, "k_max", "er")?;
                self.reject(self.k, "k", "er")?;
                self.reject(self.r, "r", "er")?;
                self.reject(self.path.as_ref(), "path", "er")?;
            }
            TopologyModel::Sf => {
                self.require_n()?;
                if self.gamma.is_none() || self.k_min.is_none() {
                    return Err(HarnessError::Config(
                        "sf topology needs topology.gamma and topology.k_min".into(),
                    ));
                }
                self.reject(self.p, "p", "sf")?;
                self.reject(self.links, "links", "sf")?;
                self.reject(self.k, "k", "sf")?;
                self.reject(self.r, "r", "sf")?;
                self.reject(self.path.as_ref(), "path", "sf")?;
            }
            TopologyModel::Sw => {
                self.require_n()?;
                if self.k.is_none() || self.r.is_none() {
                    return Err(HarnessError::Config(
                        "sw topology needs topology.k and topology.r".into(),
                    ));
                }
                self.reject(self.p, "p", "sw")?;
                self.reject(self.links, "links", "sw")?;
                self.reject(self.gamma, "gamma", "sw")?;
                self.reject(self.k_min, "k_min", "sw")?;
                self.reject(self.k_max, "k_max", "sw")?;
                self.reject(self.path.as_ref(), "path", "sw")?;
            }
            TopologyModel::Edgelist => {
                if self.path.is_none() {
                    return Err(HarnessError::Config(
                        "edgelist topology needs topology.path".into(),
                    ));
                }
                self.reject(self.n, "n", "edgelist")?;
                self.reject(self.p, "p", "edgelist")?;
                self.reject(self.links, "links", "edgelist")?;
                self.reject(self.gamma, "gamma", "edgelist")?;
                self.reject(self.k_min, "k_min", "edgelist")?;
                self.reject(self.k_max, "k_max", "edgelist")?;
                self.reject(self.k, "k", "edgelist")?;
                self.reject(self.r, "r", "edgelist")?;
            }
        }
        Ok(())
    }

    /// Whether the model has any randomness worth resampling per run.
    pub fn is_random(&self) -> bool {
        match self.model {
            TopologyModel::Complete | TopologyModel::Edgelist => false,
            TopologyModel::Er | TopologyModel::Sf => true,
            TopologyModel::Sw => self.r.unwrap_or(0.0) > 0.0,
        }
    }

    /// Build one instance with the given seed.
    pub fn build(&self, seed: u64) -> Result<Graph, HarnessError> {
        self.validate()?;
        let g = match self.model {
            TopologyModel::Complete => gen_complete(self.require_n()?)?,
            TopologyModel::Er => {
                let n = self.require_n()?;
                match (self.p, self.links) {
                    (Some(p), None) => gen_er(n, p, seed)?,
                    (None, Some(links)) => gen_er_with_links(n, links, seed)?,
                    _ => unreachable!("validated"),
                }
            }
            TopologyModel::Sf => gen_scale_free_capped(
                self.require_n()?,
                self.gamma.unwrap(),
                self.k_min.unwrap(),
                self.k_max,
                seed,
            )?,
            TopologyModel::Sw => {
                gen_small_world(self.require_n()?, self.k.unwrap(), self.r.unwrap(), seed)?
            }
            TopologyModel::Edgelist => load_edge_list(self.path.as_ref().unwrap())?,
        };
        Ok(g)
    }

    /// Build an instance that is connected, resampling with fresh derived
    /// seeds up to the configured retry budget. Generator construction
    /// failures (stub-pairing dead ends) are retried the same way.
    pub fn build_connected(&self, seed: u64) -> Result<(Graph, u64), HarnessError> {
        let attempts = self.connect_retries.max(1);
        for attempt in 0..attempts as u64 {
            let attempt_seed = seed.wrapping_add(attempt);
            match self.build(attempt_seed) {
                Ok(g) if g.is_connected() => return Ok((g, attempt_seed)),
                Ok(_) => {}
                Err(HarnessError::Graph(crate::topology::GraphError::ConstructionFailure(
                    _,
                ))) => {}
                Err(e) => return Err(e),
            }
            if !self.is_random() {
                break; // a fixed topology will not change
            }
        }
        Err(HarnessError::TopologyRetriesExhausted(attempts))
    }
}

/// Deterministic per-run seed: a SplitMix64 finalizer over the master seed,
/// a stream tag, and the run index. Any single run can be reproduced
/// without executing its predecessors.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream tags for seed derivation.
pub const GRAPH_STREAM: u64 = 1;
pub const ENGINE_STREAM: u64 = 2;
