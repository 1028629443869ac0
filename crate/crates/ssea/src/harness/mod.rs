//! Experiment harness: strict TOML configuration, deterministic seeding,
//! campaign execution over repetitions and parameter grids, aggregation,
//! file output, and the command-line front end.

mod campaign;
pub mod cli;
mod config;
mod presets;

pub use campaign::{
    run_campaign, run_campaign_with, sweep, CampaignOutput, CampaignSummary, PopulationInit,
    RunRecord, StatSummary, SweepCell, SweepOutput, RNG_DESCRIPTION,
};
pub use config::{
    derive_seed, CampaignSection, EngineSection, ExperimentConfig, ProblemSection, SweepSection,
    TopologyModel, TopologySection, ENGINE_STREAM, GRAPH_STREAM, OUTPUT_DIR_ENV,
};
pub use presets::{preset, preset_names, SCALE_FREE_GAMMA_DESK, SCALE_FREE_GAMMA_PAPER, SCALE_FREE_K_MIN};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] crate::topology::GraphError),
    #[error(transparent)]
    EdgeList(#[from] crate::topology::EdgeListError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error(transparent)]
    Problem(#[from] crate::problems::ProblemError),
    #[error("could not build a connected topology in {0} attempts")]
    TopologyRetriesExhausted(usize),
    #[error("sweep grid is empty")]
    EmptySweep,
}
