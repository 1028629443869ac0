//! Simulation toolkit for spatially-structured evolutionary algorithms on
//! complex network topologies: network generators and their structural
//! statistics, bit-string fitness problems, the synchronous
//! replace-if-better engine with optional time-varying edge weights, run
//! observers, and a batch experiment harness.

pub mod engine;
pub mod harness;
pub mod metrics;
pub mod problems;
pub mod topology;

pub use engine::{Engine, EngineConfig, Population, RunOutcome};
pub use problems::{Genotype, ProblemKind, ProblemSpec};
pub use topology::{Graph, GraphStats};
